use std::collections::hash_map::RandomState;
use std::hash::BuildHasher;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, ValueEnum};

use triurn::corpus::Template;
use triurn::sim::{Checkpoints, Horizon, RunPlan};
use triurn::verify::{Suite, SuiteOptions, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Discrete,
    Continuous,
}

/// Flags shared by every command that draws random numbers.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; generated and printed when absent.
    #[arg(long, env = "TRIURN_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for the replicate runner.
    #[arg(long, env = "TRIURN_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, env = "TRIURN_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "TRIURN_FORMAT")]
    pub format: Option<Format>,
}

impl Common {
    pub fn seed_or_announce(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let seed = RandomState::new().hash_one(std::time::SystemTime::now());
            eprintln!("seed: {seed}");
            seed
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimOptions {
    #[arg(long, value_enum, default_value = "discrete", env = "TRIURN_MODE")]
    pub mode: Mode,
    #[arg(long, env = "TRIURN_STEPS")]
    pub steps: Option<u64>,
    #[arg(long, env = "TRIURN_T_MAX")]
    pub t_max: Option<f64>,
    #[arg(long, env = "TRIURN_REPS")]
    pub reps: Option<u64>,
    /// `final`, `geometric`, `geometric:K` or a comma-separated list.
    #[arg(long, env = "TRIURN_CHECKPOINTS")]
    pub checkpoints: Option<String>,
    /// Stop a continuous run after this many draws.
    #[arg(long, env = "TRIURN_STEP_CAP")]
    pub step_cap: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

pub const SIM_DEFAULT_STEPS: u64 = 10_000;
pub const SIM_DEFAULT_T_MAX: f64 = 10.0;
pub const SIM_DEFAULT_CHECKPOINTS: usize = 20;

pub fn parse_checkpoints(text: &str) -> Result<Checkpoints> {
    let text = text.trim();
    if text == "final" {
        return Ok(Checkpoints::Final);
    }
    if let Some(rest) = text.strip_prefix("geometric") {
        let count = match rest.strip_prefix(':') {
            Some(k) => k.parse().map_err(|_| anyhow!("bad checkpoint count '{k}'"))?,
            None if rest.is_empty() => SIM_DEFAULT_CHECKPOINTS,
            None => bail!("bad checkpoint spec '{text}'"),
        };
        return Ok(Checkpoints::Geometric { count });
    }
    let points = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| anyhow!("bad checkpoint '{p}'")))
        .collect::<Result<Vec<f64>>>()?;
    if points.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        bail!("checkpoints must be positive");
    }
    Ok(Checkpoints::List(points))
}

impl SimOptions {
    pub fn plan(&self, seed: u64) -> Result<RunPlan> {
        let reps = self.reps.unwrap_or(1);
        let mut plan = match self.mode {
            Mode::Discrete => {
                if self.t_max.is_some() || self.step_cap.is_some() {
                    bail!("--t-max and --step-cap need --mode continuous");
                }
                RunPlan::discrete(self.steps.unwrap_or(SIM_DEFAULT_STEPS), reps, seed)
            }
            Mode::Continuous => {
                if self.steps.is_some() {
                    bail!("--steps needs --mode discrete; use --t-max");
                }
                let mut plan = RunPlan::continuous(self.t_max.unwrap_or(SIM_DEFAULT_T_MAX), reps, seed);
                if let (Some(cap), Horizon::Continuous { t_max, .. }) = (self.step_cap, plan.horizon) {
                    plan.horizon = Horizon::Continuous {
                        t_max,
                        step_cap: Some(cap),
                    };
                }
                plan
            }
        };
        let checkpoints = match &self.checkpoints {
            Some(text) => parse_checkpoints(text)?,
            None => Checkpoints::Geometric {
                count: SIM_DEFAULT_CHECKPOINTS,
            },
        };
        plan = plan.with_checkpoints(checkpoints).with_workers(self.common.workers);
        Ok(plan)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Suites to run; repeatable or comma-separated. All suites when absent.
    #[arg(long, value_delimiter = ',', env = "TRIURN_SUITE")]
    pub suite: Vec<Suite>,
    #[arg(long, env = "TRIURN_STEPS")]
    pub steps: Option<u64>,
    #[arg(long, env = "TRIURN_T_MAX")]
    pub t_max: Option<f64>,
    #[arg(long, env = "TRIURN_REPS")]
    pub reps: Option<u64>,
    /// Relative tolerance, optionally followed by a standard-error multiple:
    /// `0.05` or `0.05,4`.
    #[arg(long, env = "TRIURN_TOL")]
    pub tol: Option<String>,
    /// Minimum p-value for distribution tests.
    #[arg(long, env = "TRIURN_P_MIN")]
    pub p_min: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Parser)]
#[command(name = "corpus run", no_binary_name = true)]
struct RunOnly {
    #[command(flatten)]
    run: RunOptions,
}

pub fn parse_tolerance(text: &str) -> Result<Tolerance> {
    let mut parts = text.split(',').map(str::trim);
    let relative: f64 = parts
        .next()
        .unwrap_or_default()
        .parse()
        .map_err(|_| anyhow!("bad tolerance '{text}'"))?;
    let se_multiple = match parts.next() {
        Some(s) => s.parse().map_err(|_| anyhow!("bad tolerance '{text}'"))?,
        None => Tolerance::moments().se_multiple,
    };
    if parts.next().is_some() || !(relative >= 0.0) || !(se_multiple >= 0.0) {
        bail!("bad tolerance '{text}'");
    }
    Ok(Tolerance::new(relative, se_multiple))
}

impl RunOptions {
    pub fn parse_from_args(args: &[String]) -> Result<RunOptions> {
        RunOnly::try_parse_from(args).map(|r| r.run).map_err(|e| anyhow!("{e}"))
    }

    pub fn suite_options(&self) -> Result<SuiteOptions> {
        let mut opts = SuiteOptions::new(self.common.seed_or_announce());
        opts.steps = self.steps;
        opts.t_max = self.t_max;
        opts.replicates = self.reps;
        opts.workers = self.common.workers;
        opts.tolerance = self.tol.as_deref().map(parse_tolerance).transpose()?;
        if let Some(p) = self.p_min {
            if !(0.0..1.0).contains(&p) {
                bail!("--p-min must lie in [0, 1)");
            }
            opts.p_threshold = p;
        }
        Ok(opts)
    }
}

/// Separates `--name value` and `--name=value` pairs naming parameters of
/// `template` from the remaining arguments.
pub fn split_template_args(template: &Template, args: &[String]) -> Result<(Vec<(String, String)>, Vec<String>)> {
    let is_param = |key: &str| template.params.iter().any(|p| p.name == key.replace('-', "_"));
    let mut pairs = Vec::new();
    let mut rest = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            rest.push(arg.clone());
            continue;
        };
        let (key, inline) = match flag.split_once('=') {
            Some((k, v)) => (k, Some(v.to_string())),
            None => (flag, None),
        };
        if !is_param(key) {
            rest.push(arg.clone());
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().cloned().ok_or_else(|| anyhow!("--{key} needs a value"))?,
        };
        pairs.push((key.replace('-', "_"), value));
    }
    Ok((pairs, rest))
}
