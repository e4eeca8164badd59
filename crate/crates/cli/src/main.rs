mod exit;
mod options;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use triurn::corpus::{find_template, Template, TEMPLATES};
use triurn::limits::{analyze, Analysis};
use triurn::model::{emit_spec, parse_spec_file, validate, UrnSpec};
use triurn::sim::{run, write_trajectories, RunHeader, Status, TrajectoryFormat, RNG_ALGORITHM};
use triurn::structure::analyze_structure;
use triurn::verify::{run_suites, summary_csv, Suite, SuiteOptions, SuiteReport};

use exit::{Failure, Outcome};
use options::{split_template_args, Format, Mode, RunOptions, SimOptions};

#[derive(Parser)]
#[command(name = "triurn", version, about = "Analyze and verify triangular generalized Polya urns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structure and limit report of a spec as JSON.
    Analyze {
        spec: PathBuf,
        #[arg(long, env = "TRIURN_OUT")]
        out: Option<PathBuf>,
    },
    /// Simulate replicates and write their trajectories.
    Simulate {
        spec: PathBuf,
        #[command(flatten)]
        sim: SimOptions,
    },
    /// Run verification suites on a spec file or on every spec in a directory.
    Verify {
        path: PathBuf,
        #[command(flatten)]
        run: RunOptions,
    },
    /// Built-in parameterized specs.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// List the templates with their aliases and parameters.
    List,
    /// Print the spec a template instantiates to.
    Show {
        name: String,
        /// Template parameters as `--name value`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Write one instantiated template to a file, or every default template
    /// to a directory when no name is given.
    Write {
        #[arg(long, env = "TRIURN_OUT")]
        out: PathBuf,
        name: Option<String>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Analyze a template and run its verification bundle. Template
    /// parameters and run options may be mixed.
    Run {
        name: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::IO_PARSE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Analyze { spec, out } => {
            let spec = load(&spec)?;
            let an = analyze_checked(&spec)?;
            emit(out.as_deref(), &pretty(&analysis_json(&spec, &an)))?;
            Ok(Outcome::Passed)
        }
        Command::Simulate { spec, sim } => simulate(&spec, &sim),
        Command::Verify { path, run } => verify(&path, &run),
        Command::Corpus(c) => corpus(c),
    }
}

fn load(path: &Path) -> Result<UrnSpec, Failure> {
    parse_spec_file(path)
        .with_context(|| format!("reading spec {}", path.display()))
        .map_err(Failure::io)
}

pub(crate) fn spec_sha256(spec: &UrnSpec) -> String {
    Sha256::digest(emit_spec(spec).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Rejects cyclic specs before validation so that a cycle always yields the
/// non-triangular exit code.
fn analyze_checked(spec: &UrnSpec) -> Result<Analysis, Failure> {
    analyze_structure(spec).map_err(|e| Failure::from_analysis(e.into()))?;
    analyze(spec).map_err(Failure::from_analysis)
}

fn analysis_json(spec: &UrnSpec, an: &Analysis) -> Value {
    json!({
        "spec_sha256": spec_sha256(spec),
        "report": an.report(),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::io),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout")
            .map_err(Failure::io),
    }
}

fn simulate(path: &Path, sim: &SimOptions) -> Result<Outcome, Failure> {
    let spec = load(path)?;
    let report = validate(&spec);
    analyze_structure(&spec).map_err(|e| Failure::from_analysis(e.into()))?;
    if let Some(v) = report.first_required_failure() {
        return Err(Failure::validation(anyhow::anyhow!(
            "spec fails required assumption {}: {}",
            v.assumption,
            v.message
        )));
    }
    let seed = sim.common.seed_or_announce();
    let plan = sim.plan(seed).map_err(Failure::usage)?;
    eprintln!("simulating {} replicates", plan.replicates);
    let trajectories = run(&spec, &plan).map_err(|e| Failure::io(e.into()))?;
    let truncated = trajectories.iter().filter(|t| t.status() == Status::Truncated).count();
    if truncated > 0 {
        eprintln!("note: {truncated} replicates were truncated at the step cap");
    }
    let header = RunHeader {
        rng: RNG_ALGORITHM.into(),
        seed,
        spec_sha256: spec_sha256(&spec),
        mode: sim.mode.name().into(),
        replicates: plan.replicates,
    };
    let mut buf = Vec::new();
    match sim.common.format.unwrap_or(Format::Csv) {
        Format::Csv => write_trajectories(&mut buf, &header, &trajectories, spec.q(), TrajectoryFormat::Csv),
        Format::Jsonl => write_trajectories(&mut buf, &header, &trajectories, spec.q(), TrajectoryFormat::JsonLines),
        Format::Json => serde_json::to_writer_pretty(
            &mut buf,
            &json!({ "header": header, "truncated": truncated, "trajectories": trajectories }),
        )
        .map_err(io::Error::from),
    }
    .context("formatting trajectories")
    .map_err(Failure::io)?;
    emit(sim.common.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    Ok(Outcome::Passed)
}

struct Verified {
    name: String,
    spec: UrnSpec,
    report: SuiteReport,
    outcome: Outcome,
}

fn run_verification(name: &str, spec: UrnSpec, suites: &[Suite], explicit: bool, opts: &SuiteOptions) -> Result<Verified, Failure> {
    let an = analyze_checked(&spec)?;
    let mut report = SuiteReport {
        results: Vec::new(),
        skipped: Vec::new(),
    };
    let mut inapplicable = false;
    for &suite in suites {
        eprintln!("[{name}] {suite}");
        let part = run_suites(&an, &[suite], opts).map_err(Failure::from_verify)?;
        if part.results.is_empty() && !part.skipped.is_empty() {
            for s in &part.skipped {
                eprintln!("[{name}] {suite} skipped: {}", s.reason);
            }
            inapplicable |= explicit;
        }
        report.results.extend(part.results);
        report.skipped.extend(part.skipped);
    }
    let outcome = if !report.all_passed() {
        Outcome::CheckFailed
    } else if inapplicable {
        Outcome::Inapplicable
    } else {
        Outcome::Passed
    };
    Ok(Verified {
        name: name.to_string(),
        spec,
        report,
        outcome,
    })
}

fn verified_json(v: &Verified, opts: &SuiteOptions) -> Value {
    json!({
        "spec": v.name,
        "spec_sha256": spec_sha256(&v.spec),
        "seed": opts.seed,
        "rng": RNG_ALGORITHM,
        "outcome": v.outcome.label(),
        "results": v.report.results,
        "skipped": v.report.skipped,
    })
}

fn render(verified: &[Verified], opts: &SuiteOptions, format: Format, aggregate: bool) -> String {
    match format {
        Format::Json if aggregate => pretty(&json!({
            "seed": opts.seed,
            "specs": verified.iter().map(|v| verified_json(v, opts)).collect::<Vec<_>>(),
        })),
        Format::Json => pretty(&verified_json(&verified[0], opts)),
        Format::Jsonl => {
            let mut out = String::new();
            for v in verified {
                for r in &v.report.results {
                    let mut line = serde_json::to_value(r).expect("results serialize");
                    line["spec"] = json!(v.name);
                    line["spec_sha256"] = json!(spec_sha256(&v.spec));
                    out.push_str(&line.to_string());
                    out.push('\n');
                }
            }
            out
        }
        Format::Csv => {
            let mut out = format!("# seed={} rng={}\n", opts.seed, RNG_ALGORITHM);
            if aggregate {
                out.push_str("spec,check,colour,target,estimate,se,verdict\n");
                for v in verified {
                    for line in summary_csv(&v.report.results).lines().skip(1) {
                        out.push_str(&format!("{},{line}\n", v.name));
                    }
                }
            } else {
                out.push_str(&format!("# spec_sha256={}\n", spec_sha256(&verified[0].spec)));
                out.push_str(&summary_csv(&verified[0].report.results));
            }
            out
        }
    }
}

fn spec_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))
        .map_err(Failure::io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "toml")))
        .collect();
    files.sort();
    Ok(files)
}

fn verify(path: &Path, run: &RunOptions) -> Result<Outcome, Failure> {
    let opts = run.suite_options().map_err(Failure::usage)?;
    let explicit = !run.suite.is_empty();
    let suites: Vec<Suite> = if explicit { run.suite.clone() } else { Suite::ALL.to_vec() };
    let aggregate = path.is_dir();
    let files = if aggregate { spec_files(path)? } else { vec![path.to_path_buf()] };
    let mut verified = Vec::new();
    for file in &files {
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let spec = load(file)?;
        match run_verification(&name, spec, &suites, explicit, &opts) {
            Ok(v) => verified.push(v),
            Err(f) if aggregate => eprintln!("[{name}] error: {:#}", f.error),
            Err(f) => return Err(f),
        }
    }
    if verified.is_empty() {
        return Err(Failure::io(anyhow::anyhow!("no verifiable specs found in {}", path.display())));
    }
    let format = run.common.format.unwrap_or(Format::Json);
    emit(run.common.out.as_deref(), &render(&verified, &opts, format, aggregate))?;
    let errors = files.len() - verified.len();
    let worst = verified.iter().map(|v| v.outcome).max().unwrap_or(Outcome::Passed);
    Ok(if errors > 0 { worst.max(Outcome::CheckFailed) } else { worst })
}

fn instantiate(name: &str, params: &[String]) -> Result<(&'static Template, UrnSpec), Failure> {
    let template = find_template(name).map_err(|e| Failure::io(e.into()))?;
    let (pairs, rest) = split_template_args(template, params).map_err(Failure::usage)?;
    if !rest.is_empty() {
        return Err(Failure::usage(anyhow::anyhow!("unexpected arguments: {}", rest.join(" "))));
    }
    let spec = template.instantiate(&pairs).map_err(Failure::from_corpus)?;
    Ok((template, spec))
}

fn corpus(command: CorpusCommand) -> Result<Outcome, Failure> {
    match command {
        CorpusCommand::List => {
            let mut out = String::new();
            for t in TEMPLATES {
                let params: Vec<String> = t.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                let aliases = if t.aliases.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", t.aliases.join(", "))
                };
                out.push_str(&format!("{}{aliases}\n    {}\n    params: {}\n", t.name, t.summary, params.join(" ")));
            }
            emit(None, &out)?;
            Ok(Outcome::Passed)
        }
        CorpusCommand::Show { name, params } => {
            let (_, spec) = instantiate(&name, &params)?;
            emit(None, &emit_spec(&spec))?;
            Ok(Outcome::Passed)
        }
        CorpusCommand::Write { out, name, params } => {
            match name {
                Some(name) => {
                    let (_, spec) = instantiate(&name, &params)?;
                    emit(Some(&out), &emit_spec(&spec))?;
                }
                None => {
                    fs::create_dir_all(&out)
                        .with_context(|| format!("creating {}", out.display()))
                        .map_err(Failure::io)?;
                    for t in TEMPLATES {
                        emit(Some(&out.join(format!("{}.json", t.name))), &emit_spec(&t.default_spec()))?;
                    }
                }
            }
            Ok(Outcome::Passed)
        }
        CorpusCommand::Run { name, args } => {
            let template = find_template(&name).map_err(|e| Failure::io(e.into()))?;
            let (pairs, rest) = split_template_args(template, &args).map_err(Failure::usage)?;
            let run = RunOptions::parse_from_args(&rest).map_err(Failure::usage)?;
            let spec = template.instantiate(&pairs).map_err(Failure::from_corpus)?;
            let an = analyze_checked(&spec)?;
            let opts = run.suite_options().map_err(Failure::usage)?;
            let explicit = !run.suite.is_empty();
            let suites: Vec<Suite> = if explicit { run.suite.clone() } else { template.suites.to_vec() };
            let v = run_verification(template.name, spec.clone(), &suites, explicit, &opts)?;
            let text = match run.common.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({
                    "template": template.name,
                    "analysis": analysis_json(&spec, &an),
                    "verification": verified_json(&v, &opts),
                })),
                f => render(std::slice::from_ref(&v), &opts, f, false),
            };
            emit(run.common.out.as_deref(), &text)?;
            Ok(v.outcome)
        }
    }
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Discrete => "discrete",
            Mode::Continuous => "continuous",
        }
    }
}
