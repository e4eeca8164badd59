use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::checks::*;
use super::detect::{detect_continuous_law, detect_discrete_law};
use crate::error::VerifyError;
use crate::limits::{Analysis, LimitVerdict, Mode, Normalization};
use crate::sim::{Horizon, RunPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Convergence,
    TotalActivity,
    Moments,
    Distribution,
    Martingale,
    DrawnRatio,
    Shrinkage,
    Witness,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Convergence,
        Suite::TotalActivity,
        Suite::Moments,
        Suite::Distribution,
        Suite::Martingale,
        Suite::DrawnRatio,
        Suite::Shrinkage,
        Suite::Witness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Convergence => "convergence",
            Suite::TotalActivity => "total-activity",
            Suite::Moments => "moments",
            Suite::Distribution => "distribution",
            Suite::Martingale => "martingale",
            Suite::DrawnRatio => "drawn-ratio",
            Suite::Shrinkage => "shrinkage",
            Suite::Witness => "witness",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite '{s}'; expected one of {}", names.join(", "))
            })
    }
}

/// Budgets and overrides shared by every check of a suite run. Unset values
/// fall back to per-check defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub steps: Option<u64>,
    pub t_max: Option<f64>,
    pub replicates: Option<u64>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub tolerance: Option<Tolerance>,
    pub p_threshold: f64,
}

impl SuiteOptions {
    pub fn new(seed: u64) -> Self {
        SuiteOptions {
            steps: None,
            t_max: None,
            replicates: None,
            seed,
            workers: None,
            tolerance: None,
            p_threshold: DEFAULT_P_THRESHOLD,
        }
    }
}

pub const DEFAULT_STEPS: u64 = 10_000;
pub const DEFAULT_REPLICATES: u64 = 1_000;
pub const LOG_CORRECTED_STEPS: u64 = 1_000_000;
pub const LOG_CORRECTED_REPLICATES: u64 = 500;
pub const LOG_CORRECTED_TOLERANCE: f64 = 0.10;
pub const SHRINKAGE_MAX_RATIO: f64 = 0.8;
pub const WITNESS_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub suite: Suite,
    pub colour: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub results: Vec<VerificationResult>,
    pub skipped: Vec<Skipped>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

fn log_corrected(an: &Analysis, i: usize) -> bool {
    matches!(
        an.normalization(i, Mode::Discrete),
        Ok(Normalization::Discrete { log_pow, .. }) if !log_pow.is_zero()
    ) || (an.structure.exponents.lambda_star[i].is_zero() && an.structure.exponents.lambda_hat.is_positive())
}

/// A time at which the continuous urn has made roughly `DEFAULT_STEPS` draws.
fn default_time(an: &Analysis) -> f64 {
    let lh = an.structure.exponents.lambda_hat.to_f64();
    if lh > 0.0 {
        let a0: f64 = an
            .spec
            .colours
            .iter()
            .map(|c| c.activity.to_f64() * c.initial.to_f64())
            .sum();
        ((DEFAULT_STEPS as f64 * lh / a0.max(1e-9)).ln() / lh).max(1.0)
    } else {
        20.0
    }
}

struct Planner<'a> {
    an: &'a Analysis,
    opts: &'a SuiteOptions,
}

impl Planner<'_> {
    fn discrete(&self, i: Option<usize>) -> (RunPlan, Option<f64>) {
        let slow = i.is_some_and(|i| log_corrected(self.an, i));
        let steps = self
            .opts
            .steps
            .unwrap_or(if slow { LOG_CORRECTED_STEPS } else { DEFAULT_STEPS });
        let reps = self
            .opts
            .replicates
            .unwrap_or(if slow { LOG_CORRECTED_REPLICATES } else { DEFAULT_REPLICATES });
        let plan = RunPlan::discrete(steps, reps, self.opts.seed).with_workers(self.opts.workers);
        (plan, slow.then_some(LOG_CORRECTED_TOLERANCE))
    }

    fn continuous(&self) -> RunPlan {
        let t = self.opts.t_max.unwrap_or_else(|| default_time(self.an));
        let reps = self.opts.replicates.unwrap_or(DEFAULT_REPLICATES);
        let mut plan = RunPlan::continuous(t, reps, self.opts.seed).with_workers(self.opts.workers);
        plan.horizon = Horizon::Continuous {
            t_max: t,
            step_cap: Some(100 * DEFAULT_STEPS * DEFAULT_STEPS),
        };
        plan
    }

    fn tolerance(&self, default: Tolerance, slow: Option<f64>) -> Tolerance {
        self.opts.tolerance.unwrap_or(match slow {
            Some(rel) => Tolerance::new(rel, default.se_multiple),
            None => default,
        })
    }
}

/// Runs each requested suite on every colour it applies to. Checks that do
/// not apply are listed in `skipped`; any other failure to run is an error.
pub fn run_suites(an: &Analysis, suites: &[Suite], opts: &SuiteOptions) -> Result<SuiteReport, VerifyError> {
    let planner = Planner { an, opts };
    let mut report = SuiteReport {
        results: Vec::new(),
        skipped: Vec::new(),
    };
    let q = an.q();
    for &suite in suites {
        let colours: Vec<Option<usize>> = if suite == Suite::TotalActivity {
            vec![None]
        } else {
            (0..q).map(Some).collect()
        };
        for colour in colours {
            match run_one(&planner, suite, colour) {
                Ok(results) => report.results.extend(results),
                Err(VerifyError::Inapplicable(reason)) => report.skipped.push(Skipped { suite, colour, reason }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

fn run_one(p: &Planner<'_>, suite: Suite, colour: Option<usize>) -> Result<Vec<VerificationResult>, VerifyError> {
    let an = p.an;
    let one = |r: VerificationResult| vec![r];
    match (suite, colour) {
        (Suite::TotalActivity, _) => {
            let (plan, _) = p.discrete(None);
            check_total_activity(an, &plan, p.tolerance(Tolerance::moments(), None)).map(one)
        }
        (_, None) => Ok(Vec::new()),
        (Suite::Convergence, Some(i)) => {
            let (plan, slow) = p.discrete(Some(i));
            check_convergence(an, i, &plan, p.tolerance(Tolerance::moments(), slow)).map(one)
        }
        (Suite::Moments, Some(i)) => {
            if !an.validation.is_balanced() {
                return Err(VerifyError::Inapplicable(UNBALANCED_MOMENTS.into()));
            }
            let law = detect_discrete_law(an, i)
                .ok_or_else(|| VerifyError::Inapplicable(format!("no closed-form law known for colour {i}")))?;
            let (plan, slow) = p.discrete(Some(i));
            check_moments(an, i, &law, &[1.0, 2.0], &plan, p.tolerance(Tolerance::moments(), slow))
        }
        (Suite::Distribution, Some(i)) => {
            let cont = p.continuous();
            let t = match cont.horizon {
                Horizon::Continuous { t_max, .. } => t_max,
                Horizon::Discrete { .. } => unreachable!("continuous plan"),
            };
            if let Some(law) = detect_continuous_law(an, i, t) {
                return check_distribution_of_colour(an, i, &law, &cont, p.opts.p_threshold).map(one);
            }
            match detect_discrete_law(an, i) {
                Some(law) if law.cdf(0.5).is_ok() => {
                    let (plan, _) = p.discrete(Some(i));
                    check_distribution_of_colour(an, i, &law, &plan, p.opts.p_threshold).map(one)
                }
                _ => Err(VerifyError::Inapplicable(format!(
                    "no closed-form distribution known for colour {i}"
                ))),
            }
        }
        (Suite::Martingale, Some(i)) => {
            let plan = p.continuous();
            let t = match plan.horizon {
                Horizon::Continuous { t_max, .. } => t_max,
                Horizon::Discrete { .. } => unreachable!("continuous plan"),
            };
            let tol = p.opts.tolerance.unwrap_or(Tolerance::standard_errors(3.0));
            check_martingale(an, i, &[t / 4.0, t / 2.0, t], &plan, tol).map(one)
        }
        (Suite::DrawnRatio, Some(i)) => {
            let (plan, slow) = p.discrete(Some(i));
            check_drawn_ratio(an, i, &plan, p.tolerance(Tolerance::moments(), slow)).map(one)
        }
        (Suite::Shrinkage, Some(i)) => {
            let (plan, _) = p.discrete(Some(i));
            check_variance_shrinkage(an, i, &plan, SHRINKAGE_MAX_RATIO).map(one)
        }
        (Suite::Witness, Some(i)) => {
            if !matches!(an.verdicts[i], LimitVerdict::Unsupported { .. }) {
                return Err(VerifyError::Inapplicable(format!(
                    "the strong law covers colour {i}; no non-convergence witness needed"
                )));
            }
            let plan = p.continuous();
            let t = p.opts.t_max.unwrap_or(20.0);
            check_nonconvergence_witness(an, i, t, &plan, WITNESS_FLOOR).map(one)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::analyze;
    use crate::model::{rv, UrnSpec};

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("drawn_ratio".parse::<Suite>().unwrap(), Suite::DrawnRatio);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn unbalanced_moments_are_skipped_with_a_reason() {
        let an = analyze(&UrnSpec::deterministic(vec![rv(&["2", "0"]), rv(&["0", "1"])], rv(&["1", "1"]))).unwrap();
        let report = run_suites(&an, &[Suite::Moments], &SuiteOptions::new(1)).unwrap();
        assert!(report.results.is_empty());
        assert_eq!(report.skipped.len(), 2);
    }

    #[test]
    fn small_linear_bundle_passes() {
        let an = analyze(&UrnSpec::deterministic(vec![rv(&["2", "1"]), rv(&["0", "1"])], rv(&["1", "0"]))).unwrap();
        let mut opts = SuiteOptions::new(4);
        opts.steps = Some(20_000);
        opts.replicates = Some(100);
        let report = run_suites(&an, &[Suite::Convergence, Suite::TotalActivity, Suite::DrawnRatio], &opts).unwrap();
        assert_eq!(report.results.len(), 5);
        assert!(report.all_passed(), "{:#?}", report.results);
    }
}
