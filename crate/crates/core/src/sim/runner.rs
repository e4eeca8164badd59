use rayon::prelude::*;
use serde::Serialize;

use super::engine::{CompiledUrn, Replicate, Status, UrnState};
use crate::error::SimError;
use crate::model::UrnSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Horizon {
    Discrete { steps: u64 },
    Continuous { t_max: f64, step_cap: Option<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Checkpoints {
    /// Only the final state.
    Final,
    /// `count` points spaced geometrically up to the horizon.
    Geometric { count: usize },
    List(Vec<f64>),
}

impl Checkpoints {
    /// Checkpoint positions in `n` or `t`, strictly increasing and ending at
    /// the horizon.
    pub fn positions(&self, horizon: f64, integral: bool) -> Vec<f64> {
        let mut pts: Vec<f64> = match self {
            Checkpoints::Final => vec![horizon],
            Checkpoints::Geometric { count } => {
                let count = (*count).max(1);
                let start = if integral { 1.0 } else { horizon / 2f64.powi(count as i32 - 1) };
                let ratio = (horizon / start).powf(1.0 / (count as f64 - 1.0).max(1.0));
                (0..count)
                    .map(|k| {
                        let p = start * ratio.powi(k as i32);
                        if integral {
                            p.round()
                        } else {
                            p
                        }
                    })
                    .chain(std::iter::once(horizon))
                    .collect()
            }
            Checkpoints::List(v) => v.iter().copied().filter(|&p| p <= horizon).chain([horizon]).collect(),
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.retain(|&p| p > 0.0);
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPlan {
    pub horizon: Horizon,
    pub checkpoints: Checkpoints,
    pub replicates: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl RunPlan {
    pub fn discrete(steps: u64, replicates: u64, seed: u64) -> Self {
        RunPlan {
            horizon: Horizon::Discrete { steps },
            checkpoints: Checkpoints::Final,
            replicates,
            seed,
            workers: None,
        }
    }

    pub fn continuous(t_max: f64, replicates: u64, seed: u64) -> Self {
        RunPlan {
            horizon: Horizon::Continuous { t_max, step_cap: None },
            checkpoints: Checkpoints::Final,
            replicates,
            seed,
            workers: None,
        }
    }

    pub fn with_checkpoints(mut self, checkpoints: Checkpoints) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub t: f64,
    pub x: Vec<f64>,
    pub drawn: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub replicate: u64,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub last: UrnState,
}

impl Trajectory {
    pub fn status(&self) -> Status {
        self.last.status
    }
}

/// Evaluates `f` on replicate indices `0..count` on a dedicated pool of
/// `workers` threads and returns the results in index order.
pub fn map_replicates<T, F>(count: u64, workers: Option<usize>, f: F) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn(u64) -> Result<T, SimError> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| SimError::Pool(e.to_string()))?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

fn snapshot(state: &UrnState) -> Checkpoint {
    Checkpoint {
        n: state.step,
        t: state.t,
        x: state.x.clone(),
        drawn: state.drawn.clone(),
    }
}

/// Simulates replicate `index` of `plan`.
pub fn run_replicate(urn: &CompiledUrn, plan: &RunPlan, index: u64) -> Result<Trajectory, SimError> {
    let mut rep = Replicate::new(urn, plan.seed, index);
    let mut checkpoints = Vec::new();
    match plan.horizon {
        Horizon::Discrete { steps } => {
            for p in plan.checkpoints.positions(steps as f64, true) {
                rep.run_to_step(p as u64)?;
                checkpoints.push(snapshot(&rep.state));
            }
        }
        Horizon::Continuous { t_max, step_cap } => {
            for p in plan.checkpoints.positions(t_max, false) {
                rep.run_to_time(p, step_cap)?;
                checkpoints.push(snapshot(&rep.state));
                if rep.state.status == Status::Truncated {
                    break;
                }
            }
        }
    }
    Ok(Trajectory {
        replicate: index,
        seed: plan.seed,
        checkpoints,
        last: rep.state,
    })
}

pub fn run(spec: &UrnSpec, plan: &RunPlan) -> Result<Vec<Trajectory>, SimError> {
    if let Horizon::Continuous { t_max, .. } = plan.horizon {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(SimError::InvalidPlan(format!("t_max must be positive and finite, got {t_max}")));
        }
    }
    let urn = CompiledUrn::new(spec);
    map_replicates(plan.replicates, plan.workers, |k| run_replicate(&urn, plan, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rv;

    fn two_colour() -> UrnSpec {
        UrnSpec::deterministic(vec![rv(&["1", "1"]), rv(&["0", "1"])], rv(&["1", "0"]))
    }

    #[test]
    fn geometric_checkpoints_are_increasing() {
        let pts = Checkpoints::Geometric { count: 6 }.positions(1000.0, true);
        assert_eq!(*pts.last().unwrap(), 1000.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[0], 1.0);
    }

    #[test]
    fn replay_is_identical_across_worker_counts() {
        let plan = RunPlan::discrete(500, 16, 42).with_checkpoints(Checkpoints::Geometric { count: 4 });
        let a = run(&two_colour(), &plan.clone().with_workers(Some(1))).unwrap();
        let b = run(&two_colour(), &plan.with_workers(Some(3))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replicates_do_not_depend_on_schedule() {
        let plan = RunPlan::continuous(2.0, 8, 7);
        let urn = CompiledUrn::new(&two_colour());
        let all = run(&two_colour(), &plan).unwrap();
        for k in (0..8).rev() {
            assert_eq!(run_replicate(&urn, &plan, k).unwrap(), all[k as usize]);
        }
    }

    #[test]
    fn step_cap_truncates() {
        let mut plan = RunPlan::continuous(50.0, 1, 1);
        plan.horizon = Horizon::Continuous {
            t_max: 50.0,
            step_cap: Some(100),
        };
        let t = run(&two_colour(), &plan).unwrap();
        assert_eq!(t[0].status(), Status::Truncated);
        assert_eq!(t[0].last.step, 100);
    }

    #[test]
    fn strict_triangular_second_colour_counts_draws() {
        let mut spec = UrnSpec::deterministic(vec![rv(&["0", "1"]), rv(&["0", "0"])], rv(&["1", "0"]));
        spec.colours[1].activity = crate::Rational::zero();
        let t = run(&spec, &RunPlan::discrete(77, 2, 0)).unwrap();
        assert_eq!(t[1].last.x, vec![1.0, 77.0]);
    }
}
