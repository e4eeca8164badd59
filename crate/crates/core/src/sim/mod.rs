//! Discrete and continuous-time simulation, exact enumeration and output.

mod engine;
mod exact;
mod output;
mod runner;

pub use engine::{CompiledUrn, Replicate, Status, UrnState, RNG_ALGORITHM};
pub use exact::{enumerate_exact, enumerate_exact_limited, exact_mean, MAX_LEAVES};
pub use output::{write_trajectories, RunHeader, TrajectoryFormat};
pub use runner::{map_replicates, run, run_replicate, Checkpoint, Checkpoints, Horizon, RunPlan, Trajectory};
