//! Closed-form limit laws and Monte Carlo checks of the analysis.

mod checks;
mod detect;
mod laws;
mod stats;
mod suite;

pub use checks::{
    check_convergence, check_distribution, check_distribution_of_colour, check_drawn_ratio, check_martingale,
    check_moments, check_nonconvergence_witness, check_total_activity, check_variance_shrinkage,
    expected_composition, summary_csv, Tolerance, VerificationResult, DEFAULT_P_THRESHOLD,
    MIN_DISTRIBUTION_SAMPLES, UNBALANCED_MOMENTS,
};
pub use detect::{detect_continuous_law, detect_discrete_law};
pub use laws::ClosedFormLaw;
pub use stats::{chi_square, kolmogorov_smirnov, mean_se, moment_estimate, sample_variance, Estimate, GoodnessOfFit};
pub use suite::{run_suites, Skipped, Suite, SuiteOptions, SuiteReport};
