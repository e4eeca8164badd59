use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use super::laws::ClosedFormLaw;
use super::stats::{chi_square, kolmogorov_smirnov, mean_se, moment_estimate, sample_variance, Estimate};
use crate::error::VerifyError;
use crate::limits::{Analysis, LimitVerdict, Mode, Normalization};
use crate::sim::{run, Checkpoints, Horizon, RunPlan, Status, Trajectory};

pub const MIN_DISTRIBUTION_SAMPLES: usize = 100;
pub const DEFAULT_P_THRESHOLD: f64 = 0.01;

/// Why moment checks refuse unbalanced urns.
pub const UNBALANCED_MOMENTS: &str = "moment convergence is only established for balanced urns; \
in the unbalanced diagonal urn with rates 2 and 1 started from (1, 1), \
even the mean of the normalized second colour is infinite, so no moment target is available";

/// Allowed deviation `max(relative·|target|, se_multiple·se)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub relative: f64,
    pub se_multiple: f64,
}

impl Tolerance {
    pub const fn new(relative: f64, se_multiple: f64) -> Self {
        Tolerance { relative, se_multiple }
    }

    pub const fn moments() -> Self {
        Tolerance::new(0.02, 4.0)
    }

    pub const fn relative(relative: f64) -> Self {
        Tolerance::new(relative, 0.0)
    }

    pub const fn standard_errors(k: f64) -> Self {
        Tolerance::new(0.0, k)
    }

    pub fn allowance(&self, target: f64, se: f64) -> f64 {
        let by_se = if se.is_finite() { self.se_multiple * se } else { 0.0 };
        (self.relative * target.abs()).max(by_se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub check: String,
    pub colour: Option<usize>,
    /// The oracle, as text.
    pub target: String,
    pub target_value: Option<f64>,
    pub estimate: f64,
    pub se: Option<f64>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    /// Absolute allowance for estimate checks, minimum p-value for tests.
    pub tolerance: f64,
    pub pass: bool,
    pub replicates: u64,
    pub horizon: String,
    pub seed: u64,
    pub note: Option<String>,
}

impl VerificationResult {
    fn estimate_check(
        check: &str,
        colour: Option<usize>,
        target: f64,
        est: Estimate,
        tol: Tolerance,
        plan: &RunPlan,
    ) -> Self {
        let allowance = tol.allowance(target, est.se);
        VerificationResult {
            check: check.to_string(),
            colour,
            target: format!("{target}"),
            target_value: Some(target),
            estimate: est.mean,
            se: Some(est.se),
            statistic: None,
            p_value: None,
            tolerance: allowance,
            pass: (est.mean - target).abs() <= allowance,
            replicates: plan.replicates,
            horizon: HorizonLabel(&plan.horizon).to_string(),
            seed: plan.seed,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn with_target_text(mut self, text: impl Into<String>) -> Self {
        self.target = text.into();
        self
    }

    /// Records the run that produced the samples of a distribution check.
    pub fn stamped(mut self, plan: &RunPlan) -> Self {
        self.replicates = plan.replicates;
        self.horizon = HorizonLabel(&plan.horizon).to_string();
        self.seed = plan.seed;
        self
    }
}

struct HorizonLabel<'a>(&'a Horizon);

impl fmt::Display for HorizonLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Horizon::Discrete { steps } => write!(f, "n={steps}"),
            Horizon::Continuous { t_max, .. } => write!(f, "t={t_max}"),
        }
    }
}

/// Summary table with one row per result.
pub fn summary_csv(results: &[VerificationResult]) -> String {
    let mut out = String::from("check,colour,target,estimate,se,verdict\n");
    for r in results {
        let colour = r.colour.map(|c| c.to_string()).unwrap_or_default();
        let se = r.se.map(|s| s.to_string()).unwrap_or_default();
        let target = r.target.replace(',', ";");
        let verdict = if r.pass { "pass" } else { "fail" };
        out.push_str(&format!("{},{colour},{target},{},{se},{verdict}\n", r.check, r.estimate));
    }
    out
}

fn horizon_value(plan: &RunPlan) -> f64 {
    match plan.horizon {
        Horizon::Discrete { steps } => steps as f64,
        Horizon::Continuous { t_max, .. } => t_max,
    }
}

fn is_discrete(plan: &RunPlan) -> bool {
    matches!(plan.horizon, Horizon::Discrete { .. })
}

/// The growth normalization matching the horizon of `plan`.
fn growth(an: &Analysis, i: usize, plan: &RunPlan) -> Result<Normalization, VerifyError> {
    let mode = if is_discrete(plan) { Mode::Discrete } else { Mode::Continuous };
    an.normalization(i, mode)
        .map_err(|e| VerifyError::Inapplicable(e.to_string()))
}

fn eval(norm: &Normalization, at: f64) -> f64 {
    match norm {
        Normalization::Discrete { .. } => norm.eval_discrete(at),
        Normalization::Continuous { .. } => norm.eval_continuous(at),
    }
}

fn checkpoint_at(tr: &Trajectory, k: usize) -> &crate::sim::Checkpoint {
    &tr.checkpoints[k.min(tr.checkpoints.len() - 1)]
}

fn usable_verdict(an: &Analysis, i: usize) -> Result<&LimitVerdict, VerifyError> {
    match &an.verdicts[i] {
        LimitVerdict::Extinct => Err(VerifyError::Inapplicable(format!(
            "colour {i} has lambda* < 0 and dies out"
        ))),
        LimitVerdict::Unsupported { reason } => Err(VerifyError::Inapplicable(format!(
            "{reason}; only distribution and non-convergence checks apply"
        ))),
        v => Ok(v),
    }
}

/// Replicates on which the limit of colour `i` is claimed: all of them, or,
/// for a possibly-zero verdict, those that did not go extinct and whose
/// subtracting ancestors are still present.
fn survivors<'a>(
    an: &Analysis,
    i: usize,
    trajectories: &'a [Trajectory],
) -> Result<(Vec<&'a Trajectory>, Option<String>), VerifyError> {
    let total = trajectories.len();
    let extinct = trajectories
        .iter()
        .filter(|t| matches!(t.status(), Status::Extinct { .. }))
        .count();
    match &an.verdicts[i] {
        LimitVerdict::PossiblyZero { cause, .. } => {
            let kept: Vec<&Trajectory> = trajectories
                .iter()
                .filter(|t| !matches!(t.status(), Status::Extinct { .. }))
                .filter(|t| cause.iter().all(|&j| t.last.x[j] > 0.0))
                .collect();
            let note = format!(
                "conditioned on survival: {} of {total} replicates survived ({:.4})",
                kept.len(),
                kept.len() as f64 / total.max(1) as f64
            );
            Ok((kept, Some(note)))
        }
        _ => {
            if 2 * extinct > total {
                return Err(VerifyError::ExtinctMajority { extinct, total });
            }
            let kept = trajectories
                .iter()
                .filter(|t| !matches!(t.status(), Status::Extinct { .. }))
                .collect();
            let note = (extinct > 0).then(|| format!("{extinct} of {total} replicates went extinct and were dropped"));
            Ok((kept, note))
        }
    }
}

fn require_samples(got: usize, needed: usize) -> Result<(), VerifyError> {
    if got < needed {
        Err(VerifyError::InsufficientSamples { got, needed })
    } else {
        Ok(())
    }
}

fn half_and_full(plan: &RunPlan) -> RunPlan {
    let h = horizon_value(plan);
    let half = if is_discrete(plan) { (h / 2.0).floor().max(1.0) } else { h / 2.0 };
    plan.clone().with_checkpoints(Checkpoints::List(vec![half, h]))
}

/// Checks `X_{ni}` under its normalization. A deterministic limit is compared
/// with the exact value; otherwise the normalized value must be stable between
/// half the horizon and the horizon and positive on every replicate.
pub fn check_convergence(
    an: &Analysis,
    i: usize,
    plan: &RunPlan,
    tol: Tolerance,
) -> Result<VerificationResult, VerifyError> {
    let verdict = usable_verdict(an, i)?;
    let norm = growth(an, i, plan)?;
    let plan = half_and_full(plan);
    let trajectories = run(&an.spec, &plan)?;
    let (kept, note) = survivors(an, i, &trajectories)?;
    require_samples(kept.len(), 2)?;
    let positions = plan.checkpoints.positions(horizon_value(&plan), is_discrete(&plan));
    let (h_half, h_full) = (positions[0], *positions.last().expect("nonempty"));
    let full: Vec<f64> = kept
        .iter()
        .map(|t| checkpoint_at(t, 1).x[i] / eval(&norm, h_full))
        .collect();

    let value = if is_discrete(&plan) {
        verdict.deterministic_value()
    } else {
        None
    };
    let result = if let Some(v) = value {
        VerificationResult::estimate_check("convergence", Some(i), v.to_f64(), mean_se(&full), tol, &plan)
            .with_target_text(format!("{v}"))
    } else {
        let diffs: Vec<f64> = kept
            .iter()
            .zip(&full)
            .map(|(t, y)| y - checkpoint_at(t, 0).x[i] / eval(&norm, h_half))
            .collect();
        let est_full = mean_se(&full);
        let est_diff = mean_se(&diffs);
        let allowance = tol.allowance(est_full.mean, est_diff.se);
        let positive = full.iter().all(|&y| y > 0.0) || verdict.is_possibly_zero();
        VerificationResult {
            check: "convergence".into(),
            colour: Some(i),
            target: "stable between half horizon and horizon, positive".into(),
            target_value: Some(est_full.mean - est_diff.mean),
            estimate: est_full.mean,
            se: Some(est_full.se),
            statistic: Some(est_diff.mean),
            p_value: None,
            tolerance: allowance,
            pass: est_diff.mean.abs() <= allowance && positive,
            replicates: plan.replicates,
            horizon: HorizonLabel(&plan.horizon).to_string(),
            seed: plan.seed,
            note: None,
        }
    };
    Ok(match note {
        Some(n) => result.with_note(n),
        None => result,
    })
}

/// Checks that the total activity divided by `n` tends to the largest rate.
pub fn check_total_activity(an: &Analysis, plan: &RunPlan, tol: Tolerance) -> Result<VerificationResult, VerifyError> {
    let lh = &an.structure.exponents.lambda_hat;
    if !lh.is_positive() {
        return Err(VerifyError::Inapplicable("total activity grows linearly only when lambda hat > 0".into()));
    }
    let Horizon::Discrete { steps } = plan.horizon else {
        return Err(VerifyError::Inapplicable("total activity check runs in discrete time".into()));
    };
    let trajectories = run(&an.spec, plan)?;
    let a: Vec<f64> = an.spec.colours.iter().map(|c| c.activity.to_f64()).collect();
    let samples: Vec<f64> = trajectories
        .iter()
        .filter(|t| !matches!(t.status(), Status::Extinct { .. }))
        .map(|t| t.last.x.iter().zip(&a).map(|(x, a)| x * a).sum::<f64>() / steps as f64)
        .collect();
    require_samples(samples.len(), 2)?;
    Ok(VerificationResult::estimate_check(
        "total_activity",
        None,
        lh.to_f64(),
        mean_se(&samples),
        tol,
        plan,
    ))
}

/// Empirical moments of normalized `X_{ni}` against a closed-form law.
/// Order `r` uses `r` times the relative part of `tol`.
pub fn check_moments(
    an: &Analysis,
    i: usize,
    law: &ClosedFormLaw,
    orders: &[f64],
    plan: &RunPlan,
    tol: Tolerance,
) -> Result<Vec<VerificationResult>, VerifyError> {
    if !an.validation.is_balanced() {
        return Err(VerifyError::Inapplicable(UNBALANCED_MOMENTS.into()));
    }
    if !is_discrete(plan) {
        return Err(VerifyError::Inapplicable("moment checks use the discrete-time urn".into()));
    }
    let targets: Vec<f64> = orders.iter().map(|&r| law.moment(r)).collect::<Result<_, _>>()?;
    let norm = growth(an, i, plan)?;
    let n = horizon_value(plan);
    let trajectories = run(&an.spec, plan)?;
    let (kept, note) = survivors(an, i, &trajectories)?;
    require_samples(kept.len(), 2)?;
    let samples: Vec<f64> = kept.iter().map(|t| t.last.x[i] / eval(&norm, n)).collect();
    Ok(orders
        .iter()
        .zip(targets)
        .map(|(&r, target)| {
            let order_tol = Tolerance::new(tol.relative * r.max(1.0), tol.se_multiple);
            let res = VerificationResult::estimate_check(
                &format!("moment_{r}"),
                Some(i),
                target,
                moment_estimate(&samples, r),
                order_tol,
                plan,
            )
            .with_target_text(format!("E Y^{r} = {target} for {}", law.describe()));
            match &note {
                Some(n) => res.with_note(n.clone()),
                None => res,
            }
        })
        .collect())
}

/// Goodness of fit of `samples` to `law`: chi-square for integer-valued laws,
/// Kolmogorov–Smirnov otherwise. The returned result carries no run budget;
/// use [`VerificationResult::stamped`] to attach one.
pub fn check_distribution(
    samples: &[f64],
    law: &ClosedFormLaw,
    threshold: f64,
) -> Result<VerificationResult, VerifyError> {
    require_samples(samples.len(), MIN_DISTRIBUTION_SAMPLES)?;
    law.validate()?;
    let fit = if law.is_discrete() {
        if let Some(bad) = samples.iter().find(|x| **x < 0.0 || x.fract() != 0.0) {
            return Err(VerifyError::Inapplicable(format!(
                "sample {bad} is not a nonnegative integer but the law is discrete"
            )));
        }
        let ints: Vec<u64> = samples.iter().map(|&x| x as u64).collect();
        let pmf = |k| law.pmf(k).unwrap_or(0.0);
        chi_square(&ints, pmf)
    } else {
        law.cdf(0.0)?;
        kolmogorov_smirnov(samples, |y| law.cdf(y).unwrap_or(f64::NAN))
    };
    let est = mean_se(samples);
    let mean_target = law.mean().ok();
    Ok(VerificationResult {
        check: if law.is_discrete() { "distribution_chi_square" } else { "distribution_ks" }.into(),
        colour: None,
        target: law.describe(),
        target_value: mean_target,
        estimate: est.mean,
        se: Some(est.se),
        statistic: Some(fit.statistic),
        p_value: Some(fit.p_value),
        tolerance: threshold,
        pass: fit.p_value >= threshold,
        replicates: samples.len() as u64,
        horizon: String::new(),
        seed: 0,
        note: fit.dof.map(|d| format!("{d} degrees of freedom")),
    })
}

/// What a law describes: the raw count at the horizon, or the count under
/// the colour's growth normalization.
fn observable(an: &Analysis, i: usize, law: &ClosedFormLaw, plan: &RunPlan, tr: &Trajectory) -> Result<f64, VerifyError> {
    let x = tr.last.x[i];
    if law.is_discrete() {
        return Ok(x);
    }
    let norm = growth(an, i, plan)?;
    Ok(x / eval(&norm, horizon_value(plan)))
}

/// Simulates `plan` and tests colour `i` at the horizon against `law`.
pub fn check_distribution_of_colour(
    an: &Analysis,
    i: usize,
    law: &ClosedFormLaw,
    plan: &RunPlan,
    threshold: f64,
) -> Result<VerificationResult, VerifyError> {
    let trajectories = run(&an.spec, plan)?;
    let samples: Vec<f64> = trajectories
        .iter()
        .map(|t| observable(an, i, law, plan, t))
        .collect::<Result<_, _>>()?;
    let mut res = check_distribution(&samples, law, threshold)?.stamped(plan);
    res.colour = Some(i);
    Ok(res)
}

/// `E X(t)` for the continuous-time urn: `x₀ᵀ exp(tM)` with `M_{jk} = a_j r_{jk}`.
pub fn expected_composition(an: &Analysis, t: f64) -> Vec<f64> {
    let q = an.q();
    let m = DMatrix::from_fn(q, q, |j, k| {
        an.spec.colours[j].activity.to_f64() * an.spec.rows[j].mean(k).to_f64() * t
    });
    let e = m.exp();
    let x: Vec<f64> = an.spec.colours.iter().map(|c| c.initial.to_f64()).collect();
    (0..q).map(|k| (0..q).map(|j| x[j] * e[(j, k)]).sum()).collect()
}

/// Sample means of `e^{-λᵢt} Xᵢ(t)` at each time compared with the exact
/// expectation. The statistic is the largest standardized deviation.
pub fn check_martingale(
    an: &Analysis,
    i: usize,
    times: &[f64],
    plan: &RunPlan,
    tol: Tolerance,
) -> Result<VerificationResult, VerifyError> {
    let mut times: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let t_max = *times
        .last()
        .ok_or_else(|| VerifyError::Inapplicable("no positive times given".into()))?;
    let mut plan = plan.clone().with_checkpoints(Checkpoints::List(times.clone()));
    plan.horizon = Horizon::Continuous { t_max, step_cap: None };
    let trajectories = run(&an.spec, &plan)?;
    require_samples(trajectories.len(), 2)?;
    let rate = an.structure.exponents.lambda[i].to_f64();

    let mut worst = 0.0f64;
    let mut last = (f64::NAN, mean_se(&[]));
    let mut pass = true;
    for (k, &t) in times.iter().enumerate() {
        let scale = (-rate * t).exp();
        let samples: Vec<f64> = trajectories.iter().map(|tr| checkpoint_at(tr, k).x[i] * scale).collect();
        let est = mean_se(&samples);
        let target = expected_composition(an, t)[i] * scale;
        let z = if est.se > 0.0 {
            (est.mean - target).abs() / est.se
        } else if (est.mean - target).abs() <= 1e-9 * target.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
        pass &= (est.mean - target).abs() <= tol.allowance(target, est.se).max(1e-9 * target.abs().max(1.0));
        last = (target, est);
    }
    Ok(VerificationResult {
        check: "martingale".into(),
        colour: Some(i),
        target: format!("E e^(-lambda t) X(t) = {} at t = {t_max}", last.0),
        target_value: Some(last.0),
        estimate: last.1.mean,
        se: Some(last.1.se),
        statistic: Some(worst),
        p_value: None,
        tolerance: tol.se_multiple,
        pass,
        replicates: plan.replicates,
        horizon: HorizonLabel(&plan.horizon).to_string(),
        seed: plan.seed,
        note: Some(format!("times {times:?}")),
    })
}

/// The ratio of draws to balls of colour `i` at the horizon, in the form the
/// analysis predicts.
pub fn check_drawn_ratio(an: &Analysis, i: usize, plan: &RunPlan, tol: Tolerance) -> Result<VerificationResult, VerifyError> {
    usable_verdict(an, i)?;
    let Horizon::Discrete { steps } = plan.horizon else {
        return Err(VerifyError::Inapplicable("drawn-colour ratios are checked in discrete time".into()));
    };
    let pred = an.drawn(i).map_err(|e| VerifyError::Inapplicable(e.to_string()))?;
    let e = &an.structure.exponents;
    let n = steps as f64;
    let denominator = if e.lambda_star[i].is_positive() {
        1.0
    } else if e.lambda_hat.is_positive() {
        n.ln()
    } else {
        let k0 = e.kappa_hat0.expect("defined when lambda hat is zero") as f64;
        n.powf(1.0 / k0)
    };
    let trajectories = run(&an.spec, plan)?;
    let (kept, note) = survivors(an, i, &trajectories)?;
    let samples: Vec<f64> = kept
        .iter()
        .filter(|t| t.last.x[i] > 0.0)
        .map(|t| t.last.drawn[i] as f64 / (t.last.x[i] * denominator))
        .collect();
    require_samples(samples.len(), 2)?;
    let res = VerificationResult::estimate_check(
        "drawn_ratio",
        Some(i),
        pred.ratio.to_f64(),
        mean_se(&samples),
        tol,
        plan,
    )
    .with_target_text(format!("{} -> {}", pred.ratio_form, pred.ratio));
    Ok(match note {
        Some(n) => res.with_note(n),
        None => res,
    })
}

/// For a deterministic limit, the variance of the normalized count at the
/// horizon over its variance at half the horizon.
pub fn check_variance_shrinkage(
    an: &Analysis,
    i: usize,
    plan: &RunPlan,
    max_ratio: f64,
) -> Result<VerificationResult, VerifyError> {
    let verdict = usable_verdict(an, i)?;
    let Some(value) = verdict.deterministic_value() else {
        return Err(VerifyError::Inapplicable(format!("colour {i} has a random limit")));
    };
    let norm = growth(an, i, plan)?;
    let plan = half_and_full(plan);
    let positions = plan.checkpoints.positions(horizon_value(&plan), is_discrete(&plan));
    let trajectories = run(&an.spec, &plan)?;
    let (kept, note) = survivors(an, i, &trajectories)?;
    require_samples(kept.len(), 3)?;
    let at = |k: usize| -> Vec<f64> {
        kept.iter()
            .map(|t| checkpoint_at(t, k).x[i] / eval(&norm, positions[k.min(positions.len() - 1)]))
            .collect()
    };
    let (v_half, v_full) = (sample_variance(&at(0)), sample_variance(&at(1)));
    let ratio = if v_half > 0.0 { v_full / v_half } else { 0.0 };
    let res = VerificationResult {
        check: "variance_shrinkage".into(),
        colour: Some(i),
        target: format!("variance ratio < {max_ratio} (limit {value})"),
        target_value: Some(max_ratio),
        estimate: ratio,
        se: None,
        statistic: Some(v_full),
        p_value: None,
        tolerance: max_ratio,
        pass: ratio < max_ratio,
        replicates: plan.replicates,
        horizon: HorizonLabel(&plan.horizon).to_string(),
        seed: plan.seed,
        note: None,
    };
    Ok(match note {
        Some(n) => res.with_note(n),
        None => res,
    })
}

/// Evidence against almost-sure convergence in continuous time: with `Y(t)`
/// the normalized count, the variance of `Y(2t) − Y(t)` must exceed `floor`.
pub fn check_nonconvergence_witness(
    an: &Analysis,
    i: usize,
    t: f64,
    plan: &RunPlan,
    floor: f64,
) -> Result<VerificationResult, VerifyError> {
    let norm = an.normalization(i, Mode::Continuous).map_err(|e| VerifyError::Inapplicable(e.to_string()))?;
    let mut plan = plan.clone().with_checkpoints(Checkpoints::List(vec![t, 2.0 * t]));
    plan.horizon = Horizon::Continuous {
        t_max: 2.0 * t,
        step_cap: None,
    };
    let trajectories = run(&an.spec, &plan)?;
    require_samples(trajectories.len(), 3)?;
    let first: Vec<f64> = trajectories.iter().map(|tr| checkpoint_at(tr, 0).x[i] / eval(&norm, t)).collect();
    if sample_variance(&first) == 0.0 {
        return Err(VerifyError::Inapplicable(format!("colour {i} is constant")));
    }
    let diffs: Vec<f64> = trajectories
        .iter()
        .zip(&first)
        .map(|(tr, y)| checkpoint_at(tr, 1).x[i] / eval(&norm, 2.0 * t) - y)
        .collect();
    let v = sample_variance(&diffs);
    Ok(VerificationResult {
        check: "nonconvergence_witness".into(),
        colour: Some(i),
        target: format!("Var(Y(2t) - Y(t)) > {floor} at t = {t}"),
        target_value: Some(floor),
        estimate: v,
        se: None,
        statistic: Some(v),
        p_value: None,
        tolerance: floor,
        pass: v > floor,
        replicates: plan.replicates,
        horizon: HorizonLabel(&plan.horizon).to_string(),
        seed: plan.seed,
        note: Some("the normalized count keeps fluctuating, so almost-sure convergence is not checked".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::analyze;
    use crate::model::{r, rv, Atom, ReplacementRow, UrnSpec};

    fn two_colour(delta: &str, gamma: &str, alpha: &str) -> Analysis {
        analyze(&UrnSpec::deterministic(
            vec![rv(&[delta, gamma]), rv(&["0", alpha])],
            rv(&["1", "0"]),
        ))
        .unwrap()
    }

    #[test]
    fn tolerance_takes_the_larger_allowance() {
        let t = Tolerance::moments();
        assert_eq!(t.allowance(10.0, 0.01), 0.2);
        assert_eq!(t.allowance(10.0, 0.1), 0.4);
    }

    #[test]
    fn linear_case_converges() {
        let an = two_colour("2", "1", "1");
        let plan = RunPlan::discrete(20_000, 40, 3);
        for i in 0..2 {
            let res = check_convergence(&an, i, &plan, Tolerance::relative(0.05)).unwrap();
            assert!(res.pass, "{res:?}");
            assert_eq!(res.target_value, Some(1.0));
        }
    }

    #[test]
    fn random_limit_is_stable() {
        let an = two_colour("1", "1", "2");
        let res = check_convergence(&an, 0, &RunPlan::discrete(20_000, 200, 5), Tolerance::moments()).unwrap();
        assert!(res.pass, "{res:?}");
    }

    #[test]
    fn unbalanced_moments_are_refused() {
        let an = analyze(&UrnSpec::deterministic(
            vec![rv(&["2", "0"]), rv(&["0", "1"])],
            rv(&["1", "1"]),
        ))
        .unwrap();
        let law = ClosedFormLaw::MittagLeffler { p: 0.5 };
        let err = check_moments(&an, 1, &law, &[1.0], &RunPlan::discrete(10, 10, 0), Tolerance::moments());
        assert!(matches!(err, Err(VerifyError::Inapplicable(m)) if m.contains("infinite")));
    }

    #[test]
    fn expected_composition_of_the_plus_minus_urn() {
        let spec = UrnSpec::from_parts(
            rv(&["1", "1"]),
            rv(&["1", "0"]),
            vec![
                ReplacementRow::deterministic(rv(&["0", "1"])),
                ReplacementRow::new(vec![
                    Atom::new(r("1/2"), rv(&["0", "1"])),
                    Atom::new(r("1/2"), rv(&["0", "-1"])),
                ]),
            ],
        );
        let an = analyze(&spec).unwrap();
        let m = expected_composition(&an, 7.0);
        assert!((m[0] - 1.0).abs() < 1e-12);
        assert!((m[1] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn yule_martingale() {
        let an = analyze(&UrnSpec::deterministic(vec![rv(&["1"])], rv(&["1"]))).unwrap();
        let res = check_martingale(&an, 0, &[1.0, 2.0, 4.0], &RunPlan::discrete(1, 2000, 8), Tolerance::standard_errors(3.0))
            .unwrap();
        assert!(res.pass, "{res:?}");
        assert!((res.target_value.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn drawn_ratio_of_the_top_colour() {
        let an = two_colour("1", "1", "2");
        let res = check_drawn_ratio(&an, 1, &RunPlan::discrete(20_000, 50, 2), Tolerance::relative(0.03)).unwrap();
        assert!(res.pass, "{res:?}");
        assert_eq!(res.target_value, Some(0.5));
    }

    #[test]
    fn distribution_needs_enough_samples() {
        let law = ClosedFormLaw::PoissonMinusMinus { t: 1.0 };
        assert!(matches!(
            check_distribution(&[1.0; 10], &law, 0.01),
            Err(VerifyError::InsufficientSamples { got: 10, needed: 100 })
        ));
    }

    #[test]
    fn summary_table_has_one_row_per_result() {
        let an = two_colour("2", "1", "1");
        let res = check_total_activity(&an, &RunPlan::discrete(1000, 10, 1), Tolerance::relative(0.05)).unwrap();
        let csv = summary_csv(&[res.clone(), res]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("total_activity,,2,"));
    }
}
