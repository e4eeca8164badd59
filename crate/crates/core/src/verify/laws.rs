use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF, Discrete, Gamma, Poisson};
use statrs::function::gamma::ln_gamma;

use crate::error::LawError;

/// A limit law known in closed form, used as an oracle for simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedFormLaw {
    /// `Γ(shape, scale)`, the limit of `e^{-bt} X(t)` for a Yule colour with
    /// shape `x₀/b` and scale `b`.
    GammaYule { shape: f64, scale: f64 },
    /// Marginal of `b` times a Dirichlet vector with parameters `x/b`: the
    /// limit of `X_{n,component}/n` in the classical urn.
    DirichletClassical { b: f64, x: Vec<f64>, component: usize },
    /// First colour of the two-colour balanced urn `((δ, γ), (0, α))` with
    /// `δ + γ = α`, normalized by `n^{δ/α}`.
    BalancedTwoColourMoments { delta: f64, gamma: f64, alpha: f64, x1: f64, x2: f64 },
    /// First colour of the urn whose white draws add white with probability `p`
    /// and black otherwise, normalized by `n^p`.
    RandomBernoulliMoments { p: f64, x1: f64, x2: f64 },
    MittagLeffler { p: f64 },
    /// Black count at time `t` in continuous time, started from one white ball.
    NegBinomialPlusMinus { t: f64 },
    /// Black count at time `t` in continuous time when black balls are
    /// discarded on drawing, started from one white ball.
    PoissonMinusMinus { t: f64 },
    /// Balanced three-colour urn `((α, β, σ−α−β), (0, δ, σ−δ), (0, 0, σ))`.
    /// `component` 0 is the first colour, 1 the second.
    ThreeColourMoments { alpha: f64, beta: f64, delta: f64, sigma: f64, x: [f64; 3], component: usize },
}

fn positive(name: &str, v: f64) -> Result<(), LawError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LawError::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<(), LawError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(LawError::Domain(format!("{name} must be nonnegative, got {v}")))
    }
}

/// `c^r Γ(a + r) Γ(s) / (Γ(a) Γ(s + r·h))`, the shared shape of the
/// balanced-urn moment formulas.
fn gamma_ratio_moment(c: f64, a: f64, s: f64, h: f64, r: f64) -> f64 {
    (r * c.ln() + ln_gamma(a + r) - ln_gamma(a) + ln_gamma(s) - ln_gamma(s + r * h)).exp()
}

fn nonnegative_order(r: f64) -> Result<(), LawError> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(LawError::UnsupportedOrder { r })
    }
}

/// Moments of order 0, 1 or 2 from a mean and variance.
fn low_order(r: f64, mean: f64, variance: f64) -> Result<f64, LawError> {
    if r == 0.0 {
        Ok(1.0)
    } else if r == 1.0 {
        Ok(mean)
    } else if r == 2.0 {
        Ok(variance + mean * mean)
    } else {
        Err(LawError::UnsupportedOrder { r })
    }
}

impl ClosedFormLaw {
    pub fn validate(&self) -> Result<(), LawError> {
        match self {
            ClosedFormLaw::GammaYule { shape, scale } => {
                positive("shape", *shape)?;
                positive("scale", *scale)
            }
            ClosedFormLaw::DirichletClassical { b, x, component } => {
                positive("b", *b)?;
                if x.len() < 2 || *component >= x.len() {
                    return Err(LawError::Domain("need at least two colours and a valid component".into()));
                }
                x.iter().try_for_each(|&v| positive("initial count", v))
            }
            ClosedFormLaw::BalancedTwoColourMoments { delta, gamma, alpha, x1, x2 } => {
                positive("delta", *delta)?;
                positive("gamma", *gamma)?;
                positive("x1", *x1)?;
                nonnegative("x2", *x2)?;
                if (delta + gamma - alpha).abs() > 1e-12 * alpha.abs().max(1.0) {
                    return Err(LawError::Domain(format!(
                        "balanced form needs delta + gamma = alpha, got {delta} + {gamma} != {alpha}"
                    )));
                }
                Ok(())
            }
            ClosedFormLaw::RandomBernoulliMoments { p, x1, x2 } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(LawError::Domain(format!("p must lie in (0, 1), got {p}")));
                }
                positive("x1", *x1)?;
                nonnegative("x2", *x2)
            }
            ClosedFormLaw::MittagLeffler { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(LawError::Domain(format!("p must lie in (0, 1), got {p}")));
                }
                Ok(())
            }
            ClosedFormLaw::NegBinomialPlusMinus { t } | ClosedFormLaw::PoissonMinusMinus { t } => positive("t", *t),
            ClosedFormLaw::ThreeColourMoments { alpha, beta, delta, sigma, x, component } => {
                positive("delta", *delta)?;
                positive("beta", *beta)?;
                positive("x1", x[0])?;
                nonnegative("x2", x[1])?;
                nonnegative("x3", x[2])?;
                if alpha < delta {
                    return Err(LawError::Domain(format!(
                        "the moment forms need alpha >= delta, got alpha = {alpha}, delta = {delta}"
                    )));
                }
                if *sigma < alpha + beta {
                    return Err(LawError::Domain(format!("sigma must be at least alpha + beta, got {sigma}")));
                }
                if *component > 1 {
                    return Err(LawError::Domain(format!("component must be 0 or 1, got {component}")));
                }
                Ok(())
            }
        }
    }

    /// `E Y^r` for the limit variable `Y`.
    pub fn moment(&self, r: f64) -> Result<f64, LawError> {
        self.validate()?;
        match self {
            ClosedFormLaw::GammaYule { shape, scale } => {
                if r.is_nan() || r <= -shape {
                    return Err(LawError::InfiniteMoment { r, bound: -shape });
                }
                Ok((r * scale.ln() + ln_gamma(shape + r) - ln_gamma(*shape)).exp())
            }
            ClosedFormLaw::DirichletClassical { b, x, component } => {
                nonnegative_order(r)?;
                let a = x[*component] / b;
                let s = x.iter().sum::<f64>() / b;
                Ok(gamma_ratio_moment(*b, a, s, 1.0, r))
            }
            ClosedFormLaw::BalancedTwoColourMoments { delta, alpha, x1, x2, .. } => {
                nonnegative_order(r)?;
                Ok(gamma_ratio_moment(*delta, x1 / delta, (x1 + x2) / alpha, delta / alpha, r))
            }
            ClosedFormLaw::RandomBernoulliMoments { p, x1, x2 } => {
                nonnegative_order(r)?;
                Ok(gamma_ratio_moment(1.0, *x1, x1 + x2, *p, r))
            }
            ClosedFormLaw::MittagLeffler { p } => {
                nonnegative_order(r)?;
                Ok((ln_gamma(r + 1.0) - ln_gamma(1.0 + r * p)).exp())
            }
            ClosedFormLaw::NegBinomialPlusMinus { t } => {
                let variance = t * (t + 2.0) / 2.0;
                low_order(r, *t, variance)
            }
            ClosedFormLaw::PoissonMinusMinus { t } => {
                let mu = 1.0 - (-t).exp();
                low_order(r, mu, mu)
            }
            ClosedFormLaw::ThreeColourMoments { alpha, beta, delta, sigma, x, component } => {
                nonnegative_order(r)?;
                let total: f64 = x.iter().sum();
                let c = match component {
                    0 => *alpha,
                    _ if alpha > delta => alpha * beta / (alpha - delta),
                    _ => alpha * beta / sigma,
                };
                Ok(gamma_ratio_moment(c, x[0] / alpha, total / sigma, alpha / sigma, r))
            }
        }
    }

    pub fn mean(&self) -> Result<f64, LawError> {
        self.moment(1.0)
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            ClosedFormLaw::NegBinomialPlusMinus { .. } | ClosedFormLaw::PoissonMinusMinus { .. }
        )
    }

    /// Distribution function of a continuous law.
    pub fn cdf(&self, y: f64) -> Result<f64, LawError> {
        self.validate()?;
        match self {
            ClosedFormLaw::GammaYule { shape, scale } => {
                let g = Gamma::new(*shape, 1.0 / scale).map_err(|e| LawError::Domain(e.to_string()))?;
                Ok(g.cdf(y))
            }
            ClosedFormLaw::DirichletClassical { b, x, component } => {
                let a = x[*component] / b;
                let rest = x.iter().sum::<f64>() / b - a;
                let beta = Beta::new(a, rest).map_err(|e| LawError::Domain(e.to_string()))?;
                Ok(beta.cdf((y / b).clamp(0.0, 1.0)))
            }
            _ => Err(LawError::NoDistribution),
        }
    }

    /// Probability mass at `k` of a discrete law.
    pub fn pmf(&self, k: u64) -> Result<f64, LawError> {
        self.validate()?;
        match self {
            ClosedFormLaw::NegBinomialPlusMinus { t } => {
                let p = 2.0 / (t + 2.0);
                Ok((k as f64 + 1.0) * p * p * (1.0 - p).powf(k as f64))
            }
            ClosedFormLaw::PoissonMinusMinus { t } => {
                let mu = 1.0 - (-t).exp();
                let po = Poisson::new(mu).map_err(|e| LawError::Domain(e.to_string()))?;
                Ok(po.pmf(k))
            }
            _ => Err(LawError::NoDistribution),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ClosedFormLaw::GammaYule { shape, scale } => format!("Gamma(shape {shape}, scale {scale})"),
            ClosedFormLaw::DirichletClassical { b, x, component } => {
                let a = x[*component] / b;
                let s = x.iter().sum::<f64>() / b;
                format!("{b} * Beta({a}, {})", s - a)
            }
            ClosedFormLaw::BalancedTwoColourMoments { delta, gamma, alpha, x1, x2 } => {
                format!("balanced two-colour limit (delta {delta}, gamma {gamma}, alpha {alpha}, x = ({x1}, {x2}))")
            }
            ClosedFormLaw::RandomBernoulliMoments { p, x1, x2 } => {
                format!("random-replacement limit (p {p}, x = ({x1}, {x2}))")
            }
            ClosedFormLaw::MittagLeffler { p } => format!("Mittag-Leffler({p})"),
            ClosedFormLaw::NegBinomialPlusMinus { t } => format!("NegBinomial(2, {})", 2.0 / (t + 2.0)),
            ClosedFormLaw::PoissonMinusMinus { t } => format!("Poisson({})", 1.0 - (-t).exp()),
            ClosedFormLaw::ThreeColourMoments { component, .. } => format!("three-colour balanced limit of colour {component}"),
        }
    }
}
