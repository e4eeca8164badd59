use serde::Serialize;

use super::{CoefficientTable, SymbolicValue};
use crate::error::AnalysisError;
use crate::model::{UrnSpec, ValidationReport};
use crate::rational::Rational;
use crate::structure::{analyze_structure, extend_dummy_iota, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitVerdict {
    DeterministicExact { value: SymbolicValue },
    AbsolutelyContinuous,
    /// The inner verdict holds on the event that the urn survives.
    PossiblyZero { inner: Box<LimitVerdict>, cause: Vec<usize> },
    Extinct,
    Unsupported { reason: String },
}

impl LimitVerdict {
    /// The deterministic value, looking through a `PossiblyZero` wrapper.
    pub fn deterministic_value(&self) -> Option<&SymbolicValue> {
        match self {
            LimitVerdict::DeterministicExact { value } => Some(value),
            LimitVerdict::PossiblyZero { inner, .. } => inner.deterministic_value(),
            _ => None,
        }
    }

    pub fn is_possibly_zero(&self) -> bool {
        matches!(self, LimitVerdict::PossiblyZero { .. })
    }
}

/// Everything `classify_limits` reads.
pub struct LimitInputs<'a> {
    pub spec: &'a UrnSpec,
    pub validation: &'a ValidationReport,
    pub base: &'a Structure,
    /// Structure of the spec extended by the draw-counting colour, which sits
    /// at index `spec.q()`.
    pub extended: &'a Structure,
    /// Coefficients of the extended spec.
    pub coefficients: &'a CoefficientTable,
}

impl LimitInputs<'_> {
    fn dummy(&self) -> usize {
        self.spec.q()
    }

    /// `Σ_{k ∈ A_i} c_{ik} x_{0k}`, the continuous-time constant of a colour
    /// whose leaders all have rate zero.
    fn static_constant(&self, i: usize) -> Rational {
        let x = self.spec.initial();
        self.coefficients.c[i].iter().map(|(&k, c)| c * &x[k]).sum()
    }
}

pub fn classify_limits(inp: &LimitInputs<'_>) -> Vec<LimitVerdict> {
    let q = inp.spec.q();
    let e = &inp.base.exponents;
    let a7_failed = inp
        .validation
        .violations
        .iter()
        .any(|v| v.assumption == crate::model::Assumption::A7);
    let minimal_subtracting: Vec<usize> = inp
        .validation
        .q_minus
        .iter()
        .copied()
        .filter(|&j| inp.base.graph.parents[j].is_empty())
        .collect();

    (0..q)
        .map(|i| {
            if e.lambda_star[i].is_negative() {
                return LimitVerdict::Extinct;
            }
            if a7_failed {
                return LimitVerdict::Unsupported {
                    reason: "a colour with subtractions has lambda* <= 0; the strong laws do not cover this urn"
                        .into(),
                };
            }
            let verdict = classify_one(inp, i);
            let cause: Vec<usize> = minimal_subtracting
                .iter()
                .copied()
                .filter(|&j| inp.base.graph.precedes_eq(j, i))
                .collect();
            if cause.is_empty() {
                verdict
            } else {
                LimitVerdict::PossiblyZero {
                    inner: Box::new(verdict),
                    cause,
                }
            }
        })
        .collect()
}

fn classify_one(inp: &LimitInputs<'_>, i: usize) -> LimitVerdict {
    let e = &inp.base.exponents;
    let lh = &e.lambda_hat;
    let ls = &e.lambda_star[i];
    let zero = inp.dummy();

    if lh.is_zero() {
        let k0 = e.kappa_hat0.expect("defined when lambda hat is zero");
        let exponent = -Rational::from(e.kappa[i] as i64) / Rational::from(k0 as i64);
        return LimitVerdict::DeterministicExact {
            value: SymbolicValue::new(inp.static_constant(i), inp.static_constant(zero), exponent),
        };
    }
    if ls.is_zero() {
        let value = inp.static_constant(i) / lh.pow(e.kappa[i] as i32);
        return LimitVerdict::DeterministicExact {
            value: SymbolicValue::rational(value),
        };
    }
    if ls < lh {
        return LimitVerdict::AbsolutelyContinuous;
    }

    let top: Vec<usize> = inp.base.roles.leaders().filter(|&k| e.lambda[k] == *lh).collect();
    let c = inp.coefficients;
    let proportional = top.iter().all(|&k| {
        top.iter()
            .all(|&l| c.get(i, k) * c.get(zero, l) == c.get(i, l) * c.get(zero, k))
    });
    let nu = *c.c[i].keys().next().expect("every colour has an ancestor leader");
    if !proportional || c.get(zero, nu).is_zero() {
        return LimitVerdict::AbsolutelyContinuous;
    }
    let gamma = &e.gamma.as_ref().expect("defined when lambda hat is positive")[i];
    let g = gamma.to_i64().expect("gamma is an integer at the top rate");
    let value = lh.pow(-(g as i32)) * c.get(i, nu) / c.get(zero, nu);
    LimitVerdict::DeterministicExact {
        value: SymbolicValue::rational(value),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Discrete,
    Continuous,
    DrawnDiscrete,
    DrawnContinuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Normalization {
    /// `n^{n_pow} · log^{log_pow} n`.
    Discrete { n_pow: Rational, log_pow: Rational },
    /// `t^{t_pow} · e^{exp_rate · t}`.
    Continuous { t_pow: u32, exp_rate: Rational },
}

impl Normalization {
    pub fn eval_discrete(&self, n: f64) -> f64 {
        match self {
            Normalization::Discrete { n_pow, log_pow } => n.powf(n_pow.to_f64()) * n.ln().powf(log_pow.to_f64()),
            Normalization::Continuous { .. } => panic!("continuous normalization evaluated at a step count"),
        }
    }

    pub fn eval_continuous(&self, t: f64) -> f64 {
        match self {
            Normalization::Continuous { t_pow, exp_rate } => t.powi(*t_pow as i32) * (exp_rate.to_f64() * t).exp(),
            Normalization::Discrete { .. } => panic!("discrete normalization evaluated at a time"),
        }
    }
}

fn discrete_form(s: &Structure, i: usize) -> Result<Normalization, AnalysisError> {
    let e = &s.exponents;
    if e.lambda_hat.is_positive() {
        let gamma = e.gamma.as_ref().expect("defined when lambda hat is positive");
        Ok(Normalization::Discrete {
            n_pow: &e.lambda_star[i] / &e.lambda_hat,
            log_pow: gamma[i].clone(),
        })
    } else if let Some(k0) = e.kappa_hat0 {
        Ok(Normalization::Discrete {
            n_pow: Rational::from(e.kappa[i] as i64) / Rational::from(k0 as i64),
            log_pow: Rational::zero(),
        })
    } else {
        Err(AnalysisError::Refused(
            "every rate is negative; the urn dies out and has no growth normalization".into(),
        ))
    }
}

fn continuous_form(s: &Structure, i: usize) -> Normalization {
    Normalization::Continuous {
        t_pow: s.exponents.kappa[i],
        exp_rate: s.exponents.lambda_star[i].clone(),
    }
}

pub fn normalization(spec: &UrnSpec, s: &Structure, i: usize, mode: Mode) -> Result<Normalization, AnalysisError> {
    match mode {
        Mode::Discrete => discrete_form(s, i),
        Mode::Continuous => Ok(continuous_form(s, i)),
        Mode::DrawnDiscrete | Mode::DrawnContinuous => {
            let ext = extend_dummy_iota(spec, i)?;
            let es = analyze_structure(&ext)?;
            let iota = spec.q();
            if mode == Mode::DrawnDiscrete {
                discrete_form(&es, iota)
            } else {
                Ok(continuous_form(&es, iota))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrawnPrediction {
    pub normalization: Normalization,
    /// The ratio whose limit is `ratio`, written in terms of `N`, `X` and `n`.
    pub ratio_form: String,
    pub ratio: SymbolicValue,
    /// Limit of `N_{ni}` under `normalization`, when `X̂_i` is deterministic.
    pub constant: Option<SymbolicValue>,
    /// Present when `constant` is not deterministic.
    pub note: Option<String>,
}

/// Predicted limits for the number of draws of colour `i`.
pub fn predicted_constants_drawn(
    spec: &UrnSpec,
    s: &Structure,
    verdict: &LimitVerdict,
    cx0: &Rational,
    i: usize,
) -> Result<DrawnPrediction, AnalysisError> {
    let e = &s.exponents;
    let a = &s.activities[i];
    let ls = &e.lambda_star[i];
    let k1 = Rational::from(e.kappa[i] as i64 + 1);
    let normalization = normalization(spec, s, i, Mode::DrawnDiscrete)?;
    let (ratio_form, ratio) = if ls.is_positive() {
        ("N/X".to_string(), SymbolicValue::rational(a / ls))
    } else if e.lambda_hat.is_positive() {
        ("N/(X log n)".to_string(), SymbolicValue::rational(a / (&k1 * &e.lambda_hat)))
    } else if ls.is_zero() {
        let k0 = Rational::from(e.kappa_hat0.expect("defined when lambda hat is zero") as i64);
        (
            format!("N/(X n^(1/{k0}))"),
            SymbolicValue::new(a / &k1, cx0.clone(), -k0.recip()),
        )
    } else {
        return Err(AnalysisError::Refused(format!("colour {i} dies out")));
    };
    let constant = verdict.deterministic_value().and_then(|v| ratio.mul(v));
    let note = constant
        .is_none()
        .then(|| format!("N under its normalization tends to {ratio} times the random limit of normalized X"));
    Ok(DrawnPrediction {
        normalization,
        ratio_form,
        ratio,
        constant,
        note,
    })
}
