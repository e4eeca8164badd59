//! Limit coefficients, degeneracy verdicts, normalizations and drawn-colour
//! predictions.

mod coefficients;
mod symbolic;
mod verdicts;

use std::collections::BTreeMap;

use serde::Serialize;

pub use coefficients::{compute_coefficients, CoefficientTable};
pub use symbolic::SymbolicValue;
pub use verdicts::{
    classify_limits, normalization, predicted_constants_drawn, DrawnPrediction, LimitInputs, LimitVerdict, Mode,
    Normalization,
};

use crate::error::AnalysisError;
use crate::model::{validate, Assumption, UrnSpec, ValidationReport};
use crate::rational::Rational;
use crate::structure::{analyze_structure, extend_dummy_zero, Structure, StructureReport};

/// The full analysis pipeline for one spec.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: UrnSpec,
    pub validation: ValidationReport,
    pub structure: Structure,
    /// Structure of the spec with the draw-counting colour appended at index `q`.
    pub extended: Structure,
    pub coefficients: CoefficientTable,
    pub verdicts: Vec<LimitVerdict>,
}

pub fn analyze(spec: &UrnSpec) -> Result<Analysis, AnalysisError> {
    let validation = validate(spec);
    if let Some(v) = validation.first_required_failure() {
        return Err(AnalysisError::Invalid {
            assumption: v.assumption,
            message: v.message.clone(),
        });
    }
    let structure = analyze_structure(spec)?;
    let extended = analyze_structure(&extend_dummy_zero(spec))?;
    let coefficients = compute_coefficients(&extended)?;
    let verdicts = classify_limits(&LimitInputs {
        spec,
        validation: &validation,
        base: &structure,
        extended: &extended,
        coefficients: &coefficients,
    });
    Ok(Analysis {
        spec: spec.clone(),
        validation,
        structure,
        extended,
        coefficients,
        verdicts,
    })
}

impl Analysis {
    pub fn q(&self) -> usize {
        self.spec.q()
    }

    /// Continuous-time limit of the draw-counting colour when every rate is
    /// zero; that limit is then the deterministic `Σ c_{0k} x_{0k}`.
    pub fn static_draw_constant(&self) -> Rational {
        let x = self.spec.initial();
        self.coefficients.c[self.q()].iter().map(|(&k, c)| c * &x[k]).sum()
    }

    pub fn normalization(&self, i: usize, mode: Mode) -> Result<Normalization, AnalysisError> {
        normalization(&self.spec, &self.structure, i, mode)
    }

    pub fn drawn(&self, i: usize) -> Result<DrawnPrediction, AnalysisError> {
        predicted_constants_drawn(
            &self.spec,
            &self.structure,
            &self.verdicts[i],
            &self.static_draw_constant(),
            i,
        )
    }

    /// The deterministic limit of `X_{ni}` under its discrete normalization.
    pub fn limit_value(&self, i: usize) -> Option<&SymbolicValue> {
        self.verdicts[i].deterministic_value()
    }

    pub fn is_classical(&self) -> Option<Rational> {
        let q = self.q();
        let a0 = &self.spec.colours[0].activity;
        let mut b = None;
        for i in 0..q {
            let row = &self.spec.rows[i];
            if !row.is_deterministic() || row.atoms.is_empty() || self.spec.colours[i].activity != *a0 {
                return None;
            }
            let v = &row.atoms[0].v;
            if (0..q).any(|j| j != i && !v[j].is_zero()) || !v[i].is_positive() {
                return None;
            }
            if !self.spec.colours[i].initial.is_positive() {
                return None;
            }
            match &b {
                None => b = Some(v[i].clone()),
                Some(b0) if *b0 != v[i] => return None,
                _ => {}
            }
        }
        (q >= 2).then_some(b).flatten()
    }

    pub fn report(&self) -> AnalysisReport {
        AnalysisReport {
            validation: self.validation.clone(),
            structure: StructureReport::new(&self.spec, &self.structure),
            limits: LimitReport::new(self),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Normalizations {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrete: Option<Normalization>,
    pub continuous: Normalization,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColourLimit {
    pub index: usize,
    pub label: String,
    pub normalization: Normalizations,
    pub verdict: LimitVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_decimal: Option<f64>,
    pub coefficients: BTreeMap<String, Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drawn: Option<DrawnPrediction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub colours: Vec<ColourLimit>,
    pub zero_rate_sublinear_total: bool,
    pub notes: Vec<String>,
}

impl LimitReport {
    pub fn new(an: &Analysis) -> Self {
        let colours = (0..an.q())
            .map(|i| {
                let value = an.limit_value(i);
                ColourLimit {
                    index: i,
                    label: an.spec.label(i),
                    normalization: Normalizations {
                        discrete: an.normalization(i, Mode::Discrete).ok(),
                        continuous: an.normalization(i, Mode::Continuous).expect("always defined"),
                    },
                    verdict: an.verdicts[i].clone(),
                    value: value.map(|v| v.to_string()),
                    value_decimal: value.map(SymbolicValue::to_f64),
                    coefficients: an.coefficients.c[i]
                        .iter()
                        .map(|(&k, c)| (k.to_string(), c.clone()))
                        .collect(),
                    drawn: an.drawn(i).ok(),
                }
            })
            .collect();

        let mut notes = Vec::new();
        if let Some(b) = an.is_classical() {
            notes.push(format!(
                "classical urn: X_n/n converges to {b} times a Dirichlet vector with parameters x0/{b}"
            ));
        }
        if !an.validation.passed(Assumption::A7) {
            notes.push("A7 fails: a colour with subtractions has lambda* <= 0, so no strong law is predicted".into());
        }
        if an.verdicts.iter().any(LimitVerdict::is_possibly_zero) {
            notes.push(
                "A8 fails: a minimal colour has subtractions; verdicts hold on the event that the urn survives".into(),
            );
        }
        let sublinear = an.structure.zero_rate_without_active_maximum();
        if sublinear {
            notes.push(
                "all rates are zero and an active colour attains the largest kappa: the total count is o(n) and no normalization for it is predicted".into(),
            );
        }
        LimitReport {
            colours,
            zero_rate_sublinear_total: sublinear,
            notes,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub validation: ValidationReport,
    pub structure: StructureReport,
    pub limits: LimitReport,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mean_urn, r, rv, Atom, ReplacementRow};

    fn two_colour(delta: &str, gamma: &str, alpha: &str) -> UrnSpec {
        UrnSpec::deterministic(vec![rv(&[delta, gamma]), rv(&["0", alpha])], rv(&["1", "0"]))
    }

    fn value(an: &Analysis, i: usize) -> Rational {
        an.limit_value(i).and_then(SymbolicValue::try_rational).expect("rational deterministic value")
    }

    #[test]
    fn two_colour_alpha_below_delta() {
        let (d, g, a) = (r("3"), r("2"), r("1"));
        let an = analyze(&two_colour("3", "2", "1")).unwrap();
        let denom = &g + &d - &a;
        assert_eq!(value(&an, 0), &d * (&d - &a) / &denom);
        assert_eq!(value(&an, 1), &d * &g / &denom);
    }

    #[test]
    fn two_colour_linear_case_values() {
        let an = analyze(&two_colour("2", "1", "1")).unwrap();
        assert_eq!(value(&an, 0), r("1"));
        assert_eq!(value(&an, 1), r("1"));
        assert_eq!(
            an.normalization(0, Mode::Discrete).unwrap(),
            Normalization::Discrete {
                n_pow: r("1"),
                log_pow: r("0")
            }
        );
    }

    #[test]
    fn two_colour_equal_rates() {
        let an = analyze(&two_colour("3", "2", "3")).unwrap();
        assert_eq!(value(&an, 0), r("9/2"));
        assert_eq!(value(&an, 1), r("3"));
        assert_eq!(
            an.normalization(0, Mode::Discrete).unwrap(),
            Normalization::Discrete {
                n_pow: r("1"),
                log_pow: r("-1")
            }
        );
    }

    #[test]
    fn two_colour_alpha_above_delta() {
        let an = analyze(&two_colour("1", "1", "2")).unwrap();
        assert_eq!(an.verdicts[0], LimitVerdict::AbsolutelyContinuous);
        assert_eq!(value(&an, 1), r("2"));
        let drawn = an.drawn(1).unwrap();
        assert_eq!(drawn.ratio.try_rational(), Some(r("1/2")));
        assert_eq!(drawn.constant.unwrap().try_rational(), Some(r("1")));
        assert_eq!(
            drawn.normalization,
            Normalization::Discrete {
                n_pow: r("1"),
                log_pow: r("0")
            }
        );
    }

    #[test]
    fn three_colour_coefficients() {
        let (alpha, beta, delta, sigma) = (r("3"), r("2"), r("1"), r("6"));
        let spec = UrnSpec::deterministic(
            vec![rv(&["3", "2", "1"]), rv(&["0", "1", "5"]), rv(&["0", "0", "6"])],
            rv(&["1", "0", "0"]),
        );
        let an = analyze(&spec).unwrap();
        assert_eq!(an.coefficients.hat(&an.extended, 1, 0), &beta / (&alpha - &delta));
        let equal = UrnSpec::deterministic(
            vec![rv(&["3", "2", "1"]), rv(&["0", "3", "3"]), rv(&["0", "0", "6"])],
            rv(&["1", "0", "0"]),
        );
        let an = analyze(&equal).unwrap();
        assert_eq!(an.coefficients.hat(&an.extended, 1, 0), &beta / &sigma);
        assert_eq!(an.verdicts[1], LimitVerdict::AbsolutelyContinuous);
    }

    #[test]
    fn strictly_triangular_zero_rate() {
        let mut spec = UrnSpec::deterministic(vec![rv(&["0", "1"]), rv(&["0", "0"])], rv(&["1", "0"]));
        spec.colours[1].activity = Rational::zero();
        let an = analyze(&spec).unwrap();
        assert_eq!(
            an.normalization(1, Mode::Discrete).unwrap(),
            Normalization::Discrete {
                n_pow: r("1"),
                log_pow: r("0")
            }
        );
        assert_eq!(value(&an, 1), r("1"));
        assert_eq!(value(&an, 0), r("1"));
    }

    #[test]
    fn zero_rate_drawn_growth_is_logarithmic() {
        // Colour 0 has rate zero, colour 1 grows at rate 1.
        let spec = UrnSpec::deterministic(vec![rv(&["0", "0"]), rv(&["0", "1"])], rv(&["2", "1"]));
        let an = analyze(&spec).unwrap();
        let d = an.drawn(0).unwrap();
        assert_eq!(d.ratio_form, "N/(X log n)");
        assert_eq!(
            d.normalization,
            Normalization::Discrete {
                n_pow: r("0"),
                log_pow: r("1")
            }
        );
        assert_eq!(d.constant.unwrap().try_rational(), Some(r("2")));
    }

    #[test]
    fn plus_minus_is_unsupported_with_formal_constants() {
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
        assert!(matches!(an.verdicts[1], LimitVerdict::Unsupported { .. }));
        assert_eq!(an.structure.exponents.kappa_hat0, Some(2));
        assert_eq!(an.coefficients.get(1, 0), r("1"));
        assert_eq!(an.coefficients.get(2, 0), r("1/2"));
    }

    #[test]
    fn minus_minus_is_unsupported() {
        let spec = UrnSpec::deterministic(vec![rv(&["0", "1"]), rv(&["0", "-1"])], rv(&["1", "0"]));
        let an = analyze(&spec).unwrap();
        assert_eq!(an.structure.exponents.kappa_hat0, Some(1));
        assert_eq!(an.coefficients.get(1, 0), r("1"));
        assert_eq!(an.coefficients.get(2, 0), r("2"));
        assert!(an.verdicts.iter().all(|v| matches!(v, LimitVerdict::Unsupported { .. })));
    }

    #[test]
    fn minimal_subtraction_colours_wrap_verdicts() {
        let half = r("1/2");
        let one = |i: usize, eta1: i64, eta2: i64, mult: i64| {
            let mut v = vec![Rational::zero(); 4];
            v[i] = Rational::from(mult * eta1 - 1);
            v[2] = Rational::from(eta2);
            Atom::new(&half * &half, v)
        };
        let row = |i: usize, mult: i64| {
            ReplacementRow::new(vec![
                one(i, 0, 0, mult),
                one(i, 0, 1, mult),
                one(i, 1, 0, mult),
                one(i, 1, 1, mult),
            ])
        };
        let spec = UrnSpec::from_parts(
            rv(&["1", "1", "1", "1"]),
            rv(&["1", "1", "0", "1"]),
            vec![
                row(0, 8),
                row(1, 6),
                ReplacementRow::deterministic(rv(&["0", "0", "1", "0"])),
                ReplacementRow::deterministic(rv(&["0", "0", "0", "3"])),
            ],
        );
        let an = analyze(&spec).unwrap();
        assert!(an.verdicts[0].is_possibly_zero());
        assert!(an.verdicts[2].is_possibly_zero());
        assert!(!an.verdicts[3].is_possibly_zero());
        assert_eq!(an.coefficients.get(2, 0), r("1/4"));
    }

    #[test]
    fn scaling_multiplies_values() {
        let spec = two_colour("3", "2", "3");
        let s = r("5/2");
        let a = analyze(&spec).unwrap();
        let b = analyze(&spec.scaled(&s)).unwrap();
        for i in 0..2 {
            assert_eq!(value(&b, i), value(&a, i) * &s);
            assert_eq!(b.normalization(i, Mode::Discrete).unwrap(), a.normalization(i, Mode::Discrete).unwrap());
        }
    }

    #[test]
    fn mean_urn_gives_same_constants() {
        let p = r("1/3");
        let one = Rational::one();
        let spec = UrnSpec::from_parts(
            rv(&["1", "1"]),
            rv(&["1", "0"]),
            vec![
                ReplacementRow::new(vec![
                    Atom::new(p.clone(), rv(&["2", "0"])),
                    Atom::new(&one - &p, rv(&["0", "1"])),
                ]),
                ReplacementRow::deterministic(rv(&["0", "3"])),
            ],
        );
        let a = analyze(&spec).unwrap();
        let m = analyze(&mean_urn(&spec).unwrap()).unwrap();
        assert_eq!(a.verdicts, m.verdicts);
    }

    #[test]
    fn classical_note_and_verdicts() {
        let spec = UrnSpec::deterministic(vec![rv(&["2", "0"]), rv(&["0", "2"])], rv(&["1", "3"]));
        let an = analyze(&spec).unwrap();
        assert!(an.verdicts.iter().all(|v| *v == LimitVerdict::AbsolutelyContinuous));
        let report = an.report();
        assert!(report.limits.notes[0].contains("Dirichlet"));
        assert_eq!(an.drawn(0).unwrap().ratio.try_rational(), Some(r("1/2")));
    }

    #[test]
    fn report_serializes_values_as_strings() {
        let an = analyze(&two_colour("2", "1", "1")).unwrap();
        let json = serde_json::to_string(&an.report()).unwrap();
        assert!(json.contains(r#""n_pow":"1","log_pow":"0""#));
        assert!(json.contains(r#""value":"1""#));
    }
}
