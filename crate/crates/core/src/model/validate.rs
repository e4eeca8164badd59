use std::fmt;

use serde::Serialize;

use super::{mean_matrix, Clause, UrnSpec};
use crate::rational::Rational;
use crate::structure::{build_graph, compute_exponents};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Assumption {
    /// Nonnegative activities and initial counts.
    A0,
    /// Positive initial total activity.
    A1,
    /// Zero activity implies a zero replacement row.
    A2,
    /// Every colour is present initially or can be produced by another.
    A3,
    /// Finite second moments of the replacements.
    A4,
    /// Per-colour subtraction clause.
    #[serde(rename = "A5'")]
    A5Prime,
    /// Total activity never vanishes.
    A6,
    /// Subtraction colours have positive λ*.
    A7,
    /// No minimal colour has subtractions.
    A8,
}

impl Assumption {
    /// Assumptions without which no analysis or simulation is attempted.
    pub const REQUIRED: [Assumption; 5] = [
        Assumption::A0,
        Assumption::A1,
        Assumption::A2,
        Assumption::A3,
        Assumption::A5Prime,
    ];
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assumption::A0 => "A0",
            Assumption::A1 => "A1",
            Assumption::A2 => "A2",
            Assumption::A3 => "A3",
            Assumption::A4 => "A4",
            Assumption::A5Prime => "A5'",
            Assumption::A6 => "A6",
            Assumption::A7 => "A7",
            Assumption::A8 => "A8",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Guaranteed,
    RuntimeChecked,
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub status: CheckStatus,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub assumption: Assumption,
    pub colours: Vec<usize>,
    pub message: String,
}

/// Outcome of the subtraction condition for one colour. Exactly one of
/// these is recorded per colour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum A5Evidence {
    ClauseA,
    ClauseB,
    Violation { message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum A6Status {
    Guaranteed,
    RuntimeChecked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
    pub violations: Vec<Violation>,
    pub balance: Option<Rational>,
    pub q_minus: Vec<usize>,
    pub a5_evidence: Vec<A5Evidence>,
    pub a6: A6Status,
}

impl ValidationReport {
    pub fn status(&self, a: Assumption) -> CheckStatus {
        self.checks
            .iter()
            .find(|c| c.assumption == a)
            .map(|c| c.status)
            .unwrap_or(CheckStatus::NotEvaluated)
    }

    pub fn passed(&self, a: Assumption) -> bool {
        matches!(self.status(a), CheckStatus::Pass | CheckStatus::Guaranteed)
    }

    /// First failed assumption among those every downstream stage needs.
    pub fn first_required_failure(&self) -> Option<&Violation> {
        Assumption::REQUIRED
            .iter()
            .find_map(|a| self.violations.iter().find(|v| v.assumption == *a))
    }

    pub fn is_valid(&self) -> bool {
        self.first_required_failure().is_none()
    }

    pub fn is_balanced(&self) -> bool {
        self.balance.is_some()
    }
}

struct Builder {
    checks: Vec<AssumptionCheck>,
    violations: Vec<Violation>,
}

impl Builder {
    fn record(&mut self, a: Assumption, failures: Vec<(Vec<usize>, String)>, ok_evidence: &str) {
        if failures.is_empty() {
            self.checks.push(AssumptionCheck {
                assumption: a,
                status: CheckStatus::Pass,
                evidence: ok_evidence.to_string(),
            });
        } else {
            let evidence = failures.iter().map(|(_, m)| m.clone()).collect::<Vec<_>>().join("; ");
            self.checks.push(AssumptionCheck {
                assumption: a,
                status: CheckStatus::Fail,
                evidence,
            });
            for (colours, message) in failures {
                self.violations.push(Violation {
                    assumption: a,
                    colours,
                    message,
                });
            }
        }
    }

    fn status(&mut self, a: Assumption, status: CheckStatus, evidence: impl Into<String>) {
        self.checks.push(AssumptionCheck {
            assumption: a,
            status,
            evidence: evidence.into(),
        });
    }
}

fn is_nonneg_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

fn a5_for_colour(spec: &UrnSpec, i: usize) -> A5Evidence {
    let minus_one = Rational::from_integer(-1);
    let column = || {
        spec.rows
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.atoms.iter().map(move |a| (j, &a.v)))
    };
    let clause_a = column().all(|(_, v)| !v[i].is_negative());
    let clause_b = is_nonneg_integer(&spec.colours[i].initial)
        && column().all(|(j, v)| {
            if j == i {
                is_nonneg_integer(&v[i]) || v[i] == minus_one
            } else {
                is_nonneg_integer(&v[i])
            }
        });

    let why_not = || -> String {
        for (j, v) in column() {
            if j != i && v[i].is_negative() {
                return format!(
                    "colour {i}: replacement into colour {i} from colour {j} takes negative value {}; only the diagonal may be negative",
                    v[i]
                );
            }
        }
        for (j, v) in column() {
            if j == i && v[i].is_negative() && v[i] != minus_one {
                let b = -&v[i];
                return format!(
                    "colour {i}: diagonal replacement takes negative value {}; only -1 is allowed. \
                     Rescale instead: divide the initial count of colour {i} and every replacement into colour {i} by {b}, \
                     and multiply the activity of colour {i} by {b}",
                    v[i]
                );
            }
        }
        format!(
            "colour {i}: subtractions require the initial count and every replacement into colour {i} to be nonnegative integers (diagonal may be -1)"
        )
    };

    match spec.colours[i].clause {
        Some(Clause::A) if clause_a => A5Evidence::ClauseA,
        Some(Clause::A) => A5Evidence::Violation {
            message: format!("colour {i} claims clause (a) but some replacement into it is negative"),
        },
        Some(Clause::B) if clause_b => A5Evidence::ClauseB,
        Some(Clause::B) => A5Evidence::Violation { message: why_not() },
        None if clause_a => A5Evidence::ClauseA,
        None if clause_b => A5Evidence::ClauseB,
        None => A5Evidence::Violation { message: why_not() },
    }
}

fn detect_balance(spec: &UrnSpec) -> Option<Rational> {
    let a = spec.activities();
    let mut beta: Option<Rational> = None;
    for (i, row) in spec.rows.iter().enumerate() {
        if !a[i].is_positive() {
            continue;
        }
        let mut sums: Vec<Rational> = row
            .atoms
            .iter()
            .map(|atom| atom.v.iter().zip(&a).map(|(v, w)| v * w).sum())
            .collect();
        if sums.is_empty() {
            sums.push(Rational::zero());
        }
        for s in sums {
            match &beta {
                None => beta = Some(s),
                Some(b) if *b == s => {}
                Some(_) => return None,
            }
        }
    }
    beta
}

/// Checks every assumption and reports evidence. Never fails; downstream
/// stages decide which failures are fatal.
pub fn validate(spec: &UrnSpec) -> ValidationReport {
    let q = spec.q();
    let a = spec.activities();
    let x = spec.initial();
    let mut b = Builder {
        checks: Vec::new(),
        violations: Vec::new(),
    };

    let mut a0 = Vec::new();
    for i in 0..q {
        if a[i].is_negative() {
            a0.push((vec![i], format!("colour {i}: activity {} is negative", a[i])));
        }
        if x[i].is_negative() {
            a0.push((vec![i], format!("colour {i}: initial count {} is negative", x[i])));
        }
    }
    b.record(Assumption::A0, a0, "activities and initial counts are nonnegative");

    let total: Rational = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
    let a1 = if total.is_positive() {
        vec![]
    } else {
        vec![((0..q).collect(), format!("initial total activity is {total}; the urn has no dynamics"))]
    };
    b.record(Assumption::A1, a1, &format!("initial total activity {total} > 0"));

    let a2 = (0..q)
        .filter(|&i| a[i].is_zero() && !spec.rows[i].is_zero())
        .map(|i| (vec![i], format!("colour {i} has activity 0 but a nonzero replacement row")))
        .collect();
    b.record(Assumption::A2, a2, "zero-activity colours have zero rows");

    let a3 = (0..q)
        .filter(|&i| {
            !x[i].is_positive()
                && !spec.rows.iter().enumerate().any(|(j, row)| {
                    j != i && row.atoms.iter().any(|atom| atom.v[i].is_positive())
                })
        })
        .map(|i| (vec![i], format!("colour {i} is absent initially and never produced by another colour")))
        .collect();
    b.record(Assumption::A3, a3, "every colour is present or reachable");

    b.status(
        Assumption::A4,
        CheckStatus::Pass,
        "finite-support replacement laws have all moments",
    );

    let a5_evidence: Vec<A5Evidence> = (0..q).map(|i| a5_for_colour(spec, i)).collect();
    let a5 = a5_evidence
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match e {
            A5Evidence::Violation { message } => Some((vec![i], message.clone())),
            _ => None,
        })
        .collect();
    b.record(Assumption::A5Prime, a5, "every colour satisfies clause (a) or (b)");

    let q_minus: Vec<usize> = (0..q)
        .filter(|&i| spec.rows[i].atoms.iter().any(|atom| atom.v[i].is_negative()))
        .collect();
    let balance = detect_balance(spec);

    let mean = mean_matrix(spec);
    let graph = build_graph(&mean);
    let mut a8_holds = None;
    match &graph {
        Ok(g) => {
            let exps = compute_exponents(g, &mean, &a);
            let a7 = q_minus
                .iter()
                .filter(|&&i| !exps.lambda_star[i].is_positive())
                .map(|&i| {
                    (
                        vec![i],
                        format!("colour {i} has subtractions but lambda* = {} is not positive", exps.lambda_star[i]),
                    )
                })
                .collect();
            b.record(Assumption::A7, a7, "every subtraction colour has positive lambda*");
            let a8: Vec<_> = q_minus
                .iter()
                .filter(|&&i| g.parents[i].is_empty())
                .map(|&i| (vec![i], format!("minimal colour {i} has subtractions")))
                .collect();
            a8_holds = Some(a8.is_empty());
            b.record(Assumption::A8, a8, "no minimal colour has subtractions");
        }
        Err(e) => {
            b.status(Assumption::A7, CheckStatus::NotEvaluated, e.to_string());
            b.status(Assumption::A8, CheckStatus::NotEvaluated, e.to_string());
        }
    }

    let basics = [Assumption::A0, Assumption::A1, Assumption::A2, Assumption::A3]
        .iter()
        .all(|a| !b.violations.iter().any(|v| v.assumption == *a));
    let a6 = match &balance {
        Some(beta) if !beta.is_negative() && basics => {
            b.status(Assumption::A6, CheckStatus::Guaranteed, format!("balanced with balance {beta} >= 0"));
            A6Status::Guaranteed
        }
        _ if basics && a8_holds == Some(true) => {
            b.status(Assumption::A6, CheckStatus::Guaranteed, "A8 together with A0-A3");
            A6Status::Guaranteed
        }
        _ => {
            b.status(
                Assumption::A6,
                CheckStatus::RuntimeChecked,
                "no sufficient condition applies; extinction is detected during simulation",
            );
            A6Status::RuntimeChecked
        }
    };

    ValidationReport {
        checks: b.checks,
        violations: b.violations,
        balance,
        q_minus,
        a5_evidence,
        a6,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{r, rv, Atom, ReplacementRow};

    fn two_colour(delta: &str, gamma: &str, alpha: &str, x: [&str; 2]) -> UrnSpec {
        UrnSpec::deterministic(vec![rv(&[delta, gamma]), rv(&["0", alpha])], rv(&x))
    }

    #[test]
    fn two_colour_with_alpha_minus_one_uses_clause_b() {
        let report = validate(&two_colour("1", "2", "-1", ["1", "3"]));
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.a5_evidence[0], A5Evidence::ClauseA);
        assert_eq!(report.a5_evidence[1], A5Evidence::ClauseB);
        assert_eq!(report.q_minus, vec![1]);
        assert!(report.passed(Assumption::A7));
        assert!(report.passed(Assumption::A8));
    }

    #[test]
    fn clause_b_needs_integers() {
        let report = validate(&two_colour("1", "1/2", "-1", ["1", "0"]));
        assert!(matches!(report.a5_evidence[1], A5Evidence::Violation { .. }));
        assert!(!report.is_valid());
    }

    #[test]
    fn rescaling_recipe_for_other_negative_values() {
        let report = validate(&two_colour("1", "2", "-2", ["1", "2"]));
        let v = report.first_required_failure().unwrap();
        assert_eq!(v.assumption, Assumption::A5Prime);
        assert!(v.message.contains("Rescale"), "{}", v.message);
    }

    #[test]
    fn balance_detection() {
        let balanced = validate(&two_colour("1", "1", "2", ["1", "0"]));
        assert_eq!(balanced.balance, Some(r("2")));
        let unbalanced = validate(&two_colour("1", "1", "1", ["1", "0"]));
        assert_eq!(unbalanced.balance, None);
    }

    #[test]
    fn random_rows_can_be_balanced() {
        let spec = UrnSpec::from_parts(
            rv(&["1", "1"]),
            rv(&["1", "0"]),
            vec![
                ReplacementRow::new(vec![
                    Atom::new(r("1/2"), rv(&["1", "0"])),
                    Atom::new(r("1/2"), rv(&["0", "1"])),
                ]),
                ReplacementRow::deterministic(rv(&["0", "1"])),
            ],
        );
        let report = validate(&spec);
        assert_eq!(report.balance, Some(r("1")));
        assert!(report.q_minus.is_empty());
        assert_eq!(report.a6, A6Status::Guaranteed);
    }

    #[test]
    fn zero_activity_with_nonzero_row_violates_a2() {
        let mut spec = two_colour("1", "1", "1", ["1", "1"]);
        spec.colours[0].activity = Rational::zero();
        let report = validate(&spec);
        assert_eq!(report.first_required_failure().unwrap().assumption, Assumption::A2);
    }

    #[test]
    fn unreachable_empty_colour_violates_a3() {
        let spec = UrnSpec::deterministic(vec![rv(&["1", "0"]), rv(&["0", "1"])], rv(&["1", "0"]));
        let report = validate(&spec);
        assert_eq!(report.first_required_failure().unwrap().assumption, Assumption::A3);
    }

    #[test]
    fn empty_start_is_flagged_not_rejected() {
        let spec = UrnSpec::deterministic(vec![rv(&["1"])], rv(&["0"]));
        let report = validate(&spec);
        assert_eq!(report.status(Assumption::A1), CheckStatus::Fail);
    }

    #[test]
    fn plus_minus_fails_a7_only() {
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
        let report = validate(&spec);
        assert!(report.is_valid());
        assert_eq!(report.status(Assumption::A7), CheckStatus::Fail);
        assert!(report.passed(Assumption::A8));
        assert_eq!(report.a6, A6Status::Guaranteed);
    }

    #[test]
    fn claimed_clause_is_enforced() {
        let mut spec = two_colour("1", "2", "-1", ["1", "3"]);
        spec.colours[1].clause = Some(Clause::A);
        let report = validate(&spec);
        assert!(matches!(report.a5_evidence[1], A5Evidence::Violation { .. }));
    }
}
