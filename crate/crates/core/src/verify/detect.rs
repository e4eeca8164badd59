use super::laws::ClosedFormLaw;
use crate::limits::Analysis;
use crate::model::UrnSpec;
use crate::rational::Rational;

fn f(x: &Rational) -> f64 {
    x.to_f64()
}

fn equal_activities(spec: &UrnSpec) -> bool {
    spec.colours.iter().all(|c| c.activity == spec.colours[0].activity && c.activity.is_positive())
}

fn unit_activities(spec: &UrnSpec) -> bool {
    spec.colours.iter().all(|c| c.activity == Rational::one())
}

/// The single atom of every row, when all rows are deterministic.
fn deterministic_matrix(spec: &UrnSpec) -> Option<Vec<Vec<Rational>>> {
    spec.rows
        .iter()
        .map(|row| {
            if row.is_deterministic() && row.atoms.len() == 1 {
                Some(row.atoms[0].v.clone())
            } else {
                None
            }
        })
        .collect()
}

fn is_row(v: &[Rational], expected: &[i64]) -> bool {
    v.len() == expected.len() && v.iter().zip(expected).all(|(a, &b)| *a == Rational::from(b))
}

/// The law of the limit of colour `i` under its discrete normalization, when
/// it is known in closed form.
pub fn detect_discrete_law(an: &Analysis, i: usize) -> Option<ClosedFormLaw> {
    let spec = &an.spec;
    let x = spec.initial();
    if let Some(b) = an.is_classical() {
        return Some(ClosedFormLaw::DirichletClassical {
            b: f(&b),
            x: x.iter().map(f).collect(),
            component: i,
        });
    }
    if !equal_activities(spec) || !x[0].is_positive() {
        return None;
    }
    match spec.q() {
        2 if i == 0 => {
            if let Some(m) = deterministic_matrix(spec) {
                let (delta, gamma, alpha) = (&m[0][0], &m[0][1], &m[1][1]);
                let balanced = m[1][0].is_zero() && delta.is_positive() && gamma.is_positive() && delta + gamma == *alpha;
                return balanced.then(|| ClosedFormLaw::BalancedTwoColourMoments {
                    delta: f(delta),
                    gamma: f(gamma),
                    alpha: f(alpha),
                    x1: f(&x[0]),
                    x2: f(&x[1]),
                });
            }
            let white = &spec.rows[0].atoms;
            let black = &spec.rows[1];
            if white.len() != 2 || !black.is_deterministic() || !is_row(&black.atoms[0].v, &[0, 1]) {
                return None;
            }
            let stay = white.iter().find(|a| is_row(&a.v, &[1, 0]))?;
            white.iter().find(|a| is_row(&a.v, &[0, 1]))?;
            let p = f(&stay.p);
            if x[1].is_zero() && x[0] == Rational::one() {
                Some(ClosedFormLaw::MittagLeffler { p })
            } else {
                Some(ClosedFormLaw::RandomBernoulliMoments {
                    p,
                    x1: f(&x[0]),
                    x2: f(&x[1]),
                })
            }
        }
        3 if i <= 1 => {
            let m = deterministic_matrix(spec)?;
            let (alpha, beta, delta, sigma) = (&m[0][0], &m[0][1], &m[1][1], &m[2][2]);
            let shape = m[1][0].is_zero()
                && m[2][0].is_zero()
                && m[2][1].is_zero()
                && beta.is_positive()
                && delta.is_positive()
                && alpha >= delta
                && m[0][2] == sigma - alpha - beta
                && m[1][2] == sigma - delta
                && !m[0][2].is_negative()
                && !m[1][2].is_negative();
            shape.then(|| ClosedFormLaw::ThreeColourMoments {
                alpha: f(alpha),
                beta: f(beta),
                delta: f(delta),
                sigma: f(sigma),
                x: [f(&x[0]), f(&x[1]), f(&x[2])],
                component: i,
            })
        }
        _ => None,
    }
}

/// The law of colour `i` in continuous time at time `t` (for the integer
/// counting laws) or of its normalized limit (for Yule colours).
pub fn detect_continuous_law(an: &Analysis, i: usize, t: f64) -> Option<ClosedFormLaw> {
    let spec = &an.spec;
    let x = spec.initial();
    if spec.q() == 2 && i == 1 && unit_activities(spec) && is_row(&x, &[1, 0]) {
        let white = &spec.rows[0];
        let black = &spec.rows[1];
        if white.is_deterministic() && is_row(&white.atoms[0].v, &[0, 1]) {
            if black.is_deterministic() && is_row(&black.atoms[0].v, &[0, -1]) {
                return Some(ClosedFormLaw::PoissonMinusMinus { t });
            }
            let coin = black.atoms.len() == 2
                && black.atoms.iter().all(|a| a.p == Rational::new(1, 2))
                && black.atoms.iter().any(|a| is_row(&a.v, &[0, 1]))
                && black.atoms.iter().any(|a| is_row(&a.v, &[0, -1]));
            if coin {
                return Some(ClosedFormLaw::NegBinomialPlusMinus { t });
            }
        }
    }
    let minimal = an.structure.graph.parents[i].is_empty();
    let atoms = &spec.rows[i].atoms;
    let b = &atoms.first()?.v[i];
    if minimal && x[i].is_positive() && b.is_positive() && atoms.iter().all(|a| a.v[i] == *b) {
        return Some(ClosedFormLaw::GammaYule {
            shape: f(&(&x[i] / b)),
            scale: f(b),
        });
    }
    None
}
