#![allow(dead_code)]

use proptest::prelude::*;

use triurn::corpus::default_corpus;
use triurn::limits::{analyze, Analysis, Mode};
use triurn::model::{mean_urn, validate, Atom, Colour, ReplacementRow, UrnSpec};
use triurn::structure::{brute_force_exponents, extend_dummy_zero, Role};
use triurn::Rational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// One random replacement row before placement: atoms as (weight, entries).
type RawRow = Vec<(u8, Vec<i8>)>;

/// Random triangular specs with up to six colours. Rows are upper triangular
/// in a shuffled colour order, so the topological order is nontrivial.
pub fn triangular_spec() -> impl Strategy<Value = UrnSpec> {
    (1usize..=6)
        .prop_flat_map(|q| {
            let row = prop::collection::vec((1u8..=3, prop::collection::vec(-1i8..=3, q)), 1..=2);
            (
                Just(q),
                prop::collection::vec(row, q),
                prop::collection::vec(prop::sample::select(vec![0u8, 1, 2, 3]), q),
                prop::collection::vec(0u8..=3, q),
                Just((0..q).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec(0u8..4, q * q),
            )
        })
        .prop_map(|(q, rows, acts, init, order, sparsity)| build(q, rows, acts, init, order, sparsity))
        .prop_filter("spec must satisfy the required assumptions", |spec| validate(spec).is_valid())
}

fn build(q: usize, raw: Vec<RawRow>, acts: Vec<u8>, init: Vec<u8>, order: Vec<usize>, sparsity: Vec<u8>) -> UrnSpec {
    // Position `k` in `order` holds the colour whose rank is `k`.
    let mut rank = vec![0; q];
    for (k, &c) in order.iter().enumerate() {
        rank[c] = k;
    }
    let activity = |a: u8| match a {
        0 => Rational::zero(),
        1 => Rational::one(),
        2 => rat(2, 1),
        _ => rat(1, 2),
    };
    let colours: Vec<Colour> = (0..q)
        .map(|i| Colour::new(activity(acts[i]), Rational::from(init[i] as i64)))
        .collect();
    let rows = (0..q)
        .map(|i| {
            if !colours[i].activity.is_positive() {
                return ReplacementRow::deterministic(vec![Rational::zero(); q]);
            }
            let total: u32 = raw[i].iter().map(|(w, _)| *w as u32).sum();
            let atoms = raw[i]
                .iter()
                .map(|(w, v)| {
                    let v = (0..q)
                        .map(|j| {
                            let keep = rank[j] > rank[i] && sparsity[i * q + j] < 2;
                            if j == i {
                                Rational::from(v[j].max(if init[i] > 0 { -1 } else { 0 }) as i64)
                            } else if keep {
                                Rational::from(v[j].max(0) as i64)
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    Atom::new(rat(*w as i64, total as i64), v)
                })
                .collect();
            ReplacementRow::new(atoms)
        })
        .collect();
    let mut spec = UrnSpec::from_parts(
        colours.iter().map(|c| c.activity.clone()).collect(),
        colours.iter().map(|c| c.initial.clone()).collect(),
        rows,
    );
    if spec.colours.iter().all(|c| !(&c.activity * &c.initial).is_positive()) {
        spec.colours[order[0]].activity = Rational::one();
        spec.colours[order[0]].initial = Rational::one();
    }
    spec
}

/// Checks every structural identity on one spec; returns a description of
/// the first violation.
pub fn structural_properties(spec: &UrnSpec) -> Result<(), String> {
    let an = analyze(spec).map_err(|e| format!("analysis failed: {e}"))?;
    edge_monotonicity(&an)?;
    brute_force_agreement(&an)?;
    zero_residual(&an)?;
    scaling_covariance(&an)?;
    mean_urn_agreement(&an)?;
    dummy_identities(&an)?;
    Ok(())
}

pub fn edge_monotonicity(an: &Analysis) -> Result<(), String> {
    let e = &an.structure.exponents;
    for &(i, j) in &an.structure.graph.edges {
        let ok = e.lambda_star[i] < e.lambda_star[j] || (e.lambda_star[i] == e.lambda_star[j] && e.kappa[i] <= e.kappa[j]);
        if !ok {
            return Err(format!("edge {i}->{j} decreases (lambda*, kappa)"));
        }
    }
    Ok(())
}

pub fn brute_force_agreement(an: &Analysis) -> Result<(), String> {
    let e = &an.structure.exponents;
    let brute = brute_force_exponents(&an.structure.graph, &e.lambda);
    for (i, (ls, k)) in brute.iter().enumerate() {
        if *ls != e.lambda_star[i] || *k != e.kappa[i] {
            return Err(format!("colour {i}: dynamic ({}, {}) vs brute force ({ls}, {k})", e.lambda_star[i], e.kappa[i]));
        }
    }
    Ok(())
}

/// Recomputes the eigenvector equation of every block level from the public
/// coefficient table.
pub fn zero_residual(an: &Analysis) -> Result<(), String> {
    let s = &an.structure;
    let w = |j: usize, i: usize| &s.activities[j] * s.mean.get(j, i);
    for block in &s.roles.blocks {
        let nu = block.leader;
        for members in block.levels.values() {
            for &i in members {
                let lhs: Rational = members.iter().map(|&j| w(j, i) * an.coefficients.get(j, nu)).sum();
                let residual = lhs - &s.exponents.lambda[nu] * an.coefficients.get(i, nu);
                if !residual.is_zero() {
                    return Err(format!("residual {residual} for colour {i}, leader {nu}"));
                }
            }
        }
        if s.roles.roles[nu] != Role::Leader || an.coefficients.get(nu, nu) != Rational::one() {
            return Err(format!("leader {nu} is not normalized"));
        }
    }
    Ok(())
}

/// Scaling every ball count by `s` leaves exponents and normalizations
/// unchanged and multiplies deterministic limits by `s`. Urns with
/// subtractions are exempt, since scaling would break the subtraction rule.
pub fn scaling_covariance(an: &Analysis) -> Result<(), String> {
    if !an.spec.is_nonnegative() {
        return Ok(());
    }
    let s = rat(5, 2);
    let scaled = analyze(&an.spec.scaled(&s)).map_err(|e| format!("scaled spec: {e}"))?;
    let (a, b) = (&an.structure.exponents, &scaled.structure.exponents);
    let lambda_scaled: Vec<Rational> = a.lambda.iter().map(|l| l * &s).collect();
    if b.lambda != lambda_scaled || b.kappa != a.kappa {
        return Err("exponents do not scale".into());
    }
    for i in 0..an.q() {
        if an.normalization(i, Mode::Discrete).ok() != scaled.normalization(i, Mode::Discrete).ok() {
            return Err(format!("colour {i}: discrete normalization changed under scaling"));
        }
        match (an.limit_value(i), scaled.limit_value(i)) {
            (Some(x), Some(y)) => {
                if !x.scale(&s).same_value(y) {
                    return Err(format!("colour {i}: limit does not scale"));
                }
            }
            (None, None) => {}
            _ => return Err(format!("colour {i}: verdict kind changed under scaling")),
        }
    }
    Ok(())
}

/// The mean urn exists only without subtractions; other urns are exempt.
pub fn mean_urn_agreement(an: &Analysis) -> Result<(), String> {
    if !an.spec.is_nonnegative() {
        return Ok(());
    }
    let mean = mean_urn(&an.spec).map_err(|e| format!("mean urn: {e}"))?;
    let m = analyze(&mean).map_err(|e| format!("mean urn analysis: {e}"))?;
    for i in 0..an.q() {
        for mode in [Mode::Discrete, Mode::Continuous] {
            if an.normalization(i, mode).ok() != m.normalization(i, mode).ok() {
                return Err(format!("colour {i}: normalization differs for the mean urn"));
            }
        }
        if let (Some(x), Some(y)) = (an.limit_value(i), m.limit_value(i)) {
            if !x.same_value(y) {
                return Err(format!("colour {i}: exact limit {x:?} vs mean urn {y:?}"));
            }
        }
    }
    Ok(())
}

pub fn dummy_identities(an: &Analysis) -> Result<(), String> {
    let ext = &an.extended.exponents;
    let e = &an.structure.exponents;
    let q = an.q();
    // With every rate negative the urn dies out and the counter keeps its own rate 0.
    if e.lambda_hat.is_negative() {
        return if ext.lambda_star[q].is_zero() {
            Ok(())
        } else {
            Err(format!("lambda* of the draw counter is {} with lambda hat {}", ext.lambda_star[q], e.lambda_hat))
        };
    }
    if ext.lambda_star[q] != e.lambda_hat {
        return Err(format!("lambda* of the draw counter is {} but lambda hat is {}", ext.lambda_star[q], e.lambda_hat));
    }
    // The identity for kappa assumes every rate is nonnegative.
    if e.lambda.iter().any(Rational::is_negative) {
        return Ok(());
    }
    let want = if e.lambda_hat.is_positive() {
        e.kappa_hat
    } else {
        e.kappa_hat0.ok_or("kappa hat 0 missing while lambda hat = 0")?
    };
    if ext.kappa[q] != want {
        return Err(format!("kappa of the draw counter is {} but expected {want}", ext.kappa[q]));
    }
    let direct = analyze(&extend_dummy_zero(&an.spec)).map_err(|e| format!("extended spec: {e}"))?;
    if direct.structure.exponents.lambda_star[..q] != e.lambda_star[..] {
        return Err("appending the draw counter changed the original exponents".into());
    }
    Ok(())
}

pub fn corpus() -> Vec<(&'static str, UrnSpec)> {
    default_corpus()
}
