use std::collections::BTreeMap;

use crate::error::SimError;
use crate::model::UrnSpec;
use crate::rational::Rational;

pub const MAX_LEAVES: usize = 1_000_000;

/// Exact law of `X_n` as `(probability, composition)` pairs with distinct
/// compositions, sorted by composition.
pub fn enumerate_exact(spec: &UrnSpec, n: u32) -> Result<Vec<(Rational, Vec<Rational>)>, SimError> {
    enumerate_exact_limited(spec, n, MAX_LEAVES)
}

/// As [`enumerate_exact`], refusing any layer with more than `limit` branches.
pub fn enumerate_exact_limited(
    spec: &UrnSpec,
    n: u32,
    limit: usize,
) -> Result<Vec<(Rational, Vec<Rational>)>, SimError> {
    let a = spec.activities();
    let mut layer: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    layer.insert(spec.initial(), Rational::one());
    for _ in 0..n {
        let branching: usize = layer
            .keys()
            .map(|x| {
                (0..spec.q())
                    .filter(|&i| (&a[i] * &x[i]).is_positive())
                    .map(|i| spec.rows[i].atoms.len().max(1))
                    .sum::<usize>()
                    .max(1)
            })
            .sum();
        if branching > limit {
            return Err(SimError::TreeTooLarge { limit });
        }
        let mut next: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for (x, p) in layer {
            let total: Rational = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
            if !total.is_positive() {
                *next.entry(x).or_insert_with(Rational::zero) += p;
                continue;
            }
            for i in 0..spec.q() {
                let w = &a[i] * &x[i];
                if !w.is_positive() {
                    continue;
                }
                let pi = &p * &w / &total;
                let atoms = &spec.rows[i].atoms;
                if atoms.is_empty() {
                    *next.entry(x.clone()).or_insert_with(Rational::zero) += pi;
                    continue;
                }
                for atom in atoms {
                    let y: Vec<Rational> = x.iter().zip(&atom.v).map(|(u, v)| u + v).collect();
                    *next.entry(y).or_insert_with(Rational::zero) += &pi * &atom.p;
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().map(|(x, p)| (p, x)).collect())
}

/// Componentwise mean of an exact law.
pub fn exact_mean(law: &[(Rational, Vec<Rational>)]) -> Vec<Rational> {
    let q = law.first().map_or(0, |(_, x)| x.len());
    (0..q).map(|j| law.iter().map(|(p, x)| p * &x[j]).sum()).collect()
}
