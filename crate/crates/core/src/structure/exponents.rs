use serde::Serialize;

use super::ColourGraph;
use crate::model::MeanMatrix;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentTable {
    /// `λ_i = a_i r_ii`.
    pub lambda: Vec<Rational>,
    /// Largest `λ_j` over `j ⪯ i`.
    pub lambda_star: Vec<Rational>,
    /// One less than the largest number of colours with `λ = λ*_i` on a
    /// single path ending at `i`.
    pub kappa: Vec<u32>,
    pub lambda_hat: Rational,
    pub kappa_hat: u32,
    /// Present only when `λ̂ = 0`.
    pub kappa_hat0: Option<u32>,
    /// Present only when `λ̂ > 0`.
    pub gamma: Option<Vec<Rational>>,
}

impl ExponentTable {
    pub fn q(&self) -> usize {
        self.lambda.len()
    }
}

pub fn compute_exponents(graph: &ColourGraph, mean: &MeanMatrix, activities: &[Rational]) -> ExponentTable {
    let q = graph.q;
    let lambda: Vec<Rational> = (0..q).map(|i| &activities[i] * mean.get(i, i)).collect();

    let mut lambda_star = lambda.clone();
    let mut chain = vec![0u32; q];
    for &i in &graph.topo_order {
        for &j in &graph.parents[i] {
            if lambda_star[j] > lambda_star[i] {
                lambda_star[i] = lambda_star[j].clone();
            }
        }
        let inherited = graph.parents[i]
            .iter()
            .filter(|&&j| lambda_star[j] == lambda_star[i])
            .map(|&j| chain[j])
            .max()
            .unwrap_or(0);
        chain[i] = inherited + u32::from(lambda[i] == lambda_star[i]);
    }
    let kappa: Vec<u32> = chain.iter().map(|c| c - 1).collect();

    let lambda_hat = lambda.iter().max().cloned().unwrap_or_else(Rational::zero);
    let kappa_hat = (0..q)
        .filter(|&i| lambda_star[i] == lambda_hat)
        .map(|i| kappa[i])
        .max()
        .unwrap_or(0);
    let kappa_hat0 = lambda_hat.is_zero().then(|| {
        1 + (0..q)
            .filter(|&i| activities[i].is_positive())
            .map(|i| kappa[i])
            .max()
            .unwrap_or(0)
    });
    let gamma = lambda_hat.is_positive().then(|| {
        let kh = Rational::from(kappa_hat as i64);
        (0..q)
            .map(|i| Rational::from(kappa[i] as i64) - &kh * &lambda_star[i] / &lambda_hat)
            .collect()
    });

    ExponentTable {
        lambda,
        lambda_star,
        kappa,
        lambda_hat,
        kappa_hat,
        kappa_hat0,
        gamma,
    }
}

/// Independent path-enumeration oracle for `λ*_i` and `κ_i`: walks every
/// directed path ending at `i` and counts colours at the path maximum.
pub fn brute_force_exponents(graph: &ColourGraph, lambda: &[Rational]) -> Vec<(Rational, u32)> {
    fn paths_into(graph: &ColourGraph, i: usize, suffix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        suffix.push(i);
        out.push(suffix.iter().rev().copied().collect());
        for &j in &graph.parents[i] {
            paths_into(graph, j, suffix, out);
        }
        suffix.pop();
    }
    (0..graph.q)
        .map(|i| {
            let mut paths = Vec::new();
            paths_into(graph, i, &mut Vec::new(), &mut paths);
            let star = paths
                .iter()
                .flat_map(|p| p.iter().map(|&k| lambda[k].clone()))
                .max()
                .expect("at least the trivial path");
            let best = paths
                .iter()
                .map(|p| p.iter().filter(|&&k| lambda[k] == star).count() as u32)
                .max()
                .unwrap();
            (star, best - 1)
        })
        .collect()
}
