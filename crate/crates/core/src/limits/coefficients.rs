use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AnalysisError;
use crate::rational::Rational;
use crate::structure::{Role, Structure};

/// Nonzero coefficients `c_{iν}` keyed by colour and then by leader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientTable {
    pub c: Vec<BTreeMap<usize, Rational>>,
}

impl CoefficientTable {
    pub fn get(&self, i: usize, nu: usize) -> Rational {
        self.c[i].get(&nu).cloned().unwrap_or_else(Rational::zero)
    }

    /// `ĉ_{iν} = λ̂^{-κ_i} c_{iν}`; only meaningful when `λ̂ > 0`.
    pub fn hat(&self, s: &Structure, i: usize, nu: usize) -> Rational {
        let lh = &s.exponents.lambda_hat;
        self.get(i, nu) / lh.pow(s.exponents.kappa[i] as i32)
    }
}

pub fn compute_coefficients(s: &Structure) -> Result<CoefficientTable, AnalysisError> {
    let q = s.q();
    let e = &s.exponents;
    let w = |j: usize, i: usize| &s.activities[j] * s.mean.get(j, i);
    let mut table = vec![BTreeMap::new(); q];

    for block in &s.roles.blocks {
        let nu = block.leader;
        let lam = &e.lambda[nu];
        let mut c = vec![Rational::zero(); q];
        for (&kappa, members) in &block.levels {
            for &i in members {
                c[i] = match s.roles.roles[i] {
                    Role::Leader => {
                        if i == nu {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    }
                    Role::Subleader => {
                        let below = block.levels.get(&(kappa - 1)).map(Vec::as_slice).unwrap_or(&[]);
                        let sum: Rational = below.iter().map(|&j| w(j, i) * &c[j]).sum();
                        sum / Rational::from(kappa as i64)
                    }
                    Role::Follower => {
                        let sum: Rational = members.iter().filter(|&&j| j != i).map(|&j| w(j, i) * &c[j]).sum();
                        sum / (lam - &e.lambda[i])
                    }
                };
            }
            for &i in members {
                let lhs: Rational = members.iter().map(|&j| w(j, i) * &c[j]).sum();
                let residual = lhs - lam * &c[i];
                if !residual.is_zero() {
                    return Err(AnalysisError::Residual {
                        colour: i,
                        leader: nu,
                        residual: residual.to_string(),
                    });
                }
            }
        }
        for i in 0..q {
            if !c[i].is_zero() {
                table[i].insert(nu, c[i].clone());
            }
        }
    }
    Ok(CoefficientTable { c: table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{r, rv, Atom, ReplacementRow, UrnSpec};
    use crate::structure::analyze_structure;

    fn coeffs(spec: &UrnSpec) -> (Structure, CoefficientTable) {
        let s = analyze_structure(spec).unwrap();
        let c = compute_coefficients(&s).unwrap();
        (s, c)
    }

    fn two_colour(delta: &str, gamma: &str, alpha: &str) -> UrnSpec {
        UrnSpec::deterministic(vec![rv(&[delta, gamma]), rv(&["0", alpha])], rv(&["1", "0"]))
    }

    #[test]
    fn two_colour_follower_coefficient() {
        let (_, c) = coeffs(&two_colour("3", "2", "1"));
        assert_eq!(c.get(1, 0), r("1"));
        assert_eq!(c.get(0, 0), r("1"));
    }

    #[test]
    fn two_colour_subleader_coefficient() {
        let (_, c) = coeffs(&two_colour("2", "5", "2"));
        assert_eq!(c.get(1, 0), r("5"));
    }

    #[test]
    fn three_colour_follower_coefficient() {
        let (_, c) = coeffs(&UrnSpec::deterministic(
            vec![rv(&["3", "2", "0"]), rv(&["0", "1", "3"]), rv(&["0", "0", "4"])],
            rv(&["1", "0", "0"]),
        ));
        assert_eq!(c.get(1, 0), r("1"));
        assert_eq!(c.get(2, 2), r("1"));
        assert!(c.c[2].get(&0).is_none());
    }

    #[test]
    fn coefficients_are_positive_exactly_on_ancestor_sets() {
        let spec = UrnSpec::deterministic(
            vec![
                rv(&["2", "0", "1", "1"]),
                rv(&["0", "2", "1", "0"]),
                rv(&["0", "0", "1", "1"]),
                rv(&["0", "0", "0", "2"]),
            ],
            rv(&["1", "1", "0", "0"]),
        );
        let (s, c) = coeffs(&spec);
        for i in 0..4 {
            let keys: Vec<usize> = c.c[i].keys().copied().collect();
            assert_eq!(keys, s.roles.ancestors[i], "colour {i}");
            assert!(c.c[i].values().all(Rational::is_positive));
        }
    }

    #[test]
    fn chain_ratio_follows_factorials() {
        let (alpha, p) = (r("1/2"), r("1/3"));
        let q = 5;
        let one = Rational::one();
        let rows = (0..q)
            .map(|i| {
                if i + 1 == q {
                    let mut v = vec![Rational::zero(); q];
                    v[i] = &alpha + &one;
                    return ReplacementRow::deterministic(v);
                }
                let mut stay = vec![Rational::zero(); q];
                stay[i] = &alpha + &one;
                let mut go = vec![Rational::zero(); q];
                go[i] = alpha.clone();
                go[i + 1] = one.clone();
                ReplacementRow::new(vec![Atom::new(p.clone(), stay), Atom::new(&one - &p, go)])
            })
            .collect();
        let mut x = vec![Rational::zero(); q];
        x[0] = one.clone();
        let spec = UrnSpec::from_parts(vec![one.clone(); q], x, rows);
        let (s, c) = coeffs(&spec);
        let step = (&one - &p) / (&alpha + &one);
        let mut factorial = Rational::one();
        for k in 0..q - 1 {
            if k > 0 {
                factorial = factorial * Rational::from(k as i64);
            }
            assert_eq!(c.hat(&s, k, 0), step.pow(k as i32) / &factorial, "k = {k}");
        }
    }
}
