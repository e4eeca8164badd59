use std::fmt;

use serde::Serialize;

use super::{ReplacementRow, UrnSpec};
use crate::error::AnalysisError;
use crate::rational::Rational;

/// Exact mean replacement matrix, `r[i][j] = E ξ_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeanMatrix {
    pub r: Vec<Vec<Rational>>,
}

impl MeanMatrix {
    pub fn q(&self) -> usize {
        self.r.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.r[i][j]
    }
}

impl fmt::Display for MeanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.r {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn mean_matrix(spec: &UrnSpec) -> MeanMatrix {
    let q = spec.q();
    let r = spec
        .rows
        .iter()
        .map(|row| (0..q).map(|j| row.mean(j)).collect())
        .collect();
    MeanMatrix { r }
}

/// The deterministic urn whose rows are the point masses at the mean
/// replacement vectors. Defined only for urns without subtractions.
pub fn mean_urn(spec: &UrnSpec) -> Result<UrnSpec, AnalysisError> {
    if !spec.is_nonnegative() {
        return Err(AnalysisError::Refused(
            "the mean urn is defined only for urns without subtractions".into(),
        ));
    }
    let mean = mean_matrix(spec);
    let mut out = spec.clone();
    out.rows = mean
        .r
        .into_iter()
        .zip(&spec.rows)
        .map(|(v, row)| {
            if row.atoms.is_empty() {
                ReplacementRow::default()
            } else {
                ReplacementRow::deterministic(v)
            }
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{r, rv, Atom};

    fn bernoulli_two_colour(p: &str) -> UrnSpec {
        let p = r(p);
        let one = Rational::one();
        UrnSpec::from_parts(
            rv(&["1", "1"]),
            rv(&["1", "0"]),
            vec![
                ReplacementRow::new(vec![
                    Atom::new(p.clone(), rv(&["1", "0"])),
                    Atom::new(&one - &p, rv(&["0", "1"])),
                ]),
                ReplacementRow::deterministic(rv(&["0", "1"])),
            ],
        )
    }

    #[test]
    fn bernoulli_row_means() {
        let m = mean_matrix(&bernoulli_two_colour("1/2"));
        assert_eq!(m.r, vec![rv(&["1/2", "1/2"]), rv(&["0", "1"])]);
    }

    #[test]
    fn deterministic_rows_are_their_own_mean() {
        let spec = UrnSpec::deterministic(vec![rv(&["2", "3"]), rv(&["0", "5"])], rv(&["1", "1"]));
        assert_eq!(mean_matrix(&spec).r, vec![rv(&["2", "3"]), rv(&["0", "5"])]);
        assert_eq!(mean_urn(&spec).unwrap(), spec);
    }

    #[test]
    fn thirds_expectation() {
        let row = ReplacementRow::new(vec![
            Atom::new(r("1/3"), rv(&["3", "0"])),
            Atom::new(r("2/3"), rv(&["0", "3"])),
        ]);
        assert_eq!(row.mean(0), r("1"));
        assert_eq!(row.mean(1), r("2"));
    }

    #[test]
    fn mean_urn_of_mixed_diagonal() {
        let spec = UrnSpec::from_parts(
            rv(&["1"]),
            rv(&["1"]),
            vec![ReplacementRow::new(vec![
                Atom::new(r("1/2"), rv(&["1"])),
                Atom::new(r("1/2"), rv(&["3"])),
            ])],
        );
        let m = mean_urn(&spec).unwrap();
        assert_eq!(m.rows[0], ReplacementRow::deterministic(rv(&["2"])));
    }

    #[test]
    fn mean_urn_of_e2p_is_deterministic() {
        let m = mean_urn(&bernoulli_two_colour("1/2")).unwrap();
        assert!(m.is_deterministic());
        assert_eq!(mean_matrix(&m), mean_matrix(&bernoulli_two_colour("1/2")));
    }

    #[test]
    fn mean_urn_refuses_subtractions() {
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
        assert!(mean_urn(&spec).is_err());
    }
}
