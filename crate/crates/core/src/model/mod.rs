//! Urn specifications: colours, activities, initial composition and finite
//! replacement laws, plus exact mean-matrix extraction and assumption checks.

mod document;
mod mean;
mod validate;

pub use document::{emit_spec, parse_spec, parse_spec_file, DocumentFormat};
pub use mean::{mean_matrix, mean_urn, MeanMatrix};
pub use validate::{
    validate, A5Evidence, A6Status, Assumption, AssumptionCheck, CheckStatus, ValidationReport,
    Violation,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rational::Rational;

/// Which clause of the subtraction condition a colour claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    /// Every replacement into this colour is nonnegative.
    A,
    /// Integer-valued colour whose diagonal replacement may be −1.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colour {
    pub label: Option<String>,
    pub activity: Rational,
    pub initial: Rational,
    pub clause: Option<Clause>,
}

impl Colour {
    pub fn new(activity: Rational, initial: Rational) -> Self {
        Colour {
            label: None,
            activity,
            initial,
            clause: None,
        }
    }

    pub fn labelled(label: &str, activity: Rational, initial: Rational) -> Self {
        Colour {
            label: Some(label.to_string()),
            activity,
            initial,
            clause: None,
        }
    }
}

/// One support point of a replacement law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub p: Rational,
    pub v: Vec<Rational>,
}

impl Atom {
    pub fn new(p: Rational, v: Vec<Rational>) -> Self {
        Atom { p, v }
    }

    pub fn certain(v: Vec<Rational>) -> Self {
        Atom {
            p: Rational::one(),
            v,
        }
    }
}

/// The law of the vector added when a colour is drawn. An empty atom list is
/// the point mass at the zero vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReplacementRow {
    pub atoms: Vec<Atom>,
}

impl ReplacementRow {
    pub fn new(atoms: Vec<Atom>) -> Self {
        ReplacementRow { atoms }
    }

    pub fn deterministic(v: Vec<Rational>) -> Self {
        ReplacementRow {
            atoms: vec![Atom::certain(v)],
        }
    }

    /// True when every atom is the zero vector.
    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.v.iter().all(Rational::is_zero))
    }

    pub fn is_deterministic(&self) -> bool {
        self.atoms.len() <= 1
    }

    /// Exact expectation of component `j`.
    pub fn mean(&self, j: usize) -> Rational {
        self.atoms.iter().map(|a| &a.p * &a.v[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnSpec {
    pub colours: Vec<Colour>,
    pub rows: Vec<ReplacementRow>,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl UrnSpec {
    /// Builds a spec with unlabelled colours. Panics on mismatched lengths,
    /// which is a programming error rather than bad input.
    pub fn from_parts(
        activities: Vec<Rational>,
        initial: Vec<Rational>,
        rows: Vec<ReplacementRow>,
    ) -> Self {
        assert_eq!(activities.len(), initial.len());
        assert_eq!(activities.len(), rows.len());
        let colours = activities
            .into_iter()
            .zip(initial)
            .map(|(a, x)| Colour::new(a, x))
            .collect();
        UrnSpec {
            colours,
            rows,
            meta: BTreeMap::new(),
        }
    }

    /// Deterministic spec from a replacement matrix with unit activities.
    pub fn deterministic(matrix: Vec<Vec<Rational>>, initial: Vec<Rational>) -> Self {
        let q = matrix.len();
        let rows = matrix.into_iter().map(ReplacementRow::deterministic).collect();
        UrnSpec::from_parts(vec![Rational::one(); q], initial, rows)
    }

    pub fn q(&self) -> usize {
        self.colours.len()
    }

    pub fn activities(&self) -> Vec<Rational> {
        self.colours.iter().map(|c| c.activity.clone()).collect()
    }

    pub fn initial(&self) -> Vec<Rational> {
        self.colours.iter().map(|c| c.initial.clone()).collect()
    }

    pub fn label(&self, i: usize) -> String {
        self.colours[i]
            .label
            .clone()
            .unwrap_or_else(|| format!("c{i}"))
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.colours[i].activity.is_positive()
    }

    /// True when no atom anywhere has a negative entry.
    pub fn is_nonnegative(&self) -> bool {
        self.rows
            .iter()
            .flat_map(|r| &r.atoms)
            .all(|a| a.v.iter().all(|x| !x.is_negative()))
    }

    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(ReplacementRow::is_deterministic)
    }

    /// True when every activity, initial count and atom entry is an integer.
    pub fn is_integer_valued(&self) -> bool {
        self.colours.iter().all(|c| c.initial.is_integer())
            && self
                .rows
                .iter()
                .flat_map(|r| &r.atoms)
                .all(|a| a.v.iter().all(Rational::is_integer))
    }

    /// Multiplies every atom vector and the initial composition by `s`.
    pub fn scaled(&self, s: &Rational) -> UrnSpec {
        let mut out = self.clone();
        for c in &mut out.colours {
            c.initial = &c.initial * s;
        }
        for atom in out.rows.iter_mut().flat_map(|r| r.atoms.iter_mut()) {
            for x in &mut atom.v {
                *x = &*x * s;
            }
        }
        out
    }

    /// Replaces each row by an equivalent row in which one atom is split in
    /// two halves. The law is unchanged.
    pub fn with_split_atoms(&self) -> UrnSpec {
        let mut out = self.clone();
        for row in &mut out.rows {
            if let Some(first) = row.atoms.first().cloned() {
                let half = &first.p / Rational::from_integer(2);
                row.atoms[0].p = half.clone();
                row.atoms.insert(1, Atom::new(half, first.v));
            }
        }
        out
    }
}

/// Shorthand used throughout tests and the corpus.
pub fn r(s: &str) -> Rational {
    s.parse().expect("valid rational literal")
}

/// Vector of rationals from literals.
pub fn rv(xs: &[&str]) -> Vec<Rational> {
    xs.iter().map(|s| r(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_atoms_preserves_means() {
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
        assert_eq!(mean_matrix(&spec), mean_matrix(&spec.with_split_atoms()));
    }

    #[test]
    fn zero_row_detection() {
        assert!(ReplacementRow::default().is_zero());
        assert!(ReplacementRow::deterministic(rv(&["0", "0"])).is_zero());
        assert!(!ReplacementRow::deterministic(rv(&["0", "1"])).is_zero());
    }
}
