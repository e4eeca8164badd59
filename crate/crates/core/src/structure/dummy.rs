use crate::error::AnalysisError;
use crate::model::{Atom, Colour, ReplacementRow, UrnSpec};
use crate::rational::Rational;

fn with_counter(spec: &UrnSpec, label: &str, counts_row: impl Fn(usize) -> bool) -> UrnSpec {
    let q = spec.q();
    let mut out = spec.clone();
    out.colours.push(Colour {
        label: Some(unique_label(spec, label)),
        activity: Rational::zero(),
        initial: Rational::zero(),
        clause: None,
    });
    for (i, row) in out.rows.iter_mut().enumerate() {
        let mark = if counts_row(i) { Rational::one() } else { Rational::zero() };
        if row.atoms.is_empty() && mark.is_positive() {
            let mut v = vec![Rational::zero(); q + 1];
            v[q] = mark;
            row.atoms.push(Atom::certain(v));
        } else {
            for atom in &mut row.atoms {
                atom.v.push(mark.clone());
            }
        }
    }
    out.rows.push(ReplacementRow::default());
    out
}

fn unique_label(spec: &UrnSpec, base: &str) -> String {
    let taken = |s: &str| spec.colours.iter().any(|c| c.label.as_deref() == Some(s));
    let mut label = base.to_string();
    while taken(&label) {
        label.push('\'');
    }
    label
}

/// Appends a zero-activity colour that gains one ball at every draw. Its
/// index in the returned spec is `spec.q()`.
pub fn extend_dummy_zero(spec: &UrnSpec) -> UrnSpec {
    with_counter(spec, "draws", |i| spec.colours[i].activity.is_positive())
}

/// Appends a zero-activity colour that gains one ball whenever colour `i` is
/// drawn. Its index in the returned spec is `spec.q()`.
pub fn extend_dummy_iota(spec: &UrnSpec, i: usize) -> Result<UrnSpec, AnalysisError> {
    if i >= spec.q() {
        return Err(AnalysisError::Refused(format!("colour {i} does not exist")));
    }
    if !spec.colours[i].activity.is_positive() {
        return Err(AnalysisError::Refused(format!(
            "colour {i} has zero activity and is never drawn"
        )));
    }
    Ok(with_counter(spec, &format!("draws_{}", spec.label(i)), |k| k == i))
}
