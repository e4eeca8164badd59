use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::{Map, Value};

use super::{Atom, Clause, Colour, ReplacementRow, UrnSpec};
use crate::error::SpecError;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    Json,
    Toml,
    /// JSON when the first non-blank character is `{`, TOML otherwise.
    Auto,
}

impl DocumentFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => DocumentFormat::Json,
            Some("toml") => DocumentFormat::Toml,
            _ => DocumentFormat::Auto,
        }
    }
}

pub fn parse_spec_file(path: &Path) -> Result<UrnSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text, DocumentFormat::from_path(path))
}

pub fn parse_spec(text: &str, format: DocumentFormat) -> Result<UrnSpec, SpecError> {
    let format = match format {
        DocumentFormat::Auto if text.trim_start().starts_with('{') => DocumentFormat::Json,
        DocumentFormat::Auto => DocumentFormat::Toml,
        f => f,
    };
    let value = match format {
        DocumentFormat::Json => serde_json::from_str::<Value>(text).map_err(|e| SpecError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?,
        _ => toml_to_json(text)?,
    };
    spec_from_value(&value)
}

fn toml_to_json(text: &str) -> Result<Value, SpecError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| line_col(text, s.start))
            .unwrap_or((0, 0));
        SpecError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    convert_toml(&toml::Value::Table(table), "")
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
    (line, column)
}

fn convert_toml(value: &toml::Value, path: &str) -> Result<Value, SpecError> {
    Ok(match value {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => Value::Number((*i).into()),
        toml::Value::Float(f) => {
            if !f.is_finite() {
                return Err(SpecError::field(path, "non-finite number"));
            }
            Value::String(format!("{f}"))
        }
        toml::Value::Boolean(b) => Value::Bool(*b),
        toml::Value::Datetime(_) => return Err(SpecError::field(path, "datetimes are not allowed")),
        toml::Value::Array(items) => Value::Array(
            items
                .iter()
                .enumerate()
                .map(|(k, v)| convert_toml(v, &format!("{path}[{k}]")))
                .collect::<Result<_, _>>()?,
        ),
        toml::Value::Table(t) => {
            let mut map = Map::new();
            for (k, v) in t {
                let sub = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                map.insert(k.clone(), convert_toml(v, &sub)?);
            }
            Value::Object(map)
        }
    })
}

fn rational_at(value: &Value, path: &str) -> Result<Rational, SpecError> {
    let literal = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(SpecError::field(path, "expected a number or a \"num/den\" string")),
    };
    literal
        .parse()
        .map_err(|e: crate::rational::ParseRationalError| SpecError::field(path, e.to_string()))
}

fn object_at<'a>(
    value: &'a Value,
    path: &str,
    allowed: &[&str],
) -> Result<&'a Map<String, Value>, SpecError> {
    let map = value
        .as_object()
        .ok_or_else(|| SpecError::field(path, "expected a table/object"))?;
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            let at = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
            return Err(SpecError::field(at, "unknown field"));
        }
    }
    Ok(map)
}

fn array_at<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>, SpecError> {
    value
        .as_array()
        .ok_or_else(|| SpecError::field(path, "expected a list"))
}

fn spec_from_value(value: &Value) -> Result<UrnSpec, SpecError> {
    let top = object_at(value, "", &["colours", "rows", "meta"])?;
    let colours_v = top
        .get("colours")
        .ok_or_else(|| SpecError::field("colours", "missing field"))?;
    let rows_v = top
        .get("rows")
        .ok_or_else(|| SpecError::field("rows", "missing field"))?;

    let mut colours = Vec::new();
    let mut labels = BTreeSet::new();
    for (i, c) in array_at(colours_v, "colours")?.iter().enumerate() {
        let path = format!("colours[{i}]");
        let obj = object_at(c, &path, &["label", "activity", "initial", "clause"])?;
        let label = match obj.get("label") {
            None => None,
            Some(Value::String(s)) => {
                if !labels.insert(s.clone()) {
                    return Err(SpecError::field(format!("{path}.label"), format!("duplicate label {s:?}")));
                }
                Some(s.clone())
            }
            Some(_) => return Err(SpecError::field(format!("{path}.label"), "expected a string")),
        };
        let activity = match obj.get("activity") {
            Some(v) => rational_at(v, &format!("{path}.activity"))?,
            None => Rational::one(),
        };
        let initial = rational_at(
            obj.get("initial")
                .ok_or_else(|| SpecError::field(format!("{path}.initial"), "missing field"))?,
            &format!("{path}.initial"),
        )?;
        let clause = match obj.get("clause").map(|v| v.as_str()) {
            None => None,
            Some(Some("a")) => Some(Clause::A),
            Some(Some("b")) => Some(Clause::B),
            Some(_) => return Err(SpecError::field(format!("{path}.clause"), "expected \"a\" or \"b\"")),
        };
        colours.push(Colour {
            label,
            activity,
            initial,
            clause,
        });
    }
    let q = colours.len();
    if q == 0 {
        return Err(SpecError::field("colours", "at least one colour is required"));
    }

    let rows_list = array_at(rows_v, "rows")?;
    if rows_list.len() != q {
        return Err(SpecError::field(
            "rows",
            format!("expected {q} rows (one per colour), found {}", rows_list.len()),
        ));
    }
    let mut rows = Vec::with_capacity(q);
    for (i, row_v) in rows_list.iter().enumerate() {
        let path = format!("rows[{i}]");
        let mut atoms = Vec::new();
        for (k, atom_v) in array_at(row_v, &path)?.iter().enumerate() {
            let apath = format!("{path}[{k}]");
            let obj = object_at(atom_v, &apath, &["p", "v"])?;
            let p = rational_at(
                obj.get("p").ok_or_else(|| SpecError::field(format!("{apath}.p"), "missing field"))?,
                &format!("{apath}.p"),
            )?;
            if !p.is_positive() {
                return Err(SpecError::field(format!("{apath}.p"), "probabilities must be strictly positive"));
            }
            let vs = array_at(
                obj.get("v").ok_or_else(|| SpecError::field(format!("{apath}.v"), "missing field"))?,
                &format!("{apath}.v"),
            )?;
            if vs.len() != q {
                return Err(SpecError::field(
                    format!("{apath}.v"),
                    format!("atom vector must have length {q}, found {}", vs.len()),
                ));
            }
            let v = vs
                .iter()
                .enumerate()
                .map(|(j, x)| rational_at(x, &format!("{apath}.v[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            atoms.push(Atom { p, v });
        }
        if !atoms.is_empty() {
            let total: Rational = atoms.iter().map(|a| a.p.clone()).sum();
            if total != Rational::one() {
                return Err(SpecError::field(
                    path,
                    format!("probabilities must sum to 1 (they sum to {total})"),
                ));
            }
        }
        rows.push(ReplacementRow { atoms });
    }

    let meta = match top.get("meta") {
        None => BTreeMap::new(),
        Some(Value::Object(m)) => m.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        Some(_) => return Err(SpecError::field("meta", "expected a table/object")),
    };
    Ok(UrnSpec { colours, rows, meta })
}

fn rational_value(x: &Rational) -> Value {
    Value::String(x.to_string())
}

/// Canonical JSON form: sorted keys, every number as a lowest-terms string.
/// Byte-stable for a given spec.
pub fn emit_spec(spec: &UrnSpec) -> String {
    let colours: Vec<Value> = spec
        .colours
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("activity".into(), rational_value(&c.activity));
            m.insert("initial".into(), rational_value(&c.initial));
            if let Some(label) = &c.label {
                m.insert("label".into(), Value::String(label.clone()));
            }
            if let Some(clause) = c.clause {
                let s = match clause {
                    Clause::A => "a",
                    Clause::B => "b",
                };
                m.insert("clause".into(), Value::String(s.into()));
            }
            Value::Object(m)
        })
        .collect();
    let rows: Vec<Value> = spec
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.atoms
                    .iter()
                    .map(|a| {
                        let mut m = Map::new();
                        m.insert("p".into(), rational_value(&a.p));
                        m.insert("v".into(), Value::Array(a.v.iter().map(rational_value).collect()));
                        Value::Object(m)
                    })
                    .collect(),
            )
        })
        .collect();
    let mut top = Map::new();
    top.insert("colours".into(), Value::Array(colours));
    top.insert("rows".into(), Value::Array(rows));
    if !spec.meta.is_empty() {
        top.insert(
            "meta".into(),
            Value::Object(spec.meta.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
        );
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values always serialize");
    out.push('\n');
    out
}
