use thiserror::Error;

use crate::model::Assumption;

/// Failure to read or interpret a spec document.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("could not read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl SpecError {
    pub(crate) fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Field {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// The colour graph has a directed cycle, so the urn is not triangular.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("colour graph is not acyclic; cycle {}", format_cycle(.cycle))]
pub struct NonTriangular {
    pub cycle: Vec<usize>,
}

fn format_cycle(cycle: &[usize]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("spec fails required assumption {assumption}: {message}")]
    Invalid {
        assumption: Assumption,
        message: String,
    },
    #[error(transparent)]
    NonTriangular(#[from] NonTriangular),
    #[error("internal inconsistency: eigenvector residual {residual} for colour {colour}, leader {leader}")]
    Residual {
        colour: usize,
        leader: usize,
        residual: String,
    },
    #[error("{0}")]
    Refused(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("colour {colour} became negative at step {step}; the spec bypassed validation")]
    NegativeCount { colour: usize, step: u64 },
    #[error("outcome tree too large: more than {limit} leaves")]
    TreeTooLarge { limit: usize },
    #[error("invalid run plan: {0}")]
    InvalidPlan(String),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LawError {
    #[error("moment of order {r} is infinite (finite only for r > {bound})")]
    InfiniteMoment { r: f64, bound: f64 },
    #[error("moment of order {r} is unavailable for this law")]
    UnsupportedOrder { r: f64 },
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("law has no distribution function")]
    NoDistribution,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("check not applicable: {0}")]
    Inapplicable(String),
    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: usize, needed: usize },
    #[error("{extinct} of {total} replicates went extinct but the verdict does not allow it")]
    ExtinctMajority { extinct: usize, total: usize },
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown template '{0}'; run `corpus list` for the available names")]
    UnknownTemplate(String),
    #[error("template {template} has no parameter '{name}'")]
    UnknownParameter { template: String, name: String },
    #[error("parameter {name} of {template}: {message}")]
    BadValue {
        template: String,
        name: String,
        message: String,
    },
    #[error("invalid parameters for {template}: {message}")]
    Constraint { template: String, message: String },
}
