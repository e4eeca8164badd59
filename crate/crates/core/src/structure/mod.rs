//! Colour graph, exponents and role classification.

mod dummy;
mod exponents;
mod graph;
mod roles;

use serde::Serialize;

pub use dummy::{extend_dummy_iota, extend_dummy_zero};
pub use exponents::{brute_force_exponents, compute_exponents, ExponentTable};
pub use graph::{build_graph, ColourGraph};
pub use roles::{classify_roles, Block, Role, RoleTable};

use crate::error::NonTriangular;
use crate::model::{mean_matrix, MeanMatrix, UrnSpec};
use crate::rational::Rational;

/// Everything the limit calculus needs about one spec.
#[derive(Debug, Clone)]
pub struct Structure {
    pub activities: Vec<Rational>,
    pub mean: MeanMatrix,
    pub graph: ColourGraph,
    pub exponents: ExponentTable,
    pub roles: RoleTable,
}

impl Structure {
    pub fn q(&self) -> usize {
        self.graph.q
    }

    /// `λ̂ = 0` and no colour has `κ_i = κ̂₀`, so the total count is `o(n)`.
    pub fn zero_rate_without_active_maximum(&self) -> bool {
        let e = &self.exponents;
        e.kappa_hat0.is_some_and(|k0| !e.kappa.iter().any(|&k| k == k0))
    }
}

pub fn analyze_structure(spec: &UrnSpec) -> Result<Structure, NonTriangular> {
    let mean = mean_matrix(spec);
    let graph = build_graph(&mean)?;
    let activities = spec.activities();
    let exponents = compute_exponents(&graph, &mean, &activities);
    let roles = classify_roles(&exponents, &graph);
    Ok(Structure {
        activities,
        mean,
        graph,
        exponents,
        roles,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ColourEntry {
    pub index: usize,
    pub label: String,
    pub lambda: Rational,
    pub lambda_star: Rational,
    pub kappa: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rational>,
    pub role: Role,
    pub ancestors: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Globals {
    pub lambda_hat: Rational,
    pub kappa_hat: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_hat0: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub adjacency: Vec<Vec<usize>>,
    pub topological_order: Vec<usize>,
    pub minimal: Vec<usize>,
    pub colours: Vec<ColourEntry>,
    pub globals: Globals,
}

impl StructureReport {
    pub fn new(spec: &UrnSpec, s: &Structure) -> Self {
        let e = &s.exponents;
        let colours = (0..s.q())
            .map(|i| ColourEntry {
                index: i,
                label: spec.label(i),
                lambda: e.lambda[i].clone(),
                lambda_star: e.lambda_star[i].clone(),
                kappa: e.kappa[i],
                gamma: e.gamma.as_ref().map(|g| g[i].clone()),
                role: s.roles.roles[i],
                ancestors: s.roles.ancestors[i].clone(),
            })
            .collect();
        StructureReport {
            adjacency: s.graph.children.clone(),
            topological_order: s.graph.topo_order.clone(),
            minimal: s.graph.minimal.clone(),
            colours,
            globals: Globals {
                lambda_hat: e.lambda_hat.clone(),
                kappa_hat: e.kappa_hat,
                kappa_hat0: e.kappa_hat0,
            },
        }
    }
}
