use serde::Serialize;

use crate::error::NonTriangular;
use crate::model::MeanMatrix;

/// Colour graph with edge `i → j` iff `r_ij > 0` and `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColourGraph {
    pub q: usize,
    pub edges: Vec<(usize, usize)>,
    /// `parents[i]` lists every `j` with `j → i`.
    pub parents: Vec<Vec<usize>>,
    pub children: Vec<Vec<usize>>,
    /// A topological order: ancestors always precede descendants.
    pub topo_order: Vec<usize>,
    pub minimal: Vec<usize>,
    /// `before[i][j]` is true iff there is a nonempty path from `i` to `j`.
    #[serde(skip)]
    pub before: Vec<Vec<bool>>,
}

impl ColourGraph {
    /// Strict precedence `i ≺ j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.before[i][j]
    }

    /// Weak precedence `i ⪯ j`.
    pub fn precedes_eq(&self, i: usize, j: usize) -> bool {
        i == j || self.before[i][j]
    }

    /// All `j ⪯ i`.
    pub fn ancestors_eq(&self, i: usize) -> Vec<usize> {
        (0..self.q).filter(|&j| self.precedes_eq(j, i)).collect()
    }
}

pub fn build_graph(mean: &MeanMatrix) -> Result<ColourGraph, NonTriangular> {
    let q = mean.q();
    let mut parents = vec![Vec::new(); q];
    let mut children = vec![Vec::new(); q];
    let mut edges = Vec::new();
    for i in 0..q {
        for j in 0..q {
            if i != j && mean.get(i, j).is_positive() {
                edges.push((i, j));
                parents[j].push(i);
                children[i].push(j);
            }
        }
    }

    // Kahn's algorithm, taking the smallest ready index for a stable order.
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..q).filter(|&i| indegree[i] == 0).collect();
    let mut topo_order = Vec::with_capacity(q);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        topo_order.push(i);
        for &j in &children[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if topo_order.len() < q {
        return Err(NonTriangular {
            cycle: find_cycle(&children, &indegree),
        });
    }

    let mut before = vec![vec![false; q]; q];
    for &i in topo_order.iter().rev() {
        for &j in &children[i] {
            before[i][j] = true;
            for k in 0..q {
                if before[j][k] {
                    before[i][k] = true;
                }
            }
        }
    }
    let minimal = (0..q).filter(|&i| parents[i].is_empty()).collect();
    Ok(ColourGraph {
        q,
        edges,
        parents,
        children,
        topo_order,
        minimal,
        before,
    })
}

/// Walks the residual graph (vertices left with positive indegree) until a
/// vertex repeats; the repeated stretch is a directed cycle.
fn find_cycle(children: &[Vec<usize>], indegree: &[usize]) -> Vec<usize> {
    let alive = |v: usize| indegree[v] > 0;
    let start = (0..children.len()).find(|&v| alive(v)).expect("a cycle exists");
    let mut path = vec![start];
    let mut seen = vec![usize::MAX; children.len()];
    seen[start] = 0;
    let mut v = start;
    loop {
        let next = *children[v].iter().find(|&&w| alive(w)).expect("residual vertices have live successors");
        if seen[next] != usize::MAX {
            return path[seen[next]..].to_vec();
        }
        seen[next] = path.len();
        path.push(next);
        v = next;
    }
}
