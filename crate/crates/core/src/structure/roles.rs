use std::collections::BTreeMap;

use serde::Serialize;

use super::{ColourGraph, ExponentTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Leader,
    Subleader,
    Follower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub leader: usize,
    /// Members of the block grouped by `κ`.
    pub levels: BTreeMap<u32, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleTable {
    pub roles: Vec<Role>,
    /// `ancestors[i]` is the set of leaders that colour `i` follows.
    pub ancestors: Vec<Vec<usize>>,
    pub blocks: Vec<Block>,
}

impl RoleTable {
    pub fn leaders(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles.iter().enumerate().filter(|(_, r)| **r == Role::Leader).map(|(i, _)| i)
    }

    pub fn block(&self, leader: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.leader == leader)
    }
}

pub fn classify_roles(exps: &ExponentTable, graph: &ColourGraph) -> RoleTable {
    let q = graph.q;
    let roles: Vec<Role> = (0..q)
        .map(|i| match (exps.lambda[i] == exps.lambda_star[i], exps.kappa[i]) {
            (true, 0) => Role::Leader,
            (true, _) => Role::Subleader,
            (false, _) => Role::Follower,
        })
        .collect();

    let mut ancestors = vec![Vec::new(); q];
    let mut blocks = Vec::new();
    for nu in (0..q).filter(|&i| roles[i] == Role::Leader) {
        let level = &exps.lambda[nu];
        // best[k]: most colours at `level` on a path from nu to k that stays inside the block.
        let mut best: Vec<Option<u32>> = vec![None; q];
        best[nu] = Some(1);
        for &k in &graph.topo_order {
            if k == nu || exps.lambda_star[k] != *level {
                continue;
            }
            let from_parents = graph.parents[k].iter().filter_map(|&j| best[j]).max();
            best[k] = from_parents.map(|b| b + u32::from(exps.lambda[k] == *level));
        }
        for i in 0..q {
            if best[i] == Some(exps.kappa[i] + 1) {
                ancestors[i].push(nu);
            }
        }
        let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &i in &graph.topo_order {
            if exps.lambda_star[i] == *level {
                levels.entry(exps.kappa[i]).or_default().push(i);
            }
        }
        blocks.push(Block { leader: nu, levels });
    }

    RoleTable {
        roles,
        ancestors,
        blocks,
    }
}
