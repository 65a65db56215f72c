//! Exact planarity (maximum planar subgraph size) by branch and bound, and a
//! greedy lower bound.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::plane::{is_planar, planarity_embed, RotationSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarityResult {
    pub value: usize,
    pub edges: Vec<(usize, usize)>,
    pub rotation: RotationSystem,
    pub exact: bool,
    pub nodes_explored: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("node budget exhausted; best planar subgraph found has {} edges", .0.value)]
    BudgetExhausted(Box<PlanarityResult>),
}

fn finish(n: usize, mut edges: Vec<(usize, usize)>, exact: bool, nodes: u64) -> PlanarityResult {
    edges.sort_unstable();
    let g = Graph::from_edges(n, &edges).expect("subgraph edges are distinct");
    let rotation = planarity_embed(&g).expect("witness subgraph is planar");
    PlanarityResult {
        value: edges.len(),
        edges,
        rotation,
        exact,
        nodes_explored: nodes,
    }
}

/// Random insertion order; an edge is kept if the subgraph stays planar.
pub fn pl_greedy(g: &Graph, seed: u64) -> PlanarityResult {
    let mut order: Vec<(usize, usize)> = g.edges().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let kept = greedy_on(g.n(), &order);
    finish(g.n(), kept, false, 0)
}

fn greedy_on(n: usize, order: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut kept = Vec::new();
    for &e in order {
        kept.push(e);
        if !is_planar(&Graph::from_edges(n, &kept).expect("distinct")) {
            kept.pop();
        }
    }
    kept
}

struct Bnb<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
    cap: usize,
    best: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
}

impl Bnb<'_> {
    fn search(&mut self, idx: usize, chosen: &mut Vec<(usize, usize)>) {
        if self.best.len() >= self.cap || self.out_of_budget {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
            return;
        }
        let ub = (chosen.len() + self.edges.len() - idx).min(self.cap);
        if ub <= self.best.len() {
            return;
        }
        if idx == self.edges.len() {
            self.best = chosen.clone();
            return;
        }
        chosen.push(self.edges[idx]);
        if is_planar(&Graph::from_edges(self.n, chosen).expect("distinct")) {
            self.search(idx + 1, chosen);
        }
        chosen.pop();
        self.search(idx + 1, chosen);
    }
}

/// Exact value per connected component, inclusion branch first on edges in
/// decreasing degree-sum order. The per-component bound is `3n - 6`, or
/// `2n - 4` for bipartite components.
pub fn pl_exact(g: &Graph, node_budget: u64) -> Result<PlanarityResult, OracleError> {
    let n = g.n();
    let mut all = Vec::new();
    let mut nodes = 0;
    let mut exact = true;
    for comp in g.components() {
        let nc = comp.len();
        let in_comp: std::collections::HashSet<usize> = comp.iter().copied().collect();
        let mut edges: Vec<(usize, usize)> =
            g.edges().filter(|(u, _)| in_comp.contains(u)).collect();
        if edges.is_empty() {
            continue;
        }
        edges.sort_by_key(|&(u, v)| (std::cmp::Reverse(g.degree(u) + g.degree(v)), u, v));
        let bound = if nc < 3 {
            edges.len()
        } else if g.induced(&comp).bipartition().is_some() {
            2 * nc - 4
        } else {
            3 * nc - 6
        };
        let cap = bound.min(edges.len());
        let seed = greedy_on(n, &edges);
        let mut bnb = Bnb {
            n,
            edges: &edges,
            cap,
            best: seed,
            nodes: 0,
            budget: node_budget.saturating_sub(nodes),
            out_of_budget: false,
        };
        bnb.search(0, &mut Vec::new());
        nodes += bnb.nodes;
        exact &= !bnb.out_of_budget;
        all.extend(bnb.best);
    }
    let res = finish(n, all, exact, nodes);
    if exact {
        Ok(res)
    } else {
        Err(OracleError::BudgetExhausted(Box::new(res)))
    }
}
