//! Reduced-graph structure: the `k` parameter, the small-component case
//! split, and spanning trees of bounded maximum degree.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::regularity::RegularityParams;

#[derive(Debug, Error, PartialEq)]
pub enum StructureError {
    #[error("gamma = {0} is outside (0, 1/2)")]
    OutOfRange(f64),
    #[error("component of order {order} is smaller than 2*delta(R) but has no triangle")]
    TriangleNotFound { order: usize },
    #[error("spanning tree precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no degree-reducing swap exists at vertex {0}")]
    NoSwapAvailable(usize),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

const GAMMA_SLACK: f64 = 1e-9;

/// The unique integer with `k <= 1/(2 gamma) < k + 1`.
pub fn compute_k(gamma: f64) -> Result<usize, StructureError> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(StructureError::OutOfRange(gamma));
    }
    // 1/(2 gamma) within rounding noise of an integer counts as that integer.
    Ok((1.0 / (2.0 * gamma) + GAMMA_SLACK).floor() as usize)
}

/// Parameters of one extraction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub gamma: f64,
    pub k: usize,
    pub beta: f64,
    /// Order of the triangulation placed in the small-component case.
    pub s: usize,
    pub params: RegularityParams,
    pub seed: u64,
    /// Largest cluster count tried by the partitioner.
    pub r_max: usize,
    /// Skip the `n >= (16 r)^3` size requirement of the quadrangulation builder.
    pub waive_size_check: bool,
    /// Continue (with a recorded violation) when `delta(G) < gamma n`.
    pub allow_low_min_degree: bool,
    pub embed_restarts: usize,
    pub max_case1_depth: usize,
}

impl PipelineConfig {
    pub fn new(gamma: f64) -> Result<Self, StructureError> {
        let k = compute_k(gamma)?;
        let beta = gamma - 1.0 / (2.0 * (k as f64 + 1.0));
        let cfg = PipelineConfig {
            gamma,
            k,
            beta,
            s: 12,
            params: RegularityParams::desk_default(),
            seed: 0,
            r_max: 12,
            waive_size_check: false,
            allow_low_min_degree: false,
            embed_restarts: 20,
            max_case1_depth: 3,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        if compute_k(self.gamma)? != self.k {
            return Err(StructureError::BadConfig(format!(
                "k = {} does not match gamma",
                self.k
            )));
        }
        if self.beta <= 0.0 {
            return Err(StructureError::BadConfig("beta must be positive".into()));
        }
        if self.s < 6 || !self.s.is_multiple_of(6) {
            return Err(StructureError::BadConfig(format!(
                "s = {} must be a positive multiple of 6",
                self.s
            )));
        }
        self.params
            .validate()
            .map_err(|e| StructureError::BadConfig(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseSplit {
    /// A component with fewer than `2 delta(R)` vertices, and a triangle in it.
    SmallComponent {
        component: Vec<usize>,
        triangle: [usize; 3],
    },
    AllLarge {
        components: Vec<Vec<usize>>,
    },
}

pub fn case_split(reduced: &Graph, delta_r: usize) -> Result<CaseSplit, StructureError> {
    let components = reduced.components();
    if let Some(comp) = components.iter().find(|c| c.len() < 2 * delta_r) {
        let triangle = find_triangle(reduced, comp)
            .ok_or(StructureError::TriangleNotFound { order: comp.len() })?;
        return Ok(CaseSplit::SmallComponent {
            component: comp.clone(),
            triangle,
        });
    }
    Ok(CaseSplit::AllLarge { components })
}

/// Lexicographically smallest triangle inside `vertices`.
pub fn find_triangle(g: &Graph, vertices: &[usize]) -> Option<[usize; 3]> {
    for &a in vertices {
        for &b in g.neighbors(a).iter().filter(|&&b| b > a) {
            for &c in g.neighbors(b).iter().filter(|&&c| c > b) {
                if g.has_edge(a, c) {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

/// Spanning tree on the vertices of a host graph, with the score history of
/// the local search that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    /// Score (sum of squared degrees) before the first swap and after each swap.
    pub score_history: Vec<u64>,
}

impl SpanningTree {
    /// Tree with the given edges and no search history.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degrees = vec![0; n];
        for &(u, v) in &edges {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let score_history = vec![score(&degrees)];
        SpanningTree {
            n,
            edges,
            degrees,
            score_history,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn score(&self) -> u64 {
        score(&self.degrees)
    }

    pub fn swaps(&self) -> usize {
        self.score_history.len().saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        adj
    }

    /// Connected, acyclic, spanning.
    pub fn is_spanning_tree(&self) -> bool {
        if self.n == 0 {
            return self.edges.is_empty();
        }
        self.edges.len() + 1 == self.n
            && Graph::from_edges_dedup(self.n, self.edges.iter().copied()).is_connected()
    }
}

fn score(degrees: &[usize]) -> u64 {
    degrees.iter().map(|&d| (d * d) as u64).sum()
}

pub fn bfs_tree(g: &Graph, root: usize) -> Vec<(usize, usize)> {
    let mut seen = vec![false; g.n()];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                edges.push((v, w));
                queue.push_back(w);
            }
        }
    }
    edges
}

/// Spanning tree with maximum degree at most `8k` for a connected graph of
/// minimum degree at least `v/(2k)`.
///
/// Starts from the BFS tree at vertex 0 and repeatedly takes the lowest-index
/// vertex `u` with `deg_T(u) > 8k`. The components of `T - u` are visited from
/// smallest to largest; for the component `C` and its vertex `v` adjacent to
/// `u`, the lowest-index `u'` outside `C` with `u'v` in the graph and
/// `deg_T(u') < 8k` replaces `u` as the tree neighbour of `v`. Every swap drops
/// the score by at least 2.
pub fn bounded_spanning_tree(g: &Graph, k: usize) -> Result<SpanningTree, StructureError> {
    let n = g.n();
    if k == 0 {
        return Err(StructureError::PreconditionViolated(
            "k must be positive".into(),
        ));
    }
    if n == 0 || !g.is_connected() {
        return Err(StructureError::PreconditionViolated(
            "graph is not connected".into(),
        ));
    }
    if 2 * k * g.min_degree() < n {
        return Err(StructureError::PreconditionViolated(format!(
            "min degree {} < v/(2k) = {n}/{}",
            g.min_degree(),
            2 * k
        )));
    }
    local_search(g, 8 * k, bfs_tree(g, 0))
}

pub(crate) fn local_search(
    g: &Graph,
    bound: usize,
    start: Vec<(usize, usize)>,
) -> Result<SpanningTree, StructureError> {
    let n = g.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &start {
        adj[u].push(v);
        adj[v].push(u);
    }
    let degrees = |adj: &[Vec<usize>]| adj.iter().map(Vec::len).collect::<Vec<_>>();
    let mut history = vec![score(&degrees(&adj))];
    while let Some(u) = (0..n).find(|&u| adj[u].len() > bound) {
        // Branches of T - u, labelled by the neighbour of u they contain.
        let mut branch = vec![usize::MAX; n];
        let mut sizes: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        let mut nbrs = adj[u].clone();
        nbrs.sort_unstable();
        for &w in &nbrs {
            let mut members = vec![w];
            branch[w] = w;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for &y in &adj[x] {
                    if y != u && branch[y] == usize::MAX {
                        branch[y] = w;
                        members.push(y);
                    }
                }
            }
            sizes.push((members.len(), w, members));
        }
        sizes.sort_by_key(|&(s, w, _)| (s, w));
        let mut swapped = false;
        for (_, v, members) in &sizes {
            let v = *v;
            let mut in_c = vec![false; n];
            for &m in members {
                in_c[m] = true;
            }
            let target = g
                .neighbors(v)
                .iter()
                .copied()
                .find(|&x| x != u && !in_c[x] && adj[x].len() < bound);
            if let Some(x) = target {
                adj[u].retain(|&y| y != v);
                adj[v].retain(|&y| y != u);
                adj[v].push(x);
                adj[x].push(v);
                swapped = true;
                break;
            }
        }
        if !swapped {
            return Err(StructureError::NoSwapAvailable(u));
        }
        let s = score(&degrees(&adj));
        debug_assert!(s < *history.last().unwrap());
        history.push(s);
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect::<Vec<_>>();
    Ok(SpanningTree {
        n,
        degrees: degrees(&adj),
        edges,
        score_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_disjoint_biclique, gen_random_min_degree};

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n)
            .map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))
            .collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn k_values() {
        assert_eq!(compute_k(0.3), Ok(1));
        assert_eq!(compute_k(0.25), Ok(2));
        assert_eq!(compute_k(0.05), Ok(10));
        assert_eq!(compute_k(1.0 / 6.0), Ok(3));
        assert!(compute_k(0.5).is_err());
        assert!(compute_k(0.0).is_err());
    }

    #[test]
    fn config_derives_beta() {
        let cfg = PipelineConfig::new(0.25).unwrap();
        assert_eq!(cfg.k, 2);
        assert!((cfg.beta - (0.25 - 1.0 / 6.0)).abs() < 1e-12);
        let mut bad = cfg.clone();
        bad.s = 7;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn case_split_examples() {
        match case_split(&complete(4), 3).unwrap() {
            CaseSplit::SmallComponent { triangle, .. } => assert_eq!(triangle, [0, 1, 2]),
            other => panic!("{other:?}"),
        }
        let two = gen_disjoint_biclique(2, 5);
        assert!(
            matches!(case_split(&two, 5).unwrap(), CaseSplit::AllLarge { components } if components.len() == 2)
        );
        assert!(matches!(
            case_split(&cycle(7), 2).unwrap(),
            CaseSplit::AllLarge { .. }
        ));
        // Triangle-free small component.
        assert_eq!(
            case_split(&cycle(4), 3),
            Err(StructureError::TriangleNotFound { order: 4 })
        );
    }

    #[test]
    fn spanning_tree_small_examples() {
        let t = bounded_spanning_tree(&complete(8), 1).unwrap();
        assert!(t.is_spanning_tree());
        assert!(t.max_degree() <= 8);
        // BFS from 0 in K_8 is a star of degree 7: no swap needed.
        assert_eq!(t.swaps(), 0);

        let t = bounded_spanning_tree(&cycle(12), 3).unwrap();
        assert_eq!(t.max_degree(), 2);
        assert_eq!(t.edges.len(), 11);
    }

    #[test]
    fn local_search_reduces_star() {
        // K_{1,m} plus a path over the leaves; star center degree must drop.
        let m = 20;
        let mut e: Vec<(usize, usize)> = (1..=m).map(|i| (0, i)).collect();
        e.extend((1..m).map(|i| (i, i + 1)));
        let g = Graph::from_edges(m + 1, &e).unwrap();
        let t = local_search(&g, 4, bfs_tree(&g, 0)).unwrap();
        assert!(t.is_spanning_tree());
        assert!(t.max_degree() <= 4);
        assert!(t.score_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn spanning_tree_random_dense() {
        let g = gen_random_min_degree(60, 15, 3).unwrap();
        let t = bounded_spanning_tree(&g, 2).unwrap();
        assert!(t.is_spanning_tree());
        assert!(t.max_degree() <= 16);
        assert!(t.score_history.windows(2).all(|w| w[1] < w[0]));
        assert!(t.edges.iter().all(|&(u, v)| g.has_edge(u, v)));
    }

    #[test]
    fn spanning_tree_preconditions() {
        assert!(matches!(
            bounded_spanning_tree(&Graph::empty(3), 1),
            Err(StructureError::PreconditionViolated(_))
        ));
        // Path on 10 vertices: min degree 1 < 10/2.
        let e: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
        let p = Graph::from_edges(10, &e).unwrap();
        assert!(matches!(
            bounded_spanning_tree(&p, 1),
            Err(StructureError::PreconditionViolated(_))
        ));
    }
}
