//! Simple undirected graphs on dense indices `0..n`, statistics, instance
//! generators and the plain-text edge-list format.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge ({0}, {1})")]
    ParallelEdge(usize, usize),
    #[error("tree edges do not form a tree on {0} vertices")]
    NotATree(usize),
    #[error("part sizes unbalanced: max {max} > 2 * min {min}")]
    Unbalanced { min: usize, max: usize },
    #[error("empty part")]
    EmptyPart,
    #[error("min degree {dmin} impossible on {n} vertices")]
    BadMinDegree { n: usize, dmin: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Simple undirected graph. Adjacency lists are sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Partition labels: `Some(i)` for part `i`, `None` for the exceptional set.
pub type Labels = Vec<Option<usize>>;

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting loops and parallel edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::ParallelEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph {
            adj,
            edge_count: edges.len(),
        })
    }

    /// Builds a graph from possibly repeated pairs; duplicates and loops are dropped.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "vertex out of range");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut twice = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adj,
            edge_count: twice / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Proper 2-colouring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.n();
        let mut color: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                let c = color[v].unwrap();
                for &w in &self.adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(!c);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    /// Induced subgraph on `vertices`; local index `i` is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut twice = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if local[w] != usize::MAX {
                    adj[i].push(local[w]);
                }
            }
            adj[i].sort_unstable();
            twice += adj[i].len();
        }
        Graph {
            adj,
            edge_count: twice / 2,
        }
    }

    pub fn to_edge_list_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.n(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    /// Parses the "n m" header plus `m` lines of "u v".
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let nums = parse_pair(header, 1)?;
        let (n, m) = nums;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            edges.push(parse_pair(line, i + 1)?);
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, &edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(GraphError::Parse {
            line: lineno,
            msg: format!("expected two integers, got {line:?}"),
        }),
    }
}

/// Label sidecar: one part index per line, `-1` for the exceptional set.
pub fn labels_to_text(labels: &[Option<usize>]) -> String {
    let mut s = String::new();
    for l in labels {
        match l {
            Some(i) => writeln!(s, "{i}").unwrap(),
            None => writeln!(s, "-1").unwrap(),
        }
    }
    s
}

pub fn parse_labels(text: &str) -> Result<Labels, GraphError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let v: i64 = l.trim().parse().map_err(|_| GraphError::Parse {
                line: i + 1,
                msg: l.to_string(),
            })?;
            Ok(if v < 0 { None } else { Some(v as usize) })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub e: usize,
    pub min_degree: usize,
    pub component_sizes: Vec<usize>,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    GraphStats {
        n: g.n(),
        e: g.edge_count(),
        min_degree: g.min_degree(),
        component_sizes: g.components().iter().map(Vec::len).collect(),
    }
}

/// `k` vertex-disjoint copies of `K_{t,t}`. Copy `c` occupies `2ct..2(c+1)t`,
/// its first `t` vertices forming one side.
pub fn gen_disjoint_biclique(k: usize, t: usize) -> Graph {
    let mut edges = Vec::with_capacity(k * t * t);
    for c in 0..k {
        let base = 2 * c * t;
        for a in 0..t {
            for b in 0..t {
                edges.push((base + a, base + t + b));
            }
        }
    }
    Graph::from_edges(2 * k * t, &edges).expect("biclique edges are simple")
}

/// Natural part labels for [`gen_disjoint_biclique`]: side `j` of copy `c` is part `2c + j`.
pub fn biclique_labels(k: usize, t: usize) -> Labels {
    (0..2 * k * t).map(|v| Some(v / t)).collect()
}

pub(crate) fn check_tree(r: usize, tree_edges: &[(usize, usize)]) -> Result<(), GraphError> {
    if r == 0 || tree_edges.len() + 1 != r {
        return Err(GraphError::NotATree(r));
    }
    let g = Graph::from_edges(r, tree_edges).map_err(|_| GraphError::NotATree(r))?;
    if !g.is_connected() {
        return Err(GraphError::NotATree(r));
    }
    Ok(())
}

pub(crate) fn check_balanced(sizes: &[usize]) -> Result<(), GraphError> {
    let min = *sizes.iter().min().ok_or(GraphError::EmptyPart)?;
    let max = *sizes.iter().max().unwrap();
    if min == 0 {
        return Err(GraphError::EmptyPart);
    }
    if max > 2 * min {
        return Err(GraphError::Unbalanced { min, max });
    }
    Ok(())
}

/// Blow-up of a tree: complete bipartite between parts joined by a tree edge,
/// plus independent noise edges (probability `noise_prob`) between parts that
/// are not joined. Parts are independent sets, laid out consecutively.
pub fn gen_tree_blowup(
    tree_edges: &[(usize, usize)],
    part_sizes: &[usize],
    noise_prob: f64,
    seed: u64,
) -> Result<(Graph, Labels), GraphError> {
    let r = part_sizes.len();
    check_tree(r, tree_edges)?;
    check_balanced(part_sizes)?;
    let mut start = vec![0; r + 1];
    for i in 0..r {
        start[i + 1] = start[i] + part_sizes[i];
    }
    let n = start[r];
    let mut joined = vec![vec![false; r]; r];
    for &(i, j) in tree_edges {
        joined[i][j] = true;
        joined[j][i] = true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            for u in start[i]..start[i + 1] {
                for v in start[j]..start[j + 1] {
                    if joined[i][j] || (noise_prob > 0.0 && rng.gen_bool(noise_prob)) {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    let labels = (0..r)
        .flat_map(|i| std::iter::repeat_n(Some(i), part_sizes[i]))
        .collect();
    Ok((
        Graph::from_edges(n, &edges).expect("blow-up edges are simple"),
        labels,
    ))
}

/// Random graph with minimum degree at least `dmin`: `G(n, dmin/(n-1))`
/// followed by joining each deficient vertex to random non-neighbours.
pub fn gen_random_min_degree(n: usize, dmin: usize, seed: u64) -> Result<Graph, GraphError> {
    if dmin > 0 && dmin >= n {
        return Err(GraphError::BadMinDegree { n, dmin });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<bool>> = vec![vec![false; n]; n];
    let p = if n > 1 {
        dmin as f64 / (n - 1) as f64
    } else {
        0.0
    };
    for u in 0..n {
        for v in u + 1..n {
            if p > 0.0 && rng.gen_bool(p.min(1.0)) {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
    }
    for u in 0..n {
        let deg = adj[u].iter().filter(|&&b| b).count();
        if deg < dmin {
            let mut non: Vec<usize> = (0..n).filter(|&v| v != u && !adj[u][v]).collect();
            non.shuffle(&mut rng);
            for &v in non.iter().take(dmin - deg) {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| adj[u][v])
        .collect();
    Ok(Graph::from_edges(n, &edges).expect("simple"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn stats_of_small_graphs() {
        assert_eq!(
            graph_stats(&complete(4)),
            GraphStats {
                n: 4,
                e: 6,
                min_degree: 3,
                component_sizes: vec![4]
            }
        );
        assert_eq!(
            graph_stats(&Graph::empty(5)),
            GraphStats {
                n: 5,
                e: 0,
                min_degree: 0,
                component_sizes: vec![1; 5]
            }
        );
        assert_eq!(
            graph_stats(&gen_disjoint_biclique(2, 3)),
            GraphStats {
                n: 12,
                e: 18,
                min_degree: 3,
                component_sizes: vec![6, 6]
            }
        );
    }

    #[test]
    fn biclique_family_formula() {
        for k in 1..=20 {
            for t in 1..=20 {
                let g = gen_disjoint_biclique(k, t);
                let s = graph_stats(&g);
                assert_eq!((s.n, s.e, s.min_degree), (2 * k * t, k * t * t, t));
                assert_eq!(s.component_sizes, vec![2 * t; k]);
                assert_eq!(g.max_degree(), t);
            }
        }
        let m = gen_disjoint_biclique(3, 1);
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3), (4, 5)]);
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert_eq!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(GraphError::ParallelEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange(..))
        ));
    }

    #[test]
    fn tree_blowup_edge_counts() {
        let (g, labels) = gen_tree_blowup(&[(0, 1)], &[4, 4], 0.0, 0).unwrap();
        assert_eq!(g.edge_count(), 16);
        assert_eq!(labels.iter().filter(|l| **l == Some(1)).count(), 4);
        let (g, _) = gen_tree_blowup(&[(0, 1), (1, 2)], &[5, 5, 5], 0.0, 3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (15, 50));
        let star = [(0, 1), (0, 2), (0, 3)];
        let (a, _) = gen_tree_blowup(&star, &[10; 4], 0.1, 7).unwrap();
        let (b, _) = gen_tree_blowup(&star, &[10; 4], 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.edge_count() >= 300);
        assert!(a.edge_count() > 300, "noise should add edges at p = 0.1");
    }

    #[test]
    fn tree_blowup_errors() {
        assert_eq!(
            gen_tree_blowup(&[(0, 1), (0, 1)], &[2, 2, 2], 0.0, 0).unwrap_err(),
            GraphError::NotATree(3)
        );
        assert_eq!(
            gen_tree_blowup(&[(0, 1)], &[2, 2, 2], 0.0, 0).unwrap_err(),
            GraphError::NotATree(3)
        );
        assert!(matches!(
            gen_tree_blowup(&[(0, 1)], &[2, 5], 0.0, 0).unwrap_err(),
            GraphError::Unbalanced { min: 2, max: 5 }
        ));
    }

    #[test]
    fn random_min_degree() {
        assert_eq!(gen_random_min_degree(10, 9, 5).unwrap(), complete(10));
        let g = gen_random_min_degree(40, 10, 1).unwrap();
        assert!(graph_stats(&g).min_degree >= 10);
        assert_eq!(g, gen_random_min_degree(40, 10, 1).unwrap());
        let one = gen_random_min_degree(1, 0, 9).unwrap();
        assert_eq!((one.n(), one.edge_count()), (1, 0));
        assert!(gen_random_min_degree(5, 5, 0).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let (g, labels) = gen_tree_blowup(&[(0, 1), (1, 2)], &[3, 4, 3], 0.2, 11).unwrap();
        let text = g.to_edge_list_text();
        assert!(text.starts_with(&format!("{} {}\n", g.n(), g.edge_count())));
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert_eq!(parse_labels(&labels_to_text(&labels)).unwrap(), labels);
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = complete(5);
        let h = g.induced(&[4, 1, 3]);
        assert_eq!(h.edge_count(), 3);
        assert!(h.has_edge(0, 2));
    }
}
