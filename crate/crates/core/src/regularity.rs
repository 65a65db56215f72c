//! Pair densities, epsilon-regularity verdicts, reduced graphs, a
//! degree-profile partitioner and cleaning of regular pairs into
//! super-regular ones along a tree.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Labels};
use crate::structure::SpanningTree;

#[derive(Debug, Error, PartialEq)]
pub enum RegularityError {
    #[error("empty vertex set")]
    EmptyPart,
    #[error("vertex sets overlap")]
    Overlap,
    #[error("exhaustive check limited to 12 vertices per side, got {0} x {1}")]
    TooLargeForExhaustive(usize, usize),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("cleaning cluster {cluster} needs {removed} removals, allowed {allowed}")]
    CleaningOverflow {
        cluster: usize,
        removed: usize,
        allowed: usize,
    },
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eps: f64,
    pub d: f64,
    /// Super-regular degree fraction.
    pub delta: f64,
}

impl RegularityParams {
    pub fn new(eps: f64, d: f64) -> Self {
        RegularityParams {
            eps,
            d,
            delta: d - 2.0 * eps,
        }
    }

    pub fn desk_default() -> Self {
        Self::new(0.05, 0.25)
    }

    pub fn validate(&self) -> Result<(), RegularityError> {
        let ok = 0.0 < self.eps
            && self.eps < self.d
            && self.d <= 1.0
            && 0.0 < self.delta
            && self.delta < self.d;
        if ok {
            Ok(())
        } else {
            Err(RegularityError::BadParams(format!(
                "{self:?} violates 0 < eps < d <= 1, 0 < delta < d"
            )))
        }
    }
}

/// Smallest subset size admitted by the regularity definition.
pub fn min_subset_size(eps: f64, size: usize) -> usize {
    ((eps * size as f64) - 1e-9).ceil().max(1.0) as usize
}

fn check_sets(n: usize, u: &[usize], w: &[usize]) -> Result<Vec<u8>, RegularityError> {
    if u.is_empty() || w.is_empty() {
        return Err(RegularityError::EmptyPart);
    }
    let mut mark = vec![0u8; n];
    for &x in u {
        mark[x] |= 1;
    }
    for &x in w {
        if mark[x] & 1 == 1 {
            return Err(RegularityError::Overlap);
        }
        mark[x] |= 2;
    }
    Ok(mark)
}

fn edges_between(g: &Graph, u: &[usize], in_w: &[bool]) -> u64 {
    u.iter()
        .map(|&x| g.neighbors(x).iter().filter(|&&y| in_w[y]).count() as u64)
        .sum()
}

/// `e(U, W) / (|U| |W|)` as an exact fraction.
pub fn pair_density(g: &Graph, u: &[usize], w: &[usize]) -> Result<Ratio<u64>, RegularityError> {
    let mark = check_sets(g.n(), u, w)?;
    let in_w: Vec<bool> = mark.iter().map(|&m| m & 2 == 2).collect();
    let e = edges_between(g, u, &in_w);
    Ok(Ratio::new(e, (u.len() * w.len()) as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    RegularCertified,
    IrregularWitness,
    NoWitnessFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u_sub: Vec<usize>,
    pub w_sub: Vec<usize>,
    pub sub_density: f64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
}

impl RegularityVerdict {
    fn certified() -> Self {
        RegularityVerdict {
            status: VerdictStatus::RegularCertified,
            witness: None,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.status != VerdictStatus::IrregularWitness
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Heuristic { seed: u64, restarts: usize },
}

/// Deviation test in integers: `|e'/(a b) - e/(A B)| > eps`.
fn deviates(e_sub: u64, a: usize, b: usize, e: u64, big_a: usize, big_b: usize, eps: f64) -> bool {
    let lhs = e_sub as i128 * (big_a * big_b) as i128 - e as i128 * (a * b) as i128;
    let scale = (a * b) as f64 * (big_a * big_b) as f64;
    (lhs.unsigned_abs() as f64) > eps * scale * (1.0 + 1e-12)
}

/// Re-checks a claimed witness from scratch.
pub fn verify_witness(g: &Graph, u: &[usize], w: &[usize], eps: f64, wit: &Witness) -> bool {
    let subset = |sub: &[usize], sup: &[usize]| sub.iter().all(|x| sup.contains(x));
    let mut us = wit.u_sub.clone();
    us.sort_unstable();
    us.dedup();
    let mut ws = wit.w_sub.clone();
    ws.sort_unstable();
    ws.dedup();
    if us.len() != wit.u_sub.len() || ws.len() != wit.w_sub.len() {
        return false;
    }
    if !subset(&us, u) || !subset(&ws, w) {
        return false;
    }
    if us.len() < min_subset_size(eps, u.len()) || ws.len() < min_subset_size(eps, w.len()) {
        return false;
    }
    let (Ok(mark), Ok(mark_sub)) = (check_sets(g.n(), u, w), check_sets(g.n(), &us, &ws)) else {
        return false;
    };
    let e = edges_between(g, u, &mark.iter().map(|&m| m & 2 == 2).collect::<Vec<_>>());
    let e_sub = edges_between(
        g,
        &us,
        &mark_sub.iter().map(|&m| m & 2 == 2).collect::<Vec<_>>(),
    );
    deviates(e_sub, us.len(), ws.len(), e, u.len(), w.len(), eps)
}

pub fn regularity_check(
    g: &Graph,
    u: &[usize],
    w: &[usize],
    eps: f64,
    mode: CheckMode,
) -> Result<RegularityVerdict, RegularityError> {
    let mark = check_sets(g.n(), u, w)?;
    let in_w: Vec<bool> = mark.iter().map(|&m| m & 2 == 2).collect();
    let e = edges_between(g, u, &in_w);
    let total = (u.len() * w.len()) as u64;
    if e == 0 || e == total {
        return Ok(RegularityVerdict::certified());
    }
    let density = e as f64 / total as f64;
    let found = match mode {
        CheckMode::Exhaustive => {
            if u.len() > 12 || w.len() > 12 {
                return Err(RegularityError::TooLargeForExhaustive(u.len(), w.len()));
            }
            exhaustive_search(g, u, w, e, eps)
        }
        CheckMode::Heuristic { seed, restarts } => {
            heuristic_search(g, u, w, e, eps, seed, restarts)
        }
    };
    match found {
        Some((us, ws, es)) => {
            let wit = Witness {
                sub_density: es as f64 / (us.len() * ws.len()) as f64,
                density,
                u_sub: us,
                w_sub: ws,
            };
            // Every emitted witness is re-derived independently.
            assert!(
                verify_witness(g, u, w, eps, &wit),
                "regularity search produced an invalid witness"
            );
            Ok(RegularityVerdict {
                status: VerdictStatus::IrregularWitness,
                witness: Some(wit),
            })
        }
        None => Ok(match mode {
            CheckMode::Exhaustive => RegularityVerdict::certified(),
            CheckMode::Heuristic { .. } => RegularityVerdict {
                status: VerdictStatus::NoWitnessFound,
                witness: None,
            },
        }),
    }
}

/// For a fixed `U'`, the extreme `e(U', W')` over `|W'| = s` are attained by
/// the `s` vertices of `W` with most (fewest) neighbours in `U'`, so checking
/// those two per size is equivalent to enumerating every `W'`.
fn best_response(
    counts: &[(u64, usize)],
    a: usize,
    e: u64,
    big_a: usize,
    big_b: usize,
    eps: f64,
    sizes: &[usize],
) -> Option<(Vec<usize>, u64)> {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut prefix = vec![0u64; sorted.len() + 1];
    for (i, c) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c.0;
    }
    let total = prefix[sorted.len()];
    for &s in sizes {
        let top = prefix[s];
        if deviates(top, a, s, e, big_a, big_b, eps) {
            return Some((sorted[..s].iter().map(|c| c.1).collect(), top));
        }
        let bottom = total - prefix[sorted.len() - s];
        if deviates(bottom, a, s, e, big_a, big_b, eps) {
            return Some((
                sorted[sorted.len() - s..].iter().map(|c| c.1).collect(),
                bottom,
            ));
        }
    }
    None
}

fn exhaustive_search(
    g: &Graph,
    u: &[usize],
    w: &[usize],
    e: u64,
    eps: f64,
) -> Option<(Vec<usize>, Vec<usize>, u64)> {
    let (a, b) = (u.len(), w.len());
    let su = min_subset_size(eps, a);
    let sw = min_subset_size(eps, b);
    // adjacency of each w as a bitmask over positions in u.
    let masks: Vec<u32> = w
        .iter()
        .map(|&y| {
            u.iter()
                .enumerate()
                .filter(|(_, &x)| g.has_edge(x, y))
                .fold(0u32, |m, (i, _)| m | (1 << i))
        })
        .collect();
    let sizes: Vec<usize> = (sw..=b).collect();
    for mask in 1u32..(1 << a) {
        let k = mask.count_ones() as usize;
        if k < su {
            continue;
        }
        let counts: Vec<(u64, usize)> = masks
            .iter()
            .zip(w)
            .map(|(m, &y)| ((m & mask).count_ones() as u64, y))
            .collect();
        if let Some((ws, es)) = best_response(&counts, k, e, a, b, eps, &sizes) {
            let us = (0..a)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| u[i])
                .collect();
            return Some((us, ws, es));
        }
    }
    None
}

fn counts_into(g: &Graph, from: &[usize], targets: &[usize], pos: &[usize]) -> Vec<(u64, usize)> {
    let mut c = vec![0u64; targets.len()];
    for &x in from {
        for &y in g.neighbors(x) {
            if pos[y] != usize::MAX {
                c[pos[y]] += 1;
            }
        }
    }
    c.into_iter().zip(targets.iter().copied()).collect()
}

fn candidate_sizes(min: usize, total: usize) -> Vec<usize> {
    let mut s = vec![min, 2 * min, total / 4, total / 2, total];
    s.retain(|&x| x >= min && x <= total);
    s.sort_unstable();
    s.dedup();
    s
}

/// Alternating best responses from degree-extreme and random starts.
fn heuristic_search(
    g: &Graph,
    u: &[usize],
    w: &[usize],
    e: u64,
    eps: f64,
    seed: u64,
    restarts: usize,
) -> Option<(Vec<usize>, Vec<usize>, u64)> {
    let n = g.n();
    let (a, b) = (u.len(), w.len());
    let mut pos_u = vec![usize::MAX; n];
    let mut pos_w = vec![usize::MAX; n];
    for (i, &x) in u.iter().enumerate() {
        pos_u[x] = i;
    }
    for (i, &y) in w.iter().enumerate() {
        pos_w[y] = i;
    }
    let su = candidate_sizes(min_subset_size(eps, a), a);
    let sw = candidate_sizes(min_subset_size(eps, b), b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let deg_u = counts_into(g, w, u, &pos_u);
    let mut starts: Vec<Vec<usize>> = Vec::new();
    let mut by_deg = deg_u.clone();
    by_deg.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    for &s in &su {
        starts.push(by_deg[..s].iter().map(|c| c.1).collect());
        starts.push(by_deg[a - s..].iter().map(|c| c.1).collect());
    }
    for _ in 0..restarts {
        let s = su[rng.gen_range(0..su.len())];
        let mut pick = u.to_vec();
        pick.shuffle(&mut rng);
        pick.truncate(s);
        starts.push(pick);
    }
    for start in starts {
        let mut us = start;
        for _round in 0..4 {
            let cw = counts_into(g, &us, w, &pos_w);
            if let Some((ws, es)) = best_response(&cw, us.len(), e, a, b, eps, &sw) {
                return Some((us, ws, es));
            }
            // Move to the W' with the most extreme density, then respond on U.
            let mut sorted = cw.clone();
            sorted.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
            let s = sw[0];
            let ws: Vec<usize> = if rng.gen_bool(0.5) {
                sorted[..s].iter().map(|c| c.1).collect()
            } else {
                sorted[b - s..].iter().map(|c| c.1).collect()
            };
            let cu = counts_into(g, &ws, u, &pos_u);
            if let Some((us2, es)) = best_response(&cu, ws.len(), e, b, a, eps, &su) {
                return Some((us2, ws, es));
            }
            let mut su_sorted = cu;
            su_sorted.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
            let s = us.len();
            us = if rng.gen_bool(0.5) {
                su_sorted[..s].iter().map(|c| c.1).collect()
            } else {
                su_sorted[a - s..].iter().map(|c| c.1).collect()
            };
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub edges: u64,
    pub density: f64,
    pub verdict: VerdictStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularDecomposition {
    pub exceptional: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub pairs: Vec<PairEntry>,
    pub reduced: Graph,
    pub params: RegularityParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub r: usize,
    pub exceptional_size: usize,
    pub cluster_size: usize,
    pub reduced_min_degree: usize,
    pub pairs: Vec<PairEntry>,
    pub reduced_edges: Vec<(usize, usize)>,
}

impl RegularDecomposition {
    pub fn r(&self) -> usize {
        self.clusters.len()
    }

    pub fn reduced_min_degree(&self) -> usize {
        self.reduced.min_degree()
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairEntry> {
        let (i, j) = (i.min(j), i.max(j));
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }

    pub fn report(&self) -> DecompositionReport {
        DecompositionReport {
            r: self.r(),
            exceptional_size: self.exceptional.len(),
            cluster_size: self.clusters.first().map_or(0, Vec::len),
            reduced_min_degree: self.reduced_min_degree(),
            pairs: self.pairs.clone(),
            reduced_edges: self.reduced.edges().collect(),
        }
    }

    /// Cluster index of every vertex.
    pub fn labels(&self, n: usize) -> Labels {
        let mut l = vec![None; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                l[v] = Some(i);
            }
        }
        l
    }

    /// Fraction of all edges of `g` running inside regular dense pairs.
    pub fn captured_fraction(&self, g: &Graph) -> f64 {
        if g.edge_count() == 0 {
            return 1.0;
        }
        let captured: u64 = self
            .pairs
            .iter()
            .filter(|p| self.reduced.has_edge(p.i, p.j))
            .map(|p| p.edges)
            .sum();
        captured as f64 / g.edge_count() as f64
    }

    /// Clustered vertices with more than `(eps + d) n` incident edges outside
    /// regular dense pairs.
    pub fn vertex_bound_violations(&self, g: &Graph) -> Vec<usize> {
        let n = g.n();
        let labels = self.labels(n);
        let limit = (self.params.eps + self.params.d) * n as f64;
        (0..n)
            .filter(|&v| {
                let Some(i) = labels[v] else { return false };
                let outside = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| match labels[w] {
                        Some(j) => j == i || !self.reduced.has_edge(i, j),
                        None => true,
                    })
                    .count();
                outside as f64 > limit
            })
            .collect()
    }
}

/// Splits labels into exceptional set and clusters, checking equal sizes.
pub fn clusters_from_labels(
    labels: &[Option<usize>],
    eps: f64,
) -> Result<(Vec<usize>, Vec<Vec<usize>>), RegularityError> {
    let r = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut clusters = vec![Vec::new(); r];
    let mut exceptional = Vec::new();
    for (v, l) in labels.iter().enumerate() {
        match l {
            Some(i) => clusters[*i].push(v),
            None => exceptional.push(v),
        }
    }
    if r == 0 || clusters.iter().any(Vec::is_empty) {
        return Err(RegularityError::BadPartition(
            "labels must use every index 0..r".into(),
        ));
    }
    if clusters.iter().any(|c| c.len() != clusters[0].len()) {
        return Err(RegularityError::BadPartition(
            "clusters differ in size".into(),
        ));
    }
    if exceptional.len() as f64 > eps * labels.len() as f64 + 1e-9 {
        return Err(RegularityError::BadPartition(format!(
            "exceptional set {} exceeds eps n = {:.1}",
            exceptional.len(),
            eps * labels.len() as f64
        )));
    }
    Ok((exceptional, clusters))
}

/// Fills the pair table and the reduced graph. Pairs with both sides at most
/// 12 get an exhaustive verdict, larger pairs a heuristic one.
pub fn build_decomposition(
    g: &Graph,
    labels: &[Option<usize>],
    params: RegularityParams,
    seed: u64,
) -> Result<RegularDecomposition, RegularityError> {
    params.validate()?;
    if labels.len() != g.n() {
        return Err(RegularityError::BadPartition(
            "label count differs from vertex count".into(),
        ));
    }
    let (exceptional, clusters) = clusters_from_labels(labels, params.eps)?;
    let r = clusters.len();
    let mut counts = vec![vec![0u64; r]; r];
    for (u, v) in g.edges() {
        if let (Some(i), Some(j)) = (labels[u], labels[v]) {
            if i != j {
                counts[i.min(j)][i.max(j)] += 1;
            }
        }
    }
    let index_pairs: Vec<(usize, usize)> = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .collect();
    let pairs: Vec<PairEntry> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u, w) = (&clusters[i], &clusters[j]);
            let e = counts[i][j];
            let density = e as f64 / (u.len() * w.len()) as f64;
            let mode = if u.len() <= 12 && w.len() <= 12 {
                CheckMode::Exhaustive
            } else {
                CheckMode::Heuristic {
                    seed: seed ^ ((i as u64) << 32 | j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                    restarts: 10,
                }
            };
            let verdict = regularity_check(g, u, w, params.eps, mode)
                .expect("clusters are disjoint and nonempty")
                .status;
            PairEntry {
                i,
                j,
                edges: e,
                density,
                verdict,
            }
        })
        .collect();
    let reduced_edges: Vec<(usize, usize)> = pairs
        .iter()
        .filter(|p| p.density >= params.d && p.verdict != VerdictStatus::IrregularWitness)
        .map(|p| (p.i, p.j))
        .collect();
    let reduced = Graph::from_edges(r, &reduced_edges).expect("pairs are distinct");
    Ok(RegularDecomposition {
        exceptional,
        clusters,
        pairs,
        reduced,
        params,
    })
}

/// Equal-size clustering by neighbourhood profile.
///
/// Vertices are described by their adjacency to a probe set (all vertices
/// when `n <= 1024`), clustered by capacitated k-modes under Hamming distance,
/// and each cluster is trimmed to the smallest cluster size; trimmed vertices
/// form the exceptional set. Deterministic for a fixed seed.
pub fn heuristic_partition(g: &Graph, r: usize, seed: u64) -> Labels {
    let n = g.n();
    assert!(r >= 1 && r <= n, "need 1 <= r <= n");
    if r == 1 {
        return vec![Some(0); n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<usize> = if n <= 1024 {
        (0..n).collect()
    } else {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        p.truncate(1024);
        p
    };
    let words = probes.len().div_ceil(64);
    let mut feat = vec![0u64; n * words];
    for (j, &p) in probes.iter().enumerate() {
        for &v in g.neighbors(p) {
            feat[v * words + j / 64] |= 1 << (j % 64);
        }
    }
    let row = |v: usize| &feat[v * words..(v + 1) * words];
    let dist = |a: &[u64], b: &[u64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x ^ y).count_ones())
            .sum::<u32>()
    };

    // k-means++ style seeding on Hamming distance.
    let mut centers: Vec<Vec<u64>> = Vec::with_capacity(r);
    let first = rng.gen_range(0..n);
    centers.push(row(first).to_vec());
    let mut chosen = vec![false; n];
    chosen[first] = true;
    let mut best = vec![u32::MAX; n];
    while centers.len() < r {
        let c = centers.last().unwrap();
        for v in 0..n {
            best[v] = best[v].min(dist(row(v), c));
        }
        let total: f64 = (0..n)
            .filter(|&v| !chosen[v])
            .map(|v| (best[v] as f64).powi(2))
            .sum();
        let pick = if total > 0.0 {
            let mut x = rng.gen::<f64>() * total;
            let mut pick = None;
            for v in (0..n).filter(|&v| !chosen[v]) {
                x -= (best[v] as f64).powi(2);
                if x <= 0.0 && best[v] > 0 {
                    pick = Some(v);
                    break;
                }
            }
            pick.unwrap_or_else(|| {
                (0..n)
                    .filter(|&v| !chosen[v])
                    .max_by_key(|&v| best[v])
                    .unwrap()
            })
        } else {
            let free: Vec<usize> = (0..n).filter(|&v| !chosen[v]).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(row(pick).to_vec());
    }

    // Cluster capacity with 2% slack.
    let base = n.div_ceil(r);
    let cap = base + base / 50;
    let mut assign = vec![usize::MAX; n];
    let mut dists = vec![0u32; n * r];
    for _iter in 0..25 {
        for v in 0..n {
            for (c, center) in centers.iter().enumerate() {
                dists[v * r + c] = dist(row(v), center);
            }
        }
        let mut order: Vec<(u32, usize, usize)> = (0..n)
            .flat_map(|v| (0..r).map(move |c| (0, v, c)))
            .collect();
        for o in order.iter_mut() {
            o.0 = dists[o.1 * r + o.2];
        }
        order.sort_unstable();
        let mut load = vec![0usize; r];
        let mut next = vec![usize::MAX; n];
        let mut placed = 0;
        for &(_, v, c) in &order {
            if next[v] == usize::MAX && load[c] < cap {
                next[v] = c;
                load[c] += 1;
                placed += 1;
                if placed == n {
                    break;
                }
            }
        }
        let changed = next != assign;
        assign = next;
        // Majority vote per probe bit; an empty cluster is reseeded at the
        // vertex farthest from its assigned center.
        let mut ones = vec![vec![0u32; probes.len()]; r];
        for v in 0..n {
            let c = assign[v];
            let rw = row(v);
            for j in 0..probes.len() {
                if rw[j / 64] >> (j % 64) & 1 == 1 {
                    ones[c][j] += 1;
                }
            }
        }
        for c in 0..r {
            if load[c] == 0 {
                let far = (0..n)
                    .max_by_key(|&v| (dists[v * r + assign[v]], std::cmp::Reverse(v)))
                    .unwrap();
                centers[c] = row(far).to_vec();
                continue;
            }
            let mut center = vec![0u64; words];
            for j in 0..probes.len() {
                if 2 * ones[c][j] > load[c] as u32 {
                    center[j / 64] |= 1 << (j % 64);
                }
            }
            centers[c] = center;
        }
        if !changed && load.iter().all(|&l| l > 0) {
            break;
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); r];
    for v in 0..n {
        members[assign[v]].push(v);
    }
    let m = members.iter().map(Vec::len).min().unwrap_or(0).max(1);
    let mut labels = vec![None; n];
    let mut kept: Vec<Vec<usize>> = members
        .iter()
        .enumerate()
        .filter(|(_, mem)| !mem.is_empty())
        .map(|(c, mem)| {
            let mut mem = mem.clone();
            mem.sort_by_key(|&v| (dist(row(v), &centers[c]), v));
            mem.truncate(m);
            mem.sort_unstable();
            mem
        })
        .collect();
    kept.sort_by_key(|c| c[0]);
    for (i, c) in kept.iter().enumerate() {
        for &v in c {
            labels[v] = Some(i);
        }
    }
    labels
}

/// Removes from each cluster the vertices with fewer than `(d - eps)|V_j|`
/// neighbours in some tree-neighbouring cluster `V_j`.
pub fn superregularize(
    g: &Graph,
    clusters: &[Vec<usize>],
    tree: &SpanningTree,
    params: RegularityParams,
    k: usize,
) -> Result<Vec<Vec<usize>>, RegularityError> {
    let n = g.n();
    let tree_adj = tree.adjacency();
    let mut owner = vec![usize::MAX; n];
    for (i, c) in clusters.iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    let mut out = Vec::with_capacity(clusters.len());
    for (i, cluster) in clusters.iter().enumerate() {
        let needs: Vec<(usize, usize)> = tree_adj[i]
            .iter()
            .map(|&j| {
                (
                    j,
                    ((params.d - params.eps) * clusters[j].len() as f64 - 1e-9)
                        .ceil()
                        .max(0.0) as usize,
                )
            })
            .collect();
        let mut kept = Vec::with_capacity(cluster.len());
        let mut tally = vec![0usize; clusters.len()];
        for &v in cluster {
            for &(j, _) in &needs {
                tally[j] = 0;
            }
            for &w in g.neighbors(v) {
                if owner[w] != usize::MAX {
                    tally[owner[w]] += 1;
                }
            }
            if needs.iter().all(|&(j, need)| tally[j] >= need) {
                kept.push(v);
            }
            for t in tally.iter_mut() {
                *t = 0;
            }
        }
        let removed = cluster.len() - kept.len();
        let allowed =
            (8.0 * (k as f64 + 1.0) * params.eps * cluster.len() as f64 + 1e-9).floor() as usize;
        if removed > allowed || 2 * kept.len() < cluster.len() {
            return Err(RegularityError::CleaningOverflow {
                cluster: i,
                removed,
                allowed,
            });
        }
        out.push(kept);
    }
    Ok(out)
}
