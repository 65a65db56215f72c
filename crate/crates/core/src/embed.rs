//! Arrangeability of vertex orderings, a randomized greedy embedder of a
//! bounded-degree guest into a blown-up host, and stacked-octahedra
//! triangulations for dense triangle clusters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::plane::{planarity_embed, RotationSystem};

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("guest part {part} has {guest} vertices, host cluster has {host}")]
    SizeMismatch {
        part: usize,
        guest: usize,
        host: usize,
    },
    #[error("guest maximum degree {max} exceeds sqrt(n)/ln(n) = {bound:.2}")]
    DegreeTooLarge { max: usize, bound: f64 },
    #[error("embedding failed after {restarts} restarts ({backtracks} backtracks, deepest {deepest} of {total})")]
    EmbedFailed {
        restarts: usize,
        backtracks: usize,
        deepest: usize,
        total: usize,
    },
    #[error("triangulation order must be a multiple of 3 and at least 6, got {0}")]
    BadOrder(usize),
    #[error("invalid embedding: {0}")]
    Invalid(String),
    #[error("ordering is not a permutation of the guest vertices")]
    BadOrdering,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ArrangeMode {
    /// `x_i` counts whenever it has a later neighbour.
    #[default]
    Literal,
    ExcludeSelf,
}

/// `max_i |N(N(x_i) ∩ {x_{i+1},..}) ∩ {x_1,..,x_i}|`.
pub fn arrangeability_at(
    h: &Graph,
    order: &[usize],
    mode: ArrangeMode,
) -> Result<usize, EmbedError> {
    let n = h.n();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(EmbedError::BadOrdering);
        }
        pos[v] = i;
    }
    if order.len() != n {
        return Err(EmbedError::BadOrdering);
    }
    let mut stamp = vec![usize::MAX; n];
    let mut best = 0;
    for (i, &x) in order.iter().enumerate() {
        let mut count = 0;
        for &s in h.neighbors(x).iter().filter(|&&s| pos[s] > i) {
            for &w in h.neighbors(s) {
                if pos[w] <= i && stamp[w] != i && !(mode == ArrangeMode::ExcludeSelf && w == x) {
                    stamp[w] = i;
                    count += 1;
                }
            }
        }
        best = best.max(count);
    }
    Ok(best)
}

/// Smallest-last ordering: repeatedly strip a minimum-degree vertex (lowest
/// index first) and list the vertices in reverse stripping order.
pub fn ordering_heuristic(h: &Graph) -> Vec<usize> {
    let n = h.n();
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut queue: std::collections::BTreeSet<(usize, usize)> =
        (0..n).map(|v| (deg[v], v)).collect();
    let mut gone = vec![false; n];
    let mut removed = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        gone[v] = true;
        removed.push(v);
        for &w in h.neighbors(v) {
            if !gone[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    removed.reverse();
    removed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    /// Host vertex of every guest vertex.
    pub map: Vec<usize>,
    pub part_respecting: bool,
}

impl EmbeddingMap {
    /// Injectivity, adjacency preservation and `phi(X_i) ⊆ V_i`.
    pub fn verify(
        &self,
        h: &Graph,
        guest_part: &[usize],
        g: &Graph,
        clusters: &[Vec<usize>],
    ) -> Result<(), EmbedError> {
        if self.map.len() != h.n() {
            return Err(EmbedError::Invalid(format!(
                "map covers {} of {} guest vertices",
                self.map.len(),
                h.n()
            )));
        }
        let mut hit = vec![false; g.n()];
        for &v in &self.map {
            if v >= g.n() || std::mem::replace(&mut hit[v], true) {
                return Err(EmbedError::Invalid(format!(
                    "host vertex {v} out of range or used twice"
                )));
            }
        }
        if let Some((x, y)) = h
            .edges()
            .find(|&(x, y)| !g.has_edge(self.map[x], self.map[y]))
        {
            return Err(EmbedError::Invalid(format!(
                "guest edge {x}-{y} is not a host edge"
            )));
        }
        let mut owner = vec![usize::MAX; g.n()];
        for (i, c) in clusters.iter().enumerate() {
            for &v in c {
                owner[v] = i;
            }
        }
        if let Some(x) = (0..h.n()).find(|&x| owner[self.map[x]] != guest_part[x]) {
            return Err(EmbedError::Invalid(format!(
                "guest vertex {x} left its part"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Skip the `Δ(H) ≤ sqrt(n)/ln n` precondition.
    pub waive_degree_check: bool,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            seed: 0,
            restarts: 20,
            waive_degree_check: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbedStats {
    pub restarts: usize,
    pub backtracks: usize,
    pub matched_tail: usize,
}

/// Guest ordering with the degree-2 vertices whose neighbours all have
/// larger degree moved to the end. The rest follow breadth-first order.
pub fn slack_last_order(h: &Graph) -> Vec<usize> {
    let n = h.n();
    let slack: Vec<bool> = (0..n)
        .map(|v| h.degree(v) == 2 && h.neighbors(v).iter().all(|&w| h.degree(w) > 2))
        .collect();
    let mut seen = vec![false; n];
    let mut head = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            if !slack[v] {
                head.push(v);
            }
            for &w in h.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    head.extend((0..n).filter(|&v| slack[v]));
    head
}

struct Search<'a> {
    h: &'a Graph,
    g: &'a Graph,
    guest_part: &'a [usize],
    owner: Vec<usize>,
    phi: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn candidates(&self, x: usize, exclude: usize) -> Vec<usize> {
        let placed: Vec<usize> = self
            .h
            .neighbors(x)
            .iter()
            .map(|&y| self.phi[y])
            .filter(|&v| v != usize::MAX)
            .collect();
        let part = self.guest_part[x];
        let ok = |v: usize| {
            v != exclude
                && !self.used[v]
                && self.owner[v] == part
                && placed.iter().all(|&p| self.g.has_edge(p, v))
        };
        match placed.iter().min_by_key(|&&p| self.g.degree(p)) {
            Some(&p) => self
                .g
                .neighbors(p)
                .iter()
                .copied()
                .filter(|&v| ok(v))
                .collect(),
            None => (0..self.g.n()).filter(|&v| ok(v)).collect(),
        }
    }

    fn place(&mut self, x: usize, v: usize) {
        self.phi[x] = v;
        self.used[v] = true;
    }

    fn unplace(&mut self, x: usize) {
        self.used[self.phi[x]] = false;
        self.phi[x] = usize::MAX;
    }
}

fn kuhn(options: &[Vec<usize>], slot_count: usize) -> Option<Vec<usize>> {
    fn augment(i: usize, options: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
        for &s in &options[i] {
            if !seen[s] {
                seen[s] = true;
                if owner[s] == usize::MAX || augment(owner[s], options, owner, seen) {
                    owner[s] = i;
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![usize::MAX; slot_count];
    let mut seen = vec![false; slot_count];
    for i in 0..options.len() {
        seen.iter_mut().for_each(|s| *s = false);
        if !augment(i, options, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = vec![usize::MAX; options.len()];
    for (s, &i) in owner.iter().enumerate() {
        if i != usize::MAX {
            out[i] = s;
        }
    }
    Some(out)
}

/// Places guest vertices in `order`, each on a random host vertex of its
/// cluster adjacent to the images of its placed neighbours. A dead end
/// undoes the latest placed neighbour once and retries; a second dead end
/// restarts. A trailing independent block of the order is assigned by
/// bipartite matching. Requires `|X_i| <= |V_i|`.
fn embed_inner(
    h: &Graph,
    guest_part: &[usize],
    g: &Graph,
    clusters: &[Vec<usize>],
    order: &[usize],
    cfg: &EmbedConfig,
) -> Result<(EmbeddingMap, EmbedStats), EmbedError> {
    let n = h.n();
    let mut check = order.to_vec();
    check.sort_unstable();
    if check != (0..n).collect::<Vec<_>>() {
        return Err(EmbedError::BadOrdering);
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (i, c) in clusters.iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    // Trailing independent block.
    let mut in_tail = vec![false; n];
    let mut tail_start = n;
    while tail_start > 0 {
        let x = order[tail_start - 1];
        if h.neighbors(x).iter().any(|&y| in_tail[y]) {
            break;
        }
        in_tail[x] = true;
        tail_start -= 1;
    }
    let (head, tail) = order.split_at(tail_start);

    let mut stats = EmbedStats::default();
    let mut deepest = 0;
    for attempt in 0..cfg.restarts.max(1) {
        stats.restarts = attempt;
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed
                .wrapping_add(attempt as u64)
                .wrapping_mul(0x2545_F491_4F6C_DD1D),
        );
        let mut st = Search {
            h,
            g,
            guest_part,
            owner: owner.clone(),
            phi: vec![usize::MAX; n],
            used: vec![false; g.n()],
        };
        let mut placed_at = vec![usize::MAX; n];
        let mut ok = true;
        for (step, &x) in head.iter().enumerate() {
            let cand = st.candidates(x, usize::MAX);
            if let Some(&v) = cand.choose(&mut rng) {
                st.place(x, v);
                placed_at[x] = step;
                continue;
            }
            stats.backtracks += 1;
            let culprit = h
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&y| st.phi[y] != usize::MAX)
                .max_by_key(|&y| placed_at[y]);
            let mut fixed = false;
            if let Some(y) = culprit {
                let old = st.phi[y];
                st.unplace(y);
                let mut alts = st.candidates(y, old);
                alts.shuffle(&mut rng);
                for &v in alts.iter().take(64) {
                    st.place(y, v);
                    let c = st.candidates(x, usize::MAX);
                    if let Some(&w) = c.choose(&mut rng) {
                        st.place(x, w);
                        placed_at[x] = step;
                        fixed = true;
                        break;
                    }
                    st.unplace(y);
                }
                if !fixed && st.phi[y] == usize::MAX {
                    st.place(y, old);
                }
            }
            if !fixed {
                deepest = deepest.max(step);
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let options: Vec<Vec<usize>> = tail.iter().map(|&x| st.candidates(x, usize::MAX)).collect();
        let mut slots: Vec<usize> = options.iter().flatten().copied().collect();
        slots.sort_unstable();
        slots.dedup();
        let index = |v: usize| slots.binary_search(&v).unwrap();
        let opt_idx: Vec<Vec<usize>> = options
            .iter()
            .map(|o| o.iter().map(|&v| index(v)).collect())
            .collect();
        let Some(m) = kuhn(&opt_idx, slots.len()) else {
            deepest = deepest.max(head.len());
            continue;
        };
        for (&x, &s) in tail.iter().zip(&m) {
            st.place(x, slots[s]);
        }
        stats.matched_tail = tail.len();
        let emb = EmbeddingMap {
            map: st.phi,
            part_respecting: true,
        };
        emb.verify(h, guest_part, g, clusters)?;
        return Ok((emb, stats));
    }
    Err(EmbedError::EmbedFailed {
        restarts: cfg.restarts.max(1),
        backtracks: stats.backtracks,
        deepest,
        total: n,
    })
}

/// Embeds `h` (vertex `x` in part `guest_part[x]`) into `g` so that part `i`
/// lands on `clusters[i]`, which must have exactly the part's size.
pub fn greedy_blowup_embed(
    h: &Graph,
    guest_part: &[usize],
    g: &Graph,
    clusters: &[Vec<usize>],
    order: &[usize],
    cfg: &EmbedConfig,
) -> Result<(EmbeddingMap, EmbedStats), EmbedError> {
    let mut sizes = vec![0usize; clusters.len()];
    for &p in guest_part {
        if p >= clusters.len() {
            return Err(EmbedError::SizeMismatch {
                part: p,
                guest: 1,
                host: 0,
            });
        }
        sizes[p] += 1;
    }
    if let Some(i) = (0..clusters.len()).find(|&i| sizes[i] != clusters[i].len()) {
        return Err(EmbedError::SizeMismatch {
            part: i,
            guest: sizes[i],
            host: clusters[i].len(),
        });
    }
    let total = g.n() as f64;
    let bound = total.sqrt() / total.ln();
    if !cfg.waive_degree_check && h.max_degree() as f64 > bound {
        return Err(EmbedError::DegreeTooLarge {
            max: h.max_degree(),
            bound,
        });
    }
    embed_inner(h, guest_part, g, clusters, order, cfg)
}

/// Stacked octahedra on `s` vertices: triangles `(a_j, b_j, c_j)` for
/// `j < s/3`, with each vertex of layer `j + 1` joined to the two vertices of
/// layer `j` of the other colours. Vertex `3j + c` has colour `c`.
pub fn gen_tripartite_triangulation(s: usize) -> Result<(RotationSystem, Vec<usize>), EmbedError> {
    if s < 6 || !s.is_multiple_of(3) {
        return Err(EmbedError::BadOrder(s));
    }
    let layers = s / 3;
    let mut edges = Vec::with_capacity(3 * s - 6);
    for j in 0..layers {
        let (a, b, c) = (3 * j, 3 * j + 1, 3 * j + 2);
        edges.extend([(a, b), (a, c), (b, c)]);
        if j + 1 < layers {
            for x in 0..3 {
                for y in 0..3 {
                    if x != y {
                        edges.push((3 * j + x, 3 * (j + 1) + y));
                    }
                }
            }
        }
    }
    let g = Graph::from_edges(s, &edges).expect("layer edges are distinct");
    let rs = planarity_embed(&g).expect("stacked octahedra are planar");
    Ok((rs, (0..s).map(|v| v % 3).collect()))
}

/// Embeds a 3-coloured guest into three disjoint host clusters, colour `c`
/// going to `clusters[c]`.
pub fn embed_tripartite(
    g: &Graph,
    clusters: [&[usize]; 3],
    guest: &Graph,
    colours: &[usize],
    seed: u64,
    restarts: usize,
) -> Result<EmbeddingMap, EmbedError> {
    let cl: Vec<Vec<usize>> = clusters.iter().map(|c| c.to_vec()).collect();
    for c in 0..3 {
        let need = colours.iter().filter(|&&x| x == c).count();
        if need > cl[c].len() {
            return Err(EmbedError::SizeMismatch {
                part: c,
                guest: need,
                host: cl[c].len(),
            });
        }
    }
    let mut order = Vec::with_capacity(guest.n());
    let mut seen = vec![false; guest.n()];
    for root in 0..guest.n() {
        if !seen[root] {
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in guest.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    let cfg = EmbedConfig {
        seed,
        restarts,
        waive_degree_check: true,
    };
    let (emb, _) = embed_inner(guest, colours, g, &cl, &order, &cfg)?;
    Ok(emb)
}

/// Random graph with three parts of size `m`, each cross pair present with
/// probability `p`.
pub fn gen_random_tripartite(m: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Vec::new();
    for u in 0..3 * m {
        for v in u + 1..3 * m {
            if u / m != v / m && rng.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::from_edges(3 * m, &e).expect("distinct pairs")
}
