//! One test per acceptance criterion. Each prints a single `PASS` or `FAIL`
//! line with the measured quantities, then fails the test on `FAIL`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planex::certificate::{verify_certificate, Certificate, Status};
use planex::embed::{arrangeability_at, ArrangeMode};
use planex::graph::{gen_disjoint_biclique, gen_random_min_degree, gen_tree_blowup, Graph};
use planex::oracle::pl_exact;
use planex::pipeline::extract_planar;
use planex::plane::is_planar;
use planex::quad::{
    build_quadrangulation, execute_insertions, Assignment, InsertionPlan, QuadResult,
};
use planex::regularity::{min_subset_size, regularity_check, verify_witness, CheckMode};
use planex::structure::{bounded_spanning_tree, PipelineConfig, SpanningTree};

const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);
const EXTRACT_TIME_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_BUDGET: u64 = 50_000_000;

fn report(id: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("PASS [{id}] {name}: {detail}"),
        Err(detail) => {
            println!("FAIL [{id}] {name}: {detail}");
            panic!("criterion {id} failed: {detail}");
        }
    }
}

fn complete(n: usize) -> Graph {
    Graph::from_edges(
        n,
        &(0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn kab(a: usize, b: usize) -> Graph {
    Graph::from_edges(
        a + b,
        &(0..a)
            .flat_map(|x| (a..a + b).map(move |y| (x, y)))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn config(gamma: f64) -> PipelineConfig {
    let mut cfg = PipelineConfig::new(gamma).unwrap();
    cfg.waive_size_check = true;
    cfg
}

/// `gamma` with `k <= 1/(2 gamma) < k + 1` and minimum degree `n / (2k)` on
/// k disjoint balanced bicliques.
fn biclique_gamma(k: usize) -> f64 {
    match k {
        1 => 0.45,
        _ => 1.0 / (2.0 * k as f64),
    }
}

#[test]
fn c1_oracle_anchors() {
    let cases = [
        ("K4", complete(4), 6),
        ("K5", complete(5), 9),
        ("K6", complete(6), 12),
        ("K3,3", kab(3, 3), 8),
        ("K4,4", kab(4, 4), 12),
    ];
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (name, g, want) in cases {
        let start = Instant::now();
        let r = pl_exact(&g, ORACLE_BUDGET);
        let took = start.elapsed();
        match r {
            Ok(r)
                if r.value == want
                    && r.exact
                    && is_planar(&Graph::from_edges(g.n(), &r.edges).unwrap())
                    && took <= ORACLE_TIME_LIMIT =>
            {
                parts.push(format!("{name}={} ({took:.2?})", r.value))
            }
            Ok(r) => bad.push(format!(
                "{name}: got {} exact={} in {took:.2?}, want {want}",
                r.value, r.exact
            )),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    report(
        1,
        "oracle anchors",
        if bad.is_empty() {
            Ok(parts.join(", "))
        } else {
            Err(bad.join("; "))
        },
    );
}

#[test]
fn c2_extremal_bicliques() {
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for k in 1..=3 {
        for t in [300, 500] {
            let g = gen_disjoint_biclique(k, t);
            let start = Instant::now();
            let res = extract_planar(&g, &config(biclique_gamma(k)));
            let took = start.elapsed();
            match res {
                Ok(cert) => {
                    let rep = verify_certificate(&g, &cert);
                    let want = 4 * k * t - 4 * k;
                    if cert.status == Status::Success
                        && cert.edge_count == want
                        && rep.ok()
                        && took <= EXTRACT_TIME_LIMIT
                    {
                        parts.push(format!("k={k} t={t}: {want} ({took:.2?})"));
                    } else {
                        bad.push(format!(
                            "k={k} t={t}: {:?} {} edges (want {want}), verify failures {:?}, {took:.2?}",
                            cert.status,
                            cert.edge_count,
                            rep.failures()
                        ));
                    }
                }
                Err(e) => bad.push(format!("k={k} t={t}: {e} {}", e.stats)),
            }
        }
    }
    report(
        2,
        "extremal family end to end",
        if bad.is_empty() {
            Ok(parts.join(", "))
        } else {
            Err(bad.join("; "))
        },
    );
}

fn random_tree(r: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..r).collect();
    order.shuffle(rng);
    (1..r)
        .map(|i| (order[rng.gen_range(0..i)], order[i]))
        .collect()
}

#[test]
fn c3_quadrangulation_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    let mut max_uncovered_ratio: f64 = 0.0;
    let mut sizes = Vec::new();
    for trial in 0..20 {
        let r = rng.gen_range(2..=6);
        let m = rng.gen_range(10_000usize.div_ceil(r)..=100_000 / r);
        let n = r * m;
        let edges = random_tree(r, &mut rng);
        let parts: Vec<Vec<usize>> = (0..r).map(|i| (i * m..(i + 1) * m).collect()).collect();
        let tree = SpanningTree::from_edges(r, edges.clone());
        let q = match build_quadrangulation(&parts, &tree, true) {
            Ok(q) => q,
            Err(e) => {
                bad.push(format!("trial {trial} (r={r}, n={n}, tree {edges:?}): {e}"));
                continue;
            }
        };
        let c = q.check();
        let cbrt = (n as f64).cbrt();
        let mut v = Vec::new();
        if !c.is_quadrangulation {
            v.push("not a quadrangulation".to_string());
        }
        if c.vertices != n || c.edges != 2 * n - 4 {
            v.push(format!("{} vertices, {} edges", c.vertices, c.edges));
        }
        if c.max_degree > cbrt.ceil() as usize + 2 {
            v.push(format!("max degree {}", c.max_degree));
        }
        let uncovered_limit = 9.0 * (n as f64).powf(2.0 / 3.0);
        if q.uncovered_count as f64 > uncovered_limit {
            v.push(format!("uncovered {}", q.uncovered_count));
        }
        max_uncovered_ratio = max_uncovered_ratio.max(q.uncovered_count as f64 / uncovered_limit);
        if let Some(b) = q
            .bags
            .iter()
            .find(|b| (b.order() as f64) < cbrt / 2.0 || b.order() as f64 > cbrt)
        {
            v.push(format!("bag of order {}", b.order()));
        }
        if !c.bags_valid || !c.bags_disjoint {
            v.push("bags invalid or overlapping".into());
        }
        for (a, b) in q.plane.to_graph().edges() {
            let (pa, pb) = (q.part_of[a], q.part_of[b]);
            if !edges.contains(&(pa, pb)) && !edges.contains(&(pb, pa)) {
                v.push(format!(
                    "edge between parts {pa} and {pb} not joined in the tree"
                ));
                break;
            }
        }
        if !v.is_empty() {
            bad.push(format!("trial {trial} (r={r}, n={n}): {}", v.join(", ")));
        }
        sizes.push(n);
    }
    report(
        3,
        "quadrangulation invariants",
        if bad.is_empty() {
            Ok(format!(
                "20 trees, n in [{}, {}], worst uncovered / 9n^(2/3) = {max_uncovered_ratio:.3}",
                sizes.iter().min().unwrap(),
                sizes.iter().max().unwrap()
            ))
        } else {
            Err(bad.join("; "))
        },
    );
}

/// Minimum over all spanning trees of the maximum degree, by enumerating
/// edge subsets of size `v - 1` with union-find pruning.
fn optimal_tree_degree(g: &Graph) -> (usize, usize) {
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    fn rec(
        edges: &[(usize, usize)],
        idx: usize,
        chosen: &mut Vec<(usize, usize)>,
        v: usize,
        best: &mut usize,
        count: &mut usize,
    ) {
        if chosen.len() + 1 == v {
            let mut p: Vec<usize> = (0..v).collect();
            for &(a, b) in chosen.iter() {
                let (ra, rb) = (find(&mut p, a), find(&mut p, b));
                if ra == rb {
                    return;
                }
                p[ra] = rb;
            }
            let mut deg = vec![0; v];
            for &(a, b) in chosen.iter() {
                deg[a] += 1;
                deg[b] += 1;
            }
            *count += 1;
            *best = (*best).min(*deg.iter().max().unwrap());
            return;
        }
        if edges.len() - idx < v - 1 - chosen.len() {
            return;
        }
        chosen.push(edges[idx]);
        rec(edges, idx + 1, chosen, v, best, count);
        chosen.pop();
        rec(edges, idx + 1, chosen, v, best, count);
    }
    let edges: Vec<_> = g.edges().collect();
    let (mut best, mut count) = (usize::MAX, 0);
    rec(&edges, 0, &mut Vec::new(), g.n(), &mut best, &mut count);
    (best, count)
}

#[test]
fn c4_bounded_spanning_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    let (mut swaps, mut exhaustive, mut done) = (0, 0, 0);
    let mut seed = 0;
    while done < 100 {
        let k = rng.gen_range(1..=3);
        // A third of the instances are small enough to enumerate.
        let v: usize = if done % 3 == 0 {
            rng.gen_range(4..=8)
        } else {
            rng.gen_range(9..=200)
        };
        let dmin = v.div_ceil(2 * k).min(v - 1);
        seed += 1;
        let g = gen_random_min_degree(v, dmin, seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        done += 1;
        let t = match bounded_spanning_tree(&g, k) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("v={v} k={k}: {e}"));
                continue;
            }
        };
        swaps += t.swaps();
        if !t.is_spanning_tree() || t.edges.iter().any(|&(a, b)| !g.has_edge(a, b)) {
            bad.push(format!("v={v} k={k}: not a spanning tree of the graph"));
        }
        if t.max_degree() > 8 * k {
            bad.push(format!("v={v} k={k}: max degree {}", t.max_degree()));
        }
        if t.score_history.windows(2).any(|w| w[1] >= w[0])
            || *t.score_history.last().unwrap() != t.score()
        {
            bad.push(format!("v={v} k={k}: score history {:?}", t.score_history));
        }
        if v <= 8 {
            let (opt, count) = optimal_tree_degree(&g);
            exhaustive += 1;
            if count == 0 || opt > t.max_degree() || opt > 8 * k {
                bad.push(format!(
                    "v={v} k={k}: optimum {opt} over {count} trees vs output {}",
                    t.max_degree()
                ));
            }
        }
    }
    report(
        4,
        "bounded-degree spanning trees",
        if bad.is_empty() {
            Ok(format!(
                "100 graphs, {swaps} swaps total, {exhaustive} checked by enumeration"
            ))
        } else {
            Err(bad.join("; "))
        },
    );
}

fn host_of(q: &QuadResult, extra: &[(usize, Vec<usize>)], n: usize) -> Graph {
    let mut e: Vec<(usize, usize)> = q
        .plane
        .to_graph()
        .edges()
        .map(|(u, v)| (q.labels[u], q.labels[v]))
        .collect();
    for (v, nb) in extra {
        e.extend(nb.iter().map(|&w| (*v, w)));
    }
    Graph::from_edges_dedup(n, e)
}

#[test]
fn c5_bag_mechanics() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 1000;
    let parts: Vec<Vec<usize>> = vec![(0..m).collect(), (m..2 * m).collect()];
    let mut q =
        build_quadrangulation(&parts, &SpanningTree::from_edges(2, vec![(0, 1)]), true).unwrap();
    let mut bad = Vec::new();
    let (mut reorders, mut inserts) = (0, 0);
    for op in 0..1000 {
        let (v0, e0) = (q.vertex_count(), q.edge_count());
        if rng.gen_bool(0.5) {
            let idx = rng.gen_range(0..q.bags.len());
            let mut order = q.bags[idx].members.clone();
            order.shuffle(&mut rng);
            if let Err(e) = q.reorder_bag(idx, &order) {
                bad.push(format!("op {op}: reorder: {e}"));
                break;
            }
            reorders += 1;
            if q.vertex_count() != v0 || q.edge_count() != e0 {
                bad.push(format!("op {op}: reorder changed the size"));
            }
        } else {
            let candidates: Vec<usize> = (0..q.bags.len())
                .filter(|&i| q.bags[i].interior().len() >= 2)
                .collect();
            let Some(&idx) = candidates.choose(&mut rng) else {
                bad.push(format!("op {op}: no bag with two interior members"));
                break;
            };
            let interior = q.bags[idx].interior().to_vec();
            let want = rng.gen_range(2..=interior.len().min(5));
            let nb: Vec<usize> = interior
                .choose_multiple(&mut rng, want)
                .map(|&w| q.labels[w])
                .collect();
            let name = q.labels.len();
            let host = host_of(&q, &[(name, nb.clone())], name + 1);
            let plan = InsertionPlan {
                leftovers: vec![name],
                assignment: vec![Assignment {
                    component: 0,
                    bag: idx,
                    vertices: vec![name],
                }],
                good_threshold: 2,
                capacity: 1,
            };
            let mut qs = vec![q.clone()];
            match execute_insertions(&mut qs, &plan, &host) {
                Ok(log) => {
                    q = qs.pop().unwrap();
                    inserts += 1;
                    let ends_ok = log.len() == 1
                        && nb.contains(&log[0].endpoints.0)
                        && nb.contains(&log[0].endpoints.1);
                    if q.vertex_count() != v0 + 1 || q.edge_count() != e0 + 2 || !ends_ok {
                        bad.push(format!(
                            "op {op}: insertion gave {} vertices, {} edges",
                            q.vertex_count(),
                            q.edge_count()
                        ));
                    }
                }
                Err(e) => {
                    bad.push(format!("op {op}: insert: {e}"));
                    break;
                }
            }
        }
        let c = q.check();
        if !c.ok() || c.edges + 4 != 2 * c.vertices {
            bad.push(format!("op {op}: invariants broken: {c:?}"));
            break;
        }
    }
    report(
        5,
        "bag mechanics",
        if bad.is_empty() {
            Ok(format!(
                "{reorders} reorders, {inserts} insertions, final {} vertices / {} edges",
                q.vertex_count(),
                q.edge_count()
            ))
        } else {
            Err(bad.join("; "))
        },
    );
}

/// Bipartite graph on `U = 0..a`, `W = a..a+b` from an `a x b` bit matrix.
fn bip(a: usize, b: usize, bits: u64) -> Graph {
    let e: Vec<(usize, usize)> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, j)))
        .filter(|&(i, j)| bits >> (i * b + j) & 1 == 1)
        .map(|(i, j)| (i, a + j))
        .collect();
    Graph::from_edges(a + b, &e).unwrap()
}

/// Direct enumeration with eps = p/q in exact integers: is there a pair of
/// subsets of sizes at least `eps |U|`, `eps |W|` whose density deviates by
/// more than eps?
fn naive_irregular(rows: &[u32], a: usize, b: usize, p: i64, q: i64) -> bool {
    let min_a = ((p * a as i64) + q - 1) / q;
    let min_b = ((p * b as i64) + q - 1) / q;
    let (min_a, min_b) = (min_a.max(1) as u32, min_b.max(1) as u32);
    let e: i64 = rows.iter().map(|r| r.count_ones() as i64).sum();
    let (big_a, big_b) = (a as i64, b as i64);
    for us in 1u32..1 << a {
        if us.count_ones() < min_a {
            continue;
        }
        for ws in 1u32..1 << b {
            if ws.count_ones() < min_b {
                continue;
            }
            let es: i64 = (0..a)
                .filter(|&i| us >> i & 1 == 1)
                .map(|i| (rows[i] & ws).count_ones() as i64)
                .sum();
            let (sa, sb) = (us.count_ones() as i64, ws.count_ones() as i64);
            let lhs = (es * big_a * big_b - e * sa * sb).abs();
            if lhs * q > p * sa * sb * big_a * big_b {
                return true;
            }
        }
    }
    false
}

fn regularity_agrees(a: usize, b: usize, bits: u64, p: i64, q: i64) -> Result<(), String> {
    let g = bip(a, b, bits);
    let rows: Vec<u32> = (0..a)
        .map(|i| ((bits >> (i * b)) & ((1 << b) - 1)) as u32)
        .collect();
    let u: Vec<usize> = (0..a).collect();
    let w: Vec<usize> = (a..a + b).collect();
    let eps = p as f64 / q as f64;
    let v = regularity_check(&g, &u, &w, eps, CheckMode::Exhaustive).map_err(|e| e.to_string())?;
    let naive = naive_irregular(&rows, a, b, p, q);
    if v.is_regular() == naive {
        return Err(format!(
            "{a}x{b} bits {bits:#x} eps {p}/{q}: checker regular={} naive irregular={naive}",
            v.is_regular()
        ));
    }
    if let Some(wit) = &v.witness {
        if !verify_witness(&g, &u, &w, eps, wit) {
            return Err(format!(
                "{a}x{b} bits {bits:#x}: witness does not re-verify"
            ));
        }
        if wit.u_sub.len() < min_subset_size(eps, a) || wit.w_sub.len() < min_subset_size(eps, b) {
            return Err(format!("{a}x{b} bits {bits:#x}: witness too small"));
        }
    }
    Ok(())
}

#[test]
fn c6_regularity_exhaustive() {
    const EPS: [(i64, i64); 3] = [(1, 4), (1, 3), (1, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    let (mut full, mut sampled) = (0u64, 0u64);
    for a in 1..=5 {
        for b in 1..=5 {
            let cells = a * b;
            // Every graph while the count stays manageable; beyond 2^16
            // matrices a uniform sample.
            let graphs: Vec<u64> = if cells <= 16 {
                (0..1u64 << cells).collect()
            } else {
                (0..4000)
                    .map(|_| rng.gen::<u64>() & ((1 << cells) - 1))
                    .collect()
            };
            for bits in graphs {
                for (p, q) in EPS {
                    if let Err(e) = regularity_agrees(a, b, bits, p, q) {
                        bad.push(e);
                    }
                }
                if cells <= 16 {
                    full += 1;
                } else {
                    sampled += 1;
                }
            }
            if bad.len() > 5 {
                break;
            }
        }
    }
    let mut irregular = 0;
    for _ in 0..50 {
        let density = rng.gen_range(0.2..0.8);
        let rest: Vec<u32> = (0..10)
            .map(|_| {
                (0..10)
                    .filter(|_| rng.gen_bool(density))
                    .fold(0u32, |row, j| row | 1 << j)
            })
            .collect();
        let e: Vec<(usize, usize)> = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i, j)))
            .filter(|&(i, j)| rest[i] >> j & 1 == 1)
            .map(|(i, j)| (i, 10 + j))
            .collect();
        let g = Graph::from_edges(20, &e).unwrap();
        let u: Vec<usize> = (0..10).collect();
        let w: Vec<usize> = (10..20).collect();
        for (p, q) in EPS {
            let eps = p as f64 / q as f64;
            match regularity_check(&g, &u, &w, eps, CheckMode::Exhaustive) {
                Ok(v) => {
                    let naive = naive_irregular(&rest, 10, 10, p, q);
                    if v.is_regular() == naive {
                        bad.push(format!(
                            "10x10 density {density:.2} eps {p}/{q}: disagreement"
                        ));
                    }
                    if let Some(wit) = &v.witness {
                        irregular += 1;
                        if !verify_witness(&g, &u, &w, eps, wit) {
                            bad.push(format!("10x10 eps {p}/{q}: witness does not re-verify"));
                        }
                    }
                }
                Err(e) => bad.push(e.to_string()),
            }
        }
    }
    report(
        6,
        "regularity check against enumeration",
        if bad.is_empty() {
            Ok(format!("{full} graphs exhaustively and {sampled} sampled with parts <= 5, 50 instances 10x10 ({irregular} witnesses), 3 eps each"))
        } else {
            Err(bad.into_iter().take(5).collect::<Vec<_>>().join("; "))
        },
    );
}

/// Direct reading of the definition with sets.
fn naive_arrangeability(h: &Graph, order: &[usize], exclude_self: bool) -> usize {
    let pos: Vec<usize> = {
        let mut p = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    (0..order.len())
        .map(|i| {
            let x = order[i];
            let forward: Vec<usize> = h
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&s| pos[s] > i)
                .collect();
            let back: HashSet<usize> = forward
                .iter()
                .flat_map(|&s| h.neighbors(s).iter().copied())
                .filter(|&w| pos[w] <= i && !(exclude_self && w == x))
                .collect();
            back.len()
        })
        .max()
        .unwrap_or(0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn c7_arrangeability() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let mut evaluated = 0u64;
    let mut random_orders = 0u64;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let all = permutations(n);
        for bits in 0u32..1 << pairs.len() {
            let e: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let h = Graph::from_edges(n, &e).unwrap();
            // All orderings up to five vertices; on six, random ones.
            let orders: Vec<Vec<usize>> = if n <= 5 {
                all.clone()
            } else {
                (0..4)
                    .map(|_| {
                        let mut o: Vec<usize> = (0..n).collect();
                        o.shuffle(&mut rng);
                        o
                    })
                    .collect()
            };
            for o in &orders {
                for (mode, excl) in [
                    (ArrangeMode::Literal, false),
                    (ArrangeMode::ExcludeSelf, true),
                ] {
                    let got = arrangeability_at(&h, o, mode).unwrap();
                    let want = naive_arrangeability(&h, o, excl);
                    if got != want && bad.len() < 5 {
                        bad.push(format!(
                            "n={n} edges {e:?} order {o:?} {mode:?}: {got} vs {want}"
                        ));
                    }
                }
                evaluated += 1;
                random_orders += u64::from(n == 6);
            }
        }
    }
    for n in 2..=50 {
        let natural: Vec<usize> = (0..n).collect();
        let path =
            Graph::from_edges(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let mut shuffled = natural.clone();
        shuffled.shuffle(&mut rng);
        let checks = [
            (
                "path",
                arrangeability_at(&path, &natural, ArrangeMode::Literal).unwrap(),
                1,
            ),
            (
                "complete",
                arrangeability_at(&complete(n), &natural, ArrangeMode::Literal).unwrap(),
                n - 1,
            ),
            (
                "complete, shuffled",
                arrangeability_at(&complete(n), &shuffled, ArrangeMode::Literal).unwrap(),
                n - 1,
            ),
            (
                "edgeless",
                arrangeability_at(&Graph::empty(n), &shuffled, ArrangeMode::Literal).unwrap(),
                0,
            ),
        ];
        for (name, got, want) in checks {
            if got != want {
                bad.push(format!("{name} on {n}: {got}, want {want}"));
            }
        }
    }
    report(
        7,
        "arrangeability",
        if bad.is_empty() {
            Ok(format!("{evaluated} (graph, ordering) pairs on <= 6 vertices ({random_orders} random orderings on 6) in both modes; closed forms for n <= 50"))
        } else {
            Err(bad.join("; "))
        },
    );
}

fn rotation_of(c: &planex::certificate::CertComponent) -> Vec<Vec<usize>> {
    c.rotation
        .iter()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect()
}

fn set_rotation(c: &mut planex::certificate::CertComponent, rot: &[Vec<usize>]) {
    c.rotation = rot
        .iter()
        .map(|l| {
            l.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
}

fn local_edges(c: &planex::certificate::CertComponent, rot: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = rot
        .iter()
        .enumerate()
        .flat_map(|(v, l)| l.iter().filter(move |&&w| v < w).map(move |&w| (v, w)))
        .map(|(a, b)| {
            (
                c.vertices[a].min(c.vertices[b]),
                c.vertices[a].max(c.vertices[b]),
            )
        })
        .collect();
    e.sort_unstable();
    e
}

fn tamper_classes(g: &Graph, cert: &Certificate) -> Vec<(&'static str, Certificate)> {
    let mut out = Vec::new();

    // Edge between two vertices on the same side of a biclique, consistently
    // added to both the rotation system and the edge list.
    let mut t = cert.clone();
    let c = &mut t.components[0];
    let mut rot = rotation_of(c);
    let (a, b) = (0..c.vertices.len())
        .flat_map(|a| (a + 1..c.vertices.len()).map(move |b| (a, b)))
        .find(|&(a, b)| !g.has_edge(c.vertices[a], c.vertices[b]))
        .unwrap();
    rot[a].push(b);
    rot[b].push(a);
    set_rotation(c, &rot);
    c.edges = local_edges(c, &rot);
    t.edge_count += 1;
    out.push(("foreign edge", t));

    let mut t = cert.clone();
    let c = &mut t.components[0];
    let mut rot = rotation_of(c);
    let a = (0..rot.len()).find(|&v| rot[v].len() >= 3).unwrap();
    let b = rot[a].remove(0);
    rot[b].retain(|&x| x != a);
    set_rotation(c, &rot);
    c.edges = local_edges(c, &rot);
    t.edge_count -= 1;
    out.push(("dropped edge", t));

    let mut t = cert.clone();
    let c = &mut t.components[0];
    let mut rot = rotation_of(c);
    let v = (0..rot.len()).find(|&v| rot[v].len() >= 3).unwrap();
    rot[v].swap(0, 1);
    set_rotation(c, &rot);
    out.push(("rotation transposition", t));

    let mut t = cert.clone();
    let bag = t.components[0]
        .bags
        .iter_mut()
        .find(|b| b.order() >= 3)
        .unwrap();
    bag.anchors = (bag.anchors.1, bag.anchors.0);
    out.push(("bag anchor swap", t));

    let mut t = cert.clone();
    let stolen = t.components[0].vertices[0];
    let c = &mut t.components[1];
    let rot = rotation_of(c);
    c.vertices[0] = stolen;
    c.edges = local_edges(c, &rot);
    out.push(("duplicate vertex across components", t));

    let mut t = cert.clone();
    t.edge_count += 1;
    out.push(("inflated edge count", t));
    out
}

#[test]
fn c8_certificate_tampering() {
    let g = gen_disjoint_biclique(2, 300);
    let cert = extract_planar(&g, &config(0.25)).unwrap();
    let mut bad = Vec::new();
    let mut caught = Vec::new();
    if !verify_certificate(&g, &cert).ok() {
        bad.push("untampered certificate rejected".to_string());
    }
    for (name, t) in tamper_classes(&g, &cert) {
        let rep = verify_certificate(&g, &t);
        if rep.ok() {
            bad.push(format!("{name} accepted"));
        } else {
            let names: Vec<&str> = rep.failures().iter().map(|c| c.name.as_str()).collect();
            caught.push(format!("{name} -> {}", names.join("+")));
        }
    }
    report(
        8,
        "certificate tamper suite",
        if bad.is_empty() {
            Ok(caught.join(", "))
        } else {
            Err(bad.join("; "))
        },
    );
}

fn disjoint_tripartite(copies: usize, m: usize) -> Graph {
    let mut e = Vec::new();
    for c in 0..copies {
        let base = 3 * m * c;
        for u in 0..3 * m {
            for v in u + 1..3 * m {
                if u / m != v / m {
                    e.push((base + u, base + v));
                }
            }
        }
    }
    Graph::from_edges(3 * m * copies, &e).unwrap()
}

#[test]
fn c9_case_split() {
    let path = gen_tree_blowup(&[(0, 1), (1, 2)], &[2000, 2000, 2000], 0.0, 9)
        .unwrap()
        .0;
    let instances: Vec<(&str, Graph, f64, u8)> = vec![
        (
            "two K_{1000,1000,1000}",
            disjoint_tripartite(2, 1000),
            1.0 / 3.0,
            1,
        ),
        (
            "three K_{667,667,667}",
            disjoint_tripartite(3, 667),
            2.0 / 9.0,
            1,
        ),
        ("two K_{1500,1500}", gen_disjoint_biclique(2, 1500), 0.25, 2),
        ("path blow-up 3 x 2000", path, 1.0 / 3.0 - 1e-3, 2),
    ];
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (name, g, gamma, case) in instances {
        let start = Instant::now();
        match extract_planar(&g, &config(gamma)) {
            Ok(cert) => {
                let bound = 2 * g.n() as i64 - 4 * cert.k as i64;
                let rep = verify_certificate(&g, &cert);
                let took = start.elapsed();
                if cert.status == Status::Success
                    && cert.case == case
                    && cert.edge_count as i64 >= bound
                    && rep.ok()
                {
                    parts.push(format!(
                        "{name} (k={}): case {case}, {} >= {bound} ({took:.1?})",
                        cert.k, cert.edge_count
                    ));
                } else {
                    bad.push(format!(
                        "{name}: case {} {:?} {} vs {bound}, failures {:?}",
                        cert.case,
                        cert.status,
                        cert.edge_count,
                        rep.failures()
                    ));
                }
            }
            Err(e) => bad.push(format!("{name}: stage {:?}: {e} {}", e.stage, e.stats)),
        }
    }
    report(
        9,
        "case split",
        if bad.is_empty() {
            Ok(parts.join(", "))
        } else {
            Err(bad.join("; "))
        },
    );
}
