//! Certificates of extracted planar subgraphs and their independent check.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::Graph;
use crate::plane::{trace_faces, RotationSystem};
use crate::quad::{bag_is_valid, Bag, InsertionRecord};
use crate::structure::compute_k;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    Quadrangulation,
    Triangulation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Success,
    BelowBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisStatus {
    Verified,
    Waived,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertComponent {
    pub kind: ComponentKind,
    /// Input-graph vertex of every local vertex.
    pub vertices: Vec<usize>,
    /// Input-graph edges.
    pub edges: Vec<(usize, usize)>,
    /// Rotation lines over local indices.
    pub rotation: Vec<String>,
    /// Bags in input-graph names.
    pub bags: Vec<Bag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub input_hash: String,
    pub n: usize,
    pub gamma: f64,
    pub k: usize,
    pub case: u8,
    pub status: Status,
    pub components: Vec<CertComponent>,
    pub insertions: Vec<InsertionRecord>,
    pub edge_count: usize,
    pub claimed_bound: i64,
    pub hypotheses: Vec<Hypothesis>,
}

/// SHA-256 of the canonical edge-list text.
pub fn graph_hash(g: &Graph) -> String {
    hex::encode(Sha256::digest(g.to_edge_list_text().as_bytes()))
}

impl CertComponent {
    pub fn from_rotation(
        kind: ComponentKind,
        vertices: Vec<usize>,
        rs: &RotationSystem,
        bags: Vec<Bag>,
    ) -> Self {
        let mut edges: Vec<(usize, usize)> = rs
            .to_graph()
            .edges()
            .map(|(a, b)| {
                let (x, y) = (vertices[a], vertices[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        CertComponent {
            kind,
            vertices,
            edges,
            rotation: rs.to_lines(),
            bags,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn push(&mut self, name: &str, problems: Vec<String>) {
        let passed = problems.is_empty();
        let detail = if passed {
            String::new()
        } else {
            problems.into_iter().take(5).collect::<Vec<_>>().join("; ")
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

/// Re-derives every certificate claim from the input graph and the stored
/// rotation systems.
pub fn verify_certificate(g: &Graph, cert: &Certificate) -> VerifyReport {
    let mut rep = VerifyReport { checks: Vec::new() };
    let n = g.n();

    let mut p = Vec::new();
    if cert.input_hash != graph_hash(g) {
        p.push("input hash differs".to_string());
    }
    if cert.n != n {
        p.push(format!("n = {} but the graph has {n} vertices", cert.n));
    }
    match compute_k(cert.gamma) {
        Ok(k) if k == cert.k => {}
        _ => p.push(format!(
            "k = {} does not match gamma = {}",
            cert.k, cert.gamma
        )),
    }
    rep.push("input", p);

    let mut parsed: Vec<Option<RotationSystem>> = Vec::new();
    let mut p = Vec::new();
    for (ci, c) in cert.components.iter().enumerate() {
        match RotationSystem::from_lines(&c.rotation) {
            Ok(rs) if rs.n() == c.vertices.len() => parsed.push(Some(rs)),
            Ok(rs) => {
                p.push(format!(
                    "component {ci}: {} rotation lines for {} vertices",
                    rs.n(),
                    c.vertices.len()
                ));
                parsed.push(None);
            }
            Err(e) => {
                p.push(format!("component {ci}: {e}"));
                parsed.push(None);
            }
        }
    }
    rep.push("rotation systems well formed", p);

    let mut p = Vec::new();
    for (ci, (c, rs)) in cert.components.iter().zip(&parsed).enumerate() {
        let Some(rs) = rs else { continue };
        if c.vertices.iter().any(|&v| v >= n) {
            p.push(format!("component {ci}: vertex out of range"));
            continue;
        }
        let mut derived: Vec<(usize, usize)> = rs
            .to_graph()
            .edges()
            .map(|(a, b)| {
                (
                    c.vertices[a].min(c.vertices[b]),
                    c.vertices[a].max(c.vertices[b]),
                )
            })
            .collect();
        derived.sort_unstable();
        let mut listed = c.edges.clone();
        listed.sort_unstable();
        if derived != listed {
            p.push(format!(
                "component {ci}: edge list differs from rotation system"
            ));
        }
    }
    rep.push("edge lists match rotations", p);

    let mut p = Vec::new();
    for (ci, c) in cert.components.iter().enumerate() {
        for &(u, v) in &c.edges {
            if u >= n || v >= n || !g.has_edge(u, v) {
                p.push(format!("component {ci}: {u}-{v} is not an input edge"));
            }
        }
    }
    rep.push("subgraph containment", p);

    let mut p = Vec::new();
    let mut pf = Vec::new();
    for (ci, (c, rs)) in cert.components.iter().zip(&parsed).enumerate() {
        let Some(rs) = rs else { continue };
        match trace_faces(rs) {
            Err(e) => p.push(format!("component {ci}: {e}")),
            Ok(fs) => {
                let want = match c.kind {
                    ComponentKind::Quadrangulation => 4,
                    ComponentKind::Triangulation => 3,
                };
                if let Some(l) = fs.face_lengths().into_iter().find(|&l| l != want) {
                    pf.push(format!(
                        "component {ci}: face of length {l} in a {:?}",
                        c.kind
                    ));
                }
            }
        }
    }
    rep.push("planarity (Euler)", p);
    rep.push("face lengths", pf);

    let mut p = Vec::new();
    for (ci, (c, rs)) in cert.components.iter().zip(&parsed).enumerate() {
        let Some(rs) = rs else { continue };
        let local: std::collections::HashMap<usize, usize> = c
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        for (bi, bag) in c.bags.iter().enumerate() {
            let map = |v: usize| local.get(&v).copied();
            let lb = match (
                map(bag.anchors.0),
                map(bag.anchors.1),
                bag.members
                    .iter()
                    .map(|&w| map(w))
                    .collect::<Option<Vec<_>>>(),
            ) {
                (Some(a), Some(b), Some(m)) => Bag {
                    anchors: (a, b),
                    members: m,
                },
                _ => {
                    p.push(format!(
                        "component {ci} bag {bi}: vertex outside the component"
                    ));
                    continue;
                }
            };
            if !bag_is_valid(rs.rotations(), &lb) {
                p.push(format!(
                    "component {ci} bag {bi}: not a bag of the rotation system"
                ));
            }
        }
    }
    rep.push("bags", p);

    let mut p = Vec::new();
    let mut seen = HashSet::new();
    for (ci, c) in cert.components.iter().enumerate() {
        for &v in &c.vertices {
            if !seen.insert(v) {
                p.push(format!("vertex {v} repeated (component {ci})"));
            }
        }
        let mut in_bags = HashSet::new();
        for b in &c.bags {
            for &w in &b.members {
                if !in_bags.insert(w) {
                    p.push(format!("vertex {w} in two bags of component {ci}"));
                }
            }
        }
    }
    rep.push("disjointness", p);

    let mut p = Vec::new();
    let sorted: Vec<Vec<(usize, usize)>> = cert
        .components
        .iter()
        .map(|c| {
            let mut e = c.edges.clone();
            e.sort_unstable();
            e
        })
        .collect();
    for rec in &cert.insertions {
        let Some(c) = cert.components.get(rec.component) else {
            p.push(format!(
                "insertion of {} names a missing component",
                rec.vertex
            ));
            continue;
        };
        let edges = &sorted[rec.component];
        let has = |a: usize, b: usize| edges.binary_search(&(a.min(b), a.max(b))).is_ok();
        if !c.vertices.contains(&rec.vertex)
            || !has(rec.vertex, rec.endpoints.0)
            || !has(rec.vertex, rec.endpoints.1)
        {
            p.push(format!(
                "insertion of {} not reflected in component {}",
                rec.vertex, rec.component
            ));
        }
    }
    rep.push("insertion log", p);

    let mut p = Vec::new();
    let total: usize = cert.components.iter().map(|c| c.edges.len()).sum();
    if total != cert.edge_count {
        p.push(format!(
            "claims {} edges, components hold {total}",
            cert.edge_count
        ));
    }
    let bound = 2 * n as i64 - 4 * cert.k as i64;
    if cert.claimed_bound != bound {
        p.push(format!(
            "claimed bound {} differs from 2n - 4k = {bound}",
            cert.claimed_bound
        ));
    }
    if cert.status == Status::Success && (total as i64) < bound {
        p.push(format!("status Success but {total} < {bound}"));
    }
    rep.push("edge count and bound", p);
    rep
}
