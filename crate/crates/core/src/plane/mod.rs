//! Rotation systems, face tracing, planarity decision with embedding
//! extraction, and the quadrangulation/triangulation predicates.

mod lr;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaneError {
    #[error("rotation of vertex {0} lists neighbour {1} which is out of range or itself")]
    BadNeighbour(usize, usize),
    #[error("edge ({0}, {1}) is not listed symmetrically")]
    Asymmetric(usize, usize),
    #[error("vertex {0} lists neighbour {1} twice")]
    Duplicate(usize, usize),
    #[error("Euler violation in component of vertex {root}: n={n} e={e} f={f}")]
    EulerViolation {
        root: usize,
        n: usize,
        e: usize,
        f: usize,
    },
    #[error("parse error on line {0}")]
    Parse(usize),
}

/// Cyclic order of neighbours around every vertex.
///
/// Faces are traced with the rule `(u -> v)` is followed by `(v -> w)` where
/// `w` is the successor of `u` in the rotation of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSystem {
    rot: Vec<Vec<usize>>,
}

impl RotationSystem {
    /// Validates that every edge appears once in each endpoint's rotation.
    pub fn new(rot: Vec<Vec<usize>>) -> Result<Self, PlaneError> {
        let n = rot.len();
        for (v, list) in rot.iter().enumerate() {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(PlaneError::Duplicate(v, w[0]));
                }
            }
            for &w in list {
                if w >= n || w == v {
                    return Err(PlaneError::BadNeighbour(v, w));
                }
            }
        }
        let rs = RotationSystem { rot };
        let idx = rs.position_index();
        for (v, list) in rs.rot.iter().enumerate() {
            for &w in list {
                if idx.pos(w, v).is_none() {
                    return Err(PlaneError::Asymmetric(v, w));
                }
            }
        }
        Ok(rs)
    }

    pub(crate) fn from_raw(rot: Vec<Vec<usize>>) -> Self {
        RotationSystem { rot }
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rot
    }

    pub(crate) fn rotations_mut(&mut self) -> &mut Vec<Vec<usize>> {
        &mut self.rot
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.rot.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rot.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges_dedup(
            self.n(),
            self.rot
                .iter()
                .enumerate()
                .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v))),
        )
    }

    /// Successor of `w` in the rotation at `v`.
    pub fn succ(&self, v: usize, w: usize) -> Option<usize> {
        let list = &self.rot[v];
        let p = list.iter().position(|&x| x == w)?;
        Some(list[(p + 1) % list.len()])
    }

    /// Text format: line `v` lists the neighbours of `v` in cyclic order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for list in &self.rot {
            let line: Vec<String> = list.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        s
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.rot
            .iter()
            .map(|l| {
                l.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    pub fn from_lines<S: AsRef<str>>(lines: &[S]) -> Result<Self, PlaneError> {
        let rot = lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.as_ref()
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| PlaneError::Parse(i + 1)))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        RotationSystem::new(rot)
    }

    fn position_index(&self) -> PositionIndex {
        let sorted = self
            .rot
            .iter()
            .map(|l| {
                let mut s: Vec<(usize, usize)> =
                    l.iter().enumerate().map(|(p, &w)| (w, p)).collect();
                s.sort_unstable();
                s
            })
            .collect();
        PositionIndex { sorted }
    }
}

struct PositionIndex {
    sorted: Vec<Vec<(usize, usize)>>,
}

impl PositionIndex {
    fn pos(&self, v: usize, w: usize) -> Option<usize> {
        let s = &self.sorted[v];
        s.binary_search_by_key(&w, |&(x, _)| x).ok().map(|i| s[i].1)
    }
}

/// Face walks of a rotation system plus the per-component Euler data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSet {
    /// Each face as the cyclic sequence of vertices visited.
    pub faces: Vec<Vec<usize>>,
    /// `(n, e, f)` per connected component; an edgeless vertex counts one face.
    pub components: Vec<(usize, usize, usize)>,
}

impl FaceSet {
    pub fn face_lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.faces.iter().map(Vec::len).collect();
        l.sort_unstable();
        l
    }

    pub fn euler_holds(&self) -> bool {
        self.components.iter().all(|&(n, e, f)| n + f == e + 2)
    }
}

/// Traces all faces without judging planarity.
pub fn trace_faces_unchecked(rs: &RotationSystem) -> FaceSet {
    let n = rs.n();
    let idx = rs.position_index();
    let offsets: Vec<usize> = std::iter::once(0)
        .chain(rs.rot.iter().scan(0, |acc, l| {
            *acc += l.len();
            Some(*acc)
        }))
        .collect();
    let dart_count = offsets[n];
    let mut seen = vec![false; dart_count];
    let mut face_of = vec![usize::MAX; dart_count];
    let mut faces = Vec::new();
    for v in 0..n {
        for p in 0..rs.rot[v].len() {
            let d = offsets[v] + p;
            if seen[d] {
                continue;
            }
            let mut walk = Vec::new();
            let (mut a, mut pa) = (v, p);
            loop {
                let dd = offsets[a] + pa;
                if seen[dd] {
                    break;
                }
                seen[dd] = true;
                face_of[dd] = faces.len();
                walk.push(a);
                let b = rs.rot[a][pa];
                let back = idx.pos(b, a).expect("rotation must be symmetric");
                let next = (back + 1) % rs.rot[b].len();
                a = b;
                pa = next;
            }
            faces.push(walk);
        }
    }
    // Components via union-find over edges.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for v in 0..n {
        for &w in &rs.rot[v] {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut comp_id = vec![usize::MAX; n];
    let mut comps: Vec<(usize, usize, usize)> = Vec::new();
    let mut roots = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if comp_id[r] == usize::MAX {
            comp_id[r] = comps.len();
            comps.push((0, 0, 0));
            roots.push(v);
        }
        let c = comp_id[r];
        comps[c].0 += 1;
        comps[c].1 += rs.rot[v].len();
    }
    for c in comps.iter_mut() {
        c.1 /= 2;
        if c.1 == 0 {
            c.2 = 1;
        }
    }
    for face in &faces {
        let r = find(&mut parent, face[0]);
        comps[comp_id[r]].2 += 1;
    }
    FaceSet {
        faces,
        components: comps,
    }
}

/// Traces faces and checks Euler's formula per component.
pub fn trace_faces(rs: &RotationSystem) -> Result<FaceSet, PlaneError> {
    let fs = trace_faces_unchecked(rs);
    // Component roots are recovered from the first vertex of each component.
    let g = rs.to_graph();
    let comps = g.components();
    for ((n, e, f), comp) in fs.components.iter().zip(comps.iter()) {
        if n + f != e + 2 {
            return Err(PlaneError::EulerViolation {
                root: comp[0],
                n: *n,
                e: *e,
                f: *f,
            });
        }
    }
    Ok(fs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceClass {
    Quadrangulation,
    Triangulation,
    Other,
}

/// Classifies a planar rotation system by its face lengths.
pub fn classify(rs: &RotationSystem) -> FaceClass {
    let fs = trace_faces_unchecked(rs);
    classify_faces(&fs)
}

pub fn classify_faces(fs: &FaceSet) -> FaceClass {
    if fs.faces.is_empty() || fs.components.iter().any(|&(_, e, _)| e == 0) {
        return FaceClass::Other;
    }
    if fs.faces.iter().all(|f| f.len() == 4) {
        FaceClass::Quadrangulation
    } else if fs.faces.iter().all(|f| f.len() == 3) {
        FaceClass::Triangulation
    } else {
        FaceClass::Other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// Evidence that a graph is not planar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonplanarWitness {
    /// A subdivision of `K_5` or `K_{3,3}` inside the input.
    Kuratowski {
        kind: KuratowskiKind,
        vertices: Vec<usize>,
        edges: Vec<(usize, usize)>,
    },
    /// More than `3n - 6` edges.
    EdgeBound { n: usize, e: usize },
    /// The left-right test found a conflict; no subdivision extracted.
    LrConflict,
}

/// Witness extraction by edge deletion is attempted up to this many edges.
pub const WITNESS_EDGE_LIMIT: usize = 400;

pub fn is_planar(g: &Graph) -> bool {
    lr::lr_embed(g).is_some()
}

/// Planarity decision: a verified rotation system or a nonplanarity witness.
pub fn planarity_embed(g: &Graph) -> Result<RotationSystem, NonplanarWitness> {
    match lr::lr_embed(g) {
        Some(rot) => {
            let rs = RotationSystem::from_raw(rot);
            debug_assert!(trace_faces(&rs).is_ok());
            Ok(rs)
        }
        None => Err(nonplanar_witness(g)),
    }
}

fn nonplanar_witness(g: &Graph) -> NonplanarWitness {
    if g.edge_count() > WITNESS_EDGE_LIMIT {
        let n = g.n();
        return if n > 2 && g.edge_count() > 3 * n - 6 {
            NonplanarWitness::EdgeBound {
                n,
                e: g.edge_count(),
            }
        } else {
            NonplanarWitness::LrConflict
        };
    }
    // Delete edges while nonplanarity persists; what remains is a minimal
    // nonplanar subgraph, i.e. a Kuratowski subdivision.
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let mut i = 0;
    while i < edges.len() {
        let mut trial = edges.clone();
        trial.remove(i);
        if lr::lr_embed(&Graph::from_edges(g.n(), &trial).unwrap()).is_none() {
            edges = trial;
        } else {
            i += 1;
        }
    }
    let h = Graph::from_edges(g.n(), &edges).unwrap();
    let mut vertices: Vec<usize> = (0..g.n()).filter(|&v| h.degree(v) > 0).collect();
    vertices.sort_unstable();
    let branch: Vec<usize> = vertices
        .iter()
        .copied()
        .filter(|&v| h.degree(v) > 2)
        .collect();
    let kind = if branch.len() == 5 && branch.iter().all(|&v| h.degree(v) == 4) {
        KuratowskiKind::K5
    } else {
        KuratowskiKind::K33
    };
    NonplanarWitness::Kuratowski {
        kind,
        vertices,
        edges,
    }
}
