//! Spanning quadrangulations of tree blow-ups, bag bookkeeping and the
//! insertion of leftover vertices into bag faces.
//!
//! A bag with anchors `(a, b)` is a sequence of degree-2 vertices adjacent to
//! exactly `a` and `b`, consecutive in the rotation at `a` in member order and
//! consecutive in reverse order at `b`. Consecutive members `w, w'` then bound
//! the quadrilateral face `a w' b w`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::plane::{classify, FaceClass, RotationSystem};
use crate::structure::SpanningTree;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("part {part} has no free pair of degree-2 vertices left")]
    OutOfHostPairs { part: usize },
    #[error("parts are unbalanced: sizes {min} and {max}")]
    Unbalanced { min: usize, max: usize },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("need n >= (16 r)^3 = {needed}, have n = {n}")]
    TooSmall { n: usize, needed: usize },
    #[error("bag {0} violates the bag invariants")]
    NotABag(usize),
    #[error("new member order is not a permutation of the bag")]
    BadPermutation,
    #[error("leftover vertex {vertex} could not be assigned ({good_bags} good bags)")]
    UnassignableVertex { vertex: usize, good_bags: usize },
    #[error("no disjoint member pairs for the leftovers of bag {bag} in component {component}")]
    PairingImpossible { component: usize, bag: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bag {
    pub anchors: (usize, usize),
    pub members: Vec<usize>,
}

impl Bag {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Members other than the two extremes of the sequence.
    pub fn interior(&self) -> &[usize] {
        if self.members.len() <= 2 {
            &[]
        } else {
            &self.members[1..self.members.len() - 1]
        }
    }
}

/// Checks the bag invariants against raw rotations.
pub fn bag_is_valid(rot: &[Vec<usize>], bag: &Bag) -> bool {
    let (a, b) = bag.anchors;
    let n = rot.len();
    let m = bag.members.len();
    if m == 0 || a == b || a >= n || b >= n {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    for &w in &bag.members {
        if w >= n || w == a || w == b || !seen.insert(w) {
            return false;
        }
        let r = &rot[w];
        if r.len() != 2 || !(r.contains(&a) && r.contains(&b)) {
            return false;
        }
    }
    let run = |list: &[usize], seq: &mut dyn Iterator<Item = usize>| -> bool {
        let first = match seq.next() {
            Some(f) => f,
            None => return false,
        };
        let Some(p) = list.iter().position(|&x| x == first) else {
            return false;
        };
        seq.enumerate()
            .all(|(i, w)| list[(p + i + 1) % list.len()] == w)
    };
    m <= rot[a].len()
        && m <= rot[b].len()
        && run(&rot[a], &mut bag.members.iter().copied())
        && run(&rot[b], &mut bag.members.iter().rev().copied())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    /// Rotation system over local vertex ids.
    pub plane: RotationSystem,
    /// Name of each local vertex (a host-graph vertex once embedded).
    pub labels: Vec<usize>,
    /// Tree vertex (part) of each local vertex; inserted leftovers get `usize::MAX`.
    pub part_of: Vec<usize>,
    pub bags: Vec<Bag>,
    /// Bags below the order threshold, kept for reporting only.
    pub small_bags: Vec<Bag>,
    /// Chunk sizes per part.
    pub chunk_plan: Vec<Vec<usize>>,
    pub uncovered_count: usize,
}

/// Integer cube root.
pub fn cbrt_floor(n: usize) -> usize {
    let mut c = (n as f64).cbrt().round() as usize;
    while c * c * c > n {
        c -= 1;
    }
    while (c + 1) * (c + 1) * (c + 1) <= n {
        c += 1;
    }
    c
}

/// Splits `len` items into `ceil(len / cap)` sizes, as equal as possible,
/// larger ones first.
pub fn chunk_sizes(len: usize, cap: usize) -> Vec<usize> {
    let c = len.div_ceil(cap);
    if c == 0 {
        return Vec::new();
    }
    (0..c).map(|i| len / c + usize::from(i < len % c)).collect()
}

struct Fan {
    anchors: (usize, usize),
    members: Vec<usize>,
    cursor: usize,
}

struct Builder {
    rot: Vec<Vec<usize>>,
    labels: Vec<usize>,
    part_of: Vec<usize>,
    fans: Vec<Fan>,
    by_part: Vec<Vec<usize>>,
    next_fan: Vec<usize>,
}

/// Inserts new vertices `zs` (already allocated, empty rotations) into the
/// face `a u' b u`, each adjacent to `u` and `u'`. The inserted vertices form
/// a bag with anchors `(u, u')`.
fn insert_fan(rot: &mut [Vec<usize>], a: usize, u: usize, u2: usize, zs: &[usize]) {
    debug_assert_eq!(rot[u].len(), 2);
    debug_assert_eq!(rot[u2].len(), 2);
    let b = if rot[u][0] == a { rot[u][1] } else { rot[u][0] };
    let mut ru = Vec::with_capacity(zs.len() + 2);
    ru.push(b);
    ru.extend_from_slice(zs);
    ru.push(a);
    let mut ru2 = Vec::with_capacity(zs.len() + 2);
    ru2.push(a);
    ru2.extend(zs.iter().rev());
    ru2.push(b);
    rot[u] = ru;
    rot[u2] = ru2;
    for &z in zs {
        rot[z] = vec![u, u2];
    }
}

impl Builder {
    fn add_vertices(&mut self, names: &[usize], part: usize) -> Vec<usize> {
        let start = self.rot.len();
        for &nm in names {
            self.rot.push(Vec::new());
            self.labels.push(nm);
            self.part_of.push(part);
        }
        (start..self.rot.len()).collect()
    }

    fn register(&mut self, part: usize, anchors: (usize, usize), members: Vec<usize>) -> usize {
        let id = self.fans.len();
        self.fans.push(Fan {
            anchors,
            members,
            cursor: 0,
        });
        self.by_part[part].push(id);
        id
    }

    /// Earliest fan of `part` with two unused consecutive members.
    fn take_pair(&mut self, part: usize) -> Option<(usize, usize, usize)> {
        while self.next_fan[part] < self.by_part[part].len() {
            let f = &mut self.fans[self.by_part[part][self.next_fan[part]]];
            if f.cursor + 1 < f.members.len() {
                let (u, u2) = (f.members[f.cursor], f.members[f.cursor + 1]);
                f.cursor += 2;
                return Some((f.anchors.0, u, u2));
            }
            self.next_fan[part] += 1;
        }
        None
    }

    fn place_chunk(
        &mut self,
        names: &[usize],
        part: usize,
        host_part: usize,
    ) -> Result<usize, QuadError> {
        let (a, u, u2) = self
            .take_pair(host_part)
            .ok_or(QuadError::OutOfHostPairs { part: host_part })?;
        let zs = self.add_vertices(names, part);
        insert_fan(&mut self.rot, a, u, u2, &zs);
        Ok(self.register(part, (u, u2), zs))
    }
}

/// Builds a spanning quadrangulation of the complete blow-up of `tree` with
/// vertex classes `parts` (given by vertex names).
///
/// Every part is cut into `ceil(|V_i| / floor(n^{1/3}))` near-equal chunks.
/// The first chunks of the root part and its first child seed a `K_{2,m}`;
/// further chunks are placed, one fan per chunk, into faces bounded by two
/// degree-2 vertices of the parent part, in breadth-first order of the tree.
/// The degree-2 vertices left in each chunk form its bag.
pub fn build_quadrangulation(
    parts: &[Vec<usize>],
    tree: &SpanningTree,
    waive_size_check: bool,
) -> Result<QuadResult, QuadError> {
    let r = parts.len();
    if r < 2 || tree.n != r || !tree.is_spanning_tree() {
        return Err(QuadError::BadInput(
            "need a spanning tree on at least two parts".into(),
        ));
    }
    let min = parts.iter().map(Vec::len).min().unwrap();
    let max = parts.iter().map(Vec::len).max().unwrap();
    if min < 2 {
        return Err(QuadError::BadInput(
            "every part needs at least two vertices".into(),
        ));
    }
    if max > 2 * min {
        return Err(QuadError::Unbalanced { min, max });
    }
    let n: usize = parts.iter().map(Vec::len).sum();
    let needed = (16 * r).pow(3);
    if !waive_size_check && n < needed {
        return Err(QuadError::TooSmall { n, needed });
    }
    let cap = cbrt_floor(n).max(2);
    let chunk_plan: Vec<Vec<usize>> = parts.iter().map(|p| chunk_sizes(p.len(), cap)).collect();
    let chunks: Vec<Vec<&[usize]>> = parts
        .iter()
        .zip(&chunk_plan)
        .map(|(p, sizes)| {
            let mut at = 0;
            sizes
                .iter()
                .map(|&s| {
                    at += s;
                    &p[at - s..at]
                })
                .collect()
        })
        .collect();

    let adj = tree.adjacency();
    let (p1, p2) = (0, adj[0][0]);
    let mut bld = Builder {
        rot: Vec::with_capacity(n),
        labels: Vec::with_capacity(n),
        part_of: Vec::with_capacity(n),
        fans: Vec::new(),
        by_part: vec![Vec::new(); r],
        next_fan: vec![0; r],
    };
    let mut chunk_fans: Vec<usize> = Vec::new();

    // Seed: K_{2,|W_{2,1}|} on x1, x2 from the first chunk of p1.
    let w11 = chunks[p1][0];
    let x = bld.add_vertices(&w11[..2], p1);
    let w21 = bld.add_vertices(chunks[p2][0], p2);
    bld.rot[x[0]] = w21.clone();
    bld.rot[x[1]] = w21.iter().rev().copied().collect();
    for &w in &w21 {
        bld.rot[w] = vec![x[0], x[1]];
    }
    chunk_fans.push(bld.register(p2, (x[0], x[1]), w21.clone()));
    if w11.len() > 2 {
        chunk_fans.push(bld.place_chunk(&w11[2..], p1, p2)?);
    }
    if w21.len() == 2 {
        bld.register(p1, (w21[0], w21[1]), x.clone());
    }
    // Remaining chunks of p1 and p2 alternate, each hosted by the other part.
    let mut rest = [
        chunks[p1][1..].iter().peekable(),
        chunks[p2][1..].iter().peekable(),
    ];
    let ids = [p1, p2];
    let mut turn = 1;
    while rest[0].peek().is_some() || rest[1].peek().is_some() {
        if rest[turn].peek().is_none() {
            turn = 1 - turn;
        }
        let c = rest[turn].next().unwrap();
        chunk_fans.push(bld.place_chunk(c, ids[turn], ids[1 - turn])?);
        turn = 1 - turn;
    }
    // Breadth-first over the rest of the tree.
    let mut seen = vec![false; r];
    seen[p1] = true;
    seen[p2] = true;
    let mut queue = std::collections::VecDeque::from([p1, p2]);
    while let Some(p) = queue.pop_front() {
        for &c in &adj[p] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            queue.push_back(c);
            for chunk in &chunks[c] {
                chunk_fans.push(bld.place_chunk(chunk, c, p)?);
            }
        }
    }

    let threshold = (n as f64).cbrt() / 2.0;
    let mut bags = Vec::new();
    let mut small_bags = Vec::new();
    for &f in &chunk_fans {
        let fan = &bld.fans[f];
        // Pairs are consumed from the front, so the free members are a suffix.
        let bag = Bag {
            anchors: fan.anchors,
            members: fan.members[fan.cursor.min(fan.members.len())..].to_vec(),
        };
        if bag.members.is_empty() {
            continue;
        }
        if (bag.order() as f64) < threshold {
            small_bags.push(bag);
        } else {
            bags.push(bag);
        }
    }
    let covered: usize = bags.iter().map(Bag::order).sum();
    Ok(QuadResult {
        plane: RotationSystem::from_raw(bld.rot),
        labels: bld.labels,
        part_of: bld.part_of,
        bags,
        small_bags,
        chunk_plan,
        uncovered_count: n - covered,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadCheck {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub is_quadrangulation: bool,
    pub bags_valid: bool,
    pub bags_disjoint: bool,
}

impl QuadCheck {
    pub fn ok(&self) -> bool {
        self.is_quadrangulation
            && self.edges + 4 == 2 * self.vertices
            && self.bags_valid
            && self.bags_disjoint
    }
}

impl QuadResult {
    pub fn vertex_count(&self) -> usize {
        self.plane.n()
    }

    pub fn edge_count(&self) -> usize {
        self.plane.edge_count()
    }

    /// Re-derives the structural invariants from the rotation system.
    pub fn check(&self) -> QuadCheck {
        let rot = self.plane.rotations();
        let mut used = vec![false; rot.len()];
        let mut disjoint = true;
        for bag in self.bags.iter().chain(&self.small_bags) {
            for &w in &bag.members {
                if w >= used.len() || std::mem::replace(&mut used[w], true) {
                    disjoint = false;
                }
            }
        }
        QuadCheck {
            vertices: self.plane.n(),
            edges: self.plane.edge_count(),
            max_degree: self.plane.max_degree(),
            is_quadrangulation: classify(&self.plane) == FaceClass::Quadrangulation,
            bags_valid: self
                .bags
                .iter()
                .chain(&self.small_bags)
                .all(|b| bag_is_valid(rot, b)),
            bags_disjoint: disjoint,
        }
    }

    /// Bag in host names.
    pub fn named_bag(&self, bag: &Bag) -> Bag {
        Bag {
            anchors: (self.labels[bag.anchors.0], self.labels[bag.anchors.1]),
            members: bag.members.iter().map(|&w| self.labels[w]).collect(),
        }
    }

    /// Rewrites the member order of bag `idx` (local ids).
    pub fn reorder_bag(&mut self, idx: usize, order: &[usize]) -> Result<(), QuadError> {
        let bag = self.bags.get(idx).ok_or(QuadError::NotABag(idx))?.clone();
        if !bag_is_valid(self.plane.rotations(), &bag) {
            return Err(QuadError::NotABag(idx));
        }
        let mut a = order.to_vec();
        let mut b = bag.members.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(QuadError::BadPermutation);
        }
        let (x, y) = bag.anchors;
        let rot = self.plane.rotations_mut();
        let px = rot[x].iter().position(|&w| w == bag.members[0]).unwrap();
        let dx = rot[x].len();
        for (i, &w) in order.iter().enumerate() {
            rot[x][(px + i) % dx] = w;
        }
        let py = rot[y]
            .iter()
            .position(|&w| w == *bag.members.last().unwrap())
            .unwrap();
        let dy = rot[y].len();
        for (i, &w) in order.iter().rev().enumerate() {
            rot[y][(py + i) % dy] = w;
        }
        self.bags[idx].members = order.to_vec();
        Ok(())
    }

    /// Moves the degree-2 vertex `w` (adjacent to `a` and `b` only) into the
    /// face `a, succ_a(after), b, after`.
    fn relocate(&mut self, a: usize, b: usize, w: usize, after: usize) {
        let rot = self.plane.rotations_mut();
        rot[a].retain(|&x| x != w);
        rot[b].retain(|&x| x != w);
        let pa = rot[a].iter().position(|&x| x == after).unwrap();
        rot[a].insert(pa + 1, w);
        let pb = rot[b].iter().position(|&x| x == after).unwrap();
        rot[b].insert(pb, w);
    }

    /// Adds leftover vertices `names` into the face between the consecutive
    /// members `u` and `u' = succ_a(u)` of a bag with first anchor `a`.
    fn insert_leftovers(&mut self, a: usize, u: usize, u2: usize, names: &[usize]) -> Bag {
        let start = self.plane.n();
        let zs: Vec<usize> = (start..start + names.len()).collect();
        let rot = self.plane.rotations_mut();
        rot.resize(start + names.len(), Vec::new());
        insert_fan(rot, a, u, u2, &zs);
        self.labels.extend_from_slice(names);
        self.part_of.resize(start + names.len(), usize::MAX);
        Bag {
            anchors: (u, u2),
            members: zs,
        }
    }

    /// Collects the degree-2 members of `members` into one contiguous run
    /// with the given anchors, starting where the first of them sits.
    fn gather(&mut self, anchors: (usize, usize), members: &[usize]) -> Option<Bag> {
        let rot = self.plane.rotations();
        let free: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&w| rot[w].len() == 2)
            .collect();
        let (&first, rest) = free.split_first()?;
        let mut prev = first;
        for &w in rest {
            if self.plane.succ(anchors.0, prev) != Some(w) {
                self.relocate(anchors.0, anchors.1, w, prev);
            }
            prev = w;
        }
        Some(Bag {
            anchors,
            members: free,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub component: usize,
    pub bag: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsertionPlan {
    pub leftovers: Vec<usize>,
    pub assignment: Vec<Assignment>,
    pub good_threshold: usize,
    pub capacity: usize,
}

/// Minimum interior neighbours making a bag good for a leftover vertex.
pub fn good_threshold(n: usize, k: usize) -> usize {
    (((n as f64).cbrt() / (32 * k * k) as f64) - 1e-9)
        .ceil()
        .max(2.0) as usize
}

/// Maximum number of leftovers assigned to one bag.
pub fn bag_capacity(n: usize, k: usize) -> usize {
    (((n as f64).cbrt() / (128 * k * k) as f64) + 1e-9)
        .floor()
        .max(1.0) as usize
}

fn interior_neighbours(q: &QuadResult, bag: &Bag, host: &Graph, v: usize) -> usize {
    bag.interior()
        .iter()
        .filter(|&&w| host.has_edge(v, q.labels[w]))
        .count()
}

/// Greedy sequential assignment of leftovers to bags.
///
/// Bags are visited in order; each takes unassigned leftovers for which it is
/// good, up to its capacity, as long as every vertex already assigned to it
/// keeps at least twice the assigned count of interior neighbours.
pub fn plan_insertions(
    qs: &[QuadResult],
    leftovers: &[usize],
    host: &Graph,
    k: usize,
    n: usize,
) -> Result<InsertionPlan, QuadError> {
    let threshold = good_threshold(n, k);
    let capacity = bag_capacity(n, k);
    let mut assigned = vec![false; leftovers.len()];
    let mut assignment = Vec::new();
    for (c, q) in qs.iter().enumerate() {
        for (b, bag) in q.bags.iter().enumerate() {
            let mut chosen: Vec<(usize, usize)> = Vec::new();
            for (i, &v) in leftovers.iter().enumerate() {
                if chosen.len() == capacity {
                    break;
                }
                if assigned[i] {
                    continue;
                }
                let deg = interior_neighbours(q, bag, host, v);
                let size = chosen.len() + 1;
                if deg >= threshold && deg >= 2 * size && chosen.iter().all(|&(_, d)| d >= 2 * size)
                {
                    chosen.push((v, deg));
                    assigned[i] = true;
                }
            }
            if !chosen.is_empty() {
                assignment.push(Assignment {
                    component: c,
                    bag: b,
                    vertices: chosen.into_iter().map(|x| x.0).collect(),
                });
            }
        }
    }
    if let Some(i) = assigned.iter().position(|&a| !a) {
        let v = leftovers[i];
        let good_bags = qs
            .iter()
            .flat_map(|q| q.bags.iter().map(move |bag| (q, bag)))
            .filter(|(q, bag)| interior_neighbours(q, bag, host, v) >= threshold)
            .count();
        return Err(QuadError::UnassignableVertex {
            vertex: v,
            good_bags,
        });
    }
    Ok(InsertionPlan {
        leftovers: leftovers.to_vec(),
        assignment,
        good_threshold: threshold,
        capacity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsertionRecord {
    pub vertex: usize,
    pub component: usize,
    /// Host names of the two bag members the vertex is joined to.
    pub endpoints: (usize, usize),
}

/// Kuhn's augmenting-path matching; `options[i]` lists the slots item `i`
/// may take. Returns the slot of every item.
fn match_slots(options: &[Vec<usize>], slots: usize) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        options: &[Vec<usize>],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &p in &options[i] {
            if !seen[p] {
                seen[p] = true;
                if owner[p].is_none_or(|j| augment(j, options, owner, seen)) {
                    owner[p] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; slots];
    for i in 0..options.len() {
        if !augment(i, options, &mut owner, &mut vec![false; slots]) {
            return None;
        }
    }
    let mut out = vec![0; options.len()];
    for (p, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            out[*i] = p;
        }
    }
    Some(out)
}

/// Carries out an insertion plan.
///
/// If two interior members of a bag are adjacent to every vertex assigned to
/// it, all of them go into the face between those two members and form a new
/// bag. Otherwise each vertex gets its own pair of neighbouring interior
/// members (found by matching), the bag is reordered so the pairs are
/// consecutive, and each vertex is inserted into its pair's face. The free
/// members of the old bag are regathered into one bag.
pub fn execute_insertions(
    qs: &mut [QuadResult],
    plan: &InsertionPlan,
    host: &Graph,
) -> Result<Vec<InsertionRecord>, QuadError> {
    let mut log = Vec::new();
    for asg in &plan.assignment {
        let q = &mut qs[asg.component];
        let bag = q.bags[asg.bag].clone();
        if !bag_is_valid(q.plane.rotations(), &bag) {
            return Err(QuadError::NotABag(asg.bag));
        }
        let interior = bag.interior().to_vec();
        let adj: Vec<Vec<bool>> = asg
            .vertices
            .iter()
            .map(|&v| {
                interior
                    .iter()
                    .map(|&w| host.has_edge(v, q.labels[w]))
                    .collect()
            })
            .collect();
        let common: Vec<usize> = (0..interior.len())
            .filter(|&j| adj.iter().all(|row| row[j]))
            .collect();
        let first = bag.members[0];
        let last = *bag.members.last().unwrap();
        let (a, b) = bag.anchors;
        let mut new_bags = Vec::new();
        let paired: Vec<(usize, usize)> = if common.len() >= 2 {
            let (x, y) = (interior[common[0]], interior[common[1]]);
            let mut order = vec![first, x, y];
            order.extend(interior.iter().copied().filter(|&w| w != x && w != y));
            order.push(last);
            q.reorder_bag(asg.bag, &order)?;
            new_bags.push(q.insert_leftovers(a, x, y, &asg.vertices));
            vec![(x, y); asg.vertices.len()]
        } else {
            let flat = match_members(&adj).ok_or(QuadError::PairingImpossible {
                component: asg.component,
                bag: asg.bag,
            })?;
            let chosen: Vec<(usize, usize)> = flat
                .chunks(2)
                .map(|c| (interior[c[0]], interior[c[1]]))
                .collect();
            let used: Vec<usize> = chosen.iter().flat_map(|&(s, t)| [s, t]).collect();
            let mut order = vec![first];
            order.extend(used.iter().copied());
            order.extend(interior.iter().copied().filter(|w| !used.contains(w)));
            order.push(last);
            q.reorder_bag(asg.bag, &order)?;
            for (&v, &(s, t)) in asg.vertices.iter().zip(&chosen) {
                q.insert_leftovers(a, s, t, &[v]);
            }
            chosen
        };
        for (&v, &(s, t)) in asg.vertices.iter().zip(&paired) {
            log.push(InsertionRecord {
                vertex: v,
                component: asg.component,
                endpoints: (q.labels[s], q.labels[t]),
            });
        }
        let regathered = q.gather((a, b), &bag.members);
        match regathered {
            Some(g) => q.bags[asg.bag] = g,
            None => q.bags[asg.bag].members.clear(),
        }
        q.bags.extend(new_bags);
    }
    for q in qs.iter_mut() {
        q.bags.retain(|b| !b.members.is_empty());
    }
    Ok(log)
}

/// Assigns each vertex two distinct interior members it is adjacent to, all
/// members distinct, by matching vertex copies to members. Returns the flat
/// member list `[s_0, t_0, s_1, t_1, ...]`.
fn match_members(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let m = adj.first().map_or(0, Vec::len);
    let options: Vec<Vec<usize>> = adj
        .iter()
        .flat_map(|row| {
            let nb: Vec<usize> = (0..m).filter(|&j| row[j]).collect();
            [nb.clone(), nb]
        })
        .collect();
    match_slots(&options, m)
}
