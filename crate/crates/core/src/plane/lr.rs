// Left-right planarity test with embedding extraction (Brandes' formulation
// of the de Fraysseix-Rosenstiehl criterion).

use std::collections::HashMap;

use crate::graph::Graph;

type Edge = (usize, usize);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Interval {
    low: Option<Edge>,
    high: Option<Edge>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }

    fn conflicting(&self, b: Edge, lowpt: &HashMap<Edge, usize>) -> bool {
        !self.is_empty() && lowpt[&self.high.unwrap()] > lowpt[&b]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }

    fn lowest(&self, lowpt: &HashMap<Edge, usize>) -> usize {
        if self.left.is_empty() {
            return lowpt[&self.right.low.unwrap()];
        }
        if self.right.is_empty() {
            return lowpt[&self.left.low.unwrap()];
        }
        lowpt[&self.left.low.unwrap()].min(lowpt[&self.right.low.unwrap()])
    }
}

struct State<'a> {
    g: &'a Graph,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<Edge>>,
    oriented: HashMap<Edge, ()>,
    out: Vec<Vec<usize>>,
    lowpt: HashMap<Edge, usize>,
    lowpt2: HashMap<Edge, usize>,
    nesting_depth: HashMap<Edge, i64>,
    ordered_adjs: Vec<Vec<usize>>,
    reference: HashMap<Edge, Option<Edge>>,
    side: HashMap<Edge, i64>,
    stack: Vec<ConflictPair>,
    stack_bottom: HashMap<Edge, Option<ConflictPair>>,
    lowpt_edge: HashMap<Edge, Edge>,
    left_ref: Vec<usize>,
    right_ref: Vec<usize>,
    // Embedding lists in clockwise order.
    emb: Vec<Vec<usize>>,
}

/// Returns clockwise rotations for a planar graph, `None` otherwise.
pub(crate) fn lr_embed(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.n();
    if n > 2 && g.edge_count() > 3 * n - 6 {
        return None;
    }
    let mut st = State {
        g,
        height: vec![None; n],
        parent_edge: vec![None; n],
        oriented: HashMap::new(),
        out: vec![Vec::new(); n],
        lowpt: HashMap::new(),
        lowpt2: HashMap::new(),
        nesting_depth: HashMap::new(),
        ordered_adjs: vec![Vec::new(); n],
        reference: HashMap::new(),
        side: HashMap::new(),
        stack: Vec::new(),
        stack_bottom: HashMap::new(),
        lowpt_edge: HashMap::new(),
        left_ref: vec![usize::MAX; n],
        right_ref: vec![usize::MAX; n],
        emb: vec![Vec::new(); n],
    };
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v].is_none() {
            st.height[v] = Some(0);
            roots.push(v);
            st.dfs_orientation(v);
        }
    }
    for v in 0..n {
        let mut adjs = st.out[v].clone();
        adjs.sort_by_key(|&w| st.nesting_depth[&(v, w)]);
        st.ordered_adjs[v] = adjs;
    }
    for &r in &roots {
        if !st.dfs_testing(r) {
            return None;
        }
    }
    let edges: Vec<Edge> = (0..n)
        .flat_map(|v| st.out[v].iter().map(move |&w| (v, w)))
        .collect::<Vec<_>>();
    for &e in &edges {
        let s = st.sign(e);
        *st.nesting_depth.get_mut(&e).unwrap() *= s;
    }
    for v in 0..n {
        let mut adjs = st.out[v].clone();
        adjs.sort_by_key(|&w| st.nesting_depth[&(v, w)]);
        st.emb[v] = adjs.clone();
        st.ordered_adjs[v] = adjs;
    }
    for &r in &roots {
        st.dfs_embedding(r);
    }
    Some(st.emb)
}

impl<'a> State<'a> {
    fn dfs_orientation(&mut self, v: usize) {
        let e = self.parent_edge[v];
        let nbrs = self.g.neighbors(v).to_vec();
        for w in nbrs {
            if self.oriented.contains_key(&(v, w)) || self.oriented.contains_key(&(w, v)) {
                continue;
            }
            let vw = (v, w);
            self.oriented.insert(vw, ());
            self.out[v].push(w);
            let hv = self.height[v].unwrap();
            self.lowpt.insert(vw, hv);
            self.lowpt2.insert(vw, hv);
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(vw);
                    self.height[w] = Some(hv + 1);
                    self.dfs_orientation(w);
                }
                Some(hw) => {
                    self.lowpt.insert(vw, hw);
                }
            }
            let lp = self.lowpt[&vw];
            let mut nd = 2 * lp as i64;
            if self.lowpt2[&vw] < hv {
                nd += 1;
            }
            self.nesting_depth.insert(vw, nd);
            if let Some(e) = e {
                let (lp_vw, lp2_vw) = (self.lowpt[&vw], self.lowpt2[&vw]);
                let (lp_e, lp2_e) = (self.lowpt[&e], self.lowpt2[&e]);
                if lp_vw < lp_e {
                    self.lowpt2.insert(e, lp_e.min(lp2_vw));
                    self.lowpt.insert(e, lp_vw);
                } else if lp_vw > lp_e {
                    self.lowpt2.insert(e, lp2_e.min(lp_vw));
                } else {
                    self.lowpt2.insert(e, lp2_e.min(lp2_vw));
                }
            }
        }
    }

    fn top(&self) -> Option<ConflictPair> {
        self.stack.last().copied()
    }

    fn dfs_testing(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let adjs = self.ordered_adjs[v].clone();
        for (idx, &w) in adjs.iter().enumerate() {
            let ei = (v, w);
            self.stack_bottom.insert(ei, self.top());
            if Some(ei) == self.parent_edge[w] {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge.insert(ei, ei);
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval {
                        low: Some(ei),
                        high: Some(ei),
                    },
                });
            }
            if self.lowpt[&ei] < self.height[v].unwrap() {
                let e = e.expect("root edges never return below the root");
                if idx == 0 {
                    let le = self.lowpt_edge[&ei];
                    self.lowpt_edge.insert(e, le);
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: Edge, e: Edge) -> bool {
        let mut p = ConflictPair::default();
        loop {
            let mut q = self.stack.pop().unwrap();
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[&q.right.low.unwrap()] > self.lowpt[&e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.reference.insert(p.right.low.unwrap(), q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                let le = self.lowpt_edge[&e];
                self.reference.insert(q.right.low.unwrap(), Some(le));
            }
            if self.top() == self.stack_bottom[&ei] {
                break;
            }
        }
        while let Some(t) = self.top() {
            if !(t.left.conflicting(ei, &self.lowpt) || t.right.conflicting(ei, &self.lowpt)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if q.right.conflicting(ei, &self.lowpt) {
                q.swap();
            }
            if q.right.conflicting(ei, &self.lowpt) {
                return false;
            }
            self.reference.insert(p.right.low.unwrap(), q.right.high);
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.reference.insert(p.left.low.unwrap(), q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: Edge) {
        let u = e.0;
        let hu = self.height[u].unwrap();
        while let Some(t) = self.top() {
            if t.lowest(&self.lowpt) != hu {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(l) = p.left.low {
                self.side.insert(l, -1);
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if h.1 != u {
                    break;
                }
                p.left.high = self.reference.get(&h).copied().flatten();
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.reference.insert(l, p.right.low);
                    self.side.insert(l, -1);
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if h.1 != u {
                    break;
                }
                p.right.high = self.reference.get(&h).copied().flatten();
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low {
                    self.reference.insert(l, p.left.low);
                    self.side.insert(l, -1);
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[&e] < hu {
            let t = self.top().unwrap();
            let (hl, hr) = (t.left.high, t.right.high);
            let r = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[&l] > self.lowpt[&r] => Some(l),
                _ => hr,
            };
            self.reference.insert(e, r);
        }
    }

    fn sign(&mut self, e: Edge) -> i64 {
        // Iterative resolution of the reference chain.
        let mut chain = vec![e];
        while let Some(Some(r)) = self.reference.get(chain.last().unwrap()).copied() {
            chain.push(r);
        }
        let mut acc = *self.side.get(chain.last().unwrap()).unwrap_or(&1);
        for &x in chain.iter().rev().skip(1) {
            let s = *self.side.get(&x).unwrap_or(&1) * acc;
            self.side.insert(x, s);
            self.reference.insert(x, None);
            acc = s;
        }
        acc
    }

    fn dfs_embedding(&mut self, v: usize) {
        let adjs = self.ordered_adjs[v].clone();
        for w in adjs {
            let ei = (v, w);
            if Some(ei) == self.parent_edge[w] {
                self.emb[w].insert(0, v);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.dfs_embedding(w);
            } else if *self.side.get(&ei).unwrap_or(&1) == 1 {
                let r = self.right_ref[w];
                let pos = self.emb[w].iter().position(|&x| x == r).unwrap();
                self.emb[w].insert(pos + 1, v);
            } else {
                let l = self.left_ref[w];
                let pos = self.emb[w].iter().position(|&x| x == l).unwrap();
                self.emb[w].insert(pos, v);
                self.left_ref[w] = v;
            }
        }
    }
}
