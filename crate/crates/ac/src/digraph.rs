//! Weighted inverse X-digraphs over {x, y}: vertex identification, weight
//! shift, folding with a shift-carrying union-find, and completion with a
//! symmetrized relator set.
//!
//! An edge `a -(l,k)-> b` always coexists with its inverse
//! `b -(l^-1,-k)-> a`; we store one orientation per edge and derive the
//! other. The modulus N is carried on the graph, with 0 as the sentinel
//! for infinity, so gcd arithmetic is uniform: gcd(inf, k) = |k|.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::words::{cyclic_reduce, Letter, Word, ALPHABET};

/// Modulus with 0 standing for infinity.
pub const N_INFINITY: u64 = 0;

pub fn gcd_modulus(n: u64, k: i64) -> u64 {
    let k = k.unsigned_abs();
    if n == N_INFINITY {
        return k;
    }
    if k == 0 {
        return n;
    }
    let (mut a, mut b) = (n, k);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("edge weight overflowed i64")
}

fn checked_sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("edge weight overflowed i64")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub origin: usize,
    pub label: Letter,
    pub weight: i64,
    pub terminus: usize,
}

/// A half-edge: one of the two orientations of a stored edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HalfEdge {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub struct WeightedDigraph {
    edges: Vec<Edge>,
    edge_alive: Vec<bool>,
    vertex_alive: Vec<bool>,
    pub modulus: u64,
    pub root: usize,
}

impl WeightedDigraph {
    pub fn new() -> WeightedDigraph {
        WeightedDigraph {
            edges: Vec::new(),
            edge_alive: Vec::new(),
            vertex_alive: Vec::new(),
            modulus: N_INFINITY,
            root: 0,
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_alive.push(true);
        self.vertex_alive.len() - 1
    }

    pub fn add_edge(&mut self, origin: usize, label: Letter, weight: i64, terminus: usize) {
        debug_assert!(self.vertex_alive[origin] && self.vertex_alive[terminus]);
        self.edges.push(Edge {
            origin,
            label,
            weight,
            terminus,
        });
        self.edge_alive.push(true);
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_alive.len()).filter(|&v| self.vertex_alive[v])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_alive.iter().filter(|a| **a).count()
    }

    pub fn live_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .iter()
            .zip(&self.edge_alive)
            .filter(|(_, a)| **a)
            .map(|(e, _)| e)
    }

    /// Outgoing view of both orientations of every live edge at v.
    /// Self-loops contribute two entries with mutually inverse labels.
    pub fn half_edges_at(&self, v: usize) -> Vec<(Letter, i64, usize, HalfEdge)> {
        let mut out = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if !self.edge_alive[id] {
                continue;
            }
            if e.origin == v {
                out.push((e.label, e.weight, e.terminus, HalfEdge { edge: id, forward: true }));
            }
            if e.terminus == v {
                out.push((
                    e.label.inverse(),
                    -e.weight,
                    e.origin,
                    HalfEdge { edge: id, forward: false },
                ));
            }
        }
        out
    }

    pub fn out_edge(&self, v: usize, l: Letter) -> Option<(usize, i64)> {
        self.half_edges_at(v)
            .into_iter()
            .find(|(label, _, _, _)| *label == l)
            .map(|(_, w, t, _)| (t, w))
    }

    pub fn is_folded(&self) -> bool {
        let mut seen: HashSet<(usize, u8)> = HashSet::new();
        for e in self.live_edges() {
            if !seen.insert((e.origin, e.label.code()))
                || !seen.insert((e.terminus, e.label.inverse().code()))
            {
                return false;
            }
        }
        true
    }

    /// Weight shift at v: outgoing weights increase by delta, incoming
    /// decrease. Self-loops are untouched (both adjustments cancel).
    pub fn shift(&mut self, v: usize, delta: i64) {
        for (id, alive) in self.edge_alive.iter().enumerate() {
            if !alive {
                continue;
            }
            let e = &mut self.edges[id];
            if e.origin == v && e.terminus == v {
                continue;
            }
            if e.origin == v {
                e.weight = checked_add(e.weight, delta);
            } else if e.terminus == v {
                e.weight = checked_sub(e.weight, delta);
            }
        }
    }

    /// Textbook vertex identification: re-hang all edges of v1 and v2
    /// on a fresh vertex and drop the originals. Returns the new vertex.
    /// The result is generally not folded.
    pub fn identify(&mut self, v1: usize, v2: usize) -> usize {
        if v1 == v2 {
            return v1;
        }
        let v = self.add_vertex();
        for (id, alive) in self.edge_alive.iter().enumerate() {
            if !alive {
                continue;
            }
            let e = &mut self.edges[id];
            if e.origin == v1 || e.origin == v2 {
                e.origin = v;
            }
            if e.terminus == v1 || e.terminus == v2 {
                e.terminus = v;
            }
        }
        self.vertex_alive[v1] = false;
        self.vertex_alive[v2] = false;
        if self.root == v1 || self.root == v2 {
            self.root = v;
        }
        v
    }

    fn kill_edge(&mut self, id: usize) {
        self.edge_alive[id] = false;
    }

    /// Folds the graph using a union-find that carries weight shifts, so
    /// the total number of additions is near linear in the graph size.
    pub fn fold(&mut self) {
        self.fold_with_map();
    }

    /// As `fold`, returning for each pre-fold vertex the vertex it was
    /// merged into.
    pub fn fold_with_map(&mut self) -> Vec<usize> {
        let nv = self.vertex_alive.len();
        let mut uf = UnionFindWithShifts::new(nv);
        // Per-root slot maps: label code -> half-edge currently claiming
        // that outgoing slot. Merged small-to-large on union.
        let mut slots: Vec<HashMap<u8, HalfEdge>> = vec![HashMap::new(); nv];
        let mut queue: VecDeque<HalfEdge> = VecDeque::new();
        for id in 0..self.edges.len() {
            if self.edge_alive[id] {
                queue.push_back(HalfEdge { edge: id, forward: true });
                queue.push_back(HalfEdge { edge: id, forward: false });
            }
        }
        while let Some(h) = queue.pop_front() {
            if !self.edge_alive[h.edge] {
                continue;
            }
            let (from, label) = self.half_endpoint(h);
            let r = uf.find(from);
            match slots[r].get(&label.code()).copied() {
                None => {
                    slots[r].insert(label.code(), h);
                }
                Some(h0) if !self.edge_alive[h0.edge] => {
                    slots[r].insert(label.code(), h);
                }
                Some(h0) if h0 == h => {}
                Some(h0) => {
                    let (t0, w0) = self.half_target_eff(h0, &mut uf);
                    let (t1, w1) = self.half_target_eff(h, &mut uf);
                    if t0 == t1 {
                        let diff = checked_sub(w1, w0);
                        if self.modulus == N_INFINITY || diff.rem_euclid(self.modulus as i64) != 0 {
                            self.modulus = gcd_modulus(self.modulus, diff);
                        }
                        self.kill_edge(h.edge);
                    } else {
                        // Align weights by shifting t1's class, then merge.
                        let (big, small) = uf.union(t0, t1, checked_sub(w1, w0));
                        self.kill_edge(h.edge);
                        let moved = std::mem::take(&mut slots[small]);
                        if slots[big].is_empty() && moved.len() > 1 {
                            slots[big] = moved;
                        } else {
                            for (_, hm) in moved {
                                queue.push_back(hm);
                            }
                        }
                    }
                }
            }
        }
        // Rewrite the graph onto class representatives with materialized
        // shifts.
        let mut new_edges = Vec::new();
        let mut new_alive = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if !self.edge_alive[id] {
                continue;
            }
            let o = uf.find(e.origin);
            let t = uf.find(e.terminus);
            let w = checked_sub(checked_add(e.weight, uf.total_shift(e.origin)), uf.total_shift(e.terminus));
            new_edges.push(Edge {
                origin: o,
                label: e.label,
                weight: w,
                terminus: t,
            });
            new_alive.push(true);
        }
        for v in 0..nv {
            if self.vertex_alive[v] && uf.find(v) != v {
                self.vertex_alive[v] = false;
            }
        }
        self.root = uf.find(self.root);
        self.edges = new_edges;
        self.edge_alive = new_alive;
        if self.modulus != N_INFINITY {
            let n = self.modulus as i64;
            for e in &mut self.edges {
                e.weight = e.weight.rem_euclid(n);
            }
        }
        debug_assert!(self.is_folded());
        (0..nv).map(|v| uf.find(v)).collect()
    }

    fn half_endpoint(&self, h: HalfEdge) -> (usize, Letter) {
        let e = &self.edges[h.edge];
        if h.forward {
            (e.origin, e.label)
        } else {
            (e.terminus, e.label.inverse())
        }
    }

    /// Target class and effective outgoing weight of a half-edge under
    /// the current shifts.
    fn half_target_eff(&self, h: HalfEdge, uf: &mut UnionFindWithShifts) -> (usize, i64) {
        let e = &self.edges[h.edge];
        let eff = checked_sub(
            checked_add(e.weight, uf.total_shift(e.origin)),
            uf.total_shift(e.terminus),
        );
        if h.forward {
            (uf.find(e.terminus), eff)
        } else {
            (uf.find(e.origin), -eff)
        }
    }

    /// Eager-shift folding used only as a differential-testing oracle:
    /// no union-find, weights moved immediately per merge.
    pub fn naive_fold(&mut self) {
        loop {
            let Some((v, h0, h1)) = self.find_conflict() else {
                break;
            };
            let (_, w0, t0, _e0) = h0;
            let (_, w1, t1, e1) = h1;
            let _ = v;
            if t0 == t1 {
                let diff = checked_sub(w1, w0);
                if self.modulus == N_INFINITY || diff.rem_euclid(self.modulus as i64) != 0 {
                    self.modulus = gcd_modulus(self.modulus, diff);
                }
                self.kill_edge(e1.edge);
            } else {
                self.shift(t1, checked_sub(w1, w0));
                self.kill_edge(e1.edge);
                self.identify(t0, t1);
            }
        }
        if self.modulus != N_INFINITY {
            let n = self.modulus as i64;
            for (id, e) in self.edges.iter_mut().enumerate() {
                if self.edge_alive[id] {
                    e.weight = e.weight.rem_euclid(n);
                }
            }
        }
    }

    fn find_conflict(
        &self,
    ) -> Option<(usize, (Letter, i64, usize, HalfEdge), (Letter, i64, usize, HalfEdge))> {
        for v in self.vertex_ids() {
            let halves = self.half_edges_at(v);
            for i in 0..halves.len() {
                for j in (i + 1)..halves.len() {
                    if halves[i].0 == halves[j].0 && halves[i].3 != halves[j].3 {
                        return Some((v, halves[i], halves[j]));
                    }
                }
            }
        }
        None
    }

    /// Attaches, at every vertex present on entry, a weight-0 circuit for
    /// each relator, then folds.
    pub fn r_complete(&mut self, relators: &[Word]) {
        let existing: Vec<usize> = self.vertex_ids().collect();
        for &v in &existing {
            for r in relators {
                self.attach_circuit(v, r);
            }
        }
        self.fold();
    }

    fn attach_circuit(&mut self, v: usize, r: &Word) {
        debug_assert!(!r.is_empty());
        let n = r.len();
        let mut prev = v;
        for i in 0..n {
            let next = if i + 1 == n { v } else { self.add_vertex() };
            self.add_edge(prev, r.letter(i), 0, next);
            prev = next;
        }
    }

    /// Canonical image: vertices renumbered by BFS in label order, weights
    /// re-anchored so every BFS tree edge has weight 0, edges sorted. The
    /// root's component is numbered first, seeded at the root; every other
    /// component with edges is numbered from the seed producing the
    /// lexicographically least local edge list, and components are ordered
    /// by those lists. Isolated non-root vertices are dropped. Two folded
    /// graphs equal up to vertex naming and weight shifts produce
    /// identical canonical images. Requires a folded graph.
    fn canonical_component(&self, seed: usize) -> (Vec<usize>, Vec<(usize, u8, i64, usize)>) {
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut potential: HashMap<usize, i64> = HashMap::new();
        let mut members = vec![seed];
        let mut queue = VecDeque::new();
        order.insert(seed, 0);
        potential.insert(seed, 0);
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            let pv = potential[&v];
            for l in ALPHABET {
                if let Some((t, w)) = self.out_edge(v, l) {
                    if !order.contains_key(&t) {
                        order.insert(t, order.len());
                        potential.insert(t, checked_add(pv, w));
                        members.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut edges: Vec<(usize, u8, i64, usize)> = Vec::new();
        for e in self.live_edges() {
            let (Some(&o), Some(&t)) = (order.get(&e.origin), order.get(&e.terminus)) else {
                continue;
            };
            let w = checked_sub(
                checked_add(e.weight, potential[&e.origin]),
                potential[&e.terminus],
            );
            // Store each edge in the orientation with the smaller label.
            let (o, c, mut w, t) = if e.label.code() <= e.label.inverse().code() {
                (o, e.label.code(), w, t)
            } else {
                (t, e.label.inverse().code(), -w, o)
            };
            if self.modulus != N_INFINITY {
                w = w.rem_euclid(self.modulus as i64);
            }
            edges.push((o, c, w, t));
        }
        edges.sort();
        (members, edges)
    }

    pub fn canonical_form(&self) -> CanonicalGraph {
        let mut edges: Vec<(usize, u8, i64, usize)> = Vec::new();
        let mut done: HashSet<usize> = HashSet::new();
        let (root_members, root_edges) = self.canonical_component(self.root);
        let offset = root_members.len();
        done.extend(root_members);
        edges.extend(root_edges);
        // Remaining components, each rendered from its best seed.
        let mut rest: Vec<(Vec<(usize, u8, i64, usize)>, usize)> = Vec::new();
        for v in self.vertex_ids() {
            if done.contains(&v) || self.half_edges_at(v).is_empty() {
                continue;
            }
            let (members, _) = self.canonical_component(v);
            let best = members
                .iter()
                .map(|&s| self.canonical_component(s).1)
                .min()
                .expect("component has a seed");
            let size = members.len();
            done.extend(members);
            rest.push((best, size));
        }
        rest.sort();
        let mut offset = offset;
        for (comp_edges, size) in rest {
            for (o, c, w, t) in comp_edges {
                edges.push((o + offset, c, w, t + offset));
            }
            offset += size;
        }
        edges.sort();
        CanonicalGraph {
            modulus: self.modulus,
            root: 0,
            edges,
        }
    }

    /// Weight of the circuit reading `w` from `v`, if such a path exists
    /// and returns to `v`.
    pub fn circuit_weight(&self, v: usize, w: &Word) -> Option<i64> {
        let mut cur = v;
        let mut total = 0i64;
        for l in w.letters() {
            let (t, wt) = self.out_edge(cur, l)?;
            total = checked_add(total, wt);
            cur = t;
        }
        (cur == v).then_some(total)
    }
}

impl Default for WeightedDigraph {
    fn default() -> Self {
        Self::new()
    }
}

/// Canonical image used for structural-equality tests and debug dumps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CanonicalGraph {
    pub modulus: u64,
    pub root: usize,
    pub edges: Vec<(usize, u8, i64, usize)>,
}

impl CanonicalGraph {
    /// One edge per line "origin label weight terminus" after a header
    /// "N=<modulus> root=<id>"; the infinite modulus prints as "inf".
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if self.modulus == N_INFINITY {
            let _ = writeln!(out, "N=inf root={}", self.root);
        } else {
            let _ = writeln!(out, "N={} root={}", self.modulus, self.root);
        }
        for (o, l, w, t) in &self.edges {
            let _ = writeln!(out, "{} {} {} {}", o, Letter::from_code(*l).to_char(), w, t);
        }
        out
    }
}

/// Union-find with per-vertex shift values: the total shift of v is the
/// sum of deltas along its parent chain, preserved by path compression.
pub struct UnionFindWithShifts {
    parent: Vec<usize>,
    delta: Vec<i64>,
    size: Vec<u32>,
}

impl UnionFindWithShifts {
    pub fn new(n: usize) -> UnionFindWithShifts {
        UnionFindWithShifts {
            parent: (0..n).collect(),
            delta: vec![0; n],
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, v: usize) -> usize {
        if self.parent[v] == v {
            return v;
        }
        let p = self.parent[v];
        let root = self.find(p);
        // find(p) left delta[p] as p's total shift (zero if p is the
        // root), so one addition finishes v.
        self.delta[v] = checked_add(self.delta[v], self.delta[p]);
        self.parent[v] = root;
        root
    }

    /// Total shift of v relative to its class root.
    pub fn total_shift(&mut self, v: usize) -> i64 {
        self.find(v);
        if self.parent[v] == v {
            0
        } else {
            self.delta[v]
        }
    }

    /// Merges the classes of the two roots so that every member of b's
    /// class gains `shift` relative to a's class. Returns (kept root,
    /// absorbed root).
    pub fn union(&mut self, a: usize, b: usize, shift: i64) -> (usize, usize) {
        debug_assert!(self.parent[a] == a && self.parent[b] == b && a != b);
        if self.size[a] >= self.size[b] {
            self.parent[b] = a;
            self.delta[b] = shift;
            self.size[a] += self.size[b];
            (a, b)
        } else {
            self.parent[a] = b;
            self.delta[a] = -shift;
            self.size[b] += self.size[a];
            (b, a)
        }
    }
}

/// The single-cycle pseudo-conjugacy graph for u: |u| vertices, traversal
/// from the root reads u, the first edge carries weight 1.
pub fn loop_graph(u: &Word) -> Result<WeightedDigraph, EmptyLoopWord> {
    if u.is_empty() {
        return Err(EmptyLoopWord);
    }
    let mut g = WeightedDigraph::new();
    let n = u.len();
    for _ in 0..n {
        g.add_vertex();
    }
    g.root = 0;
    for i in 0..n {
        g.add_edge(i, u.letter(i), if i == 0 { 1 } else { 0 }, (i + 1) % n);
    }
    Ok(g)
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot build a loop graph for the empty word")]
pub struct EmptyLoopWord;

/// All cyclic permutations of the cyclic reduction of r and of its
/// inverse, deduplicated.
pub fn symmetrize(r: &Word) -> Vec<Word> {
    debug_assert!(!r.is_empty());
    let (core, _) = cyclic_reduce(r);
    let mut set = BTreeSet::new();
    for orient in [core.clone(), core.inverse()] {
        for k in 0..orient.len().max(1) {
            set.insert(orient.rotate_left(k));
        }
    }
    set.into_iter().collect()
}
