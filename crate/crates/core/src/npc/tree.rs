//! Finite metric trees.
//!
//! A metric tree is a connected acyclic graph with strictly positive edge
//! lengths, seen as a geodesic space: every point lives on an edge, the
//! distance between two points is the length of the unique path between
//! them, and geodesics run along that path. Metric trees are the standard
//! example of an NPC space that is not a manifold; the tripod (three legs
//! glued at a hub) already exhibits branching.
//!
//! Points are stored as `(edge id, offset from the edge's start)`. A point
//! sitting exactly on a vertex has many such representations, so vertex
//! points are canonicalized to the vertex's smallest incident edge id. This
//! makes structural equality of tree points exact.

use rand::Rng;

use crate::error::{Error, Result};
use crate::npc::NpcPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEdge {
    pub start: usize,
    pub end: usize,
    pub length: f64,
}

/// A finite metric tree with precomputed vertex distances and routing
/// tables. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MetricTree {
    vertex_count: usize,
    edges: Vec<TreeEdge>,
    /// Row-major `vertex_count^2` matrix of vertex-to-vertex path lengths.
    vdist: Vec<f64>,
    /// `next[a * n + b]` = (first vertex after `a` on the path to `b`,
    /// edge id used for that hop). `next[b * n + b]` is a placeholder.
    next: Vec<(u32, u32)>,
    /// Canonical representation of each vertex: (edge id, vertex is the
    /// edge's start).
    canonical: Vec<(usize, bool)>,
}

impl PartialEq for MetricTree {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl MetricTree {
    /// Builds a tree from `(start, end, length)` edges. The edge list must
    /// describe a connected acyclic graph with positive lengths and at
    /// least one edge.
    pub fn new(vertex_count: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        if vertex_count < 2 || edge_list.is_empty() {
            return Err(Error::InvalidArgument(
                "metric tree needs at least one edge".into(),
            ));
        }
        if edge_list.len() != vertex_count - 1 {
            return Err(Error::InvalidArgument(format!(
                "a tree on {vertex_count} vertices has {} edges, got {}",
                vertex_count - 1,
                edge_list.len()
            )));
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
        for (id, &(start, end, length)) in edge_list.iter().enumerate() {
            if start >= vertex_count || end >= vertex_count || start == end {
                return Err(Error::InvalidArgument(format!(
                    "edge {id}: bad endpoints ({start}, {end})"
                )));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "edge {id}: length must be positive and finite, got {length}"
                )));
            }
            adjacency[start].push((end, id));
            adjacency[end].push((start, id));
            edges.push(TreeEdge { start, end, length });
        }

        // BFS from every vertex: fills distances and routing in O(n^2).
        let n = vertex_count;
        let mut vdist = vec![f64::INFINITY; n * n];
        let mut next = vec![(u32::MAX, u32::MAX); n * n];
        for root in 0..n {
            vdist[root * n + root] = 0.0;
            let mut stack = vec![root];
            let mut seen = vec![false; n];
            seen[root] = true;
            // first hop back toward `root` is stored from the other side
            while let Some(v) = stack.pop() {
                for &(w, eid) in &adjacency[v] {
                    if seen[w] {
                        continue;
                    }
                    seen[w] = true;
                    vdist[root * n + w] = vdist[root * n + v] + edges[eid].length;
                    // from w, the first step toward root goes to v
                    next[w * n + root] = (v as u32, eid as u32);
                    stack.push(w);
                }
            }
            if seen.iter().any(|s| !s) {
                let missing = seen.iter().position(|s| !s).unwrap();
                return Err(Error::Disconnected(missing));
            }
        }
        // pin vertex distances to exact symmetry (accumulation order
        // differs between the two traversal directions)
        for a in 0..n {
            for b in a + 1..n {
                let d = vdist[a * n + b].min(vdist[b * n + a]);
                vdist[a * n + b] = d;
                vdist[b * n + a] = d;
            }
        }

        let canonical = (0..n)
            .map(|v| {
                let &(_, eid) = adjacency[v]
                    .iter()
                    .min_by_key(|&&(_, eid)| eid)
                    .expect("connected tree: every vertex has an incident edge");
                (eid, edges[eid].start == v)
            })
            .collect();

        Ok(Self {
            vertex_count,
            edges,
            vdist,
            next,
            canonical,
        })
    }

    /// Tripod: three legs of the given length glued at a hub (vertex 0,
    /// tips 1..3).
    pub fn tripod(leg_length: f64) -> Self {
        Self::star(3, leg_length)
    }

    /// Star: `legs` legs of the given length glued at a hub (vertex 0).
    pub fn star(legs: usize, leg_length: f64) -> Self {
        assert!(legs >= 1, "star needs at least one leg");
        let edges: Vec<(usize, usize, f64)> = (0..legs).map(|k| (0, k + 1, leg_length)).collect();
        Self::new(legs + 1, &edges).expect("star edge list is a valid tree")
    }

    /// A random tree with exactly `leaves` leaves: chains of `1..=max_chain`
    /// edges with lengths in `[0.5, 2)` glued at a hub.
    pub fn random_with_leaves<R: Rng>(leaves: usize, max_chain: usize, rng: &mut R) -> Self {
        assert!(leaves >= 2 && max_chain >= 1);
        let mut edges = Vec::new();
        let mut next_vertex = 1usize;
        for _ in 0..leaves {
            let chain = rng.random_range(1..=max_chain);
            let mut prev = 0usize;
            for _ in 0..chain {
                edges.push((prev, next_vertex, rng.random_range(0.5..2.0)));
                prev = next_vertex;
                next_vertex += 1;
            }
        }
        Self::new(next_vertex, &edges).expect("glued chains form a tree")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &TreeEdge {
        &self.edges[id]
    }

    pub fn edge_length(&self, id: usize) -> f64 {
        self.edges[id].length
    }

    pub fn vertex_dist(&self, a: usize, b: usize) -> f64 {
        self.vdist[a * self.vertex_count + b]
    }

    pub(crate) fn validate(&self, edge: usize, offset: f64) -> Result<()> {
        if edge >= self.edges.len() {
            return Err(Error::SpaceMismatch(format!(
                "edge id {edge} out of range (tree has {} edges)",
                self.edges.len()
            )));
        }
        let len = self.edges[edge].length;
        if !offset.is_finite() || offset < 0.0 || offset > len {
            return Err(Error::SpaceMismatch(format!(
                "offset {offset} outside [0, {len}] on edge {edge}"
            )));
        }
        Ok(())
    }

    /// The canonical point representation of a tree vertex.
    pub fn vertex_point(&self, v: usize) -> NpcPoint {
        let (edge, at_start) = self.canonical[v];
        let offset = if at_start {
            0.0
        } else {
            self.edges[edge].length
        };
        NpcPoint::Tree { edge, offset }
    }

    /// A point at the given offset from the edge's start, canonicalized if
    /// it sits exactly on a vertex.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> Result<NpcPoint> {
        self.validate(edge, offset)?;
        Ok(self.canonicalize(edge, offset))
    }

    fn canonicalize(&self, edge: usize, offset: f64) -> NpcPoint {
        if offset == 0.0 {
            self.vertex_point(self.edges[edge].start)
        } else if offset == self.edges[edge].length {
            self.vertex_point(self.edges[edge].end)
        } else {
            NpcPoint::Tree { edge, offset }
        }
    }

    fn coords(p: &NpcPoint) -> (usize, f64) {
        match p {
            NpcPoint::Tree { edge, offset } => (*edge, *offset),
            _ => panic!("tree operation on non-tree point"),
        }
    }

    /// Distance from a vertex to an arbitrary point.
    pub fn vertex_point_dist(&self, v: usize, p: &NpcPoint) -> f64 {
        let (e, s) = Self::coords(p);
        let edge = &self.edges[e];
        let via_start = self.vertex_dist(v, edge.start) + s;
        let via_end = self.vertex_dist(v, edge.end) + (edge.length - s);
        via_start.min(via_end)
    }

    /// Length of the unique path between two points.
    pub(crate) fn point_dist(&self, p: &NpcPoint, q: &NpcPoint) -> f64 {
        let (e1, s1) = Self::coords(p);
        let (e2, s2) = Self::coords(q);
        if e1 == e2 {
            return (s1 - s2).abs();
        }
        self.route(p, q).0
    }

    /// Best exit/entry endpoints and total length for a cross-edge path.
    /// The four endpoint combinations all describe walks from `p` to `q`;
    /// the minimum is the unique geodesic.
    fn route(&self, p: &NpcPoint, q: &NpcPoint) -> (f64, usize, usize, f64, f64) {
        let (e1, s1) = Self::coords(p);
        let (e2, s2) = Self::coords(q);
        let a_side = [
            (self.edges[e1].start, s1),
            (self.edges[e1].end, self.edges[e1].length - s1),
        ];
        let b_side = [
            (self.edges[e2].start, s2),
            (self.edges[e2].end, self.edges[e2].length - s2),
        ];
        let mut best = (f64::INFINITY, 0usize, 0usize, 0.0, 0.0);
        for &(a, da) in &a_side {
            for &(b, db) in &b_side {
                let total = da + self.vertex_dist(a, b) + db;
                if total < best.0 {
                    best = (total, a, b, da, db);
                }
            }
        }
        best
    }

    /// The point a fraction `t` along the geodesic from `p` to `q`.
    pub(crate) fn geodesic_point(&self, p: &NpcPoint, q: &NpcPoint, t: f64) -> NpcPoint {
        let (e1, s1) = Self::coords(p);
        let (e2, s2) = Self::coords(q);
        if e1 == e2 {
            return self.canonicalize(e1, s1 + t * (s2 - s1));
        }
        let (total, a, b, da, db) = self.route(p, q);
        if total == 0.0 {
            return p.clone();
        }
        let mut remaining = t * total;

        // Leg on the starting edge, toward endpoint `a`.
        if remaining <= da {
            let offset = if a == self.edges[e1].start {
                s1 - remaining
            } else {
                s1 + remaining
            };
            return self.canonicalize(e1, offset.clamp(0.0, self.edges[e1].length));
        }
        remaining -= da;

        // Vertex chain from `a` to `b`.
        let n = self.vertex_count;
        let mut v = a;
        while v != b {
            let (w, eid) = self.next[v * n + b];
            let (w, eid) = (w as usize, eid as usize);
            let len = self.edges[eid].length;
            if remaining <= len {
                let offset = if self.edges[eid].start == v {
                    remaining
                } else {
                    len - remaining
                };
                return self.canonicalize(eid, offset.clamp(0.0, len));
            }
            remaining -= len;
            v = w;
        }

        // Final leg on the target edge, from endpoint `b` toward `q`.
        let remaining = remaining.min(db);
        let offset = if b == self.edges[e2].start {
            remaining
        } else {
            self.edges[e2].length - remaining
        };
        self.canonicalize(e2, offset.clamp(0.0, self.edges[e2].length))
    }

    /// Exact weighted barycenter.
    ///
    /// Restricted to any single edge, `x -> sum_i w_i d^2(x, p_i)` is one
    /// quadratic in the arc-length coordinate (each `d(x, p_i)` is either
    /// `|s - s_i|` for on-edge points or `s + const` / `(L - s) + const`
    /// for points hanging off one of the endpoints, and squaring removes
    /// the kink). Minimizing the quadratic per edge and taking the best
    /// edge finds the global minimizer of this convex function exactly.
    pub(crate) fn barycenter(&self, points: &[NpcPoint], weights: &[f64]) -> NpcPoint {
        let total_weight: f64 = weights.iter().sum();
        let mut best_value = f64::INFINITY;
        let mut best_point = points[0].clone();
        for (eid, edge) in self.edges.iter().enumerate() {
            let mut linear = 0.0; // B in F(s) = A s^2 + B s + const
            for (p, &w) in points.iter().zip(weights) {
                let (pe, ps) = Self::coords(p);
                if pe == eid {
                    linear += -2.0 * w * ps;
                } else {
                    let d_start = self.vertex_point_dist(edge.start, p);
                    let d_end = self.vertex_point_dist(edge.end, p);
                    if d_start <= d_end {
                        linear += 2.0 * w * d_start;
                    } else {
                        linear += -2.0 * w * (edge.length + d_end);
                    }
                }
            }
            let s = (-linear / (2.0 * total_weight)).clamp(0.0, edge.length);
            let candidate = self.canonicalize(eid, s);
            let value: f64 = points
                .iter()
                .zip(weights)
                .map(|(p, &w)| {
                    let d = self.point_dist(&candidate, p);
                    w * d * d
                })
                .sum();
            if value < best_value {
                best_value = value;
                best_point = candidate;
            }
        }
        best_point
    }
}
