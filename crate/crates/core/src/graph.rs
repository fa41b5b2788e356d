//! The discretized source space: a finite weighted graph carrying a vertex
//! measure `mu`, the exact shortest-path metric and a fixed ball radius
//! `eps`.
//!
//! Balls are open (`d < eps`) and contain their center; the center's
//! self-term contributes nothing to energies since the integrand
//! `d^2(u(x), u(y))` vanishes at `y = x`. Construction validates that every
//! punctured ball `B(x, eps) \ {x}` is nonempty, otherwise the energy
//! density would be identically zero at that vertex no matter the map.
//!
//! Shortest paths are computed exactly (graphs here are desk-scale); the
//! distance matrix is cached, as are the `eps`-balls and their measures.

use crate::analysis::DirichletForm;
use crate::error::{Error, Result};

pub mod gen;
pub mod io;

/// Finite weighted metric measure graph. Immutable after construction;
/// all queries are thread-safe.
#[derive(Debug, Clone)]
pub struct MetricMeasureGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    measure: Vec<f64>,
    eps: f64,
    dist: Vec<f64>,
    balls: Vec<Vec<usize>>,
    ball_measure: Vec<f64>,
}

impl MetricMeasureGraph {
    /// Builds the graph, computes all-pairs shortest paths and validates
    /// connectivity, positive measures and nonempty punctured `eps`-balls.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize, f64)>,
        measure: Vec<f64>,
        eps: f64,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidArgument("graph needs vertices".into()));
        }
        if measure.len() != vertex_count {
            return Err(Error::InvalidArgument(format!(
                "measure has {} entries for {} vertices",
                measure.len(),
                vertex_count
            )));
        }
        if measure.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidArgument(
                "vertex measure must be positive and finite".into(),
            ));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius eps must be positive, got {eps}"
            )));
        }
        for (i, &(u, v, len)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count || u == v {
                return Err(Error::InvalidArgument(format!(
                    "edge {i}: bad endpoints ({u}, {v})"
                )));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "edge {i}: length must be positive, got {len}"
                )));
            }
        }

        let dist = all_pairs_shortest_paths(vertex_count, &edges);
        if let Some(unreachable) = (0..vertex_count).find(|&v| dist[v].is_infinite()) {
            return Err(Error::Disconnected(unreachable));
        }

        // Punctured-ball validation: eps must exceed every vertex's
        // nearest-neighbor distance.
        if vertex_count == 1 {
            return Err(Error::EmptyPuncturedBall {
                vertex: 0,
                eps,
                min_eps: f64::INFINITY,
            });
        }
        let mut worst = (0usize, 0.0f64);
        for x in 0..vertex_count {
            let nearest = (0..vertex_count)
                .filter(|&y| y != x)
                .map(|y| dist[x * vertex_count + y])
                .fold(f64::INFINITY, f64::min);
            if nearest > worst.1 {
                worst = (x, nearest);
            }
        }
        if worst.1 >= eps {
            return Err(Error::EmptyPuncturedBall {
                vertex: worst.0,
                eps,
                min_eps: worst.1,
            });
        }

        let mut balls = Vec::with_capacity(vertex_count);
        let mut ball_measure = Vec::with_capacity(vertex_count);
        for x in 0..vertex_count {
            let ball: Vec<usize> = (0..vertex_count)
                .filter(|&y| dist[x * vertex_count + y] < eps)
                .collect();
            ball_measure.push(ball.iter().map(|&y| measure[y]).sum());
            balls.push(ball);
        }

        Ok(Self {
            vertex_count,
            edges,
            measure,
            eps,
            dist,
            balls,
            ball_measure,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.vertex_count + y]
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// The open ball `{y : d(x, y) < r}`; contains `x` for every `r > 0`.
    pub fn ball(&self, x: usize, r: f64) -> Vec<usize> {
        (0..self.vertex_count)
            .filter(|&y| self.dist(x, y) < r)
            .collect()
    }

    /// The cached `eps`-ball of `x`.
    pub fn eps_ball(&self, x: usize) -> &[usize] {
        &self.balls[x]
    }

    /// `mu(B(x, eps))`.
    pub fn eps_ball_measure(&self, x: usize) -> f64 {
        self.ball_measure[x]
    }

    /// Sorted distinct realized pairwise distances in `(0, cap]`, with the
    /// midpoints of consecutive values interleaved. Ball contents only
    /// change at realized distances, so this finite grid captures every
    /// distinct ball.
    pub fn realized_radii(&self, cap: f64) -> Vec<f64> {
        let mut ds: Vec<f64> = self
            .dist
            .iter()
            .copied()
            .filter(|d| *d > 0.0 && *d <= cap)
            .collect();
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ds.dedup();
        let mut grid = Vec::with_capacity(2 * ds.len());
        for (i, &d) in ds.iter().enumerate() {
            grid.push(d);
            if let Some(&next) = ds.get(i + 1) {
                grid.push(0.5 * (d + next));
            }
        }
        grid
    }

    /// Empirical doubling constant: the largest `mu(B(x,2r)) / mu(B(x,r))`
    /// over all vertices and radii in the realized grid up to `r_max`.
    pub fn doubling_constant(&self, r_max: f64) -> f64 {
        assert!(r_max > 0.0, "r_max must be positive");
        let mut worst: f64 = 1.0;
        for r in self.realized_radii(r_max) {
            for x in 0..self.vertex_count {
                let inner: f64 = self.ball(x, r).iter().map(|&y| self.measure[y]).sum();
                let outer: f64 = self.ball(x, 2.0 * r).iter().map(|&y| self.measure[y]).sum();
                worst = worst.max(outer / inner);
            }
        }
        worst
    }
}

/// Dijkstra from every vertex; exact for positive lengths.
fn all_pairs_shortest_paths(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, len) in edges {
        adjacency[u].push((v, len));
        adjacency[v].push((u, len));
    }
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap: BinaryHeap<(Reverse<ordered::OrderedF64>, usize)> = BinaryHeap::new();
    for source in 0..n {
        let row = &mut dist[source * n..(source + 1) * n];
        row[source] = 0.0;
        heap.clear();
        heap.push((Reverse(ordered::OrderedF64(0.0)), source));
        while let Some((Reverse(ordered::OrderedF64(d)), v)) = heap.pop() {
            if d > row[v] {
                continue;
            }
            for &(w, len) in &adjacency[v] {
                let cand = d + len;
                if cand < row[w] {
                    row[w] = cand;
                    heap.push((Reverse(ordered::OrderedF64(cand)), w));
                }
            }
        }
    }
    // path sums accumulate in opposite edge orders from the two endpoints,
    // which can drift an ulp apart; pin the matrix to exact symmetry
    for x in 0..n {
        for y in x + 1..n {
            let d = dist[x * n + y].min(dist[y * n + x]);
            dist[x * n + y] = d;
            dist[y * n + x] = d;
        }
    }
    dist
}

mod ordered {
    /// Total order on finite nonnegative distances for the Dijkstra heap.
    #[derive(PartialEq)]
    pub struct OrderedF64(pub f64);
    impl Eq for OrderedF64 {}
    impl PartialOrd for OrderedF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for OrderedF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0
                .partial_cmp(&other.0)
                .expect("distances are never NaN")
        }
    }
}

/// Interior/boundary split of the vertex set. The interior is the domain on
/// which maps are free; everything else carries prescribed values.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    interior: Vec<bool>,
}

impl DomainSpec {
    /// Domain given by its interior vertex set (must be nonempty).
    pub fn from_interior(vertex_count: usize, interior: &[usize]) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::InvalidArgument("interior must be nonempty".into()));
        }
        let mut mask = vec![false; vertex_count];
        for &v in interior {
            if v >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "interior vertex {v} out of range"
                )));
            }
            mask[v] = true;
        }
        Ok(Self { interior: mask })
    }

    /// Domain given by its boundary vertex set; the interior is the
    /// complement (must be nonempty).
    pub fn from_boundary(vertex_count: usize, boundary: &[usize]) -> Result<Self> {
        let mut mask = vec![true; vertex_count];
        for &v in boundary {
            if v >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "boundary vertex {v} out of range"
                )));
            }
            mask[v] = false;
        }
        if mask.iter().all(|&b| !b) {
            return Err(Error::InvalidArgument("interior must be nonempty".into()));
        }
        Ok(Self { interior: mask })
    }

    /// Every vertex interior; used by the unconstrained flow.
    pub fn all_interior(vertex_count: usize) -> Self {
        Self {
            interior: vec![true; vertex_count],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.interior.len()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.interior.len())
            .filter(|&v| self.interior[v])
            .collect()
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.interior.len())
            .filter(|&v| !self.interior[v])
            .collect()
    }

    pub fn has_boundary(&self) -> bool {
        self.interior.iter().any(|&b| !b)
    }
}

/// Empirical constant of the domain inequality
/// `sum_{x in omega} |v(x)| mu(x) <= C sqrt(E0(v, v))`
/// over a deterministic probe family of functions vanishing off the
/// interior (hat functions plus the distance-to-boundary profile).
///
/// The reported value is a diagnostic, not a certificate: it is the largest
/// ratio realized by the probes, hence a lower bound for the optimal
/// constant, monotone nondecreasing as the probe family grows with the
/// domain.
pub fn poincare_constant(
    graph: &MetricMeasureGraph,
    domain: &DomainSpec,
    form: &DirichletForm,
) -> f64 {
    let interior = domain.interior_vertices();
    let boundary = domain.boundary_vertices();
    assert!(!boundary.is_empty(), "Poincare probe needs a boundary");
    let n = graph.vertex_count();

    let mut probes: Vec<Vec<f64>> = Vec::with_capacity(interior.len() + 1);
    for &x in &interior {
        let mut hat = vec![0.0; n];
        hat[x] = 1.0;
        probes.push(hat);
    }
    let dist_to_boundary: Vec<f64> = (0..n)
        .map(|x| {
            if domain.is_interior(x) {
                boundary
                    .iter()
                    .map(|&b| graph.dist(x, b))
                    .fold(f64::INFINITY, f64::min)
            } else {
                0.0
            }
        })
        .collect();
    probes.push(dist_to_boundary);

    let mut best: f64 = 0.0;
    for v in &probes {
        let numerator: f64 = interior
            .iter()
            .map(|&x| v[x].abs() * graph.measure(x))
            .sum();
        let energy = form.form_value(v, v);
        if energy > 0.0 && numerator > 0.0 {
            best = best.max(numerator / energy.sqrt());
        }
    }
    best
}
