//! Builtin graph generators: paths, grids, stars and random connected
//! graphs. Generators return the raw edge list plus layout metadata
//! (positions, a natural boundary set) that boundary-data builders and the
//! CLI use.

use rand::Rng;

/// Output of a generator: everything needed to construct a
/// [`MetricMeasureGraph`](super::MetricMeasureGraph) plus layout hints.
#[derive(Debug, Clone)]
pub struct GraphBuild {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
    /// 2D layout positions (grid coordinates for grids, the axis for paths).
    pub positions: Vec<(f64, f64)>,
    /// The natural boundary: path endpoints, the outer ring of a grid, the
    /// tips of a star.
    pub boundary_hint: Vec<usize>,
}

/// Path with `n >= 2` vertices `0 ..= n-1` and unit edges.
pub fn path_graph(n: usize) -> GraphBuild {
    assert!(n >= 2, "path needs at least two vertices");
    GraphBuild {
        vertex_count: n,
        edges: (0..n - 1).map(|i| (i, i + 1, 1.0)).collect(),
        positions: (0..n).map(|i| (i as f64, 0.0)).collect(),
        boundary_hint: vec![0, n - 1],
    }
}

/// `rows x cols` grid with unit spacing; vertex `(r, c)` has index
/// `r * cols + c`. The boundary hint is the outer ring.
pub fn grid_graph(rows: usize, cols: usize) -> GraphBuild {
    assert!(rows >= 2 && cols >= 2, "grid needs at least 2x2 vertices");
    let index = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((index(r, c), index(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((index(r, c), index(r + 1, c), 1.0));
            }
        }
    }
    let positions = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (c as f64, r as f64)))
        .collect();
    let boundary_hint = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .filter(|&(r, c)| r == 0 || c == 0 || r == rows - 1 || c == cols - 1)
        .map(|(r, c)| index(r, c))
        .collect();
    GraphBuild {
        vertex_count: rows * cols,
        edges,
        positions,
        boundary_hint,
    }
}

/// Star with `legs` legs of `arms` unit edges each, glued at hub 0. Leg `k`
/// occupies vertices `1 + k*arms ..= (k+1)*arms`, tip last. The boundary
/// hint is the set of tips.
pub fn star_graph(legs: usize, arms: usize) -> GraphBuild {
    assert!(legs >= 2 && arms >= 1, "star needs >= 2 legs of >= 1 edge");
    let mut edges = Vec::new();
    let mut positions = vec![(0.0, 0.0)];
    let mut tips = Vec::new();
    let mut next = 1usize;
    for k in 0..legs {
        let angle = std::f64::consts::TAU * k as f64 / legs as f64;
        let mut prev = 0usize;
        for step in 1..=arms {
            edges.push((prev, next, 1.0));
            positions.push((step as f64 * angle.cos(), step as f64 * angle.sin()));
            prev = next;
            next += 1;
        }
        tips.push(prev);
    }
    GraphBuild {
        vertex_count: next,
        edges,
        positions,
        boundary_hint: tips,
    }
}

/// Random connected graph: a random spanning tree plus `extra` random
/// chords, edge lengths in `[0.5, 1.5)`. The boundary hint is a random
/// subset of 2..=4 vertices.
pub fn random_connected_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> GraphBuild {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v, rng.random_range(0.5..1.5)));
    }
    let mut added = 0usize;
    let mut attempts = 0usize;
    while added < extra && attempts < 20 * extra.max(1) {
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v
            && !edges
                .iter()
                .any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u))
        {
            edges.push((u, v, rng.random_range(0.5..1.5)));
            added += 1;
        }
    }
    let boundary_count = rng.random_range(2..=4.min(n));
    let mut boundary_hint = Vec::new();
    while boundary_hint.len() < boundary_count {
        let v = rng.random_range(0..n);
        if !boundary_hint.contains(&v) {
            boundary_hint.push(v);
        }
    }
    boundary_hint.sort_unstable();
    GraphBuild {
        vertex_count: n,
        edges,
        positions: (0..n).map(|v| (v as f64, 0.0)).collect(),
        boundary_hint,
    }
}

/// An `eps` with nonempty punctured balls for this edge list: a fixed
/// multiple of the largest nearest-neighbor distance.
pub fn admissible_eps(vertex_count: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let dist = super::all_pairs_shortest_paths(vertex_count, edges);
    let worst = (0..vertex_count)
        .map(|x| {
            (0..vertex_count)
                .filter(|&y| y != x)
                .map(|y| dist[x * vertex_count + y])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    1.25 * worst
}
