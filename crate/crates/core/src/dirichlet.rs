//! Nonlinear relaxation solver for the Dirichlet problem: minimize the map
//! energy over all maps with prescribed values off the interior.
//!
//! The energy as a function of a single vertex value `u(x)` (all others
//! fixed) is `sum_y c(x,y) d^2(u(x), u(y))` over the symmetrized neighbor
//! weights, so the exact local minimizer is the weighted barycenter of the
//! neighbor values. Sweeping interior vertices in ascending index order and
//! replacing each value by that barycenter never increases the energy;
//! since the target is NPC the energy is convex along geodesics and the
//! sweep converges to the unique minimizer.
//!
//! For Euclidean targets the minimizer solves a weighted graph-Laplacian
//! linear system; [`scalar_laplacian_oracle`] solves that system by exact
//! elimination and serves as an independent cross-check.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::DirichletForm;
use crate::energy::{ks_energy, Mapping};
use crate::error::{Error, Result};
use crate::graph::{DomainSpec, MetricMeasureGraph};
use crate::npc::{NpcPoint, NpcSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Updates see the current sweep's earlier updates. Deterministic and
    /// monotone in energy; the default.
    GaussSeidel,
    /// Updates computed from the previous sweep's snapshot. The per-vertex
    /// work is independent (parallelizable with a fixed reduction order)
    /// but the mode is excluded from the monotonicity and
    /// bit-reproducibility guarantees.
    Jacobi,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop once the largest single-vertex movement of a sweep drops below
    /// this (target-distance units).
    pub tol: f64,
    pub max_sweeps: usize,
    pub mode: SweepMode,
    /// Tolerance handed to the per-vertex barycenter solver.
    pub bary_tol: f64,
    pub bary_max_iter: usize,
    /// Record the energy after every sweep (cheap; disable for very large
    /// runs).
    pub record_energy: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_sweeps: 200_000,
            mode: SweepMode::GaussSeidel,
            bary_tol: 1e-12,
            bary_max_iter: 10_000,
            record_energy: true,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub energy: f64,
    pub sweeps: usize,
    /// Largest single-vertex movement of the final sweep.
    pub residual: f64,
    /// Energy after each sweep, starting with the initial map.
    pub energy_per_sweep: Vec<f64>,
    /// Largest distance from a final interior value to the barycenter of
    /// its neighbors: the first-order optimality check.
    pub optimality_residual: f64,
    pub converged: bool,
}

/// Minimizes the energy over maps agreeing with `init` off the interior,
/// starting from `init`. Returns the solution and a report. The returned
/// energy never exceeds the initial energy.
pub fn solve_dirichlet(init: &Mapping, options: &SolveOptions) -> Result<(Mapping, SolveReport)> {
    if !init.domain().has_boundary() {
        return Err(Error::Degenerate(
            "the Dirichlet problem needs a nonempty boundary".into(),
        ));
    }
    let form = DirichletForm::new(init.graph());
    relax(init, &form, None, options)
}

/// Convenience entry: boundary data plus the deterministic
/// boundary-barycenter initial guess.
pub fn solve_dirichlet_from_boundary(
    graph: &Arc<MetricMeasureGraph>,
    target: &Arc<NpcSpace>,
    domain: &DomainSpec,
    boundary: &[(usize, NpcPoint)],
    options: &SolveOptions,
) -> Result<(Mapping, SolveReport)> {
    let init =
        Mapping::from_boundary_barycenter(graph.clone(), target.clone(), domain.clone(), boundary)?;
    solve_dirichlet(&init, options)
}

/// Shared relaxation loop. With `anchor = Some((u_t, weight))` each vertex
/// update also pulls toward `u_t(x)` with weight `weight * mu(x)`, which is
/// the proximal objective used by the flow; `anchor = None` is the plain
/// Dirichlet energy. With an anchor, an empty boundary (all-interior
/// domain) is allowed.
pub(crate) fn relax(
    init: &Mapping,
    form: &DirichletForm,
    anchor: Option<(&Mapping, f64)>,
    options: &SolveOptions,
) -> Result<(Mapping, SolveReport)> {
    let target = init.target().clone();
    let interior = init.domain().interior_vertices();
    let mut u = init.clone();
    let mut energy_per_sweep = Vec::new();
    if options.record_energy {
        energy_per_sweep.push(ks_energy(&u, None)?);
    }

    let mut residual = f64::INFINITY;
    let mut sweeps = 0usize;
    let mut converged = false;
    let mut points: Vec<NpcPoint> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    while sweeps < options.max_sweeps {
        sweeps += 1;
        let snapshot: Option<Vec<NpcPoint>> = match options.mode {
            SweepMode::GaussSeidel => None,
            SweepMode::Jacobi => Some(u.values().to_vec()),
        };
        residual = 0.0;
        for &x in &interior {
            points.clear();
            weights.clear();
            for &(y, c) in form.neighbors(x) {
                points.push(match &snapshot {
                    Some(s) => s[y].clone(),
                    None => u.value(y).clone(),
                });
                weights.push(c);
            }
            if let Some((u_t, rate)) = anchor {
                points.push(u_t.value(x).clone());
                weights.push(rate * init.graph().measure(x));
            }
            let updated = target.barycenter_unchecked(
                &points,
                &weights,
                options.bary_tol,
                options.bary_max_iter,
            )?;
            residual = residual.max(target.dist_unchecked(u.value(x), &updated));
            u.set_value_unchecked(x, updated);
        }
        if options.record_energy {
            energy_per_sweep.push(ks_energy(&u, None)?);
        }
        if residual < options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SolverDiverged { sweeps, residual });
    }

    // first-order optimality: distance from each interior value to the
    // barycenter of its (now frozen) neighborhood
    let mut optimality_residual: f64 = 0.0;
    for &x in &interior {
        points.clear();
        weights.clear();
        for &(y, c) in form.neighbors(x) {
            points.push(u.value(y).clone());
            weights.push(c);
        }
        if let Some((u_t, rate)) = anchor {
            points.push(u_t.value(x).clone());
            weights.push(rate * init.graph().measure(x));
        }
        let best = target.barycenter_unchecked(
            &points,
            &weights,
            options.bary_tol,
            options.bary_max_iter,
        )?;
        optimality_residual = optimality_residual.max(target.dist_unchecked(u.value(x), &best));
    }

    let energy = ks_energy(&u, None)?;
    if !options.record_energy {
        energy_per_sweep.push(energy);
    }
    let report = SolveReport {
        energy,
        sweeps,
        residual,
        energy_per_sweep,
        optimality_residual,
        converged,
    };
    Ok((u, report))
}

/// Exact solve of the scalar Dirichlet system
/// `sum_y c(x,y) (u(x) - u(y)) = 0` for interior `x` with the given values
/// off the interior; direct elimination, no iteration. The independent
/// oracle for Euclidean solves.
pub fn scalar_laplacian_oracle(
    graph: &Arc<MetricMeasureGraph>,
    domain: &DomainSpec,
    boundary: &[(usize, f64)],
) -> Result<Vec<f64>> {
    if !domain.has_boundary() {
        return Err(Error::Degenerate(
            "the Dirichlet problem needs a nonempty boundary".into(),
        ));
    }
    let n = graph.vertex_count();
    let mut values = vec![f64::NAN; n];
    for &(v, value) in boundary {
        if domain.is_interior(v) {
            return Err(Error::InvalidArgument(format!(
                "boundary datum at interior vertex {v}"
            )));
        }
        values[v] = value;
    }
    for v in domain.boundary_vertices() {
        if values[v].is_nan() {
            return Err(Error::InvalidArgument(format!(
                "missing boundary datum at vertex {v}"
            )));
        }
    }

    let form = DirichletForm::new(graph);
    let interior = domain.interior_vertices();
    let index: std::collections::HashMap<usize, usize> =
        interior.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = interior.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &x) in interior.iter().enumerate() {
        a[(i, i)] = form.weight_sum(x);
        for &(y, c) in form.neighbors(x) {
            match index.get(&y) {
                Some(&j) => a[(i, j)] -= c,
                None => rhs[i] += c * values[y],
            }
        }
    }
    let solution = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular Dirichlet system".into()))?;
    for (i, &x) in interior.iter().enumerate() {
        values[x] = solution[i];
    }
    Ok(values)
}

/// Componentwise oracle for maps into Euclidean space.
pub fn euclidean_dirichlet_oracle(
    graph: &Arc<MetricMeasureGraph>,
    domain: &DomainSpec,
    boundary: &[(usize, NpcPoint)],
) -> Result<Vec<NpcPoint>> {
    let dim = match boundary.first() {
        Some((_, NpcPoint::Euclidean(c))) => c.len(),
        _ => {
            return Err(Error::InvalidArgument(
                "euclidean oracle needs euclidean boundary data".into(),
            ))
        }
    };
    let n = graph.vertex_count();
    let mut coords: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for k in 0..dim {
        let scalar_boundary: Vec<(usize, f64)> = boundary
            .iter()
            .map(|(v, p)| match p {
                NpcPoint::Euclidean(c) if c.len() == dim => Ok((*v, c[k])),
                _ => Err(Error::InvalidArgument(
                    "inconsistent euclidean boundary data".into(),
                )),
            })
            .collect::<Result<_>>()?;
        coords.push(scalar_laplacian_oracle(graph, domain, &scalar_boundary)?);
    }
    Ok((0..n)
        .map(|v| NpcPoint::Euclidean((0..dim).map(|k| coords[k][v]).collect()))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    /// Largest sup-distance between any two restart solutions.
    pub max_pairwise_sup: f64,
    pub energies: Vec<f64>,
    pub restarts: usize,
}

/// Solves the same problem from `n_restarts` random admissible initial
/// maps (interior values drawn as geodesic combinations of boundary
/// values) and reports the largest pairwise sup-distance between the
/// solutions. Uniqueness of the minimizer makes this collapse to solver
/// tolerance.
pub fn uniqueness_check(
    graph: &Arc<MetricMeasureGraph>,
    target: &Arc<NpcSpace>,
    domain: &DomainSpec,
    boundary: &[(usize, NpcPoint)],
    n_restarts: usize,
    options: &SolveOptions,
    seed: u64,
) -> Result<UniquenessReport> {
    if n_restarts < 2 {
        return Err(Error::InvalidArgument(
            "uniqueness check needs at least two restarts".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary_points: Vec<&NpcPoint> = boundary.iter().map(|(_, p)| p).collect();
    let mut solutions: Vec<Mapping> = Vec::with_capacity(n_restarts);
    let mut energies = Vec::with_capacity(n_restarts);
    for _ in 0..n_restarts {
        let init = Mapping::from_boundary_and_interior(
            graph.clone(),
            target.clone(),
            domain.clone(),
            boundary,
            |_| {
                let i = rng.random_range(0..boundary_points.len());
                let j = rng.random_range(0..boundary_points.len());
                let t: f64 = rng.random_range(0.0..=1.0);
                target.geodesic_point_unchecked(boundary_points[i], boundary_points[j], t)
            },
        )?;
        let (solution, report) = solve_dirichlet(&init, options)?;
        energies.push(report.energy);
        solutions.push(solution);
    }
    let mut max_pairwise_sup: f64 = 0.0;
    for i in 0..solutions.len() {
        for j in i + 1..solutions.len() {
            max_pairwise_sup = max_pairwise_sup.max(solutions[i].sup_distance(&solutions[j])?);
        }
    }
    Ok(UniquenessReport {
        max_pairwise_sup,
        energies,
        restarts: n_restarts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    /// `(radius, diameter of the image of B(x0, radius))` in the order the
    /// radii were given.
    pub entries: Vec<(f64, f64)>,
    /// Least-squares slope of `log diam` against `log r` over the entries
    /// with positive diameter; the empirical decay exponent.
    pub alpha: Option<f64>,
}

/// Exact image diameters of vertex balls around `x0`, plus the fitted decay
/// exponent.
pub fn oscillation_decay(u: &Mapping, x0: usize, radii: &[f64]) -> OscillationReport {
    let graph = u.graph();
    let entries: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| (r, u.image_diameter(&graph.ball(x0, r))))
        .collect();
    let logs: Vec<(f64, f64)> = entries
        .iter()
        .filter(|&&(_, d)| d > 0.0)
        .map(|&(r, d)| (r.ln(), d.ln()))
        .collect();
    let alpha = if logs.len() >= 2 {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
        let my = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
        let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
        let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            Some(sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    OscillationReport { entries, alpha }
}

#[cfg(test)]
mod tests;
