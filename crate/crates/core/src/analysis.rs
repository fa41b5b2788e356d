//! The discrete Dirichlet-form layer.
//!
//! Symmetrizing the energy's pair weights gives a symmetric bilinear form on
//! scalar vertex functions,
//!
//! ```text
//! E0(u, v) = 1/2 sum_{x,y} c(x,y) (u(x) - u(y)) (v(x) - v(y)),
//! c(x,y)   = a(x,y) + a(y,x),
//! a(x,y)   = mu(x) mu(y) / (mu(B(x,eps)) eps^2)   for y in B(x,eps), y != x,
//! ```
//!
//! normalized so that `E0(u, u)` equals the map energy of `u` seen as a map
//! into the real line. The energy measure splits each pair term evenly
//! between its endpoints,
//!
//! ```text
//! Gamma(u, v)(x) = 1/2 sum_y c(x,y) (u(x) - u(y)) (v(x) - v(y)),
//! ```
//!
//! which is the unique symmetric split satisfying the polarization identity
//! `sum_x phi Gamma(u,v) = [E0(u, phi v) + E0(v, phi u) - E0(uv, phi)] / 2`
//! exactly.
//!
//! On a finite graph every nonnegative test function supported in the
//! interior is a nonnegative combination of hat functions, so the
//! weak-subharmonicity test quantifies over hats only and is complete.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

use crate::energy::{energy_density, Mapping};
use crate::error::{Error, Result};
use crate::graph::{DomainSpec, MetricMeasureGraph};
use crate::npc::NpcPoint;

/// Symmetrized pair weights of the graph energy. Immutable; thread-safe.
#[derive(Debug, Clone)]
pub struct DirichletForm {
    graph: Arc<MetricMeasureGraph>,
    /// Per-vertex neighbor list with positive symmetric weights `c(x,y)`;
    /// both directions stored.
    neighbors: Vec<Vec<(usize, f64)>>,
    weight_sum: Vec<f64>,
}

impl DirichletForm {
    pub fn new(graph: &Arc<MetricMeasureGraph>) -> Self {
        let n = graph.vertex_count();
        let eps2 = graph.eps() * graph.eps();
        let a = |x: usize, y: usize| -> f64 {
            graph.measure(x) * graph.measure(y) / (graph.eps_ball_measure(x) * eps2)
        };
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for x in 0..n {
            // ball membership is symmetric (d is a metric), so c(x,y) pairs
            // exactly the punctured eps-ball of x
            for &y in graph.eps_ball(x) {
                if y <= x {
                    continue;
                }
                let c = a(x, y) + a(y, x);
                neighbors[x].push((y, c));
                neighbors[y].push((x, c));
            }
        }
        for list in &mut neighbors {
            list.sort_unstable_by_key(|&(y, _)| y);
        }
        let weight_sum = neighbors
            .iter()
            .map(|list| list.iter().map(|&(_, c)| c).sum())
            .collect();
        Self {
            graph: graph.clone(),
            neighbors,
            weight_sum,
        }
    }

    pub fn graph(&self) -> &Arc<MetricMeasureGraph> {
        &self.graph
    }

    /// Neighbors of `x` with their symmetric weights.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.neighbors[x]
    }

    /// `sum_y c(x, y)`.
    pub fn weight_sum(&self, x: usize) -> f64 {
        self.weight_sum[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.neighbors[x]
            .iter()
            .find(|&&(z, _)| z == y)
            .map_or(0.0, |&(_, c)| c)
    }

    /// `E0(u, v)`; bilinear, symmetric, positive semidefinite.
    pub fn form_value(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut total = 0.0;
        for x in 0..self.neighbors.len() {
            for &(y, c) in &self.neighbors[x] {
                total += 0.5 * c * (u[x] - u[y]) * (v[x] - v[y]);
            }
        }
        total
    }

    /// The energy measure `Gamma(u, v)` as a per-vertex vector;
    /// `sum_x Gamma(u,v)(x) = E0(u,v)` and `Gamma(u,u) >= 0` pointwise.
    pub fn energy_measure(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        (0..self.neighbors.len())
            .map(|x| {
                self.neighbors[x]
                    .iter()
                    .map(|&(y, c)| 0.5 * c * (u[x] - u[y]) * (v[x] - v[y]))
                    .sum()
            })
            .collect()
    }

    /// The weighted graph Laplacian `sum_y c(x,y)(v(y) - v(x))`, which is
    /// `-E0(hat_x, v)`.
    pub fn laplacian(&self, v: &[f64], x: usize) -> f64 {
        self.neighbors[x]
            .iter()
            .map(|&(y, c)| c * (v[y] - v[x]))
            .sum()
    }

    /// Weak-subharmonicity check for a scalar function on the interior:
    /// the defect at `x` is `-E0(hat_x, v)`; `v` is weakly subharmonic on
    /// the domain iff every interior defect is `>= -tol`.
    pub fn check_weak_subharmonic(
        &self,
        v: &[f64],
        domain: &DomainSpec,
        tol: f64,
    ) -> SubharmonicReport {
        let defects: Vec<(usize, f64)> = domain
            .interior_vertices()
            .into_iter()
            .map(|x| (x, self.laplacian(v, x)))
            .collect();
        let min_defect = defects
            .iter()
            .map(|&(_, d)| d)
            .fold(f64::INFINITY, f64::min);
        let witnesses: Vec<usize> = defects
            .iter()
            .filter(|&&(_, d)| d < -tol)
            .map(|&(x, _)| x)
            .collect();
        SubharmonicReport {
            min_defect,
            subharmonic: witnesses.is_empty(),
            defects,
            witnesses,
            tol,
        }
    }

    /// Pointwise surplus of the strengthened subharmonicity bound for the
    /// squared pullback `f(x) = d^2(u(x), y0)` of a solved map:
    /// `-E0(hat_x, f) - 2 mu(x) e(x)` per interior vertex, where `e` is the
    /// energy density of `u`.
    pub fn strengthened_subharmonicity_gap(
        &self,
        u: &Mapping,
        y0: &NpcPoint,
    ) -> Result<Vec<(usize, f64)>> {
        u.target().validate_point(y0)?;
        let f = crate::energy::distance_pullback(u, y0, 2)?;
        let density = energy_density(u);
        Ok(u.domain()
            .interior_vertices()
            .into_iter()
            .map(|x| {
                let defect = self.laplacian(&f, x);
                (x, defect - 2.0 * self.graph.measure(x) * density[x])
            })
            .collect())
    }

    /// The discrete Green function of the ball pair `(B(x0,R), B(x0,2R))`:
    /// the unique `G` vanishing off `B(x0,2R)` with
    /// `E0(hat_x, G) = mu(x)/mu(B(x0,R))` for `x` in `B(x0,R)` and `0` for
    /// the other vertices of `B(x0,2R)`. Solved by exact elimination.
    pub fn green_function(&self, x0: usize, r: f64) -> Result<GreenReport> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument("green radius must be > 0".into()));
        }
        let graph = &self.graph;
        let inner = graph.ball(x0, r);
        let outer = graph.ball(x0, 2.0 * r);
        if outer.len() == graph.vertex_count() {
            return Err(Error::Degenerate(format!(
                "ball B({x0}, {}) covers the whole graph; the Green problem needs \
                 a nonempty exterior",
                2.0 * r
            )));
        }
        let index: std::collections::HashMap<usize, usize> =
            outer.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = outer.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        let inner_measure: f64 = inner.iter().map(|&v| graph.measure(v)).sum();
        for (i, &x) in outer.iter().enumerate() {
            a[(i, i)] = self.weight_sum(x);
            for &(y, c) in self.neighbors(x) {
                if let Some(&j) = index.get(&y) {
                    a[(i, j)] -= c;
                }
            }
            if graph.dist(x0, x) < r {
                rhs[i] = graph.measure(x) / inner_measure;
            }
        }
        let solution = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Degenerate("singular Green system".into()))?;
        let mut g = vec![0.0; graph.vertex_count()];
        for (i, &x) in outer.iter().enumerate() {
            g[x] = solution[i];
        }

        let scale = inner_measure / (r * r);
        let w: Vec<f64> = g.iter().map(|&v| scale * v).collect();
        let w_min_inner = inner.iter().map(|&v| w[v]).fold(f64::INFINITY, f64::min);
        let w_max_outer = outer.iter().map(|&v| w[v]).fold(0.0f64, f64::max);

        // residual of the defining identity over all hats in the outer ball
        let mut identity_residual = 0.0f64;
        for &x in &outer {
            let lhs = -self.laplacian(&g, x);
            let target = if graph.dist(x0, x) < r {
                graph.measure(x) / inner_measure
            } else {
                0.0
            };
            identity_residual = identity_residual.max((lhs - target).abs());
        }

        Ok(GreenReport {
            x0,
            r,
            g,
            w,
            w_min_inner,
            w_max_outer,
            identity_residual,
            inner_ball: inner,
            outer_ball: outer,
        })
    }

    /// The intrinsic distance `sup { u(x) - u(y) : Gamma(u,u) <= bound }`,
    /// a concave maximization with one convex quadratic constraint per
    /// vertex. Solved by a log-barrier Newton path (the barrier gap
    /// `mu * #constraints` certifies the value to within `tol`), then
    /// polished onto the constraint surface by per-vertex rescaling sweeps
    /// so the returned value is attained by an exactly feasible function.
    ///
    /// `bound` defaults to the vertex measure.
    pub fn intrinsic_distance(
        &self,
        x: usize,
        y: usize,
        bound: Option<&[f64]>,
        tol: f64,
        max_iter: usize,
    ) -> Result<IntrinsicDistanceReport> {
        let n = self.graph.vertex_count();
        let default_bound = self.graph.measures();
        let bound = bound.unwrap_or(default_bound);
        if bound.len() != n || bound.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidArgument(
                "constraint bound must be positive per vertex".into(),
            ));
        }
        if x >= n || y >= n {
            return Err(Error::InvalidArgument("vertex out of range".into()));
        }
        if x == y {
            return Ok(IntrinsicDistanceReport {
                value: 0.0,
                iterations: 0,
                max_constraint_utilization: 0.0,
                active_vertices: Vec::new(),
            });
        }

        let gamma_at = |u: &[f64], z: usize| -> f64 {
            self.neighbors[z]
                .iter()
                .map(|&(w, c)| 0.5 * c * (u[z] - u[w]) * (u[z] - u[w]))
                .sum()
        };

        // The objective and every constraint are translation invariant, so
        // pin u[y] = 0 and optimize the remaining n-1 coordinates.
        let free: Vec<usize> = (0..n).filter(|&z| z != y).collect();
        let col_of: Vec<Option<usize>> = {
            let mut map = vec![None; n];
            for (j, &z) in free.iter().enumerate() {
                map[z] = Some(j);
            }
            map
        };

        let mut u = vec![0.0; n];
        let mut iterations = 0usize;
        // Scale-aware initial barrier weight; annealed until the gap
        // certificate mu * n is below tol.
        let scale: f64 = (0..n)
            .map(|z| (2.0 * bound[z] / self.weight_sum[z].max(1e-300)).sqrt())
            .fold(0.0f64, f64::max);
        let mut mu = scale.max(1.0);
        let target_mu = (0.25 * tol / n as f64).max(f64::MIN_POSITIVE);
        while mu > target_mu {
            mu = (0.2 * mu).max(target_mu);
            // Newton iterations on u -> -(u[x]-u[y]) - mu sum log(slack_z)
            for _ in 0..60 {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::SolverDiverged {
                        sweeps: iterations,
                        residual: mu * n as f64,
                    });
                }
                let m = free.len();
                let mut grad = DVector::<f64>::zeros(m);
                let mut hess = DMatrix::<f64>::zeros(m, m);
                if let Some(j) = col_of[x] {
                    grad[j] -= 1.0;
                }
                for z in 0..n {
                    let slack = bound[z] - gamma_at(&u, z);
                    debug_assert!(slack > 0.0, "barrier iterate left the domain");
                    let coef1 = mu / slack;
                    let coef2 = mu / (slack * slack);
                    // dGamma_z: +sum c (u_z - u_w) at z, -c (u_z - u_w) at w
                    let mut dg: Vec<(usize, f64)> = Vec::with_capacity(self.neighbors[z].len() + 1);
                    let mut at_z = 0.0;
                    for &(w, c) in &self.neighbors[z] {
                        let d = c * (u[z] - u[w]);
                        at_z += d;
                        dg.push((w, -d));
                    }
                    dg.push((z, at_z));
                    for &(a, da) in &dg {
                        if let Some(i) = col_of[a] {
                            grad[i] += coef1 * da;
                            for &(b, db) in &dg {
                                if let Some(j) = col_of[b] {
                                    hess[(i, j)] += coef2 * da * db;
                                }
                            }
                        }
                    }
                    // second derivative of Gamma_z
                    if let Some(i) = col_of[z] {
                        hess[(i, i)] += coef1 * self.weight_sum[z];
                    }
                    for &(w, c) in &self.neighbors[z] {
                        if let Some(j) = col_of[w] {
                            hess[(j, j)] += coef1 * c;
                        }
                        if let (Some(i), Some(j)) = (col_of[z], col_of[w]) {
                            hess[(i, j)] -= coef1 * c;
                            hess[(j, i)] -= coef1 * c;
                        }
                    }
                }
                let delta = match hess.clone().lu().solve(&(-&grad)) {
                    Some(d) => d,
                    None => break,
                };
                let decrement = grad.dot(&delta).abs();
                // damped step kept strictly inside the feasible domain
                let mut step = 1.0;
                let mut accepted = false;
                while step > 1e-12 {
                    let mut cand = u.clone();
                    for (j, &z) in free.iter().enumerate() {
                        cand[z] += step * delta[j];
                    }
                    if (0..n).all(|z| gamma_at(&cand, z) < bound[z]) {
                        u = cand;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted || decrement < 0.1 * mu {
                    break;
                }
            }
        }

        // Rescaling polish: inflate onto the constraint surface so the
        // certificate is an exactly feasible, active configuration.
        let mut rho_max: f64 = f64::INFINITY;
        for z in 0..n {
            let g = gamma_at(&u, z);
            if g > 0.0 {
                rho_max = rho_max.min((bound[z] / g).sqrt());
            }
        }
        if rho_max.is_finite() && rho_max > 1.0 {
            for v in u.iter_mut() {
                *v *= rho_max;
            }
        }

        let utilizations: Vec<f64> = (0..n).map(|z| gamma_at(&u, z) / bound[z]).collect();
        let active_vertices: Vec<usize> =
            (0..n).filter(|&z| utilizations[z] >= 1.0 - 1e-6).collect();
        Ok(IntrinsicDistanceReport {
            value: u[x] - u[y],
            iterations,
            max_constraint_utilization: utilizations.iter().copied().fold(0.0, f64::max),
            active_vertices,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubharmonicReport {
    pub min_defect: f64,
    pub subharmonic: bool,
    /// `(vertex, defect)` for every interior vertex.
    pub defects: Vec<(usize, f64)>,
    /// Interior vertices whose defect violates `-tol`.
    pub witnesses: Vec<usize>,
    pub tol: f64,
}

impl SubharmonicReport {
    pub fn witnesses_csv(&self) -> String {
        let mut out = String::from("vertex,defect\n");
        for (v, d) in &self.defects {
            out.push_str(&format!("{v},{d}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GreenReport {
    pub x0: usize,
    pub r: f64,
    /// The Green function on all vertices (zero outside the outer ball).
    pub g: Vec<f64>,
    /// `w = mu(B(x0,R)) / R^2 * g`; its inner minimum and outer maximum are
    /// the empirical structural constants of the ball pair.
    pub w: Vec<f64>,
    pub w_min_inner: f64,
    pub w_max_outer: f64,
    pub identity_residual: f64,
    pub inner_ball: Vec<usize>,
    pub outer_ball: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicDistanceReport {
    pub value: f64,
    pub iterations: usize,
    pub max_constraint_utilization: f64,
    pub active_vertices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnackReport {
    /// `sup_{B(x, r/2)} v`.
    pub sup_half: f64,
    /// `(avg_{B(x,r)} v^p)^{1/p}`.
    pub p_mean: f64,
    /// Their ratio: the empirical constant of the sup bound. Diagnostic
    /// only; no universal constant is asserted.
    pub ratio: f64,
    pub p: f64,
    pub r: f64,
}

/// Evaluates both sides of the local sup bound
/// `sup_{B(x,r/2)} v <= c_p (avg_{B(x,r)} v^p)^{1/p}` for a nonnegative
/// scalar `v` and reports the realized ratio.
pub fn harnack_diagnostic(
    graph: &MetricMeasureGraph,
    v: &[f64],
    x: usize,
    r: f64,
    p: f64,
) -> Result<HarnackReport> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidArgument(
            "harnack exponent must be > 0".into(),
        ));
    }
    if v.len() != graph.vertex_count() || v.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidArgument(
            "harnack input must be a nonnegative vertex function".into(),
        ));
    }
    let sup_half = graph
        .ball(x, 0.5 * r)
        .iter()
        .map(|&z| v[z])
        .fold(0.0f64, f64::max);
    let ball = graph.ball(x, r);
    let ball_measure: f64 = ball.iter().map(|&z| graph.measure(z)).sum();
    let p_mean = (ball
        .iter()
        .map(|&z| graph.measure(z) * v[z].powf(p))
        .sum::<f64>()
        / ball_measure)
        .powf(1.0 / p);
    let ratio = if p_mean > 0.0 {
        sup_half / p_mean
    } else if sup_half == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(HarnackReport {
        sup_half,
        p_mean,
        ratio,
        p,
        r,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleReport {
    /// `(r, v_p(r))` per requested radius.
    pub growth: Vec<(f64, f64)>,
    /// Trapezoid value of `int r / v_p(r) dr` over the radius grid;
    /// infinite when `v_p` vanishes somewhere on the grid.
    pub partial_integral: f64,
    pub diverges: bool,
    pub p: f64,
}

/// Growth diagnostic for the constancy criterion: reports
/// `v_p(r) = sum_{z in B(x,r)} mu(z) d(u(z), u(x0))^p` on the given radii
/// and the partial integral of `r / v_p(r)`. A formally divergent integral
/// (here: any vanishing `v_p`) is consistent with a constant map.
pub fn liouville_diagnostic(
    u: &Mapping,
    x: usize,
    x0: usize,
    p: f64,
    radii: &[f64],
) -> Result<LiouvilleReport> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidArgument(
            "liouville exponent must satisfy p > 1".into(),
        ));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "liouville radii must be strictly increasing".into(),
        ));
    }
    let graph = u.graph();
    let base = u.value(x0).clone();
    let growth: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let v: f64 = graph
                .ball(x, r)
                .iter()
                .map(|&z| graph.measure(z) * u.target().dist_unchecked(u.value(z), &base).powf(p))
                .sum();
            (r, v)
        })
        .collect();
    let diverges = growth.iter().any(|&(_, v)| v == 0.0);
    let partial_integral = if diverges {
        f64::INFINITY
    } else {
        growth
            .windows(2)
            .map(|w| {
                let (r0, v0) = w[0];
                let (r1, v1) = w[1];
                0.5 * (r1 - r0) * (r0 / v0 + r1 / v1)
            })
            .sum()
    };
    Ok(LiouvilleReport {
        growth,
        partial_integral,
        diverges,
        p,
    })
}
