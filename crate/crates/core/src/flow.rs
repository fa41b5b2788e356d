//! The harmonic-mapping flow as a minimizing-movement scheme.
//!
//! The space of maps with the metric `D(u, v) = sqrt(sum_x mu(x)
//! d^2(u(x), v(x)))` is itself NPC (it is a finite product of NPC factors
//! with mu-weights), and the energy is convex along its geodesics. One flow
//! step from `u_t` with step size `h` is the proximal update
//!
//! ```text
//! u_{t+h} = argmin_v  E(v) + D^2(v, u_t) / (2h),
//! ```
//!
//! which has a unique minimizer by strict convexity of the anchored
//! objective. The inner minimization reuses the Dirichlet relaxation with
//! one extra weighted point per vertex: the anchor `u_t(x)` with weight
//! `mu(x) / (2h)`. Starting the inner solve at `u_t` makes the per-step
//! variational inequality `E(u_{t+h}) + D^2(u_{t+h}, u_t)/(2h) <= E(u_t)`
//! hold by construction.
//!
//! Constrained steps keep boundary values pinned (the flow of the initial
//! boundary value problem); unconstrained steps update every vertex and
//! drive connected graphs to constant maps.

use serde::Serialize;

use crate::analysis::DirichletForm;
use crate::dirichlet::{relax, SolveOptions, SweepMode};
use crate::energy::{graphs_compatible, ks_energy, Mapping};
use crate::error::{Error, Result};
use crate::npc::NpcPoint;

/// The metric on maps: `sqrt(sum_x mu(x) d^2(u(x), v(x)))`.
pub fn l2_distance(u: &Mapping, v: &Mapping) -> Result<f64> {
    if !graphs_compatible(u.graph(), v.graph()) {
        return Err(Error::InvalidArgument(
            "maps live on different graphs".into(),
        ));
    }
    if u.target() != v.target() {
        return Err(Error::InvalidArgument(
            "maps have different target spaces".into(),
        ));
    }
    let graph = u.graph();
    Ok((0..graph.vertex_count())
        .map(|x| {
            let d = u.target().dist_unchecked(u.value(x), v.value(x));
            graph.measure(x) * d * d
        })
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Outer tolerance; the inner proximal solves run at `min(tol, h*tol)`
    /// so outer invariants are not polluted by inner residuals.
    pub tol: f64,
    pub max_inner_sweeps: usize,
    /// Sweep semantics of the inner solves; the Jacobi mode is the
    /// parallelizable one and shares its caveats.
    pub inner_mode: SweepMode,
    pub bary_tol: f64,
    pub bary_max_iter: usize,
    /// Stop the flow early once the step displacement `D(u_{k+1}, u_k)`
    /// falls below this.
    pub stop_displacement: Option<f64>,
    /// Keep a copy of the map after every step.
    pub record_snapshots: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_inner_sweeps: 100_000,
            inner_mode: SweepMode::GaussSeidel,
            bary_tol: 1e-13,
            bary_max_iter: 10_000,
            stop_displacement: None,
            record_snapshots: false,
        }
    }
}

impl FlowOptions {
    fn inner_solve_options(&self, h: f64) -> SolveOptions {
        SolveOptions {
            tol: self.tol.min(h * self.tol),
            max_sweeps: self.max_inner_sweeps,
            mode: self.inner_mode,
            bary_tol: self.bary_tol,
            bary_max_iter: self.bary_max_iter,
            record_energy: false,
        }
    }
}

/// One proximal step: minimizes `E(v) + D^2(v, u_t)/(2h)`, over admissible
/// maps when `constrained` (boundary pinned to `u_t`'s boundary data) and
/// over all maps otherwise (requires an all-interior domain).
pub fn prox_step(
    u_t: &Mapping,
    h: f64,
    constrained: bool,
    options: &FlowOptions,
) -> Result<Mapping> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size h must be positive, got {h}"
        )));
    }
    if constrained && !u_t.domain().has_boundary() {
        return Err(Error::Degenerate(
            "constrained flow needs boundary data".into(),
        ));
    }
    if !constrained && u_t.domain().has_boundary() {
        return Err(Error::InvalidArgument(
            "unconstrained flow needs an all-interior domain".into(),
        ));
    }
    let form = DirichletForm::new(u_t.graph());
    let (next, _) = relax(
        u_t,
        &form,
        Some((u_t, 1.0 / (2.0 * h))),
        &options.inner_solve_options(h),
    )?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    /// `D(u_k, u_{k-1})`; zero for the initial record.
    pub l2_displacement: f64,
}

/// Time-indexed trajectory of the flow. Energies are nonincreasing along
/// steps and times are `k * h`.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub h: f64,
    pub records: Vec<FlowRecord>,
    pub final_map: Mapping,
    pub snapshots: Option<Vec<Mapping>>,
}

impl FlowTrajectory {
    pub fn steps_taken(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.energy)
    }

    /// Sum of `D^2(u_{k+1}, u_k) / (2h)`; bounded by the initial energy.
    pub fn dissipation(&self) -> f64 {
        self.records
            .iter()
            .skip(1)
            .map(|r| r.l2_displacement * r.l2_displacement / (2.0 * self.h))
            .sum()
    }

    /// CSV body `step,time,energy,displacement`.
    pub fn csv(&self) -> String {
        let mut out = String::from("step,time,energy,displacement\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.step, r.time, r.energy, r.l2_displacement
            ));
        }
        out
    }
}

/// Runs `n_steps` proximal steps from `u0` (stopping early if the step
/// displacement drops below `options.stop_displacement`).
pub fn run_flow(
    u0: &Mapping,
    h: f64,
    n_steps: usize,
    constrained: bool,
    options: &FlowOptions,
) -> Result<FlowTrajectory> {
    let mut records = vec![FlowRecord {
        step: 0,
        time: 0.0,
        energy: ks_energy(u0, None)?,
        l2_displacement: 0.0,
    }];
    let mut snapshots = options.record_snapshots.then(|| vec![u0.clone()]);
    let mut current = u0.clone();
    for step in 1..=n_steps {
        let next = prox_step(&current, h, constrained, options)?;
        let displacement = l2_distance(&next, &current)?;
        records.push(FlowRecord {
            step,
            time: step as f64 * h,
            energy: ks_energy(&next, None)?,
            l2_displacement: displacement,
        });
        if let Some(snaps) = snapshots.as_mut() {
            snaps.push(next.clone());
        }
        current = next;
        if options
            .stop_displacement
            .is_some_and(|threshold| displacement < threshold)
        {
            break;
        }
    }
    Ok(FlowTrajectory {
        h,
        records,
        final_map: current,
        snapshots,
    })
}

/// Largest distance between values of the map at any two vertices; an
/// unconstrained flow on a connected graph drives this to zero.
pub fn image_diameter(u: &Mapping) -> f64 {
    let all: Vec<usize> = (0..u.graph().vertex_count()).collect();
    u.image_diameter(&all)
}

/// Midpoint of two maps in the `D` metric, together with the NPC
/// comparison defect of a quadruple of maps; sanity probe for the NPC
/// structure of the space of maps.
pub fn map_comparison_defect(p: &Mapping, q: &Mapping, r: &Mapping, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda = {lambda} outside [0,1]"
        )));
    }
    let q_l = geodesic_map(q, r, lambda)?;
    let dpq = l2_distance(p, q)?;
    let dpr = l2_distance(p, r)?;
    let dqr = l2_distance(q, r)?;
    let dpl = l2_distance(p, &q_l)?;
    Ok((1.0 - lambda) * dpq * dpq + lambda * dpr * dpr
        - lambda * (1.0 - lambda) * dqr * dqr
        - dpl * dpl)
}

/// The pointwise geodesic interpolation of two maps; the geodesic of the
/// `D` metric.
pub fn geodesic_map(u: &Mapping, v: &Mapping, t: f64) -> Result<Mapping> {
    if !graphs_compatible(u.graph(), v.graph()) || u.target() != v.target() {
        return Err(Error::InvalidArgument("maps are not interpolable".into()));
    }
    let values: Vec<NpcPoint> = (0..u.graph().vertex_count())
        .map(|x| {
            u.target()
                .geodesic_point_unchecked(u.value(x), v.value(x), t)
        })
        .collect();
    Mapping::new(
        u.graph().clone(),
        u.target().clone(),
        values,
        u.domain().clone(),
    )
}
