//! The approximating energy at scale `eps` and its relatives.
//!
//! For a map `u` from the graph into an NPC target, the pointwise energy
//! density is
//!
//! ```text
//! e(x) = (1 / mu(B(x,eps))) sum_{y in B(x,eps)} mu(y) d^2(u(x), u(y)) / eps^2
//! ```
//!
//! and the energy with test weight `f` (values in `[0,1]`) is
//! `sum_x f(x) mu(x) e(x)`. On a finite graph the supremum over test
//! weights is attained at `f = 1`, which is the default; `f` is exposed for
//! the localized statements. There is no global 1/2 on this functional.
//!
//! The Kuwae–Shioya variants differ in two ways: they carry an explicit
//! `1/(2 b(eps))` prefactor for an admissible rate function `b`, and they do
//! not average over the ball. The chordal form divides by `d(x,y)^2` in
//! place of `eps^2` and skips the singular `y = x` term.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DomainSpec, MetricMeasureGraph};
use crate::npc::{NpcPoint, NpcSpace, WeightedPoints};

/// A vertex-indexed map into an NPC target with a designated domain.
///
/// Values off the interior are the boundary data; the two are kept equal by
/// construction (interior updates go through [`Mapping::set_interior_value`]).
#[derive(Debug, Clone)]
pub struct Mapping {
    graph: Arc<MetricMeasureGraph>,
    target: Arc<NpcSpace>,
    values: Vec<NpcPoint>,
    domain: DomainSpec,
}

impl Mapping {
    /// Builds a map from a full value vector, validating every point.
    pub fn new(
        graph: Arc<MetricMeasureGraph>,
        target: Arc<NpcSpace>,
        values: Vec<NpcPoint>,
        domain: DomainSpec,
    ) -> Result<Self> {
        if values.len() != graph.vertex_count() || domain.vertex_count() != graph.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "mapping needs one value per vertex: {} values, {} vertices, domain over {}",
                values.len(),
                graph.vertex_count(),
                domain.vertex_count()
            )));
        }
        for p in &values {
            target.validate_point(p)?;
        }
        Ok(Self {
            graph,
            target,
            values,
            domain,
        })
    }

    /// Constant map.
    pub fn constant(
        graph: Arc<MetricMeasureGraph>,
        target: Arc<NpcSpace>,
        domain: DomainSpec,
        point: NpcPoint,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        Self::new(graph, target, vec![point; n], domain)
    }

    /// Builds an admissible map from boundary data, initializing every
    /// interior vertex to the (equal-weight) barycenter of all boundary
    /// values. Deterministic and cheap; the standard starting point for
    /// solves.
    pub fn from_boundary_barycenter(
        graph: Arc<MetricMeasureGraph>,
        target: Arc<NpcSpace>,
        domain: DomainSpec,
        boundary: &[(usize, NpcPoint)],
    ) -> Result<Self> {
        let points: Vec<NpcPoint> = boundary.iter().map(|(_, p)| p.clone()).collect();
        let weights = vec![1.0; points.len()];
        let center = target.barycenter(&WeightedPoints::new(points, weights)?, 1e-12, 10_000)?;
        Self::from_boundary_and_interior(graph, target, domain, boundary, |_| center.clone())
    }

    /// Builds an admissible map with interior values produced by a callback.
    pub fn from_boundary_and_interior(
        graph: Arc<MetricMeasureGraph>,
        target: Arc<NpcSpace>,
        domain: DomainSpec,
        boundary: &[(usize, NpcPoint)],
        mut interior: impl FnMut(usize) -> NpcPoint,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        let mut values: Vec<Option<NpcPoint>> = vec![None; n];
        for (v, p) in boundary {
            if *v >= n || domain.is_interior(*v) {
                return Err(Error::InvalidArgument(format!(
                    "boundary datum at vertex {v} which is not a boundary vertex"
                )));
            }
            if values[*v].is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate boundary datum at vertex {v}"
                )));
            }
            values[*v] = Some(p.clone());
        }
        let values: Vec<NpcPoint> = (0..n)
            .map(|v| {
                if domain.is_interior(v) {
                    Ok(interior(v))
                } else {
                    values[v].take().ok_or_else(|| {
                        Error::InvalidArgument(format!("missing boundary datum at vertex {v}"))
                    })
                }
            })
            .collect::<Result<_>>()?;
        Self::new(graph, target, values, domain)
    }

    pub fn graph(&self) -> &Arc<MetricMeasureGraph> {
        &self.graph
    }

    pub fn target(&self) -> &Arc<NpcSpace> {
        &self.target
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn value(&self, x: usize) -> &NpcPoint {
        &self.values[x]
    }

    pub fn values(&self) -> &[NpcPoint] {
        &self.values
    }

    /// Replaces the value at an interior vertex.
    pub fn set_interior_value(&mut self, x: usize, p: NpcPoint) -> Result<()> {
        if !self.domain.is_interior(x) {
            return Err(Error::InvalidArgument(format!(
                "vertex {x} carries boundary data"
            )));
        }
        self.target.validate_point(&p)?;
        self.values[x] = p;
        Ok(())
    }

    pub(crate) fn set_value_unchecked(&mut self, x: usize, p: NpcPoint) {
        self.values[x] = p;
    }

    pub fn boundary_data(&self) -> Vec<(usize, NpcPoint)> {
        self.domain
            .boundary_vertices()
            .into_iter()
            .map(|v| (v, self.values[v].clone()))
            .collect()
    }

    /// Checks that `self` and `other` live on the same graph, map into the
    /// same target, and share domain and boundary data.
    pub fn same_problem(&self, other: &Mapping) -> Result<()> {
        if !graphs_compatible(&self.graph, &other.graph) {
            return Err(Error::InvalidArgument(
                "maps live on different graphs".into(),
            ));
        }
        if self.target != other.target {
            return Err(Error::InvalidArgument(
                "maps have different target spaces".into(),
            ));
        }
        if self.domain != other.domain {
            return Err(Error::InvalidArgument("maps have different domains".into()));
        }
        for v in self.domain.boundary_vertices() {
            if self.values[v] != other.values[v] {
                return Err(Error::InvalidArgument(format!(
                    "boundary data differs at vertex {v}"
                )));
            }
        }
        Ok(())
    }

    /// Largest pairwise distance between values at the given vertices.
    pub fn image_diameter(&self, vertices: &[usize]) -> f64 {
        let mut diam: f64 = 0.0;
        for (i, &x) in vertices.iter().enumerate() {
            for &y in &vertices[i + 1..] {
                diam = diam.max(self.target.dist_unchecked(&self.values[x], &self.values[y]));
            }
        }
        diam
    }

    /// Largest distance between values of two maps over all vertices.
    pub fn sup_distance(&self, other: &Mapping) -> Result<f64> {
        self.same_problem(other)?;
        Ok((0..self.values.len())
            .map(|x| {
                self.target
                    .dist_unchecked(&self.values[x], &other.values[x])
            })
            .fold(0.0, f64::max))
    }
}

pub(crate) fn graphs_compatible(a: &Arc<MetricMeasureGraph>, b: &Arc<MetricMeasureGraph>) -> bool {
    Arc::ptr_eq(a, b)
        || (a.vertex_count() == b.vertex_count()
            && a.eps() == b.eps()
            && a.measures() == b.measures()
            && (0..a.vertex_count())
                .all(|x| (0..a.vertex_count()).all(|y| a.dist(x, y) == b.dist(x, y))))
}

fn validate_test_weight(f: &[f64], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::InvalidArgument(format!(
            "test weight has {} entries for {n} vertices",
            f.len()
        )));
    }
    if f.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidArgument(
            "test weight must take values in [0,1]".into(),
        ));
    }
    Ok(())
}

/// Generic density: `e(x) = avg_{B(x,eps)} pair(x,y) / eps^2` where `pair`
/// is the squared difference of whatever is being measured.
fn density_with(graph: &MetricMeasureGraph, pair_sq: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let eps2 = graph.eps() * graph.eps();
    (0..graph.vertex_count())
        .map(|x| {
            let sum: f64 = graph
                .eps_ball(x)
                .iter()
                .filter(|&&y| y != x)
                .map(|&y| graph.measure(y) * pair_sq(x, y))
                .sum();
            sum / (graph.eps_ball_measure(x) * eps2)
        })
        .collect()
}

fn total_with(graph: &MetricMeasureGraph, density: &[f64], f: Option<&[f64]>) -> Result<f64> {
    if let Some(f) = f {
        validate_test_weight(f, graph.vertex_count())?;
    }
    Ok(density
        .iter()
        .enumerate()
        .map(|(x, e)| f.map_or(1.0, |f| f[x]) * graph.measure(x) * e)
        .sum())
}

/// Pointwise energy density of a map.
pub fn energy_density(u: &Mapping) -> Vec<f64> {
    let target = u.target();
    density_with(u.graph(), |x, y| {
        let d = target.dist_unchecked(u.value(x), u.value(y));
        d * d
    })
}

/// The energy `sum_x f(x) mu(x) e(x)`; `f = None` means `f = 1`.
pub fn ks_energy(u: &Mapping, f: Option<&[f64]>) -> Result<f64> {
    total_with(u.graph(), &energy_density(u), f)
}

/// Density of a scalar vertex function under the same ball weights.
pub fn scalar_energy_density(graph: &MetricMeasureGraph, values: &[f64]) -> Vec<f64> {
    density_with(graph, |x, y| {
        let d = values[x] - values[y];
        d * d
    })
}

/// Energy of a scalar vertex function under the same ball weights; this is
/// what couples scalar comparisons (like the energy of `d(u, v)`) to map
/// energies under one functional.
pub fn scalar_ks_energy(
    graph: &MetricMeasureGraph,
    values: &[f64],
    f: Option<&[f64]>,
) -> Result<f64> {
    total_with(graph, &scalar_energy_density(graph, values), f)
}

/// Normalization conventions, embedded in every report so numbers are
/// self-describing.
pub const ENERGY_CONVENTIONS: &str = "open balls d < eps including the center; \
     e(x) = avg_{B(x,eps)} d^2(u(x),u(y))/eps^2 with the mu-average; \
     total = sum_x f(x) mu(x) e(x), no global 1/2; \
     Kuwae-Shioya totals carry 1/(2 b(eps)) and use the plain (non-averaged) ball sum";

/// Energy total plus per-vertex density, ready for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub total: f64,
    pub density: Vec<f64>,
    pub eps: f64,
    /// The test weight the total was taken against; `None` means `f = 1`.
    pub test_weight: Option<Vec<f64>>,
    pub conventions: &'static str,
    #[serde(skip)]
    measures: Vec<f64>,
}

impl EnergyReport {
    pub fn weighted_total(&self, f: &[f64]) -> Result<f64> {
        validate_test_weight(f, self.density.len())?;
        Ok(self
            .density
            .iter()
            .enumerate()
            .map(|(x, e)| f[x] * self.measures[x] * e)
            .sum())
    }

    /// CSV body `vertex,density` with a header line.
    pub fn density_csv(&self) -> String {
        let mut out = String::from("vertex,density\n");
        for (v, e) in self.density.iter().enumerate() {
            out.push_str(&format!("{v},{e}\n"));
        }
        out
    }
}

pub fn energy_report(u: &Mapping, f: Option<&[f64]>) -> Result<EnergyReport> {
    let density = energy_density(u);
    let total = total_with(u.graph(), &density, f)?;
    Ok(EnergyReport {
        total,
        density,
        eps: u.graph().eps(),
        test_weight: f.map(|f| f.to_vec()),
        conventions: ENERGY_CONVENTIONS,
        measures: u.graph().measures().to_vec(),
    })
}

/// An admissible rate function `b` (positive, increasing, `b(0+) = 0`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFunction {
    /// `b(r) = r^nu` with `nu > 0`.
    Power { nu: f64 },
    /// Piecewise-linear interpolation through `(radii[i], values[i])`,
    /// continued linearly from the origin below and from the last segment
    /// above.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl RateFunction {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RateFunction::Power { nu } => r.powf(*nu),
            RateFunction::Tabulated { radii, values } => {
                if radii.is_empty() {
                    return 0.0;
                }
                if r <= radii[0] {
                    return values[0] * r / radii[0];
                }
                for i in 1..radii.len() {
                    if r <= radii[i] {
                        let t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                        return values[i - 1] + t * (values[i] - values[i - 1]);
                    }
                }
                let last = radii.len() - 1;
                let slope = if last == 0 {
                    values[0] / radii[0]
                } else {
                    (values[last] - values[last - 1]) / (radii[last] - radii[last - 1])
                };
                values[last] + slope * (r - radii[last])
            }
        }
    }

    /// The rate must be usable at the graph's scale: `b(eps) > 0`.
    pub fn validate_at(&self, eps: f64) -> Result<()> {
        match self {
            RateFunction::Power { nu } if !(nu.is_finite() && *nu > 0.0) => Err(
                Error::InvalidArgument("power rate function needs nu > 0".into()),
            ),
            RateFunction::Tabulated { radii, values } => {
                if radii.len() != values.len() || radii.is_empty() {
                    return Err(Error::InvalidArgument(
                        "tabulated rate function needs matching nonempty tables".into(),
                    ));
                }
                if !radii.windows(2).all(|w| w[0] < w[1])
                    || !values.windows(2).all(|w| w[0] <= w[1])
                    || values.iter().any(|v| *v <= 0.0)
                {
                    return Err(Error::InvalidArgument(
                        "tabulated rate function must be positive and increasing".into(),
                    ));
                }
                if self.eval(eps) <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "rate function vanishes at eps = {eps}"
                    )));
                }
                Ok(())
            }
            _ => {
                if self.eval(eps) > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "rate function vanishes at eps = {eps}"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KuwaeShioyaVariant {
    /// `1/(2 b(eps)) sum_x f mu(x) sum_{y in B} mu(y) d^2(u(x),u(y)) / eps^2`.
    BallNormalized,
    /// Same with `d(x,y)^2` in the denominator, skipping `y = x`.
    Chordal,
}

pub fn kuwae_shioya_energy(
    u: &Mapping,
    f: Option<&[f64]>,
    rate: &RateFunction,
    variant: KuwaeShioyaVariant,
) -> Result<f64> {
    let graph = u.graph();
    rate.validate_at(graph.eps())?;
    if let Some(f) = f {
        validate_test_weight(f, graph.vertex_count())?;
    }
    let eps2 = graph.eps() * graph.eps();
    let target = u.target();
    let mut total = 0.0;
    for x in 0..graph.vertex_count() {
        let mut inner = 0.0;
        for &y in graph.eps_ball(x) {
            if y == x {
                continue;
            }
            let d = target.dist_unchecked(u.value(x), u.value(y));
            let denom = match variant {
                KuwaeShioyaVariant::BallNormalized => eps2,
                KuwaeShioyaVariant::Chordal => {
                    let dxy = graph.dist(x, y);
                    dxy * dxy
                }
            };
            inner += graph.measure(y) * d * d / denom;
        }
        total += f.map_or(1.0, |f| f[x]) * graph.measure(x) * inner;
    }
    Ok(total / (2.0 * rate.eval(graph.eps())))
}

/// The pointwise midpoint map `w(x) = midpoint(u(x), v(x))`. Requires both
/// maps to pose the same problem; boundary data is inherited exactly
/// (midpoints of equal points).
pub fn midpoint_map(u: &Mapping, v: &Mapping) -> Result<Mapping> {
    u.same_problem(v)?;
    let values: Vec<NpcPoint> = (0..u.values.len())
        .map(|x| {
            u.target()
                .geodesic_point_unchecked(u.value(x), v.value(x), 0.5)
        })
        .collect();
    Mapping::new(u.graph.clone(), u.target.clone(), values, u.domain.clone())
}

/// The convexity surplus `E(u)(f) + E(v)(f) - E(d(u,v))(f)/2 - 2 E(w)(f)`
/// where `w` is the midpoint map and `E(d(u,v))` the scalar energy of the
/// pointwise distance, all under the same ball weights. Nonnegative up to
/// roundoff because midpoints in NPC targets satisfy the quadrilateral
/// comparison pointwise.
pub fn convexity_defect(u: &Mapping, v: &Mapping, f: Option<&[f64]>) -> Result<f64> {
    let w = midpoint_map(u, v)?;
    let h: Vec<f64> = (0..u.values.len())
        .map(|x| u.target().dist_unchecked(u.value(x), v.value(x)))
        .collect();
    let eu = ks_energy(u, f)?;
    let ev = ks_energy(v, f)?;
    let ew = ks_energy(&w, f)?;
    let eh = scalar_ks_energy(u.graph(), &h, f)?;
    Ok(eu + ev - 0.5 * eh - 2.0 * ew)
}

/// The scalar pullback `x -> d(u(x), y0)^power` for `power` 1 or 2.
pub fn distance_pullback(u: &Mapping, y0: &NpcPoint, power: u32) -> Result<Vec<f64>> {
    if power != 1 && power != 2 {
        return Err(Error::InvalidArgument(format!(
            "pullback power must be 1 or 2, got {power}"
        )));
    }
    u.target().validate_point(y0)?;
    Ok(u.values
        .iter()
        .map(|p| {
            let d = u.target().dist_unchecked(p, y0);
            if power == 1 {
                d
            } else {
                d * d
            }
        })
        .collect())
}
