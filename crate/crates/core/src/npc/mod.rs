//! Concrete NPC (nonpositively curved / CAT(0)) target spaces.
//!
//! Four space kinds are implemented: Euclidean space of any dimension,
//! finite metric trees, the hyperbolic plane in the hyperboloid model, and
//! finite products of the above. All of them expose exact distances, unique
//! geodesics, midpoints, weighted barycenters and the comparison-inequality
//! defect
//!
//! ```text
//! (1-l) d^2(P,Q) + l d^2(P,R) - l(1-l) d^2(Q,R) - d^2(P, Q_l)  >=  0,
//! ```
//!
//! where `Q_l` is the point a fraction `l` along the geodesic from `Q` to
//! `R`. Nonnegativity of the defect for every triple is exactly the CAT(0)
//! condition and is what the rest of the crate relies on (uniqueness of
//! barycenters, convexity of the energy, contraction of midpoints).
//!
//! Everything here is pure and immutable after construction; values can be
//! shared freely across threads.

mod hyperbolic;
mod tree;

pub use tree::MetricTree;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of some [`NpcSpace`], tagged by the kind of space it lives in.
///
/// Tree points are `(edge id, offset from the edge's start)` in length
/// units; points sitting exactly on a tree vertex are canonicalized (see
/// [`MetricTree`]) so structural equality of tree points is exact.
/// Hyperbolic points are hyperboloid coordinates `(x0, x1, x2)` with
/// `x0 > 0` and `x0^2 - x1^2 - x2^2 = 1`; the quadratic form is restored
/// after every interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NpcPoint {
    Euclidean(Vec<f64>),
    Tree { edge: usize, offset: f64 },
    Hyperbolic([f64; 3]),
    Product(Vec<NpcPoint>),
}

/// Descriptor of a target space. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub enum NpcSpace {
    Euclidean { dim: usize },
    MetricTree(MetricTree),
    HyperbolicPlane,
    Product(Vec<NpcSpace>),
}

/// A finite weighted point configuration used as barycenter input.
#[derive(Debug, Clone)]
pub struct WeightedPoints {
    points: Vec<NpcPoint>,
    weights: Vec<f64>,
}

impl WeightedPoints {
    /// Weights must be nonnegative with a positive sum and match the number
    /// of points.
    pub fn new(points: Vec<NpcPoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "weighted points: {} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[NpcPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The weighted objective `F(x) = sum_i w_i d^2(x, p_i)` this
    /// configuration defines.
    pub fn objective(&self, space: &NpcSpace, x: &NpcPoint) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| {
                let d = space.dist_unchecked(x, p);
                w * d * d
            })
            .sum()
    }
}

impl NpcSpace {
    pub fn euclidean(dim: usize) -> Self {
        NpcSpace::Euclidean { dim }
    }

    /// A point of Euclidean space; panics if the space is not Euclidean of
    /// matching dimension only when later validated.
    pub fn product(components: Vec<NpcSpace>) -> Self {
        NpcSpace::Product(components)
    }

    /// Checks that `p` is a structurally valid point of this space.
    pub fn validate_point(&self, p: &NpcPoint) -> Result<()> {
        match (self, p) {
            (NpcSpace::Euclidean { dim }, NpcPoint::Euclidean(coords)) => {
                if coords.len() != *dim {
                    return Err(Error::SpaceMismatch(format!(
                        "expected {dim} coordinates, got {}",
                        coords.len()
                    )));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::SpaceMismatch("non-finite coordinate".into()));
                }
                Ok(())
            }
            (NpcSpace::MetricTree(tree), NpcPoint::Tree { edge, offset }) => {
                tree.validate(*edge, *offset)
            }
            (NpcSpace::HyperbolicPlane, NpcPoint::Hyperbolic(x)) => hyperbolic::validate(x),
            (NpcSpace::Product(spaces), NpcPoint::Product(comps)) => {
                if spaces.len() != comps.len() {
                    return Err(Error::SpaceMismatch(format!(
                        "product arity {} vs {}",
                        spaces.len(),
                        comps.len()
                    )));
                }
                for (s, c) in spaces.iter().zip(comps) {
                    s.validate_point(c)?;
                }
                Ok(())
            }
            _ => Err(Error::SpaceMismatch(format!(
                "point kind does not match space kind ({self:?})"
            ))),
        }
    }

    /// Distance between two points of this space.
    ///
    /// Symmetric, nonnegative, zero iff the points coincide, and satisfies
    /// the triangle inequality. Errors if either point does not belong to
    /// the space.
    pub fn dist(&self, p: &NpcPoint, q: &NpcPoint) -> Result<f64> {
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(self.dist_unchecked(p, q))
    }

    /// Distance without membership validation. Callers must guarantee both
    /// points belong to this space (hot loops validate once up front).
    pub fn dist_unchecked(&self, p: &NpcPoint, q: &NpcPoint) -> f64 {
        match (self, p, q) {
            (NpcSpace::Euclidean { .. }, NpcPoint::Euclidean(a), NpcPoint::Euclidean(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            (NpcSpace::MetricTree(tree), NpcPoint::Tree { .. }, NpcPoint::Tree { .. }) => {
                tree.point_dist(p, q)
            }
            (NpcSpace::HyperbolicPlane, NpcPoint::Hyperbolic(a), NpcPoint::Hyperbolic(b)) => {
                hyperbolic::dist(a, b)
            }
            (NpcSpace::Product(spaces), NpcPoint::Product(a), NpcPoint::Product(b)) => spaces
                .iter()
                .zip(a.iter().zip(b))
                .map(|(s, (x, y))| {
                    let d = s.dist_unchecked(x, y);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            _ => panic!("dist_unchecked on mismatched point kinds"),
        }
    }

    /// The point a fraction `t in [0,1]` along the unique geodesic from `p`
    /// to `q`: `dist(p, r) = t dist(p,q)` and `dist(r, q) = (1-t) dist(p,q)`.
    /// `t = 0` returns `p` exactly, `t = 1` returns `q` exactly.
    pub fn geodesic_point(&self, p: &NpcPoint, q: &NpcPoint, t: f64) -> Result<NpcPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "geodesic parameter t = {t} outside [0,1]"
            )));
        }
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(self.geodesic_point_unchecked(p, q, t))
    }

    pub fn geodesic_point_unchecked(&self, p: &NpcPoint, q: &NpcPoint, t: f64) -> NpcPoint {
        if t == 0.0 {
            return p.clone();
        }
        if t == 1.0 {
            return q.clone();
        }
        match (self, p, q) {
            (NpcSpace::Euclidean { .. }, NpcPoint::Euclidean(a), NpcPoint::Euclidean(b)) => {
                NpcPoint::Euclidean(
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (1.0 - t) * x + t * y)
                        .collect(),
                )
            }
            (NpcSpace::MetricTree(tree), NpcPoint::Tree { .. }, NpcPoint::Tree { .. }) => {
                tree.geodesic_point(p, q, t)
            }
            (NpcSpace::HyperbolicPlane, NpcPoint::Hyperbolic(a), NpcPoint::Hyperbolic(b)) => {
                NpcPoint::Hyperbolic(hyperbolic::geodesic(a, b, t))
            }
            (NpcSpace::Product(spaces), NpcPoint::Product(a), NpcPoint::Product(b)) => {
                NpcPoint::Product(
                    spaces
                        .iter()
                        .zip(a.iter().zip(b))
                        .map(|(s, (x, y))| s.geodesic_point_unchecked(x, y, t))
                        .collect(),
                )
            }
            _ => panic!("geodesic_point_unchecked on mismatched point kinds"),
        }
    }

    /// Midpoint of the geodesic from `p` to `q`.
    pub fn midpoint(&self, p: &NpcPoint, q: &NpcPoint) -> Result<NpcPoint> {
        self.geodesic_point(p, q, 0.5)
    }

    /// The CAT(0) comparison defect of the triple `(p, q, r)` at parameter
    /// `lambda`:
    ///
    /// `(1-l) d^2(p,q) + l d^2(p,r) - l(1-l) d^2(q,r) - d^2(p, q_l)`
    ///
    /// with `q_l` the fraction-`l` point on the geodesic from `q` to `r`.
    /// Nonnegative (up to roundoff) in every space implemented here; zero
    /// identically in Euclidean space.
    pub fn comparison_defect(
        &self,
        p: &NpcPoint,
        q: &NpcPoint,
        r: &NpcPoint,
        lambda: f64,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda = {lambda} outside [0,1]"
            )));
        }
        let q_l = self.geodesic_point(q, r, lambda)?;
        let dpq = self.dist_unchecked(p, q);
        let dpr = self.dist_unchecked(p, r);
        let dqr = self.dist_unchecked(q, r);
        let dpl = self.dist_unchecked(p, &q_l);
        Ok((1.0 - lambda) * dpq * dpq + lambda * dpr * dpr
            - lambda * (1.0 - lambda) * dqr * dqr
            - dpl * dpl)
    }

    /// The weighted barycenter: the unique minimizer of
    /// `F(x) = sum_i w_i d^2(x, p_i)`.
    ///
    /// Euclidean and tree barycenters are computed exactly (weighted mean,
    /// respectively a per-edge quadratic sweep); the hyperbolic barycenter
    /// by a damped fixed-point iteration on the mean tangent, stopped when
    /// the mean-tangent norm drops below `tol` (which bounds the distance
    /// to the true minimizer). Products split componentwise.
    pub fn barycenter(&self, wp: &WeightedPoints, tol: f64, max_iter: usize) -> Result<NpcPoint> {
        if tol <= 0.0 {
            return Err(Error::InvalidArgument("barycenter tol must be > 0".into()));
        }
        for p in wp.points() {
            self.validate_point(p)?;
        }
        self.barycenter_unchecked(wp.points(), wp.weights(), tol, max_iter)
    }

    pub(crate) fn barycenter_unchecked(
        &self,
        points: &[NpcPoint],
        weights: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<NpcPoint> {
        match self {
            NpcSpace::Euclidean { dim } => Ok(euclidean_barycenter(*dim, points, weights)),
            NpcSpace::MetricTree(tree) => Ok(tree.barycenter(points, weights)),
            NpcSpace::HyperbolicPlane => hyperbolic::barycenter(points, weights, tol, max_iter),
            NpcSpace::Product(spaces) => {
                let mut comps = Vec::with_capacity(spaces.len());
                for (k, space) in spaces.iter().enumerate() {
                    let part: Vec<NpcPoint> = points
                        .iter()
                        .map(|p| match p {
                            NpcPoint::Product(c) => c[k].clone(),
                            _ => unreachable!("validated product point"),
                        })
                        .collect();
                    comps.push(space.barycenter_unchecked(&part, weights, tol, max_iter)?);
                }
                Ok(NpcPoint::Product(comps))
            }
        }
    }

    /// Draws a point of this space from a fixed bounded region, used by the
    /// randomized property suites.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> NpcPoint {
        match self {
            NpcSpace::Euclidean { dim } => {
                NpcPoint::Euclidean((0..*dim).map(|_| rng.random_range(-3.0..3.0)).collect())
            }
            NpcSpace::MetricTree(tree) => {
                let edge = rng.random_range(0..tree.edge_count());
                let offset = rng.random_range(0.0..=tree.edge_length(edge));
                tree.point_on_edge(edge, offset)
                    .expect("sampled offset is within the edge")
            }
            NpcSpace::HyperbolicPlane => {
                let r: f64 = rng.random_range(0.0..2.5);
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                NpcPoint::Hyperbolic([r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()])
            }
            NpcSpace::Product(spaces) => {
                NpcPoint::Product(spaces.iter().map(|s| s.sample_point(rng)).collect())
            }
        }
    }

    /// Short human-readable description, embedded in reports.
    pub fn describe(&self) -> String {
        match self {
            NpcSpace::Euclidean { dim } => format!("euclidean(dim={dim})"),
            NpcSpace::MetricTree(tree) => format!(
                "metric_tree(vertices={}, edges={})",
                tree.vertex_count(),
                tree.edge_count()
            ),
            NpcSpace::HyperbolicPlane => "hyperbolic_plane".into(),
            NpcSpace::Product(spaces) => {
                let parts: Vec<String> = spaces.iter().map(|s| s.describe()).collect();
                format!("product({})", parts.join(" x "))
            }
        }
    }
}

/// Exact weighted mean, clamped coordinatewise to the hull of the inputs so
/// the result never escapes the coordinate range by rounding.
fn euclidean_barycenter(dim: usize, points: &[NpcPoint], weights: &[f64]) -> NpcPoint {
    let total: f64 = weights.iter().sum();
    let mut mean = vec![0.0; dim];
    let mut low = vec![f64::INFINITY; dim];
    let mut high = vec![f64::NEG_INFINITY; dim];
    for (p, w) in points.iter().zip(weights) {
        let coords = match p {
            NpcPoint::Euclidean(c) => c,
            _ => unreachable!("validated euclidean point"),
        };
        for k in 0..dim {
            mean[k] += w * coords[k];
            if *w > 0.0 {
                low[k] = low[k].min(coords[k]);
                high[k] = high[k].max(coords[k]);
            }
        }
    }
    for k in 0..dim {
        mean[k] = (mean[k] / total).clamp(low[k], high[k]);
    }
    NpcPoint::Euclidean(mean)
}

impl NpcPoint {
    /// Convenience constructor for scalar (one-dimensional Euclidean) values.
    pub fn scalar(v: f64) -> Self {
        NpcPoint::Euclidean(vec![v])
    }

    /// The scalar value of a one-dimensional Euclidean point.
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            NpcPoint::Euclidean(c) if c.len() == 1 => Some(c[0]),
            _ => None,
        }
    }

    pub fn as_euclidean(&self) -> Option<&[f64]> {
        match self {
            NpcPoint::Euclidean(c) => Some(c),
            _ => None,
        }
    }
}
