//! The hyperbolic plane in the hyperboloid model.
//!
//! Points are `(x0, x1, x2)` with `x0 > 0` on the sheet
//! `x0^2 - x1^2 - x2^2 = 1`; writing `<x,y> = x0 y0 - x1 y1 - x2 y2` for the
//! bilinear form, the distance is `arccosh(<x,y>)` and geodesics, exp and
//! log maps are closed-form. The hyperboloid model is preferred over the
//! Poincare disk because none of these formulas degenerate away from the
//! ideal boundary; the quadratic form is restored after every operation.

use crate::error::{Error, Result};
use crate::npc::NpcPoint;

const SHEET_TOL: f64 = 1e-9;

pub(crate) fn form(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] - x[1] * y[1] - x[2] * y[2]
}

/// Restores `x0^2 - x1^2 - x2^2 = 1` exactly by recomputing `x0`.
pub(crate) fn renormalize(x: [f64; 3]) -> [f64; 3] {
    [(1.0 + x[1] * x[1] + x[2] * x[2]).sqrt(), x[1], x[2]]
}

pub(crate) fn validate(x: &[f64; 3]) -> Result<()> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::SpaceMismatch(
            "non-finite hyperboloid coordinate".into(),
        ));
    }
    if x[0] <= 0.0 {
        return Err(Error::SpaceMismatch(format!(
            "hyperboloid point must have x0 > 0, got {}",
            x[0]
        )));
    }
    let q = form(x, x);
    if (q - 1.0).abs() > SHEET_TOL * (1.0 + x[0] * x[0]) {
        return Err(Error::SpaceMismatch(format!(
            "point off the hyperboloid sheet: x0^2 - x1^2 - x2^2 = {q}"
        )));
    }
    Ok(())
}

/// Geodesic distance `arccosh(<x,y>)`, evaluated through the coordinate
/// difference: with `v = x - y` one has `<x,y> = 1 - <v,v>/2`, and
/// `s = -<v,v> >= 0` is cancellation-free. For tiny separations
/// `arccosh(1 + s/2) = sqrt(s) (1 - s/24 + ...)`, so the square-root branch
/// keeps full precision where the naive form-value route loses half the
/// mantissa. The `acosh` argument stays clamped to `[1, inf)` against the
/// remaining roundoff.
pub(crate) fn dist(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let v = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let s = (v[1] * v[1] + v[2] * v[2] - v[0] * v[0]).max(0.0);
    if s < 1e-8 {
        s.sqrt()
    } else {
        (1.0 + 0.5 * s).max(1.0).acosh()
    }
}

pub(crate) fn geodesic(x: &[f64; 3], y: &[f64; 3], t: f64) -> [f64; 3] {
    let len = dist(x, y);
    if len < 1e-15 {
        return *x;
    }
    let (sa, sb, s) = (((1.0 - t) * len).sinh(), (t * len).sinh(), len.sinh());
    renormalize([
        (sa * x[0] + sb * y[0]) / s,
        (sa * x[1] + sb * y[1]) / s,
        (sa * x[2] + sb * y[2]) / s,
    ])
}

/// Initial velocity of the unit-time geodesic from `x` to `y`; a tangent
/// vector at `x` (form-orthogonal to `x`) of length `dist(x, y)`.
fn log(x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    let d = dist(x, y);
    if d < 1e-15 {
        return [0.0; 3];
    }
    let c = d.cosh();
    let scale = d / d.sinh();
    [
        scale * (y[0] - c * x[0]),
        scale * (y[1] - c * x[1]),
        scale * (y[2] - c * x[2]),
    ]
}

/// Follows the geodesic with initial velocity `v` from `x` for unit time.
fn exp(x: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    let r = tangent_norm(v);
    if r < 1e-18 {
        return *x;
    }
    let (c, s) = (r.cosh(), r.sinh() / r);
    renormalize([
        c * x[0] + s * v[0],
        c * x[1] + s * v[1],
        c * x[2] + s * v[2],
    ])
}

/// Riemannian norm of a tangent vector: `sqrt(-<v,v>)` (tangents are
/// spacelike for this sign convention).
fn tangent_norm(v: &[f64; 3]) -> f64 {
    (-form(v, v)).max(0.0).sqrt()
}

/// Weighted barycenter by damped fixed-point iteration on the mean tangent
/// `g = (1/W) sum_i w_i log_x(p_i)`.
///
/// The objective `F(x) = sum_i w_i d^2(x, p_i)` is geodesically `2W`-strongly
/// convex, so `|g|` bounds the distance from `x` to the minimizer; iteration
/// stops once `|g| < tol`. A halving line search keeps `F` monotone.
pub(crate) fn barycenter(
    points: &[NpcPoint],
    weights: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NpcPoint> {
    let coords: Vec<&[f64; 3]> = points
        .iter()
        .map(|p| match p {
            NpcPoint::Hyperbolic(x) => x,
            _ => unreachable!("validated hyperbolic point"),
        })
        .collect();
    let total: f64 = weights.iter().sum();

    // Normalized ambient mean: a future-timelike combination projected back
    // to the sheet. Good deterministic starting point.
    let mut acc = [0.0; 3];
    for (x, w) in coords.iter().zip(weights) {
        for k in 0..3 {
            acc[k] += w * x[k];
        }
    }
    let q = form(&acc, &acc).max(1e-300).sqrt();
    let mut x = renormalize([acc[0] / q, acc[1] / q, acc[2] / q]);

    let objective = |x: &[f64; 3]| -> f64 {
        coords
            .iter()
            .zip(weights)
            .map(|(p, w)| {
                let d = dist(x, p);
                w * d * d
            })
            .sum()
    };
    let mut fx = objective(&x);
    let mut residual = f64::INFINITY;

    for _ in 0..max_iter {
        let mut g = [0.0; 3];
        for (p, w) in coords.iter().zip(weights) {
            let l = log(&x, p);
            for k in 0..3 {
                g[k] += w * l[k] / total;
            }
        }
        residual = tangent_norm(&g);
        if residual < tol {
            return Ok(NpcPoint::Hyperbolic(x));
        }
        if residual < 1e-7 {
            // near the optimum the fixed-point step contracts on its own
            // and objective differences are below float resolution, so the
            // line search would only stall on noise
            x = exp(&x, &g);
            continue;
        }
        let mut step = 1.0;
        loop {
            let scaled = [step * g[0], step * g[1], step * g[2]];
            let cand = exp(&x, &scaled);
            let fc = objective(&cand);
            if fc <= fx || step < 1e-8 {
                x = cand;
                fx = fc;
                break;
            }
            step *= 0.5;
        }
    }
    Err(Error::BarycenterDiverged {
        passes: max_iter,
        residual,
        last: Box::new(NpcPoint::Hyperbolic(x)),
    })
}
