//! Cut times, cut loci and the determinant of the exponential map.
//!
//! Geodesics stop minimizing at `t_cut = π_α / |ω|`. From a point off the
//! singular axis the cut locus is the vertical ray through `(-x0, y0)`
//! starting at distance `|x0|^{α+1} π_α / (α + 1)` from `y0`; from a point
//! on the axis it is the rest of the axis.
//!
//! In the parametrization `u0 = κ cos_α(φ)`, `v0 = κ σ|σ|^{α-1}` with
//! `σ = sin_α(φ) / x0` (speed `κ`), the Jacobian of `(t, φ) ↦ exp(t λ(φ))`
//! is `sgn(σ) D(t, φ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gentrig::{Alpha, TrigContext};
use crate::geodesics::{GeodesicSpec, Kind, Point};
use crate::power::odd_pow;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocusKind {
    Empty,
    YAxis,
    ReflectedRay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutInfo {
    pub cut_time: f64,
    pub locus_kind: LocusKind,
}

pub fn cut_info(spec: &GeodesicSpec) -> CutInfo {
    let locus_kind = match spec.kind {
        Kind::Line => LocusKind::Empty,
        Kind::Oscillating(_) if spec.q0.x == 0.0 => LocusKind::YAxis,
        Kind::Oscillating(_) => LocusKind::ReflectedRay,
    };
    CutInfo { cut_time: spec.cut_time(), locus_kind }
}

pub fn cut_time(spec: &GeodesicSpec) -> f64 {
    spec.cut_time()
}

const MEMBERSHIP_TOL: f64 = 1e-12;

/// Distance from `y0` at which the reflected ray starts.
pub fn cut_height(alpha: Alpha, x0: f64) -> f64 {
    let al = alpha.value();
    x0.abs().powf(al + 1.0) * alpha.pi() / (al + 1.0)
}

/// Whether `q` lies in the cut locus of `q0`. The point `q0` itself is not
/// in its own cut locus; boundary points are.
pub fn in_cut_locus(alpha: Alpha, q0: Point, q: Point) -> bool {
    if q0.x == 0.0 {
        return q.x.abs() <= MEMBERSHIP_TOL && (q.y - q0.y).abs() > MEMBERSHIP_TOL;
    }
    (q.x + q0.x).abs() <= MEMBERSHIP_TOL && (q.y - q0.y).abs() >= cut_height(alpha, q0.x) - MEMBERSHIP_TOL
}

fn check_args(ctx: &TrigContext, x0: f64, kappa: f64, t: f64, phi: f64) -> Result<(f64, f64)> {
    if !(x0.is_finite() && x0 != 0.0) {
        return Err(Error::Domain(format!("x0 must be finite and nonzero, got {x0}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    let (s, c) = ctx.sin_cos(phi);
    if s == 0.0 || !phi.is_finite() {
        return Err(Error::Domain(format!("phi = {phi} is a multiple of pi_alpha")));
    }
    Ok((s, c))
}

/// `D(t, φ)`. Where the bracket of the closed form cancels (small `t`, or `φ`
/// near `0` and `π_α`) it is obtained by integrating [`conjugate_det_dt`].
pub fn conjugate_det(ctx: &TrigContext, x0: f64, kappa: f64, t: f64, phi: f64) -> Result<f64> {
    let (s, c) = check_args(ctx, x0, kappa, t, phi)?;
    let al = ctx.a();
    let z = kappa * s / x0 * t + phi;
    let (sz, cz) = ctx.sin_cos(z);
    let pref = kappa / (s * s) * (x0 / s).abs().powf(al);
    let a = x0 * sz * c;
    let b = s * (x0 + kappa * t * c) * cz;
    if (a - b).abs() > 1e-6 * (a.abs() + b.abs()) {
        return Ok(pref * (a - b));
    }
    let q = quadrature::integrate(|tau| dt_unchecked(ctx, x0, kappa, tau, s, c, phi), 0.0, t, 0.0, 1e-13, 400);
    Ok(q.value)
}

fn dt_unchecked(ctx: &TrigContext, x0: f64, kappa: f64, t: f64, s: f64, c: f64, phi: f64) -> f64 {
    let al = ctx.a();
    let sz = ctx.sin(kappa * s / x0 * t + phi);
    al * kappa * kappa / x0 * (x0 + kappa * t * c) * (x0 / s).abs().powf(al) * odd_pow(sz, al - 1.0)
}

/// `∂_t D(t, φ)`.
pub fn conjugate_det_dt(ctx: &TrigContext, x0: f64, kappa: f64, t: f64, phi: f64) -> Result<f64> {
    let (s, c) = check_args(ctx, x0, kappa, t, phi)?;
    Ok(dt_unchecked(ctx, x0, kappa, t, s, c, phi))
}

/// The limits of `D(t, φ)` as `φ → 0` (`at_pi = false`) or `φ → π`
/// (`at_pi = true`) in the classical case `α = 1`.
pub fn conjugate_det_alpha_one_limit(x0: f64, kappa: f64, t: f64, at_pi: bool) -> f64 {
    let r = kappa * t / x0;
    let mid = if at_pi { -3.0 * r } else { 3.0 * r };
    x0.abs() * kappa * kappa * t / 3.0 * (r * r + mid + 3.0)
}
