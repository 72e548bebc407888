//! Jacobian determinants of the exponential map and distortion coefficients.
//!
//! Along a minimizing geodesic `β_t = J(t) / J(1)` where, for `v0 ≠ 0`,
//!
//! ```text
//! J(t) = t (u0 x(t) - u(t) (t u0 + x0)) / (α v0^2)
//!      = t ∫_0^t x(τ)^{2α-1} (x0 + u0 τ) dτ.
//! ```
//!
//! The second form is used whenever the first one cancels. In polar
//! coordinates `J(t) ∝ t [cos_α(φ) sin_α(ωt+φ) - cos_α(ωt+φ)(ωt cos_α(φ) + sin_α(φ))]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gentrig::{Alpha, TrigContext};
use crate::geodesics::{self, Covector, GeodesicSpec, Kind, Point, PolarParams};
use crate::power::{even_pow, odd_pow};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Generic,
    Horizontal,
    Singular,
    AlphaOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionResult {
    pub beta: f64,
    pub branch: Branch,
    pub t: f64,
}

/// `J(t)` from the initial data and the state `(xt, ut)` at time `t`.
pub fn jacobian_xuv(alpha: Alpha, t: f64, x0: f64, u0: f64, v0: f64, xt: f64, ut: f64) -> Result<f64> {
    if v0 == 0.0 {
        return Err(Error::Degenerate("jacobian_xuv needs v0 != 0".into()));
    }
    Ok(t * (u0 * xt - ut * (t * u0 + x0)) / (alpha.value() * v0 * v0))
}

/// `J(t)` in polar coordinates, without the `t`-independent factor
/// `A^{2α} / (α ω)`.
pub fn jacobian_polar(ctx: &TrigContext, t: f64, p: PolarParams) -> f64 {
    let (s, c) = ctx.sin_cos(p.phi());
    let wt = p.omega() * t;
    let (sz, cz) = ctx.sin_cos(wt + p.phi());
    t * (c * sz - cz * (wt * c + s))
}

/// Same normalization as [`jacobian_polar`], as the integral
/// `α ω t ∫_0^t sin_α(ωτ+φ)^{2α-1} (sin_α(φ) + ω τ cos_α(φ)) dτ`.
pub fn jacobian_polar_integral(ctx: &TrigContext, t: f64, p: PolarParams) -> f64 {
    let al = ctx.a();
    let (s, c) = ctx.sin_cos(p.phi());
    let w = p.omega();
    let q = quadrature::integrate(
        |tau| odd_pow(ctx.sin(w * tau + p.phi()), al - 1.0) * (s + w * tau * c),
        0.0,
        t,
        0.0,
        1e-13,
        400,
    );
    al * w * t * q.value
}

/// Well-conditioned `J(t)` of the geodesic `spec`, same normalization as
/// [`jacobian_xuv`].
pub fn jacobian(ctx: &TrigContext, spec: &GeodesicSpec, t: f64) -> Result<f64> {
    let (x0, u0, v0) = (spec.q0.x, spec.lambda0.u, spec.lambda0.v);
    if v0 == 0.0 {
        return Err(Error::Degenerate("jacobian needs v0 != 0".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let st = geodesics::geodesic_point(ctx, spec, t);
    let (xt, ut) = (st.point.x, st.covector.u);
    let a = u0 * xt;
    let b = ut * (t * u0 + x0);
    // x(t) carries an absolute error proportional to the amplitude
    let amp = spec.polar().map_or(0.0, |p| p.amplitude());
    if (a - b).abs() > 1e-6 * (u0.abs() * amp.max(xt.abs()) + b.abs()) {
        return jacobian_xuv(spec.alpha, t, x0, u0, v0, xt, ut);
    }
    let al = ctx.a();
    let q = quadrature::integrate(
        |tau| {
            let x = geodesics::geodesic_point(ctx, spec, tau).point.x;
            odd_pow(x, al - 1.0) * (x0 + u0 * tau)
        },
        0.0,
        t,
        0.0,
        1e-13,
        400,
    );
    Ok(t * q.value)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `β_t(q0, q)` along the minimizing geodesic from `q0` to `q`.
pub fn beta(ctx: &TrigContext, q0: Point, q: Point, t: f64) -> Result<DistortionResult> {
    check_t(t)?;
    let spec = geodesics::connect(ctx, q0, q)?;
    beta_along(ctx, &spec, t)
}

/// `β_t` along a geodesic already known to be minimizing on `[0, 1]`.
pub fn beta_along(ctx: &TrigContext, spec: &GeodesicSpec, t: f64) -> Result<DistortionResult> {
    check_t(t)?;
    let alpha = ctx.alpha();
    match spec.kind {
        Kind::Line => Ok(DistortionResult {
            beta: beta_horizontal(alpha, t, spec.q0.x, spec.lambda0.u)?,
            branch: Branch::Horizontal,
            t,
        }),
        Kind::Oscillating(p) if spec.q0.x == 0.0 => {
            Ok(DistortionResult { beta: beta_singular(ctx, t, p.omega())?, branch: Branch::Singular, t })
        }
        Kind::Oscillating(_) => {
            let beta = if t == 1.0 { 1.0 } else { jacobian(ctx, spec, t)? / jacobian(ctx, spec, 1.0)? };
            let branch = if (alpha.value() - 1.0).abs() <= 1e-12 { Branch::AlphaOne } else { Branch::Generic };
            Ok(DistortionResult { beta, branch, t })
        }
    }
}

/// `β_t` for two points on the same horizontal line.
pub fn beta_horizontal(alpha: Alpha, t: f64, x0: f64, u0: f64) -> Result<f64> {
    let al = alpha.value();
    let num = odd_pow(u0 * t + x0, al) - odd_pow(x0, al);
    let den = odd_pow(u0 + x0, al) - odd_pow(x0, al);
    if den == 0.0 {
        return Err(Error::Degenerate("horizontal distortion needs u0 != 0".into()));
    }
    Ok(t * num / den)
}

/// `sin_α(z) - z cos_α(z) = α ∫_0^z ζ |sin_α ζ|^{2α-2} sin_α ζ dζ`.
pub fn singular_h(ctx: &TrigContext, z: f64) -> f64 {
    let (s, c) = ctx.sin_cos(z);
    let direct = s - z * c;
    if direct.abs() > 1e-3 * s.abs() {
        return direct;
    }
    let al = ctx.a();
    let q = quadrature::integrate(|w| w * odd_pow(ctx.sin(w), al - 1.0), 0.0, z, 0.0, 1e-14, 200);
    al * q.value
}

/// `β_t` from a point of the singular axis: `t h(ωt) / h(ω)`.
pub fn beta_singular(ctx: &TrigContext, t: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::Domain(format!("omega must be nonzero, got {omega}")));
    }
    if omega.abs() > ctx.pi() {
        return Err(Error::Domain(format!("|omega| = {} exceeds pi_alpha", omega.abs())));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * singular_h(ctx, omega * t) / singular_h(ctx, omega))
}

/// `(∂x(t)/∂v0, ∂u(t)/∂v0)`.
pub fn aux_vderivatives(ctx: &TrigContext, t: f64, x0: f64, u0: f64, v0: f64) -> Result<(f64, f64)> {
    if v0 == 0.0 {
        return Err(Error::Degenerate("v-derivatives need v0 != 0".into()));
    }
    let spec = GeodesicSpec::new(ctx, Point::new(x0, 0.0), Covector::new(u0, v0))?;
    let st = geodesics::geodesic_point(ctx, &spec, t);
    let (x, u) = (st.point.x, st.covector.u);
    let al = ctx.a();
    let big_x0 = even_pow(x0, al);
    let k2 = u0 * u0 + v0 * v0 * big_x0;
    let xv = (t * u * (al * big_x0 * v0 * v0 + u0 * u0) + u * u0 * x0 - u0 * u0 * x) / (al * v0 * k2);
    let uv = v0 * (big_x0 * u - (t * (u0 * u0 + al * v0 * v0 * big_x0) + u0 * x0) * odd_pow(x, al - 1.0)) / k2;
    Ok((xv, uv))
}

fn endpoint(ctx: &TrigContext, x0: f64, u0: f64, v0: f64, t: f64) -> [f64; 2] {
    let spec = GeodesicSpec::new(ctx, Point::new(x0, 0.0), Covector::new(u0, v0)).expect("finite initial data");
    let p = geodesics::geodesic_point(ctx, &spec, t).point;
    [p.x, p.y]
}

fn fd_det(ctx: &TrigContext, t: f64, x0: f64, u0: f64, v0: f64, h: f64) -> f64 {
    let up = endpoint(ctx, x0, u0 + h, v0, t);
    let um = endpoint(ctx, x0, u0 - h, v0, t);
    let vp = endpoint(ctx, x0, u0, v0 + h, t);
    let vm = endpoint(ctx, x0, u0, v0 - h, t);
    let du = [(up[0] - um[0]) / (2.0 * h), (up[1] - um[1]) / (2.0 * h)];
    let dv = [(vp[0] - vm[0]) / (2.0 * h), (vp[1] - vm[1]) / (2.0 * h)];
    du[0] * dv[1] - du[1] * dv[0]
}

/// Central-difference determinant of `(u0, v0) ↦ (x(t), y(t))` with one
/// Richardson step.
pub fn fd_jacobian_oracle(ctx: &TrigContext, t: f64, x0: f64, u0: f64, v0: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let coarse = fd_det(ctx, t, x0, u0, v0, h);
    let fine = fd_det(ctx, t, x0, u0, v0, 0.5 * h);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Outcome of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub value: f64,
    pub std_error: f64,
    pub used: usize,
    /// Sample points that could not be connected (for example points of the
    /// cut locus) and were left out.
    pub excluded: usize,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Estimates `m(Z_t(q0, B_r(q))) / m(B_r(q))`.
///
/// The ball is covered by a randomly shifted Halton sequence (rejection from
/// the bounding square). Each sample point `p` is connected to `q0` and the
/// area element of `p ↦ γ_p(t)` is obtained from finite-difference
/// determinants of the exponential map at times `t` and `1`, so the ratio of
/// areas is the sample mean of those local ratios.
pub fn beta_monte_carlo(
    ctx: &TrigContext,
    q0: Point,
    q: Point,
    t: f64,
    r: f64,
    n: usize,
    seed: u64,
) -> Result<MonteCarlo> {
    check_t(t)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let centre = geodesics::connect(ctx, q0, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 2] = [rng.gen(), rng.gen()];

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    let mut index = 1u64;
    while used + excluded < n {
        let hx = (radical_inverse(index, 2) + shift[0]).fract();
        let hy = (radical_inverse(index, 3) + shift[1]).fract();
        index += 1;
        let (dx, dy) = (2.0 * hx - 1.0, 2.0 * hy - 1.0);
        if dx * dx + dy * dy > 1.0 {
            continue;
        }
        let p = Point::new(q.x + r * dx, q.y + r * dy);
        let local =
            geodesics::connect_near(ctx, q0, p, Some(centre.lambda0)).and_then(|spec| local_ratio(ctx, &spec, t));
        match local {
            Ok(v) if v.is_finite() => {
                sum += v;
                sum_sq += v * v;
                used += 1;
            }
            _ => excluded += 1,
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("every sample point was excluded".into()));
    }
    let mean = sum / used as f64;
    let var = (sum_sq / used as f64 - mean * mean).max(0.0);
    Ok(MonteCarlo { value: mean, std_error: (var / used as f64).sqrt(), used, excluded })
}

fn local_ratio(ctx: &TrigContext, spec: &GeodesicSpec, t: f64) -> Result<f64> {
    let (x0, u0, v0) = (spec.q0.x, spec.lambda0.u, spec.lambda0.v);
    let h = 1e-5 * (1.0 + u0.abs().max(v0.abs()));
    if t == 1.0 {
        return Ok(1.0);
    }
    Ok((fd_det(ctx, t, x0, u0, v0, h) / fd_det(ctx, 1.0, x0, u0, v0, h)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_examples() {
        let a2 = Alpha::new(2.0).unwrap();
        let b = beta_horizontal(a2, 0.5, 1.0, 1.0).unwrap();
        assert!((b - 0.5 * (1.5f64.powi(5) - 1.0) / 31.0).abs() < 1e-15);
        let a1 = Alpha::new(1.0).unwrap();
        assert!((beta_horizontal(a1, 0.5, 1.0, 1.0).unwrap() - 0.169642857142857).abs() < 1e-14);
        assert_eq!(beta_horizontal(a2, 1.0, 0.3, -0.7).unwrap(), 1.0);
        assert!(matches!(beta_horizontal(a2, 0.5, 1.0, 0.0), Err(Error::Degenerate(_))));
        let b = beta_horizontal(a2, 0.4, 0.0, 2.0).unwrap();
        assert!((b - 0.4f64.powi(6)).abs() < 1e-15);
    }

    #[test]
    fn singular_domain_and_endpoint() {
        let ctx = TrigContext::new(2.0).unwrap();
        assert!(beta_singular(&ctx, 0.5, 0.0).is_err());
        assert!(beta_singular(&ctx, 0.5, 3.0).is_err());
        assert_eq!(beta_singular(&ctx, 1.0, 1.3).unwrap(), 1.0);
        assert_eq!(beta_singular(&ctx, 0.0, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn jacobian_vanishes_at_zero() {
        let ctx = TrigContext::new(1.5).unwrap();
        let a = ctx.alpha();
        assert_eq!(jacobian_xuv(a, 0.0, 0.4, 0.3, 0.8, 0.4, 0.3).unwrap(), 0.0);
        let p = geodesics::to_polar(&ctx, Point::new(0.4, 0.0), Covector::new(0.3, 0.8)).unwrap();
        assert_eq!(jacobian_polar(&ctx, 0.0, p), 0.0);
        assert!(jacobian_xuv(a, 0.5, 0.4, 0.3, 0.0, 0.4, 0.3).is_err());
    }

    #[test]
    fn v_derivatives_vanish_at_zero() {
        let ctx = TrigContext::new(2.5).unwrap();
        let (xv, uv) = aux_vderivatives(&ctx, 0.0, 0.6, -0.4, 1.2).unwrap();
        assert!(xv.abs() < 1e-15 && uv.abs() < 1e-15);
        assert!(aux_vderivatives(&ctx, 0.3, 0.6, -0.4, 0.0).is_err());
    }

    #[test]
    fn halton_radical_inverse() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }
}
