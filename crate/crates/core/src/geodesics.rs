//! Normal geodesics of the α-Grushin plane.
//!
//! With Hamiltonian `H = (u^2 + v^2 x^{2α}) / 2` the flow is
//!
//! ```text
//! x' = u,   y' = v x^{2α},   u' = -α v^2 x^{2α-1},   v' = 0.
//! ```
//!
//! For `v ≠ 0` and `(x0, u0) ≠ (0, 0)` it is solved by
//! `x(t) = A sin_α(ωt + φ)`, `u(t) = Aω cos_α(ωt + φ)`, and `y` follows from
//! the integral of motion `κ^2 = u^2 + v^2 x^{2α}`:
//!
//! ```text
//! y(t) = y0 + (κ^2 t - x(t) u(t) + x0 u0) / ((α + 1) v0).
//! ```
//!
//! Otherwise the geodesic is the horizontal line `(x0 + u0 t, y0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gentrig::{Alpha, TrigContext};
use crate::ode;
use crate::power::{even_pow, odd_pow};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Covector {
    pub u: f64,
    pub v: f64,
}

impl Covector {
    pub fn new(u: f64, v: f64) -> Self {
        Covector { u, v }
    }

    fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Hamiltonian `(u^2 + v^2 x^{2α}) / 2`.
pub fn hamiltonian(alpha: Alpha, q: Point, lambda: Covector) -> f64 {
    0.5 * (lambda.u * lambda.u + lambda.v * lambda.v * even_pow(q.x, alpha.value()))
}

/// Amplitude, frequency and phase of an oscillating geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarParams {
    amplitude: f64,
    omega: f64,
    phi: f64,
}

impl PolarParams {
    /// Validates `A > 0`, `ω ≠ 0` and reduces `φ` into `[0, 2π_α)`.
    pub fn new(alpha: Alpha, amplitude: f64, omega: f64, phi: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::Domain(format!("amplitude must be positive, got {amplitude}")));
        }
        if !(omega.is_finite() && omega != 0.0) {
            return Err(Error::Domain(format!("omega must be finite and nonzero, got {omega}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("phase must be finite, got {phi}")));
        }
        let period = 2.0 * alpha.pi();
        let mut phi = phi.rem_euclid(period);
        if phi >= period {
            phi = 0.0;
        }
        Ok(PolarParams { amplitude, omega, phi })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Kind {
    Line,
    Oscillating(PolarParams),
}

/// A geodesic given by its initial point and covector, classified once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicSpec {
    pub alpha: Alpha,
    pub q0: Point,
    pub lambda0: Covector,
    pub kind: Kind,
}

/// `|v0|` is treated as zero below this scale.
pub fn is_line(alpha: Alpha, x0: f64, u0: f64, v0: f64) -> bool {
    (x0 == 0.0 && u0 == 0.0) || v0.abs() * (1.0 + x0.abs()).powf(alpha.value()) <= 1e-12 * (u0.abs() + 1.0)
}

impl GeodesicSpec {
    pub fn new(ctx: &TrigContext, q0: Point, lambda0: Covector) -> Result<Self> {
        if !(q0.is_finite() && lambda0.is_finite()) {
            return Err(Error::Domain("initial data must be finite".into()));
        }
        let alpha = ctx.alpha();
        let kind = if is_line(alpha, q0.x, lambda0.u, lambda0.v) {
            Kind::Line
        } else {
            Kind::Oscillating(to_polar(ctx, q0, lambda0)?)
        };
        Ok(GeodesicSpec { alpha, q0, lambda0, kind })
    }

    /// Constant speed `κ = sqrt(u0^2 + v0^2 x0^{2α})`.
    pub fn speed(&self) -> f64 {
        (2.0 * hamiltonian(self.alpha, self.q0, self.lambda0)).sqrt()
    }

    pub fn polar(&self) -> Option<PolarParams> {
        match self.kind {
            Kind::Line => None,
            Kind::Oscillating(p) => Some(p),
        }
    }

    /// `π_α / |ω|` for oscillating geodesics, `+∞` for lines.
    pub fn cut_time(&self) -> f64 {
        match self.kind {
            Kind::Line => f64::INFINITY,
            Kind::Oscillating(p) => self.alpha.pi() / p.omega.abs(),
        }
    }
}

/// `(A, ω, φ)` from initial data.
pub fn to_polar(ctx: &TrigContext, q0: Point, lambda0: Covector) -> Result<PolarParams> {
    let (x0, u0, v0) = (q0.x, lambda0.u, lambda0.v);
    if v0 == 0.0 || (x0 == 0.0 && u0 == 0.0) {
        return Err(Error::Degenerate(format!(
            "(x0, u0, v0) = ({x0}, {u0}, {v0}) is a straight line or a fixed point"
        )));
    }
    let al = ctx.a();
    let k2 = u0 * u0 + v0 * v0 * even_pow(x0, al);
    let ratio = k2 / (v0 * v0);
    let amplitude = ratio.powf(0.5 / al);
    let omega = v0 * ratio.powf((al - 1.0) / (2.0 * al));
    let s = x0 / amplitude;
    let c = v0.signum() * u0 / k2.sqrt();
    let phi = ctx.phase(s, c);
    PolarParams::new(ctx.alpha(), amplitude, omega, phi)
}

/// Initial point and covector of the geodesic with parameters `p` starting
/// at height `y0`.
pub fn from_polar(ctx: &TrigContext, y0: f64, p: PolarParams) -> (Point, Covector) {
    let (s, c) = ctx.sin_cos(p.phi);
    let a = p.amplitude;
    let v0 = p.omega * a.powf(1.0 - ctx.a());
    (Point::new(a * s, y0), Covector::new(a * p.omega * c, v0))
}

/// Geodesic state at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub point: Point,
    pub covector: Covector,
    /// `t` exceeds the cut time, so the curve is no longer minimizing there.
    pub post_cut: bool,
}

/// Closed-form evaluation of the geodesic at time `t`.
pub fn geodesic_point(ctx: &TrigContext, spec: &GeodesicSpec, t: f64) -> State {
    let (q0, l0) = (spec.q0, spec.lambda0);
    if t == 0.0 {
        return State { point: q0, covector: l0, post_cut: false };
    }
    match spec.kind {
        Kind::Line => State { point: Point::new(q0.x + l0.u * t, q0.y), covector: l0, post_cut: false },
        Kind::Oscillating(p) => {
            let (s, c) = ctx.sin_cos(p.omega * t + p.phi);
            let x = p.amplitude * s;
            let u = p.amplitude * p.omega * c;
            let k2 = 2.0 * hamiltonian(spec.alpha, q0, l0);
            let y = q0.y + (k2 * t - x * u + q0.x * l0.u) / ((ctx.a() + 1.0) * l0.v);
            State {
                point: Point::new(x, y),
                covector: Covector::new(u, l0.v),
                post_cut: t.abs() > spec.cut_time() * (1.0 + 1e-12),
            }
        }
    }
}

/// Integrates Hamilton's equations from `(q0, λ0)` up to time `t` with an
/// embedded Runge–Kutta 5(4) pair at tolerance `tol`.
pub fn integrate_hamiltonian(
    alpha: Alpha,
    q0: Point,
    lambda0: Covector,
    t: f64,
    tol: f64,
) -> Result<(Point, Covector)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let al = alpha.value();
    let v = lambda0.v;
    let rhs = |_: f64, s: &[f64; 3]| {
        let x = s[0];
        [s[2], v * even_pow(x, al), -al * v * v * odd_pow(x, al - 1.0)]
    };
    // x^{2α-2} is only finitely smooth at x = 0, so steps that would jump over
    // the axis are shortened to a fraction of the crossing time
    let clamp = |_: f64, s: &[f64; 3]| {
        let (x, u) = (s[0], s[2]);
        let crossing = x.abs() / (u.abs() + f64::MIN_POSITIVE);
        (0.5 * crossing).max(1e-3)
    };
    let opts = ode::Options {
        rtol: tol,
        atol: tol,
        max_step: if al.fract() == 0.0 { None } else { Some(&clamp) },
        max_steps: 1_000_000,
    };
    let (ys, _) = ode::solve(rhs, 0.0, [q0.x, q0.y, lambda0.u], &[t], &opts)?;
    let s = ys[0];
    Ok((Point::new(s[0], s[1]), Covector::new(s[2], v)))
}

/// `w - cos_α(w) sin_α(w) = (α + 1) ∫_0^w |sin_α|^{2α}`, evaluated without
/// cancellation for small `w`.
pub(crate) fn excess(ctx: &TrigContext, w: f64) -> f64 {
    let (s, c) = ctx.sin_cos(w);
    let direct = w - c * s;
    if direct.abs() > 1e-3 * w.abs() {
        return direct;
    }
    let al = ctx.a();
    let q = quadrature::integrate(|z| even_pow(ctx.sin(z), al), 0.0, w, 0.0, 1e-14, 200);
    (al + 1.0) * q.value
}

/// Endpoint at `t = 1` of the geodesic from `(x0, y0)` with covector
/// `(κ c, κ σ|σ|^{α-1})`, `σ = sin_α(φ) / x0`. Requires `x0 ≠ 0`.
/// Endpoint at `t = 1`, the frequency, and the rounding error of the
/// endpoint's `y`, which cancels as `v0 → 0`.
fn endpoint_kappa_phi(ctx: &TrigContext, q0: Point, kappa: f64, phi: f64) -> (Point, f64, f64) {
    let (s, c) = ctx.sin_cos(phi);
    let sigma = s / q0.x;
    let omega = kappa * sigma;
    let v0 = kappa * odd_pow(sigma, 0.5 * (ctx.a() - 1.0));
    let u0 = kappa * c;
    if s == 0.0 || v0 == 0.0 {
        return (Point::new(q0.x + u0, q0.y), omega, 0.0);
    }
    let (sz, cz) = ctx.sin_cos(omega + phi);
    let x = sz / sigma;
    let u = kappa * cz;
    let den = (ctx.a() + 1.0) * v0;
    let y = q0.y + (kappa * kappa - x * u + q0.x * u0) / den;
    let noise = 32.0 * f64::EPSILON * (kappa * kappa + (x * u).abs() + (q0.x * u0).abs()) / den.abs();
    (Point::new(x, y), omega, noise)
}

fn kappa_phi_covector(ctx: &TrigContext, x0: f64, kappa: f64, phi: f64) -> Covector {
    let (s, c) = ctx.sin_cos(phi);
    let sigma = s / x0;
    Covector::new(kappa * c, kappa * odd_pow(sigma, 0.5 * (ctx.a() - 1.0)))
}

/// Connects `q0` to `q1` by the minimizing geodesic on `[0, 1]`.
pub fn connect(ctx: &TrigContext, q0: Point, q1: Point) -> Result<GeodesicSpec> {
    connect_near(ctx, q0, q1, None)
}

/// As [`connect`], trying the covector `guess` as the first Newton seed.
pub fn connect_near(ctx: &TrigContext, q0: Point, q1: Point, guess: Option<Covector>) -> Result<GeodesicSpec> {
    if !(q0.is_finite() && q1.is_finite()) {
        return Err(Error::Domain("endpoints must be finite".into()));
    }
    if q0 == q1 {
        return Err(Error::Domain("endpoints coincide".into()));
    }
    if crate::cutlocus::in_cut_locus(ctx.alpha(), q0, q1) {
        return Err(Error::CutLocus(format!("({}, {}) lies in the cut locus of ({}, {})", q1.x, q1.y, q0.x, q0.y)));
    }
    let dy = q1.y - q0.y;
    if dy == 0.0 {
        return GeodesicSpec::new(ctx, q0, Covector::new(q1.x - q0.x, 0.0));
    }
    if q0.x == 0.0 {
        return connect_singular(ctx, q0, q1);
    }
    connect_shooting(ctx, q0, q1, guess)
}

/// From a point of the singular axis the phase is `0` or `π_α` and the
/// frequency solves `excess(w) / sin_α(w)^{α+1} = (α + 1)|Δy| / |x1|^{α+1}`.
fn connect_singular(ctx: &TrigContext, q0: Point, q1: Point) -> Result<GeodesicSpec> {
    let al = ctx.a();
    let p = ctx.pi();
    let dy = q1.y - q0.y;
    let target = (al + 1.0) * dy.abs() / q1.x.abs().powf(al + 1.0);
    let g = |w: f64| excess(ctx, w) / ctx.sin(w).powf(al + 1.0);
    let (mut lo, mut hi) = (0.0, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = 0.5 * (lo + hi);
    let amplitude = q1.x.abs() / ctx.sin(w);
    let omega = dy.signum() * w;
    let phi = if q1.x.signum() == omega.signum() { 0.0 } else { p };
    let params = PolarParams::new(ctx.alpha(), amplitude, omega, phi)?;
    let (_, lambda0) = from_polar(ctx, q0.y, params);
    let lambda0 = Covector::new(lambda0.u, lambda0.v);
    Ok(GeodesicSpec { alpha: ctx.alpha(), q0, lambda0, kind: Kind::Oscillating(params) })
}

const SHOOT_PHI_NODES: usize = 64;
const SHOOT_OMEGA_NODES: usize = 32;
const SHOOT_TOL: f64 = 1e-10;
const SHOOT_MAX_ITER: usize = 100;

fn connect_shooting(ctx: &TrigContext, q0: Point, q1: Point, guess: Option<Covector>) -> Result<GeodesicSpec> {
    let p = ctx.pi();
    let x0 = q0.x;
    let scale = 1.0 + x0.abs().max(q1.x.abs()).max((q1.y - q0.y).abs());
    let residual = |kappa: f64, phi: f64| -> ([f64; 2], f64, f64) {
        let (e, omega, noise) = endpoint_kappa_phi(ctx, q0, kappa, phi);
        ([e.x - q1.x, e.y - q1.y], omega, noise)
    };
    // Newton stops at SHOOT_TOL or at the rounding level of the endpoint
    let tol = |noise: f64| SHOOT_TOL.max(noise / scale);
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs()) / scale;

    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    let mut push_seed = |g: Covector| {
        let kappa = (g.u * g.u + g.v * g.v * even_pow(x0, ctx.a())).sqrt();
        if kappa > 0.0 && g.v != 0.0 {
            let sigma = g.v.signum() * (g.v.abs() / kappa).powf(1.0 / ctx.a());
            let phi = ctx.phase(sigma * x0, g.u / kappa);
            seeds.push((0.0, kappa, phi));
        }
    };
    if let Some(g) = guess {
        push_seed(g);
    }
    if !guess.is_some_and(|g| g.v != 0.0) {
        // near a line, Δy ≈ v ∫_0^1 (x0 + u t)^{2α} dt
        let al = ctx.a();
        let u = q1.x - x0;
        let mass =
            if u == 0.0 { even_pow(x0, al) } else { (odd_pow(q1.x, al) - odd_pow(x0, al)) / ((2.0 * al + 1.0) * u) };
        if mass > 0.0 {
            push_seed(Covector::new(u, (q1.y - q0.y) / mass));
        }
    }
    // the seed grid is only built when the guess fails
    let grid = || {
        let mut grid = Vec::with_capacity(SHOOT_PHI_NODES * SHOOT_OMEGA_NODES);
        for j in 0..SHOOT_PHI_NODES {
            let phi = 2.0 * p * (j as f64 + 0.5) / SHOOT_PHI_NODES as f64;
            let s = ctx.sin(phi);
            for i in 0..SHOOT_OMEGA_NODES {
                let w = p * (i as f64 + 0.5) / SHOOT_OMEGA_NODES as f64;
                let kappa = w * (x0 / s).abs();
                let (r, _, _) = residual(kappa, phi);
                grid.push((norm(r), kappa, phi));
            }
        }
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        grid.into_iter().take(12)
    };

    let mut best = (f64::INFINITY, 0usize);
    let lazy_grid = std::iter::once(()).flat_map(|_| grid());
    for (_, k_start, phi_start) in seeds.into_iter().chain(lazy_grid) {
        let (mut kappa, mut phi) = (k_start, phi_start);
        let (mut r, mut omega, mut noise) = residual(kappa, phi);
        let mut rn = norm(r);
        let mut iterations = 0;
        while rn > tol(noise) && iterations < SHOOT_MAX_ITER {
            iterations += 1;
            let hk = 1e-7 * kappa.max(1e-3);
            let hp = 1e-7;
            let (rk1, _, _) = residual(kappa + hk, phi);
            let (rk0, _, _) = residual(kappa - hk, phi);
            let (rp1, _, _) = residual(kappa, phi + hp);
            let (rp0, _, _) = residual(kappa, phi - hp);
            let j = [
                [(rk1[0] - rk0[0]) / (2.0 * hk), (rp1[0] - rp0[0]) / (2.0 * hp)],
                [(rk1[1] - rk0[1]) / (2.0 * hk), (rp1[1] - rp0[1]) / (2.0 * hp)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !det.is_finite() || det == 0.0 {
                break;
            }
            let dk = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
            let dp = (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let kn = kappa - lambda * dk;
                let pn = phi - lambda * dp;
                if kn > 0.0 {
                    let (rn_vec, om, nz) = residual(kn, pn);
                    let n = norm(rn_vec);
                    if n < rn {
                        kappa = kn;
                        phi = pn;
                        r = rn_vec;
                        rn = n;
                        omega = om;
                        noise = nz;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if rn < best.0 {
            best = (rn, iterations);
        }
        if rn <= tol(noise) && omega.abs() <= p * (1.0 + 1e-9) {
            let lambda0 = kappa_phi_covector(ctx, x0, kappa, phi);
            return GeodesicSpec::new(ctx, q0, lambda0);
        }
    }
    Err(Error::NoConvergence {
        iterations: best.1,
        residual: best.0,
        detail: format!("no minimizing geodesic found from ({}, {}) to ({}, {})", q0.x, q0.y, q1.x, q1.y),
    })
}

/// Partial derivatives of `(A, ω, φ)` with respect to `(x0, u0, v0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamDerivatives {
    pub a_x0: f64,
    pub a_u0: f64,
    pub a_v0: f64,
    pub omega_x0: f64,
    pub omega_u0: f64,
    pub omega_v0: f64,
    pub phi_x0: f64,
    pub phi_u0: f64,
    pub phi_v0: f64,
}

pub fn param_derivatives(ctx: &TrigContext, q0: Point, lambda0: Covector) -> Result<ParamDerivatives> {
    let p = to_polar(ctx, q0, lambda0)?;
    let al = ctx.a();
    let (s, c) = ctx.sin_cos(p.phi);
    if s == 0.0 {
        return Err(Error::DivisionGuard("A_x0 and omega_x0 divide by sin_alpha(phi) = 0".into()));
    }
    let (a, w, v0) = (p.amplitude, p.omega, lambda0.v);
    let one_minus_c2 = (1.0 - c * c).max(0.0);
    Ok(ParamDerivatives {
        a_x0: one_minus_c2 / s,
        a_u0: c / (al * w),
        a_v0: -c * c * a / (al * v0),
        omega_x0: (al - 1.0) * (w / a) * one_minus_c2 / s,
        omega_u0: (al - 1.0) * c / (al * a),
        omega_v0: (w / v0) * (1.0 - (al - 1.0) / al * c * c),
        phi_x0: c / a,
        phi_u0: -s / (al * w * a),
        phi_v0: s * c / (al * v0),
    })
}
