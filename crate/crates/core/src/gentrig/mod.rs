//! Generalized `(p, q)`-trigonometric functions, specialised to `p = 2`,
//! `q = 2α` for the α-Grushin plane.
//!
//! `sin_{p,q}` is the inverse of
//!
//! ```text
//! F_{p,q}(x) = ∫_0^x (1 - t^q)^{-1/p} dt,    0 ≤ x ≤ 1,
//! ```
//!
//! on `[0, π_{p,q}/2]`, where `π_{p,q} = 2 F_{p,q}(1)`. It is reflected about
//! `π_{p,q}/2`, extended as an odd function and then `2π_{p,q}`-periodically,
//! which makes it the global solution of `f'' = -α |f|^{2α-2} f`,
//! `f(0) = 0`, `f'(0) = 1`. The cosine is its derivative and satisfies
//! `|sin|^{2α} + cos^2 = 1`.
//!
//! The ground truth for `π_{p,q}` is the defining integral, evaluated by
//! adaptive quadrature after a change of variables that removes the
//! singularity at `t = 1`. Note that this equals `(2/q) B(1/q, 1 - 1/p)`.

mod ibeta;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode;
use crate::power::odd_pow;
use crate::quadrature;

use ibeta::ibeta_pair;

/// Exponents of a generalized trigonometric family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PQ {
    p: f64,
    q: f64,
}

impl PQ {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && p > 1.0 && q > 1.0) {
            return Err(Error::Domain(format!("(p, q) = ({p}, {q}) needs p > 1 and q > 1")));
        }
        Ok(PQ { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// `π_{p,q} = 2 ∫_0^1 (1 - t^q)^{-1/p} dt`.
pub fn pi_pq(pq: PQ) -> f64 {
    let PQ { p, q } = pq;
    let tol = 1e-15;
    // [0, 1/2]: the integrand is bounded, merely C^2 at t = 0 for fractional q
    let head = quadrature::integrate(|t| (-(-t.powf(q)).ln_1p() / p).exp(), 0.0, 0.5, tol, tol, 400);
    // [1/2, 1]: substitute 1 - t = w^m with m = p/(p - 1); the integrand
    // becomes m ((1 - t^q) / w^m)^{-1/p}, bounded at w = 0
    let m = p / (p - 1.0);
    let w_end = 0.5f64.powf(1.0 / m);
    let tail = quadrature::integrate(
        |w| {
            let wm = w.powf(m);
            let one_minus_tq = -(q * (-wm).ln_1p()).exp_m1();
            m * (one_minus_tq / wm).powf(-1.0 / p)
        },
        0.0,
        w_end,
        tol,
        tol,
        400,
    );
    2.0 * (head.value + tail.value)
}

/// The incomplete integral `F_{p,q}(x) = ∫_0^x (1 - t^q)^{-1/p} dt`.
pub fn f_pq(pq: PQ, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("F_pq needs x in [0, 1], got {x}")));
    }
    let half_pi = 0.5 * pi_pq(pq);
    let (a, b) = (1.0 / pq.q, 1.0 - 1.0 / pq.p);
    let z = x.powf(pq.q);
    let (lower, _) = ibeta_pair(a, b, z, -(pq.q * x.ln()).exp_m1(), pq.q * half_pi);
    Ok(half_pi * lower)
}

/// The structure parameter `α ≥ 1` together with `π_α = π_{2,2α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alpha {
    value: f64,
    pi: f64,
}

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::Domain(format!("alpha must be a finite real >= 1, got {alpha}")));
        }
        let pi = pi_pq(PQ { p: 2.0, q: 2.0 * alpha });
        Ok(Alpha { value: alpha, pi })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    /// `π_α`, the half period of `sin_α`.
    #[inline]
    pub fn pi(&self) -> f64 {
        self.pi
    }
}

/// Evaluation route for `sin_α` / `cos_α` on the reduced interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Newton inversion of the incomplete integral, seeded by the cached
    /// interpolant.
    #[default]
    Inversion,
    /// Adaptive Runge–Kutta integration of `f'' = -α |f|^{2α-2} f` at
    /// tolerance 1e-12. Slow; kept as an independent check.
    Ode,
}

/// Cubic Hermite table on a uniform grid starting at zero.
#[derive(Debug, Clone)]
struct Hermite {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Hermite {
    fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 2;
        let pos = (x / self.step).max(0.0);
        let i = (pos as usize).min(last);
        let t = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }
}

const INTERP_NODES: usize = 1024;

/// Immutable evaluation context for `sin_α` and `cos_α`.
///
/// Holds the constants of the incomplete beta representation
/// `F(s) = (π_α/2) I_{s^{2α}}(1/(2α), 1/2)` and two cubic Hermite tables used
/// as Newton seeds: `sin_α` on `[0, x_split]` and `cos_α` as a function of the
/// distance to `π_α/2` beyond it. `x_split` is where `|sin|^{2α} = cos^2 = 1/2`.
#[derive(Debug, Clone)]
pub struct TrigContext {
    alpha: Alpha,
    backend: Backend,
    a: f64,
    beta: f64,
    x_split: f64,
    sin_table: Hermite,
    cos_table: Hermite,
    interp_error: f64,
}

impl TrigContext {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self::from_alpha(Alpha::new(alpha)?))
    }

    pub fn from_alpha(alpha: Alpha) -> Self {
        let al = alpha.value;
        let a = 1.0 / (2.0 * al);
        let half = 0.5 * alpha.pi;
        let mut ctx = TrigContext {
            alpha,
            backend: Backend::Inversion,
            a,
            beta: al * alpha.pi,
            x_split: 0.0,
            sin_table: Hermite { step: 1.0, values: vec![0.0, 0.0], slopes: vec![0.0, 0.0] },
            cos_table: Hermite { step: 1.0, values: vec![0.0, 0.0], slopes: vec![0.0, 0.0] },
            interp_error: f64::INFINITY,
        };
        ctx.x_split = half * ibeta_pair(a, 0.5, 0.5, 0.5, ctx.beta).0;

        let n = INTERP_NODES;
        let sin_step = ctx.x_split / n as f64;
        let cos_step = (half - ctx.x_split) / n as f64;
        let mut sin_table = Hermite { step: sin_step, values: vec![], slopes: vec![] };
        let mut cos_table = Hermite { step: cos_step, values: vec![], slopes: vec![] };
        for i in 0..=n {
            let (s, c) = ctx.solve_sin(i as f64 * sin_step, None);
            sin_table.values.push(s);
            sin_table.slopes.push(c);
            let d = i as f64 * cos_step;
            let (s, c) = ctx.solve_cos(d, None);
            cos_table.values.push(c);
            cos_table.slopes.push(al * odd_pow(s, al - 1.0));
        }
        // measure the seed quality at the cell midpoints
        let mut err: f64 = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * sin_step;
            err = err.max((sin_table.eval(x) - ctx.solve_sin(x, None).0).abs());
            let d = (i as f64 + 0.5) * cos_step;
            err = err.max((cos_table.eval(d) - ctx.solve_cos(d, None).1).abs());
        }
        ctx.sin_table = sin_table;
        ctx.cos_table = cos_table;
        ctx.interp_error = err;
        ctx
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    #[inline]
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Shorthand for `self.alpha().value()`.
    #[inline]
    pub fn a(&self) -> f64 {
        self.alpha.value
    }

    #[inline]
    pub fn pi(&self) -> f64 {
        self.alpha.pi
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Node spacing of the two seed tables.
    pub fn interp_spacing(&self) -> (f64, f64) {
        (self.sin_table.step, self.cos_table.step)
    }

    /// Largest deviation of the seed tables from direct inversion observed at
    /// construction.
    pub fn interp_error(&self) -> f64 {
        self.interp_error
    }

    /// Evaluates the seed interpolant of `sin_α` on `[0, π_α/2]` without any
    /// Newton correction.
    pub fn interp_sin(&self, x: f64) -> f64 {
        let half = 0.5 * self.pi();
        let x = x.clamp(0.0, half);
        if x <= self.x_split {
            self.sin_table.eval(x)
        } else {
            let c = self.cos_table.eval(half - x).max(0.0);
            ((-c * c).ln_1p() * self.a).exp()
        }
    }

    /// `F(s) = ∫_0^s (1 - t^{2α})^{-1/2} dt` for `s` in `[0, 1]`, returned
    /// together with `π_α/2 - F(s)`.
    fn f_pair(&self, s: f64) -> (f64, f64) {
        let half = 0.5 * self.pi();
        let z = s.powf(2.0 * self.a());
        let w = -(2.0 * self.a() * s.ln()).exp_m1();
        let (lo, up) = ibeta_pair(self.a, 0.5, z, w, self.beta);
        (half * lo, half * up)
    }

    /// `G(c) = π_α/2 - F(s)` expressed through `c = (1 - s^{2α})^{1/2}`.
    fn g_pair(&self, c: f64) -> (f64, f64) {
        let half = 0.5 * self.pi();
        let w = c * c;
        let (up, lo) = ibeta_pair(0.5, self.a, w, 1.0 - w, self.beta);
        (half * up, half * lo)
    }

    /// Solves `F(s) = x` for `x ∈ [0, x_split]`; returns `(s, c)`.
    fn solve_sin(&self, x: f64, seed: Option<f64>) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        let q = 2.0 * self.a();
        let s_max = 0.5f64.powf(1.0 / q);
        let (mut lo, mut hi) = (0.0, s_max);
        let mut s = seed.unwrap_or(x).clamp(0.0, s_max);
        for _ in 0..100 {
            let (f, _) = self.f_pair(s);
            let r = f - x;
            if r > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let dfds = (-0.5 * (-s.powf(q)).ln_1p()).exp();
            let mut next = s - r / dfds;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - s).abs();
            s = next;
            if step <= 1e-9 * s.max(1e-300) {
                if step > 1e-17 * s {
                    // one more correction once inside the quadratic basin
                    let (f, _) = self.f_pair(s);
                    s -= (f - x) * (1.0 - s.powf(q)).sqrt();
                }
                break;
            }
        }
        let c = (0.5 * (-s.powf(q)).ln_1p()).exp();
        (s, c)
    }

    /// Solves `G(c) = d` for `d = π_α/2 - x ∈ [0, π_α/2 - x_split]`;
    /// returns `(s, c)`.
    fn solve_cos(&self, d: f64, seed: Option<f64>) -> (f64, f64) {
        if d <= 0.0 {
            return (1.0, 0.0);
        }
        let al = self.a();
        let c_max = 0.5f64.sqrt();
        let (mut lo, mut hi) = (0.0, c_max);
        let mut c = seed.unwrap_or(al * d).clamp(0.0, c_max);
        let slope = |c: f64| ((-c * c).ln_1p() * (self.a - 1.0)).exp() / al;
        for _ in 0..100 {
            let (g, _) = self.g_pair(c);
            let r = g - d;
            if r > 0.0 {
                hi = c;
            } else {
                lo = c;
            }
            let mut next = c - r / slope(c);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - c).abs();
            c = next;
            if step <= 1e-9 * c.max(1e-300) {
                if step > 1e-17 * c {
                    let (g, _) = self.g_pair(c);
                    c -= (g - d) / slope(c);
                }
                break;
            }
        }
        let s = ((-c * c).ln_1p() * self.a).exp();
        (s, c)
    }

    /// `(sin_α, cos_α)` on `[0, π_α/2]`, given `x` and `d = π_α/2 - x`.
    fn reduced(&self, x: f64, d: f64) -> (f64, f64) {
        match self.backend {
            Backend::Inversion => {
                if x <= self.x_split {
                    self.solve_sin(x, Some(self.sin_table.eval(x)))
                } else {
                    self.solve_cos(d, Some(self.cos_table.eval(d)))
                }
            }
            Backend::Ode => self.reduced_ode(x),
        }
    }

    fn reduced_ode(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        let al = self.a();
        let rhs = |_: f64, y: &[f64; 2]| [y[1], -al * odd_pow(y[0], al - 1.0)];
        let (ys, _) = ode::solve(rhs, 0.0, [0.0, 1.0], &[x], &ode::Options::with_tol(1e-12))
            .expect("the generalized sine ODE is globally Lipschitz on the reduced interval");
        (ys[0][0], ys[0][1])
    }

    /// `(sin_α(x), cos_α(x))` for any real `x`.
    pub fn sin_cos(&self, x: f64) -> (f64, f64) {
        let p = self.pi();
        let half = 0.5 * p;
        let mut r = x.rem_euclid(2.0 * p);
        let mut sign = 1.0;
        if r >= p {
            r -= p;
            sign = -1.0;
        }
        let (s, c) = if r <= half {
            self.reduced(r, half - r)
        } else {
            let (s, c) = self.reduced(p - r, r - half);
            (s, -c)
        };
        (sign * s, sign * c)
    }

    pub fn sin(&self, x: f64) -> f64 {
        self.sin_cos(x).0
    }

    pub fn cos(&self, x: f64) -> f64 {
        self.sin_cos(x).1
    }

    /// The incomplete integral `F(s)` for `s ∈ [0, 1]`, i.e. the inverse of
    /// `sin_α` on `[0, π_α/2]`.
    pub fn arcsin(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("arcsin_alpha needs s in [0, 1], got {s}")));
        }
        Ok(self.f_pair(s).0)
    }

    /// The unique angle in `[0, 2π_α)` whose generalized sine and cosine have
    /// the given values (up to normalisation). Whichever of `s`, `c` gives
    /// the better conditioned inversion is used for the magnitude; the signs
    /// select the quadrant.
    pub fn phase(&self, s: f64, c: f64) -> f64 {
        let p = self.pi();
        let q = 2.0 * self.a();
        let sa = s.abs().min(1.0);
        let ca = c.abs().min(1.0);
        let base = if sa.powf(q) <= 0.5 { self.f_pair(sa).0 } else { self.g_pair(ca).1 };
        let phi = match (s >= 0.0, c >= 0.0) {
            (true, true) => base,
            (true, false) => p - base,
            (false, false) => p + base,
            (false, true) => 2.0 * p - base,
        };
        if phi >= 2.0 * p {
            phi - 2.0 * p
        } else {
            phi
        }
    }
}

/// `sin_α(x)`.
pub fn sin_alpha(ctx: &TrigContext, x: f64) -> f64 {
    ctx.sin(x)
}

/// `cos_α(x) = sin_α'(x)`.
pub fn cos_alpha(ctx: &TrigContext, x: f64) -> f64 {
    ctx.cos(x)
}
