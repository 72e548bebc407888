//! Measure contraction: model coefficients, the critical dimension and sweeps
//! of `β_t ≥ t^N` over families of geodesics.
//!
//! The critical dimension is `N(α) = 2((α+1)m + 1)/(m + 1)` where `m` is the
//! root in `(-3, -2]` of
//!
//! ```text
//! (m + 1)^{2α} (m + 1) = (2α + 1) m + 1.
//! ```
//!
//! Since `log t < 0`, `β_t ≥ t^N` is equivalent to `log β_t / log t ≤ N`;
//! sweeps therefore report the largest such ratio.

use serde::Serialize;

use crate::distortion;
use crate::error::{Error, Result};
use crate::gentrig::TrigContext;
use crate::geodesics::PolarParams;
use crate::power::{even_pow, odd_pow};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Domain(format!("alpha must be a finite real >= 1, got {alpha}")));
    }
    Ok(())
}

/// `(m + 1)^{2α}(m + 1) - ((2α + 1)m + 1)`.
pub fn meq(alpha: f64, m: f64) -> f64 {
    odd_pow(m + 1.0, alpha) - ((2.0 * alpha + 1.0) * m + 1.0)
}

pub fn solve_m(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(-3.0);
    }
    let (mut lo, mut hi) = (-3.0, -2.0);
    debug_assert!(meq(alpha, lo) < 0.0 && meq(alpha, hi) > 0.0);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if meq(alpha, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // keep whichever end has the smaller residual
    Ok(if meq(alpha, lo).abs() < meq(alpha, hi).abs() { lo } else { hi })
}

pub fn n_crit(alpha: f64) -> Result<f64> {
    let m = solve_m(alpha)?;
    Ok(2.0 * ((alpha + 1.0) * m + 1.0) / (m + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McpConstants {
    pub alpha: f64,
    pub m: f64,
    pub n_crit: f64,
}

impl McpConstants {
    pub fn new(alpha: f64) -> Result<Self> {
        let m = solve_m(alpha)?;
        let n_crit = 2.0 * ((alpha + 1.0) * m + 1.0) / (m + 1.0);
        Ok(McpConstants { alpha, m, n_crit })
    }

    pub fn residual(&self) -> f64 {
        meq(self.alpha, self.m)
    }
}

/// `σ_{K,N}^{(t)}(θ)`.
pub fn sigma(k: f64, n: f64, theta: f64, t: f64) -> f64 {
    let kt2 = k * theta * theta;
    if kt2 >= n * std::f64::consts::PI.powi(2) && kt2 > 0.0 {
        f64::INFINITY
    } else if kt2 > 0.0 {
        let r = (k / n).sqrt();
        (t * theta * r).sin() / (theta * r).sin()
    } else if kt2 == 0.0 || n == 0.0 {
        t
    } else {
        let r = (-k / n).sqrt();
        (t * theta * r).sinh() / (theta * r).sinh()
    }
}

/// `(σ_{K,N}^{(t)}(θ), τ_{K,N}^{(t)}(θ))` with
/// `τ = t^{1/N} σ_{K,N-1}^{1-1/N}`.
pub fn sigma_tau(k: f64, n: f64, theta: f64, t: f64) -> Result<(f64, f64)> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::Domain(format!("N must be >= 1, got {n}")));
    }
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    if !(0.0..=1.0).contains(&t) || !k.is_finite() {
        return Err(Error::Domain(format!("need t in [0, 1] and finite K, got t = {t}, K = {k}")));
    }
    let s = sigma(k, n, theta, t);
    let e = 1.0 - 1.0 / n;
    let tau = if e == 0.0 { t.powf(1.0 / n) } else { t.powf(1.0 / n) * sigma(k, n - 1.0, theta, t).powf(e) };
    Ok((s, tau))
}

/// `f(x, y) = ((2(α+1)x + y)(x+y)^{2α} - y^{2α+1}) / ((x+y)^{2α+1} - y^{2α+1})`.
pub fn f_ratio(alpha: f64, x: f64, y: f64) -> f64 {
    let p = even_pow(x + y, alpha);
    let q = even_pow(y, alpha);
    ((2.0 * (alpha + 1.0) * x + y) * p - y * q) / ((x + y) * p - y * q)
}

const F_SCAN_NODES: usize = 10_000;

/// Global maximum of the 0-homogeneous `f`, over directions
/// `(x, y) = (sin θ, cos θ)`, `θ ∈ [-π/2, π/2)` (the ray `y = 0` is `θ = -π/2`).
pub fn f_max(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let f = |theta: f64| {
        let v = f_ratio(alpha, theta.sin(), theta.cos());
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let half = std::f64::consts::FRAC_PI_2;
    let step = std::f64::consts::PI / F_SCAN_NODES as f64;
    let mut best = (f(-half), -half);
    for i in 0..F_SCAN_NODES {
        let theta = -half + (i as f64 + 0.5) * step;
        let v = f(theta);
        if v > best.0 {
            best = (v, theta);
        }
    }
    // golden-section refinement around the best node
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    Ok(best.0.max(fc).max(fd))
}

/// `g(z) = α(3α - 1)z - (α - 1)^2 sin_α(z) cos_α(z)`.
pub fn singular_g(ctx: &TrigContext, z: f64) -> f64 {
    let al = ctx.a();
    let (s, c) = ctx.sin_cos(z);
    al * (3.0 * al - 1.0) * z - (al - 1.0).powi(2) * s * c
}

/// `h(z) = sin_α(z) - z cos_α(z)`.
pub fn singular_h(ctx: &TrigContext, z: f64) -> f64 {
    distortion::singular_h(ctx, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Pairs on a common horizontal line.
    Horizontal,
    /// Geodesics leaving the singular axis.
    Singular,
    /// Initial covectors with `u0 = 0`.
    UZero,
    /// Oscillating geodesics over a polar `(ω, φ)` grid.
    Generic,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" => Ok(Family::Horizontal),
            "singular" => Ok(Family::Singular),
            "uzero" | "u0" => Ok(Family::UZero),
            "generic" => Ok(Family::Generic),
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }
}

/// Parameter grid of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub ts: Vec<f64>,
    /// Horizontal: `(x0, u0)` nodes per axis over `[-range, range]`.
    /// Singular and UZero: `ω` nodes. Generic: nodes per axis of `(ω, φ)`.
    pub nodes: usize,
    pub range: f64,
}

impl GridSpec {
    pub fn default_for(family: Family) -> Self {
        let ts = (1..=99).map(|i| i as f64 / 100.0).collect();
        let nodes = match family {
            Family::Horizontal => 61,
            Family::Singular | Family::UZero => 200,
            Family::Generic => 64,
        };
        GridSpec { ts, nodes, range: 3.0 }
    }

    fn describe(&self, family: Family) -> String {
        let t = format!(
            "t in [{}, {}] ({} nodes)",
            self.ts.first().copied().unwrap_or(f64::NAN),
            self.ts.last().copied().unwrap_or(f64::NAN),
            self.ts.len()
        );
        match family {
            Family::Horizontal => format!(
                "(x0, u0) on a {n}x{n} grid over [-{r}, {r}]^2 without u0 = 0; {t}",
                n = self.nodes,
                r = self.range
            ),
            Family::Singular => format!("omega in (0, pi_alpha), {} nodes; {t}", self.nodes),
            Family::UZero => format!("u0 = 0, omega in (0, pi_alpha), {} nodes; {t}", self.nodes),
            Family::Generic => format!(
                "omega in (0, pi_alpha) x phi in (0, 2 pi_alpha) without pi_alpha, {n}x{n}; {t}",
                n = self.nodes
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub params: Vec<f64>,
    pub t: f64,
    pub beta: f64,
    pub bound: f64,
}

const VIOLATION_TOL: f64 = 1e-9;
const MAX_LISTED: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub alpha: f64,
    pub n: f64,
    pub family: Family,
    pub grid: String,
    pub samples: usize,
    /// Smallest `log β_t / log t` over the grid.
    pub min_ratio: f64,
    /// Largest `log β_t / log t` over the grid; `β_t ≥ t^N` everywhere iff
    /// this does not exceed `N`.
    pub max_ratio: f64,
    pub violation_count: usize,
    /// The first violations found, in grid order.
    pub violations: Vec<Violation>,
}

/// Evaluates `β_t` over the family's grid and collects violations of
/// `β_t ≥ t^N - 1e-9`.
pub fn check_bound(ctx: &TrigContext, n: f64, family: Family, grid: &GridSpec) -> Result<SweepReport> {
    let al = ctx.a();
    let alpha = ctx.alpha();
    let p = ctx.pi();
    let mut report = SweepReport {
        alpha: al,
        n,
        family,
        grid: grid.describe(family),
        samples: 0,
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        violation_count: 0,
        violations: Vec::new(),
    };
    let mut record = |params: &[f64], t: f64, beta: f64| {
        report.samples += 1;
        let ratio = beta.ln() / t.ln();
        report.min_ratio = report.min_ratio.min(ratio);
        report.max_ratio = report.max_ratio.max(ratio);
        let bound = t.powf(n);
        if beta.is_nan() || beta < bound - VIOLATION_TOL {
            report.violation_count += 1;
            if report.violations.len() < MAX_LISTED {
                report.violations.push(Violation { params: params.to_vec(), t, beta, bound });
            }
        }
    };
    let k = grid.nodes;
    match family {
        Family::Horizontal => {
            let node = |i: usize| -grid.range + 2.0 * grid.range * i as f64 / (k - 1).max(1) as f64;
            for i in 0..k {
                let x0 = node(i);
                for j in 0..k {
                    let u0 = node(j);
                    if u0 == 0.0 {
                        continue;
                    }
                    for &t in &grid.ts {
                        record(&[x0, u0], t, distortion::beta_horizontal(alpha, t, x0, u0)?);
                    }
                }
            }
        }
        Family::Singular => {
            for i in 1..=k {
                let w = p * i as f64 / (k + 1) as f64;
                let hw = singular_h(ctx, w);
                for &t in &grid.ts {
                    record(&[w], t, t * singular_h(ctx, w * t) / hw);
                }
            }
        }
        Family::UZero => {
            // u0 = 0 forces cos_α(φ) = 0, i.e. φ = π_α/2 for x0 > 0
            for i in 1..=k {
                let w = p * i as f64 / (k + 1) as f64;
                let params = PolarParams::new(alpha, 1.0, w, 0.5 * p)?;
                let j1 = distortion::jacobian_polar(ctx, 1.0, params);
                for &t in &grid.ts {
                    record(&[w], t, distortion::jacobian_polar(ctx, t, params) / j1);
                }
            }
        }
        Family::Generic => {
            for i in 0..k {
                let w = p * (i as f64 + 0.5) / k as f64;
                for j in 0..k {
                    let phi = 2.0 * p * (j as f64 + 0.5) / k as f64;
                    if (phi - p).abs() < 1e-12 {
                        continue;
                    }
                    let params = PolarParams::new(alpha, 1.0, w, phi)?;
                    let j1 = stable_polar(ctx, 1.0, params);
                    for &t in &grid.ts {
                        record(&[w, phi], t, stable_polar(ctx, t, params) / j1);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn stable_polar(ctx: &TrigContext, t: f64, p: PolarParams) -> f64 {
    let (s, c) = ctx.sin_cos(p.phi());
    let wt = p.omega() * t;
    let (sz, cz) = ctx.sin_cos(wt + p.phi());
    let a = c * sz;
    let b = cz * (wt * c + s);
    if (a - b).abs() > 1e-6 * (a.abs() + b.abs()) {
        t * (a - b)
    } else {
        distortion::jacobian_polar_integral(ctx, t, p)
    }
}
