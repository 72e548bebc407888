//! Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! Used only as an independent oracle for the closed-form solutions, so it
//! favours robustness over speed: every output time is hit exactly and the
//! caller can clamp the step through [`Options::max_step`].

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Upper bound on the step as a function of `(t, y)`.
pub type StepBound<'a, const N: usize> = &'a dyn Fn(f64, &[f64; N]) -> f64;

/// Step control settings.
pub struct Options<'a, const N: usize> {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step, evaluated at the start of every step.
    pub max_step: Option<StepBound<'a, N>>,
    pub max_steps: usize,
}

impl<const N: usize> Options<'_, N> {
    pub fn with_tol(tol: f64) -> Self {
        Options { rtol: tol, atol: tol, max_step: None, max_steps: 2_000_000 }
    }
}

/// Counters reported by a successful integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` and records the state at every time
/// in `outputs` (which must be sorted in the direction of integration).
pub fn solve<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    opts: &Options<'_, N>,
) -> Result<(Vec<[f64; N]>, Stats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h: f64 = 0.0;
    let mut err_prev: f64 = 1e-4;

    for &target in outputs {
        let span = target - t;
        if span == 0.0 {
            out.push(y);
            continue;
        }
        let dir = span.signum();
        if h == 0.0 || h.signum() != dir {
            h = dir * initial_step(&y, &k1, span.abs(), opts);
        }
        while (target - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepUnderflow { t, h });
            }
            let mut hmax = (target - t).abs();
            if let Some(ms) = opts.max_step {
                hmax = hmax.min(ms(t, &y).abs());
            }
            let mut last = false;
            if h.abs() >= hmax {
                h = dir * hmax;
                last = hmax == (target - t).abs();
            }
            if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                return Err(Error::StepUnderflow { t, h });
            }

            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let t_new = if last { target } else { t + h };
            let k7 = f(t_new, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / N as f64).sqrt();

            if err <= 1.0 {
                let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
                t = t_new;
                y = y_new;
                k1 = k7;
                err_prev = err.max(1e-4);
                stats.accepted += 1;
                if !last {
                    h *= fac.clamp(0.2, 5.0);
                }
            } else {
                stats.rejected += 1;
                let fac = if err.is_finite() { 0.9 * err.powf(-0.2) } else { 0.1 };
                h *= fac.clamp(0.1, 0.9);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], span: f64, opts: &Options<'_, N>) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).max(1e-12 * span)
}
