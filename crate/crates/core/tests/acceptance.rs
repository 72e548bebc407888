//! Acceptance suite: one PASS/FAIL line per criterion, with the individual
//! checks listed underneath. Exits non-zero if any criterion fails.

use grushin::cutlocus::conjugate_det;
use grushin::distortion::{
    beta, beta_horizontal, beta_monte_carlo, beta_singular, fd_jacobian_oracle, jacobian, jacobian_polar, jacobian_xuv,
};
use grushin::gentrig::{pi_pq, PQ};
use grushin::geodesics::{geodesic_point, hamiltonian, integrate_hamiltonian, Covector, GeodesicSpec, Point};
use grushin::mcp::{check_bound, f_max, n_crit, solve_m, Family, GridSpec, McpConstants, SweepReport};
use grushin::power::odd_pow;
use grushin::TrigContext;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const SWEEP_ALPHAS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

/// A bound `value ≤ tol` as a check.
fn within(name: impl Into<String>, value: f64, tol: f64) -> Check {
    check(name, value <= tol, format!("{value:.3e} (tol {tol:.0e})"))
}

fn ctx(alpha: f64) -> TrigContext {
    TrigContext::new(alpha).expect("valid alpha")
}

fn sign() -> impl FnMut(&mut ChaCha8Rng) -> f64 {
    |rng| if rng.gen::<bool>() { 1.0 } else { -1.0 }
}

fn ratio(num: impl Fn(f64) -> f64, t: f64) -> f64 {
    num(t) / num(1.0)
}

fn classical_numerator(x0: f64, u0: f64, v0: f64, t: f64) -> f64 {
    t * ((u0 * u0 + t * u0 * v0 * v0 * x0 + v0 * v0 * x0 * x0) * (t * v0).sin() - t * u0 * u0 * v0 * (t * v0).cos())
}

/// Initial data `(x0, u0, v0)` minimizing beyond `t = 1`.
fn admissible(ctx: &TrigContext, rng: &mut ChaCha8Rng, min_abs: f64) -> GeodesicSpec {
    loop {
        let x0: f64 = rng.gen_range(-1.5..1.5);
        let u0: f64 = rng.gen_range(-1.5..1.5);
        let v0: f64 = rng.gen_range(-1.5..1.5);
        if x0.abs() < min_abs || v0.abs() < min_abs {
            continue;
        }
        let spec = GeodesicSpec::new(ctx, Point::new(x0, 0.0), Covector::new(u0, v0)).unwrap();
        if spec.cut_time() > 1.2 {
            return spec;
        }
    }
}

fn criterion_1() -> Vec<Check> {
    let c = ctx(1.0);
    let mut out = vec![within("pi_1 = pi", (c.pi() - PI).abs(), 1e-12)];
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let x = -20.0 + 40.0 * i as f64 / 999.0;
        let (s, k) = c.sin_cos(x);
        worst = worst.max((s - x.sin()).abs()).max((k - x.cos()).abs());
    }
    out.push(within("sin_1, cos_1 vs sin, cos on 1000 points", worst, 1e-9));
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let spec = admissible(&c, &mut rng, 0.1);
        let (x0, u0, v0) = (spec.q0.x, spec.lambda0.u, spec.lambda0.v);
        let j1 = jacobian(&c, &spec, 1.0).unwrap();
        for k in 1..10 {
            let t = 0.1 * k as f64;
            let generic = jacobian(&c, &spec, t).unwrap() / j1;
            worst = worst.max((generic - ratio(|t| classical_numerator(x0, u0, v0, t), t)).abs());
        }
    }
    out.push(within("classical distortion formula vs generic branch", worst, 1e-9));
    out
}

fn criterion_2() -> Vec<Check> {
    let c = ctx(2.0);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            let x = -3.0 + 6.0 * i as f64 / 49.0;
            let y = -2.5 + 5.3 * j as f64 / 49.0;
            let (sx, cx) = c.sin_cos(x);
            let (sy, cy) = c.sin_cos(y);
            let rhs = (sx * cy + sy * cx) / (1.0 + sx * sx * sy * sy);
            worst = worst.max((c.sin(x + y) - rhs).abs());
        }
    }
    // independent oracle: composite Gauss-Legendre on t = 1 - w^2, which
    // removes the endpoint singularity of (1 - t^4)^{-1/2}
    let nodes = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let panels = 2000;
    let mut oracle = 0.0;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        for &(x, wgt) in &nodes {
            let w = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let t = 1.0 - w * w;
            // dt = 2w dw and 1 - t^4 = (1 - t)(1 + t)(1 + t^2), 1 - t = w^2
            let f = 2.0 / ((1.0 + t) * (1.0 + t * t)).sqrt();
            oracle += 0.5 * (b - a) * wgt * f;
        }
    }
    oracle *= 2.0;
    let p24 = pi_pq(PQ::new(2.0, 4.0).unwrap());
    vec![
        within("lemniscate addition formula on 50x50 grid", worst, 1e-9),
        within("pi_{2,4} vs quadrature oracle", (p24 - oracle).abs(), 1e-11),
    ]
}

fn criterion_3() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut sign = sign();
    let (mut sup, mut drift): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let alpha = rng.gen_range(1.0..3.0);
        let c = ctx(alpha);
        let q0 = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        let l0 = Covector::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0) * sign(&mut rng));
        let spec = GeodesicSpec::new(&c, q0, l0).unwrap();
        let h0 = hamiltonian(c.alpha(), q0, l0);
        for k in 1..=20 {
            let t = k as f64 / 20.0;
            let st = geodesic_point(&c, &spec, t);
            let (q, l) = integrate_hamiltonian(c.alpha(), q0, l0, t, 1e-12).unwrap();
            let dev = (q.x - st.point.x).abs().max((q.y - st.point.y).abs()).max((l.u - st.covector.u).abs());
            sup = sup.max(dev);
            let h_closed = hamiltonian(c.alpha(), st.point, st.covector);
            let h_ode = hamiltonian(c.alpha(), q, l);
            drift = drift.max(((h_closed - h0) / h0).abs()).max(((h_ode - h0) / h0).abs());
        }
    }
    vec![
        within("closed form vs Hamiltonian integration, sup norm", sup, 1e-6),
        within("relative Hamiltonian drift", drift, 1e-9),
    ]
}

fn criterion_4() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut xuv_fd, mut polar_fd, mut forms): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let contexts: Vec<TrigContext> = SWEEP_ALPHAS.iter().map(|&a| ctx(a)).collect();
    for i in 0..100 {
        let c = &contexts[i % contexts.len()];
        let spec = admissible(c, &mut rng, 0.1);
        let (x0, u0, v0) = (spec.q0.x, spec.lambda0.u, spec.lambda0.v);
        let p = spec.polar().unwrap();
        let t = rng.gen_range(0.1..0.95);
        let xuv = |t: f64| {
            let st = geodesic_point(c, &spec, t);
            jacobian_xuv(spec.alpha, t, x0, u0, v0, st.point.x, st.covector.u).unwrap()
        };
        let a = ratio(xuv, t);
        let b = ratio(|t| jacobian_polar(c, t, p), t);
        let fd =
            fd_jacobian_oracle(c, t, x0, u0, v0, 1e-4).unwrap() / fd_jacobian_oracle(c, 1.0, x0, u0, v0, 1e-4).unwrap();
        xuv_fd = xuv_fd.max(((a - fd) / fd).abs());
        polar_fd = polar_fd.max(((b - fd) / fd).abs());
        forms = forms.max((a - b).abs() / (1.0 + a.abs()));
    }
    vec![
        within("(x, u, v) form vs finite differences, relative", xuv_fd, 1e-4),
        within("polar form vs finite differences, relative", polar_fd, 1e-4),
        within("(x, u, v) form vs polar form", forms, 1e-9),
    ]
}

fn criterion_5() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut sign = sign();
    let mut out = Vec::new();
    let mut horizontal: f64 = 0.0;
    let mut singular: f64 = 0.0;
    let mut uzero_sin = Vec::new();
    for &a in &SWEEP_ALPHAS {
        let c = ctx(a);
        for _ in 0..20 {
            let x0: f64 = rng.gen_range(-2.0..2.0);
            let u0 = rng.gen_range(0.2..2.0) * sign(&mut rng);
            for v0 in [1e-6, -1e-6] {
                let spec = GeodesicSpec::new(&c, Point::new(x0, 0.0), Covector::new(u0, v0)).unwrap();
                let j1 = jacobian(&c, &spec, 1.0).unwrap();
                for k in 1..10 {
                    let t = 0.1 * k as f64;
                    let generic = jacobian(&c, &spec, t).unwrap() / j1;
                    horizontal = horizontal.max((generic - beta_horizontal(c.alpha(), t, x0, u0).unwrap()).abs());
                }
            }
        }
        for _ in 0..20 {
            let spec = loop {
                let l0 = Covector::new(rng.gen_range(-1.5..1.5), rng.gen_range(0.1..1.5) * sign(&mut rng));
                let spec = GeodesicSpec::new(&c, Point::new(0.0, 0.0), l0).unwrap();
                if spec.cut_time() > 1.0 {
                    break spec;
                }
            };
            let w = spec.polar().unwrap().omega();
            let j1 = jacobian(&c, &spec, 1.0).unwrap();
            for k in 1..10 {
                let t = 0.1 * k as f64;
                let generic = jacobian(&c, &spec, t).unwrap() / j1;
                singular = singular.max((beta_singular(&c, t, w).unwrap() - generic).abs());
            }
        }
        let (mut worst, mut worst_cos): (f64, f64) = (0.0, 0.0);
        for _ in 0..20 {
            let spec = loop {
                let x0 = rng.gen_range(0.2..1.5) * sign(&mut rng);
                let l0 = Covector::new(0.0, rng.gen_range(0.1..1.5) * sign(&mut rng));
                let spec = GeodesicSpec::new(&c, Point::new(x0, 0.0), l0).unwrap();
                if spec.cut_time() > 1.0 {
                    break spec;
                }
            };
            let p = spec.polar().unwrap();
            let (w, phi) = (p.omega(), p.phi());
            let j1 = jacobian(&c, &spec, 1.0).unwrap();
            for k in 1..10 {
                let t = 0.1 * k as f64;
                let generic = jacobian(&c, &spec, t).unwrap() / j1;
                worst = worst.max((generic - t * c.sin(w * t) / c.sin(w)).abs());
                worst_cos = worst_cos.max((generic - t * c.cos(w * t + phi) / c.cos(w + phi)).abs());
            }
        }
        uzero_sin.push((a, worst, worst_cos));
    }
    out.push(within("generic at v0 = +-1e-6 vs horizontal formula", horizontal, 1e-3));
    out.push(within("singular formula vs generic at x0 = 0", singular, 1e-9));
    for (a, worst, worst_cos) in uzero_sin {
        out.push(within(format!("u0 = 0: beta_t = t sin_a(wt)/sin_a(w), alpha = {a}"), worst, 1e-9));
        out.push(within(format!("u0 = 0: beta_t = t cos_a(wt+phi)/cos_a(w+phi), alpha = {a}"), worst_cos, 1e-9));
    }
    out
}

fn criterion_6() -> Vec<Check> {
    let mut out = vec![
        within("solve_m(1) = -3", (solve_m(1.0).unwrap() + 3.0).abs(), 1e-12),
        within("n_crit(1) = 5", (n_crit(1.0).unwrap() - 5.0).abs(), 1e-12),
    ];
    for a in [1.0, 1.25, 1.5, 2.0, 3.0, 5.0] {
        let c = McpConstants::new(a).unwrap();
        out.push(within(format!("residual, alpha = {a}"), c.residual().abs(), 1e-12));
        out.push(within(format!("f_max = n_crit, alpha = {a}"), (f_max(a).unwrap() - c.n_crit).abs(), 1e-8));
    }
    out
}

fn criterion_7() -> Vec<Check> {
    let mut out = Vec::new();
    for &a in &SWEEP_ALPHAS {
        let c = ctx(a);
        let n = n_crit(a).unwrap();
        for family in [Family::Horizontal, Family::Singular, Family::UZero] {
            let r = check_bound(&c, n, family, &GridSpec::default_for(family)).unwrap();
            out.push(check(
                format!("{family:?}, alpha = {a}: no violations of beta_t >= t^N"),
                r.violation_count == 0,
                format!("{} of {} samples", r.violation_count, r.samples),
            ));
            if family == Family::Horizontal {
                out.push(within(
                    format!("Horizontal, alpha = {a}: |min log(beta)/log(t) - N|"),
                    (r.min_ratio - n).abs(),
                    0.05,
                ));
                out.push(within(
                    format!("Horizontal, alpha = {a}: |max log(beta)/log(t) - N|"),
                    (r.max_ratio - n).abs(),
                    0.05,
                ));
            }
        }
    }
    out
}

fn well_formed(r: &SweepReport) -> Result<(), String> {
    let json = serde_json::to_string(r).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    for key in ["alpha", "n", "family", "grid", "samples", "min_ratio", "max_ratio", "violation_count", "violations"] {
        if v.get(key).is_none() {
            return Err(format!("missing {key}"));
        }
    }
    if r.samples == 0 || !r.min_ratio.is_finite() || !r.max_ratio.is_finite() || r.min_ratio > r.max_ratio {
        return Err("inconsistent summary statistics".into());
    }
    if r.violations.len() != r.violation_count.min(100) {
        return Err("violation list does not match the count".into());
    }
    Ok(())
}

fn criterion_8() -> Vec<Check> {
    let mut out = Vec::new();
    for a in [1.5, 2.0, 3.0] {
        let c = ctx(a);
        let n = n_crit(a).unwrap();
        let r = check_bound(&c, n, Family::Generic, &GridSpec::default_for(Family::Generic)).unwrap();
        let (pass, detail) = match well_formed(&r) {
            Ok(()) => (
                true,
                format!(
                    "{} samples, max log(beta)/log(t) = {:.6} vs N = {n:.6}, {} violations",
                    r.samples, r.max_ratio, r.violation_count
                ),
            ),
            Err(e) => (false, e),
        };
        out.push(check(format!("Generic report, alpha = {a}"), pass, detail));
    }
    out
}

fn exp_map(c: &TrigContext, x0: f64, kappa: f64, t: f64, phi: f64) -> Point {
    let (s, k) = c.sin_cos(phi);
    let l0 = Covector::new(kappa * k, kappa * odd_pow(s / x0, 0.5 * (c.a() - 1.0)));
    let spec = GeodesicSpec::new(c, Point::new(x0, 0.0), l0).unwrap();
    geodesic_point(c, &spec, t).point
}

fn criterion_9() -> Vec<Check> {
    let mut out = Vec::new();
    let (x0, kappa) = (0.8, 1.1);
    let mut sign_changes = 0;
    let mut at_cut: f64 = 0.0;
    let mut meet: f64 = 0.0;
    for &a in &SWEEP_ALPHAS {
        let c = ctx(a);
        let p = c.pi();
        for j in 0..64 {
            let phi = 2.0 * p * (j as f64 + 0.5) / 64.0;
            let tc = p / (kappa * c.sin(phi) / x0).abs();
            let signs: Vec<f64> =
                (1..=200).map(|i| conjugate_det(&c, x0, kappa, tc * i as f64 / 201.0, phi).unwrap().signum()).collect();
            if signs.iter().any(|&s| s != signs[0] || s == 0.0) {
                sign_changes += 1;
            }
        }
        at_cut = at_cut.max(conjugate_det(&c, x0, kappa, p / (kappa / x0), 0.5 * p).unwrap().abs());
        for &phi in &[0.2, 0.5, 0.9, 1.2] {
            let tc = p / (kappa * c.sin(phi) / x0);
            let q1 = exp_map(&c, x0, kappa, tc, phi);
            let q2 = exp_map(&c, x0, kappa, tc, p - phi);
            meet = meet.max((q1.x - q2.x).abs().max((q1.y - q2.y).abs()));
        }
    }
    out.push(check(
        "D has constant sign on (0, t_cut), 200x64 grid",
        sign_changes == 0,
        format!("{sign_changes} phases change sign"),
    ));
    out.push(within("|D(t_cut, pi_a/2)|", at_cut, 1e-9));
    out.push(within("phases phi and pi_a - phi meet at t_cut", meet, 1e-9));
    let pairs = [
        (1.0, Point::new(0.6, 0.0), Point::new(1.1, 0.7)),
        (1.5, Point::new(0.5, 0.2), Point::new(1.2, 0.9)),
        (2.0, Point::new(-0.7, 0.0), Point::new(0.4, 0.5)),
        (2.0, Point::new(1.0, 0.0), Point::new(2.0, 0.0)),
        (3.0, Point::new(0.0, 0.0), Point::new(0.8, 0.3)),
    ];
    for (i, &(a, q0, q)) in pairs.iter().enumerate() {
        let c = ctx(a);
        let t = 0.5;
        let exact = beta(&c, q0, q, t).unwrap().beta;
        let mc = beta_monte_carlo(&c, q0, q, t, 0.01, 100_000, 900 + i as u64).unwrap();
        out.push(within(
            format!("Monte Carlo vs analytic beta, alpha = {a}, {q0:?} -> {q:?}"),
            ((mc.value - exact) / exact).abs(),
            0.02,
        ));
    }
    out
}

fn main() {
    type Criterion = fn() -> Vec<Check>;
    let criteria: [(u32, &str, Criterion, u64); 9] = [
        (1, "alpha = 1 reduction", criterion_1, 5),
        (2, "lemniscate check", criterion_2, 10),
        (3, "geodesic oracle equivalence", criterion_3, 60),
        (4, "Jacobian correctness", criterion_4, 30),
        (5, "degenerate-limit continuity", criterion_5, 0),
        (6, "MCP constants", criterion_6, 0),
        (7, "bound sweeps", criterion_7, 120),
        (8, "generic family report", criterion_8, 0),
        (9, "cut-locus suite", criterion_9, 120),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let checks = run();
        let elapsed = start.elapsed();
        let in_time = budget == 0 || elapsed <= Duration::from_secs(budget);
        let pass = in_time && checks.iter().all(|c| c.pass);
        if !pass {
            failed += 1;
        }
        let limit = if budget == 0 { String::new() } else { format!(", limit {budget} s") };
        println!(
            "criterion {id} {name}: {} ({:.2} s{limit})",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for c in &checks {
            println!("    [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail);
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
