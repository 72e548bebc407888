use std::io::Write;

use grushin::distortion::{beta_along, beta_monte_carlo, fd_jacobian_oracle};
use grushin::gentrig::{f_pq, PQ};
use grushin::geodesics::{connect, geodesic_point, hamiltonian, Covector, GeodesicSpec, Point};
use grushin::mcp::{check_bound, Family, GridSpec, McpConstants, Violation};
use grushin::power::odd_pow;
use grushin::{Error, TrigContext};
use serde::Serialize;

use crate::output::{self, num, Csv};
use crate::{parse, CliError, Command, Common, Format, Oracle, Panel, TrigFn};

const VERSION: &str = env!("CARGO_PKG_VERSION");

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Trig { common, func, x, steps } => trig(&common, func, &x, steps),
        Command::Geodesic { common, q0, cov, fan, tmax, steps } => geodesic(&common, q0, cov, fan, tmax, steps),
        Command::Connect { common, q0, q1 } => connect_cmd(&common, q0, q1),
        Command::Beta { common, q0, q1, t, steps, oracle, radius, samples, fd_step } => {
            beta(&common, q0, q1, &t, steps, oracle, radius, samples, fd_step)
        }
        Command::Mcp { common, family, n, nodes } => mcp(&common, family, n, nodes),
        Command::Figure { common, panel, count, steps } => figure(&common, panel, count, steps),
    }
}

fn meta(command: &str, common: &Common) -> Vec<(&'static str, String)> {
    vec![
        ("command", command.to_string()),
        ("alpha", num(common.alpha)),
        ("seed", common.seed.to_string()),
        ("version", VERSION.to_string()),
    ]
}

fn sink(common: &Common) -> Result<Box<dyn Write>> {
    Ok(output::sink(common.output.as_deref())?)
}

fn point(p: (f64, f64)) -> Point {
    Point::new(p.0, p.1)
}

/// JSON envelope of a table.
#[derive(Serialize)]
struct Table<'a, R: Serialize> {
    command: &'a str,
    alpha: f64,
    #[serde(flatten)]
    params: serde_json::Map<String, serde_json::Value>,
    rows: &'a [R],
}

fn params<const N: usize>(pairs: [(&str, serde_json::Value); N]) -> serde_json::Map<String, serde_json::Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Serialize)]
struct TrigRow {
    x: f64,
    value: f64,
}

fn trig(common: &Common, func: TrigFn, xs: &[String], steps: usize) -> Result<()> {
    let ctx = TrigContext::new(common.alpha)?;
    let format = common.format.unwrap_or(Format::Csv);
    if func == TrigFn::Pi {
        let mut out = sink(common)?;
        match format {
            Format::Csv => writeln!(out, "{}", num(ctx.pi()))?,
            Format::Json => output::json(
                &mut out,
                &Table::<TrigRow> {
                    command: "trig",
                    alpha: common.alpha,
                    params: params([("fn", "pi".into()), ("value", ctx.pi().into())]),
                    rows: &[],
                },
            )?,
        }
        return Ok(out.flush()?);
    }
    let xs = parse::values(xs, steps).map_err(CliError::Usage)?;
    if xs.is_empty() {
        return Err(CliError::Usage("--x is required".into()));
    }
    let pq = PQ::new(2.0, 2.0 * common.alpha)?;
    let rows = xs
        .iter()
        .map(|&x| {
            let value = match func {
                TrigFn::Sin => ctx.sin(x),
                TrigFn::Cos => ctx.cos(x),
                TrigFn::F => f_pq(pq, x)?,
                TrigFn::Pi => unreachable!(),
            };
            Ok(TrigRow { x, value })
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let name = match func {
        TrigFn::Sin => "sin",
        TrigFn::Cos => "cos",
        TrigFn::F => "F",
        TrigFn::Pi => "pi",
    };
    let mut out = sink(common)?;
    match format {
        Format::Csv => {
            let mut m = meta("trig", common);
            m.push(("fn", name.to_string()));
            let mut csv = Csv::new(&mut out, &m, &["x", "value"])?;
            for r in &rows {
                csv.row(&[num(r.x), num(r.value)])?;
            }
        }
        Format::Json => output::json(
            &mut out,
            &Table { command: "trig", alpha: common.alpha, params: params([("fn", name.into())]), rows: &rows },
        )?,
    }
    Ok(out.flush()?)
}

#[derive(Serialize)]
struct GeodesicRow {
    idx: usize,
    t: f64,
    x: f64,
    y: f64,
    u: f64,
    v: f64,
    t_cut: f64,
}

/// Unit-speed initial covectors. Off the axis the phase runs over
/// `2π_α (j + 1/2) / n`; on the axis the directions `θ_j = 2π (j + 1/2) / n`
/// give `u0 = sgn(cos θ)` and frequency `π_α sin θ`.
fn fan(ctx: &TrigContext, q0: Point, n: usize) -> Result<Vec<GeodesicSpec>> {
    if n == 0 {
        return Err(CliError::Usage("--fan needs at least one geodesic".into()));
    }
    let al = ctx.a();
    (0..n)
        .map(|j| {
            let frac = (j as f64 + 0.5) / n as f64;
            let cov = if q0.x == 0.0 {
                let theta = 2.0 * std::f64::consts::PI * frac;
                let omega = ctx.pi() * theta.sin();
                Covector::new(theta.cos().signum(), odd_pow(omega, 0.5 * (al - 1.0)))
            } else {
                let (s, c) = ctx.sin_cos(2.0 * ctx.pi() * frac);
                Covector::new(c, odd_pow(s / q0.x, 0.5 * (al - 1.0)))
            };
            Ok(GeodesicSpec::new(ctx, q0, cov)?)
        })
        .collect()
}

fn sample(
    ctx: &TrigContext,
    specs: &[GeodesicSpec],
    tmax: impl Fn(&GeodesicSpec) -> f64,
    steps: usize,
) -> Vec<GeodesicRow> {
    let mut rows = Vec::with_capacity(specs.len() * (steps + 1));
    for (idx, spec) in specs.iter().enumerate() {
        let end = tmax(spec);
        for i in 0..=steps {
            let t = if i == steps { end } else { end * i as f64 / steps as f64 };
            let st = geodesic_point(ctx, spec, t);
            rows.push(GeodesicRow {
                idx,
                t,
                x: st.point.x,
                y: st.point.y,
                u: st.covector.u,
                v: st.covector.v,
                t_cut: spec.cut_time(),
            });
        }
    }
    rows
}

fn emit_geodesics(
    common: &Common,
    command: &str,
    extra: &[(&'static str, String)],
    rows: &[GeodesicRow],
) -> Result<()> {
    let mut out = sink(common)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut m = meta(command, common);
            m.extend_from_slice(extra);
            let mut csv = Csv::new(&mut out, &m, &["idx", "t", "x", "y", "u", "v", "t_cut"])?;
            for r in rows {
                csv.row(&[r.idx.to_string(), num(r.t), num(r.x), num(r.y), num(r.u), num(r.v), num(r.t_cut)])?;
            }
        }
        Format::Json => {
            let extra = extra.iter().map(|(k, v)| (k.to_string(), serde_json::Value::from(v.clone()))).collect();
            output::json(&mut out, &Table { command, alpha: common.alpha, params: extra, rows })?
        }
    }
    Ok(out.flush()?)
}

fn geodesic(
    common: &Common,
    q0: (f64, f64),
    cov: Option<(f64, f64)>,
    fan_size: Option<usize>,
    tmax: f64,
    steps: usize,
) -> Result<()> {
    let ctx = TrigContext::new(common.alpha)?;
    if !(tmax.is_finite() && tmax >= 0.0) {
        return Err(Error::Domain(format!("tmax must be non-negative, got {tmax}")).into());
    }
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    let q0 = point(q0);
    let specs = match (cov, fan_size) {
        (Some((u, v)), _) => vec![GeodesicSpec::new(&ctx, q0, Covector::new(u, v))?],
        (None, Some(n)) => fan(&ctx, q0, n)?,
        (None, None) => return Err(CliError::Usage("either --cov or --fan is required".into())),
    };
    let rows = sample(&ctx, &specs, |_| tmax, steps);
    emit_geodesics(common, "geodesic", &[], &rows)
}

fn figure(common: &Common, panel: Panel, count: usize, steps: usize) -> Result<()> {
    let ctx = TrigContext::new(common.alpha)?;
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    let (q0, name) = match panel {
        Panel::Left => (Point::new(0.0, 0.0), "left"),
        Panel::Right => (Point::new(1.0, 0.0), "right"),
    };
    let specs = fan(&ctx, q0, count)?;
    let rows = sample(&ctx, &specs, |s| s.cut_time(), steps);
    emit_geodesics(common, "figure", &[("panel", name.to_string())], &rows)
}

#[derive(Serialize)]
struct Connection {
    u0: f64,
    v0: f64,
    distance: f64,
    t_cut: f64,
}

fn connect_cmd(common: &Common, q0: (f64, f64), q1: (f64, f64)) -> Result<()> {
    let ctx = TrigContext::new(common.alpha)?;
    let spec = connect(&ctx, point(q0), point(q1))?;
    let c = Connection {
        u0: spec.lambda0.u,
        v0: spec.lambda0.v,
        distance: (2.0 * hamiltonian(ctx.alpha(), spec.q0, spec.lambda0)).sqrt(),
        t_cut: spec.cut_time(),
    };
    let mut out = sink(common)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&mut out, &meta("connect", common), &["u0", "v0", "distance", "t_cut"])?;
            csv.row(&[num(c.u0), num(c.v0), num(c.distance), num(c.t_cut)])?;
        }
        Format::Json => output::json(&mut out, &c)?,
    }
    Ok(out.flush()?)
}

#[derive(Serialize)]
struct BetaRow {
    t: f64,
    beta: f64,
    branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diff: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn beta(
    common: &Common,
    q0: (f64, f64),
    q1: (f64, f64),
    ts: &[String],
    steps: usize,
    oracle: Option<Oracle>,
    radius: f64,
    samples: usize,
    fd_step: f64,
) -> Result<()> {
    let ctx = TrigContext::new(common.alpha)?;
    let ts = parse::values(ts, steps).map_err(CliError::Usage)?;
    let (q0, q1) = (point(q0), point(q1));
    let spec = connect(&ctx, q0, q1)?;
    let (x0, u0, v0) = (q0.x, spec.lambda0.u, spec.lambda0.v);
    let fd_one = match oracle {
        Some(Oracle::Fd) => Some(fd_jacobian_oracle(&ctx, 1.0, x0, u0, v0, fd_step)?),
        _ => None,
    };
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let b = beta_along(&ctx, &spec, t)?;
        let o = match (oracle, fd_one) {
            (Some(Oracle::Fd), Some(one)) => Some(fd_jacobian_oracle(&ctx, t, x0, u0, v0, fd_step)? / one),
            (Some(Oracle::Mc), _) => Some(beta_monte_carlo(&ctx, q0, q1, t, radius, samples, common.seed)?.value),
            _ => None,
        };
        rows.push(BetaRow {
            t,
            beta: b.beta,
            branch: format!("{:?}", b.branch),
            oracle: o,
            diff: o.map(|o| (o - b.beta).abs()),
        });
    }
    let mut out = sink(common)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut m = meta("beta", common);
            m.push(("q0", format!("{} {}", num(q0.x), num(q0.y))));
            m.push(("q1", format!("{} {}", num(q1.x), num(q1.y))));
            let header: &[&str] =
                if oracle.is_some() { &["t", "beta", "branch", "oracle", "diff"] } else { &["t", "beta", "branch"] };
            if let Some(o) = oracle {
                m.push(("oracle", format!("{o:?}").to_lowercase()));
            }
            let mut csv = Csv::new(&mut out, &m, header)?;
            for r in &rows {
                let mut fields = vec![num(r.t), num(r.beta), r.branch.clone()];
                if let (Some(o), Some(d)) = (r.oracle, r.diff) {
                    fields.push(num(o));
                    fields.push(num(d));
                }
                csv.row(&fields)?;
            }
        }
        Format::Json => output::json(
            &mut out,
            &Table {
                command: "beta",
                alpha: common.alpha,
                params: params([("q0", vec![q0.x, q0.y].into()), ("q1", vec![q1.x, q1.y].into())]),
                rows: &rows,
            },
        )?,
    }
    Ok(out.flush()?)
}

#[derive(Serialize)]
struct McpReport {
    alpha: f64,
    m: f64,
    n_crit: f64,
    family: Family,
    n: f64,
    grid: String,
    samples: usize,
    min_ratio: f64,
    max_ratio: f64,
    violation_count: usize,
    violations: Vec<Violation>,
}

fn mcp(common: &Common, family: Family, n: Option<f64>, nodes: Option<usize>) -> Result<()> {
    if common.format == Some(Format::Csv) {
        return Err(CliError::Usage("mcp emits JSON only".into()));
    }
    let ctx = TrigContext::new(common.alpha)?;
    let constants = McpConstants::new(common.alpha)?;
    let n = n.unwrap_or(constants.n_crit);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain(format!("N must be positive, got {n}")).into());
    }
    let mut grid = GridSpec::default_for(family);
    if let Some(k) = nodes {
        if k == 0 {
            return Err(CliError::Usage("--nodes must be positive".into()));
        }
        grid.nodes = k;
    }
    let r = check_bound(&ctx, n, family, &grid)?;
    let report = McpReport {
        alpha: common.alpha,
        m: constants.m,
        n_crit: constants.n_crit,
        family,
        n,
        grid: r.grid,
        samples: r.samples,
        min_ratio: r.min_ratio,
        max_ratio: r.max_ratio,
        violation_count: r.violation_count,
        violations: r.violations,
    };
    let mut out = sink(common)?;
    output::json(&mut out, &report)?;
    Ok(out.flush()?)
}
