//! Flag value parsers.

/// `"x,y"` as a pair of reals.
pub fn pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
    Ok((real(a)?, real(b)?))
}

pub fn real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// A single value `a` or a range `a..b`, sampled at `steps + 1` equispaced
/// nodes.
pub fn values(specs: &[String], steps: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for s in specs {
        match s.split_once("..") {
            Some((a, b)) => {
                if steps == 0 {
                    return Err("--steps must be positive".into());
                }
                let (a, b) = (real(a)?, real(b)?);
                out.extend((0..=steps).map(|i| if i == steps { b } else { a + (b - a) * i as f64 / steps as f64 }));
            }
            None => out.push(real(s)?),
        }
    }
    Ok(out)
}
