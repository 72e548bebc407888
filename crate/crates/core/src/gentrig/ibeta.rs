//! Regularized incomplete beta function by Lentz's continued fraction.

const MAX_ITER: usize = 300;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

fn continued_fraction(a: f64, b: f64, z: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Returns `(I_z(a, b), I_w(b, a))` where `w = 1 - z` is passed separately so
/// that both halves keep full relative precision. `beta` must be `B(a, b)`.
pub(crate) fn ibeta_pair(a: f64, b: f64, z: f64, w: f64, beta: f64) -> (f64, f64) {
    if z <= 0.0 {
        return (0.0, 1.0);
    }
    if w <= 0.0 {
        return (1.0, 0.0);
    }
    let front = (a * z.ln() + b * w.ln()).exp() / beta;
    if z < (a + 1.0) / (a + b + 2.0) {
        let lower = front * continued_fraction(a, b, z) / a;
        (lower, 1.0 - lower)
    } else {
        let upper = front * continued_fraction(b, a, w) / b;
        (1.0 - upper, upper)
    }
}
