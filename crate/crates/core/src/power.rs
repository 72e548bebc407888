//! Signed-power helpers.
//!
//! Throughout the crate `x^{2a}` stands for `(x^2)^a`, which is even and
//! non-negative for every real `x`, and `x^{2a} * x` is the matching odd,
//! sign-preserving power. No other call site should re-derive these.

/// `(x^2)^a`: the even power `|x|^{2a}`.
#[inline]
pub fn even_pow(x: f64, a: f64) -> f64 {
    (x * x).powf(a)
}

/// `(x^2)^a * x`: the odd power `|x|^{2a} x`.
#[inline]
pub fn odd_pow(x: f64, a: f64) -> f64 {
    even_pow(x, a) * x
}
