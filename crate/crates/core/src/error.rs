use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input corresponds to a straight-line geodesic (or a fixed point)
    /// where an oscillating one was required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A closed-form expression would divide by a vanishing quantity.
    #[error("division guard: {0}")]
    DivisionGuard(String),

    /// The target point lies in the cut locus of the starting point.
    #[error("cut locus: {0}")]
    CutLocus(String),

    /// The two-point shooting iteration did not converge.
    #[error("no convergence after {iterations} iterations (residual {residual:e}): {detail}")]
    NoConvergence { iterations: usize, residual: f64, detail: String },

    /// The adaptive integrator could not make progress.
    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
