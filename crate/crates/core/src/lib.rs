//! Geodesics, cut loci and distortion coefficients of the α-Grushin plane,
//! built on the generalized trigonometric functions `sin_{2,2α}`.

pub mod cutlocus;
pub mod distortion;
pub mod error;
pub mod gentrig;
pub mod geodesics;
pub mod mcp;
pub mod ode;
pub mod power;
pub mod quadrature;

pub use error::{Error, Result};
pub use gentrig::{Alpha, TrigContext};
pub use geodesics::{Covector, GeodesicSpec, Point};
