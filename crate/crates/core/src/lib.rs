//! Discrete fractional Sobolev spaces with variable exponents and general kernels.
//!
//! Functions live on a uniform grid over a box containing Ω; pair sums over
//! the grid discretize the nonlocal integrals. The `parallel` feature (on by
//! default) evaluates pair sums with rayon; [`par::set_parallel`] switches to
//! the sequential path at run time. Both paths produce bit-identical results.

pub mod domain;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod kernel;
pub mod lebesgue;
pub mod operator;
pub mod par;
pub mod properties;
pub mod random;
pub mod report;
pub mod sobolev;
pub mod solver;

pub use domain::{build_grid, GridDomain, OmegaShape, PairSet};
pub use error::{Error, Result};
pub use exponent::{ExponentField, PairLaw, ScalarExponent};
pub use kernel::Kernel;
pub use lebesgue::GridFunction;
pub use operator::DualVector;
pub use sobolev::Interaction;
