//! Truncated matrices of composition operators on weighted Hilbert spaces
//! of analytic functions on the unit disk, their singular numbers at
//! extended precision, and the comparison, decay and geometric checks
//! built on top of them.

pub mod error;
pub mod geometry;
pub mod numerics;
pub mod operators;
pub mod precision;
pub mod scalar;
pub mod series;
pub mod spaces;
pub mod subordination;
pub mod symbols;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub use series::PowerSeries;
pub use spaces::WeightFamily;
pub use symbols::Symbol;
pub use numerics::SingularSpectrum;
pub use operators::TruncatedOperator;
pub use subordination::DecaySequence;
pub use geometry::{CarlesonWindow, DecayFit};
