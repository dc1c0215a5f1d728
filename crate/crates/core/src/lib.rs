//! Dependence measures for symmetric α-stable vectors, linear processes,
//! linear random fields and stable stochastic integrals, with tools to
//! classify the memory of a process from the growth of its partial sums.

pub mod error;
pub mod field;
pub mod filter;
pub mod integral;
pub mod memory;
pub mod numeric;
pub mod process;
pub mod spectral;
pub mod table;

pub use error::{Error, Result};
pub use field::{Family2D, Filter2D};
pub use filter::{C0Mode, Family1D, Filter1D, SignPattern};
pub use numeric::Certified;
pub use spectral::{DependenceSummary, SpectralMeasure};
