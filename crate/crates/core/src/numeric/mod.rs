//! Numerical kernels shared by the dependence and memory modules.

pub mod quad;
pub mod regression;
pub mod sum;
pub mod tail;
pub mod zeta;

pub use quad::{integrate, integrate_with_breaks, Integral, Quadrature};
pub use regression::{ols, LinearFit};
pub use sum::{compensated_sum, prefix_sums, CompensatedSum};
pub use tail::{smooth_tail_sum, Certified};
