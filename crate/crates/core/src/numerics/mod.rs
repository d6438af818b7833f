//! Small numerical building blocks shared by the physics modules.

pub mod fft;
pub mod fit;
pub mod quadrature;
pub mod spline;
pub mod tridiagonal;

pub use fit::{fit_power_law, strictly_decreasing, PowerLawFit};
pub use quadrature::Rule;
pub use spline::CubicSpline;
