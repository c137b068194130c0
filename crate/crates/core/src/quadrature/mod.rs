//! Quadrature engines: adaptive Gauss–Kronrod and principal-value drivers.

pub mod gk;
pub mod pv;

pub use gk::{gauss_legendre, integrate, integrate_with_error, Outcome};
pub use pv::{pv_integrate_1d, pv_integrate_nd, radial_integral, RadialProblem, Singular1d, SingularNd};
