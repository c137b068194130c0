//! Numerics for the fractional s-mean curvature of sets in R^{n+1}.
//!
//! The kernel and quadrature layers are generic over [`Real`] (`f32`/`f64`);
//! geometry, curvature, barrier and slide code work in `f64`.

pub mod barrier;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod halfspace_sim;
pub mod kernel;
pub mod num;
pub mod params;
pub mod quadrature;

pub use curvature::{curvature_ball, curvature_indicator, curvature_subgraph, CurvatureResult};
pub use error::{FracError, Result};
pub use kernel::{eval_G, eval_G_tilde, GKernel};
pub use num::Real;
pub use params::{FracParams, PVResult, QuadConfig};
pub use quadrature::{pv_integrate_1d, pv_integrate_nd, Singular1d, SingularNd};

pub type FracParamsF32 = FracParams<f32>;
pub type QuadConfigF32 = QuadConfig<f32>;
pub type PVResultF32 = PVResult<f32>;
pub type GKernelF32 = GKernel<f32>;
