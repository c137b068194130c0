//! Fractional s-mean curvature by the graph formula, the radial formula for
//! balls and the principal value of the indicator, plus the comparison
//! correction integral.

mod ball;
mod correction;
mod graph;
mod indicator;

pub use ball::{curvature_ball, gamma_constant, unit_ball_curvature};
pub use correction::{correction_integral, CorrectionConfig};
pub use graph::{curvature_subgraph, ClosureGraph, GraphFunction, SubgraphOpts};
pub use indicator::{
    curvature_indicator, curvature_indicator_with, excised_contribution, scaling_translation_check, IdentityCheck,
    IndicatorOpts, ScalingReport,
};

use crate::params::{FracParams, QuadConfig};
use serde::{Deserialize, Serialize};

/// Distance from the symbolic boundary within which points are snapped.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GraphFormula,
    Radial,
    IndicatorPv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
    /// Boundary point at which the curvature was evaluated.
    pub point: Vec<f64>,
    pub params: FracParams,
    pub evaluations: usize,
    pub config: Option<QuadConfig>,
    pub seed: Option<u64>,
}

impl CurvatureResult {
    /// Combined error of a difference or sum of two results.
    pub fn combined_error(&self, other: &CurvatureResult) -> f64 {
        self.error_estimate + other.error_estimate
    }
}
