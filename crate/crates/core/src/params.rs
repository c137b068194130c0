//! Shared parameter and result records.

use crate::error::{FracError, Result};
use crate::num::{lit, Real};
use serde::{Deserialize, Serialize};

/// Dimension `n` (ambient space R^{n+1}) and fractional order `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams<T = f64> {
    pub n: usize,
    pub s: T,
}

impl<T: Real> FracParams<T> {
    pub fn new(n: usize, s: T) -> Result<Self> {
        if n == 0 {
            return Err(FracError::domain("n must be at least 1"));
        }
        if !(s > T::zero() && s < T::one()) {
            return Err(FracError::domain(format!("s = {:?} outside (0,1)", s)));
        }
        Ok(Self { n, s })
    }

    /// Exponent n+1+s of the curvature kernel.
    pub fn kernel_exponent(&self) -> T {
        crate::num::usize_to::<T>(self.n + 1) + self.s
    }
}

/// Tolerances and radii steering the principal-value engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig<T = f64> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_evaluations: usize,
    /// Radius of the innermost symmetric shell around the singular point.
    pub excision_start: T,
    /// Radius where tail monitoring starts; the engine keeps doubling it
    /// until the analytic tail drops below `abs_tol / 10`.
    pub tail_radius: T,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: lit(1e-6),
            abs_tol: lit(1e-9),
            max_evaluations: 20_000_000,
            excision_start: lit(1e-4),
            tail_radius: lit(16.0),
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return Err(FracError::domain("tolerances must be positive"));
        }
        if !(self.excision_start > T::zero() && self.excision_start < self.tail_radius) {
            return Err(FracError::domain("need 0 < excision_start < tail_radius"));
        }
        if self.max_evaluations == 0 {
            return Err(FracError::domain("max_evaluations must be positive"));
        }
        Ok(())
    }

    pub fn with_tol(mut self, rel: T, abs: T) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }
}

/// Principal-value integral with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PVResult<T = f64> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub truncation_radius: T,
}

impl<T: Real> PVResult<T> {
    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}
