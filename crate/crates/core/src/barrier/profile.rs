//! Decay profiles and the n = 1 supersolution radius.

use super::{barrier_evaluation, BarrierEvaluation, BarrierSpec};
use crate::error::{FracError, Result};
use crate::params::QuadConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

pub const PROFILE_HEADER: &str = "# fracmin barrier-profile v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub h: f64,
    pub err: f64,
    /// `H - 2 β r^{α-1-s}` (scaled by ε as the curvature is).
    pub residual: f64,
    pub residual_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierProfile {
    pub spec: BarrierSpec,
    pub rows: Vec<ProfileRow>,
    pub beta: f64,
    pub beta_error: f64,
    /// Least-squares slope of `ln |H|` against `ln r`.
    pub fitted_exponent: f64,
    pub residual_exponent: f64,
    /// `max |H| r^{s+1-α}` over the grid.
    pub c_empirical: f64,
    /// `max |H| r^{s+1-α} / ε^{1-α}`, the envelope constant of the scaled family.
    pub c0_empirical: f64,
}

impl BarrierProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.r).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{PROFILE_HEADER}\nr,H,err,residual\n");
        for row in &self.rows {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", row.r, row.h, row.err, row.residual);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

/// Slope of the least-squares line through `(ln x, ln |y|)`.
pub(crate) fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(_, b)| **b != 0.0).map(|(a, b)| (a.ln(), b.abs().ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates the barrier on `r_grid` and fits the decay exponents.
pub fn decay_fit(spec: &BarrierSpec, r_grid: &[f64], cfg: &QuadConfig) -> Result<BarrierProfile> {
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FracError::domain("radius grid must be strictly increasing"));
    }
    if r_grid[r_grid.len() - 1] / r_grid[0] < 100.0 {
        return Err(FracError::domain("radius grid must span at least two decades"));
    }
    let evals: Vec<BarrierEvaluation> = r_grid.par_iter().map(|&r| barrier_evaluation(spec, r, cfg)).collect::<Result<_>>()?;
    let rows: Vec<ProfileRow> = evals
        .iter()
        .map(|e| ProfileRow {
            r: e.r,
            h: e.curvature.value,
            err: e.curvature.error_estimate,
            residual: e.remainder,
            residual_err: e.remainder_error,
        })
        .collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let k = spec.s + 1.0 - spec.alpha;
    let c = rows.iter().map(|r| r.h.abs() * r.r.powf(k)).fold(0.0, f64::max);
    Ok(BarrierProfile {
        spec: evals[0].spec,
        beta: evals[0].beta.value,
        beta_error: evals[0].beta.error_estimate,
        fitted_exponent: log_log_slope(r_grid, &hs),
        residual_exponent: log_log_slope(r_grid, &res),
        c_empirical: c,
        c0_empirical: c / spec.eps.powf(1.0 - spec.alpha),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: f64,
    pub h: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionRadius {
    pub radius: f64,
    /// Every grid radius from `radius` to the search bound.
    pub certificates: Vec<Certificate>,
}

pub const SEARCH_RATIO: f64 = 1.25;
pub const SEARCH_BOUND: f64 = 1e6;

/// Smallest grid radius `R ≥ 1` with `H > 3 err` at every grid point in `[R, 10^6]`.
pub fn supersolution_radius(s: f64, alpha: f64, cfg: &QuadConfig) -> Result<SupersolutionRadius> {
    let spec = BarrierSpec::new(1, s, alpha, 1.0)?;
    if alpha > s {
        return Err(FracError::domain("supersolution radius needs alpha < s"));
    }
    let mut grid = vec![1.0];
    while grid.last().unwrap() * SEARCH_RATIO <= SEARCH_BOUND * (1.0 + 1e-12) {
        let r = grid.last().unwrap() * SEARCH_RATIO;
        grid.push(r);
    }
    let certs: Vec<Certificate> = grid
        .par_iter()
        .map(|&r| {
            let e = barrier_evaluation(&spec, r, cfg)?;
            Ok(Certificate { r, h: e.curvature.value, err: e.curvature.error_estimate })
        })
        .collect::<Result<_>>()?;
    let ok = |c: &Certificate| c.h > 3.0 * c.err;
    let first_bad_from_top = certs.iter().rposition(|c| !ok(c));
    let start = match first_bad_from_top {
        None => 0,
        Some(i) if i + 1 < certs.len() => i + 1,
        Some(_) => {
            return Err(FracError::Search(format!(
                "no certified positivity up to r = {SEARCH_BOUND:e} for s = {s}, alpha = {alpha}"
            )))
        }
    };
    Ok(SupersolutionRadius { radius: certs[start].r, certificates: certs[start..].to_vec() })
}
