//! Monte-Carlo density ratios around boundary points.

use crate::curvature::gamma_constant;
use crate::error::{FracError, Result};
use crate::geometry::{mc_volume, GeomSet, Window};
use crate::num::ball_volume;
use crate::params::FracParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMode {
    BothSides,
    ComplementOnly,
}

/// Ball `B_radius(center) ⊂ E` with `q ∈ ∂B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouchedBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub params: FracParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub rho: f64,
    /// `|E ∩ B_ρ(q)| / ρ^{n+1}`; absent in complement-only mode.
    pub inside: Option<f64>,
    pub complement: f64,
    /// Standard error shared by both ratios.
    pub sigma: f64,
}

/// Ceiling `|E ∩ B_ρ| ≤ (3/4)|B_1| ρ^{n+1}` for `ρ ≤ ρ₀ r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouchedCeiling {
    pub gamma: f64,
    pub rho0: f64,
    /// Rows with `ρ ≤ ρ₀ r` and whether each satisfies the ceiling to 3σ.
    pub checked: Vec<(f64, bool)>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub q: Vec<f64>,
    pub mode: DensityMode,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<DensityRow>,
    /// Empirical density constants: minima over the grid.
    pub min_inside: Option<f64>,
    pub min_complement: f64,
    pub ceiling: Option<TouchedCeiling>,
}

pub fn density_check(
    set: &GeomSet,
    q: &[f64],
    rho_grid: &[f64],
    mode: DensityMode,
    samples: usize,
    seed: u64,
    touched: Option<&TouchedBall>,
) -> Result<DensityReport> {
    let d = q.len();
    let scale = 1.0 + q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(set.level(q).abs() <= 1e-9 * scale) {
        return Err(FracError::domain("density point is not on the boundary"));
    }
    if rho_grid.is_empty() || rho_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(FracError::domain("radii must be positive"));
    }
    let unit = ball_volume(d);
    let mut rows = Vec::with_capacity(rho_grid.len());
    for (k, &rho) in rho_grid.iter().enumerate() {
        let v = mc_volume(set, &Window::Ball { center: q.to_vec(), radius: rho }, samples, seed.wrapping_add(k as u64))?;
        let norm = rho.powi(d as i32);
        let inside = v.value / norm;
        rows.push(DensityRow {
            rho,
            inside: (mode == DensityMode::BothSides).then_some(inside),
            complement: unit - inside,
            sigma: v.std_error / norm,
        });
    }
    let min_inside = rows.iter().filter_map(|r| r.inside).reduce(f64::min);
    let min_complement = rows.iter().map(|r| r.complement).fold(f64::INFINITY, f64::min);
    let ceiling = match touched {
        None => None,
        Some(b) => {
            if b.center.len() != d || b.params.n + 1 != d {
                return Err(FracError::domain("touched ball lives in the wrong dimension"));
            }
            let dist = b.center.iter().zip(q).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
            if (dist - b.radius).abs() > 1e-9 * scale {
                return Err(FracError::domain("q is not on the touching sphere"));
            }
            let gamma = gamma_constant(&b.params)?;
            let rho0 = (unit / (4.0 * gamma)).powf(1.0 / b.params.s).min(1.0);
            let checked: Vec<(f64, bool)> = rows
                .iter()
                .filter(|r| r.rho <= rho0 * b.radius)
                .map(|r| (r.rho, unit - r.complement <= 0.75 * unit + 3.0 * r.sigma))
                .collect();
            let holds = checked.iter().all(|c| c.1);
            Some(TouchedCeiling { gamma, rho0, checked, holds })
        }
    };
    Ok(DensityReport { q: q.to_vec(), mode, samples, seed, rows, min_inside, min_complement, ceiling })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_space_ratios_are_half_the_ball() {
        let e = GeomSet::lower_half_space(3, 0.0);
        let grid = [0.1, 0.5, 1.0, 4.0, 20.0];
        let r = density_check(&e, &[0.3, -1.0, 0.0], &grid, DensityMode::BothSides, 200_000, 5, None).unwrap();
        let half = 0.5 * ball_volume(3);
        for row in &r.rows {
            assert!((row.inside.unwrap() - half).abs() <= 3.0 * row.sigma);
            assert!((row.complement - half).abs() <= 3.0 * row.sigma);
        }
    }

    #[test]
    fn touched_ball_complement_density() {
        let params = FracParams { n: 1, s: 0.5 };
        let b = TouchedBall { center: vec![0.0, 1.0], radius: 1.0, params };
        let e = GeomSet::ball(b.center.clone(), 1.0);
        let grid = [0.01, 0.03, 0.1];
        let r = density_check(&e, &[0.0, 0.0], &grid, DensityMode::ComplementOnly, 100_000, 9, Some(&b)).unwrap();
        let c = r.ceiling.unwrap();
        assert!(c.holds && !c.checked.is_empty());
        for row in &r.rows {
            assert!(row.inside.is_none());
            assert!(row.complement >= 0.25 * ball_volume(2) - 3.0 * row.sigma);
        }
    }

    #[test]
    fn off_boundary_point_is_rejected() {
        let e = GeomSet::lower_half_space(2, 0.0);
        assert!(density_check(&e, &[0.0, -0.5], &[1.0], DensityMode::BothSides, 100, 1, None).is_err());
    }
}
