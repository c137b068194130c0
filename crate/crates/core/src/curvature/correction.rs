//! `∫_D |y - x|^{-(n+1+s)} dy` for a region `D` at positive distance from `x`.

use crate::error::{FracError, Result};
use crate::geometry::measure::{split, stratum_rng};
use crate::geometry::{GeomSet, Window};
use crate::num::sphere_area;
use crate::params::{FracParams, PVResult};
use crate::quadrature::integrate_with_error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionConfig {
    /// Monte-Carlo samples for non-ball regions.
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        Self { samples: 400_000, seed: 7, rel_tol: 1e-10 }
    }
}

/// Measure of the spherical cap of angular radius `th` on S^n.
fn cap_measure(n: usize, th: f64) -> f64 {
    match n {
        1 => 2.0 * th,
        2 => 2.0 * PI * (1.0 - th.cos()),
        _ => {
            let k = n as i32 - 1;
            let o = integrate_with_error(|p: f64| (p.sin().powi(k), 0.0), 0.0, th, &[], 1e-15, 1e-13, 100_000);
            sphere_area(n) * o.value
        }
    }
}

fn ball_integral(center: &[f64], rho: f64, x: &[f64], p: &FracParams, rel_tol: f64) -> PVResult {
    let d = center.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let s = p.s;
    // t = d - ρ cos u spreads the square-root edges of the cap measure
    let f = |u: f64| {
        let t = d - rho * u.cos();
        let c = ((t * t + d * d - rho * rho) / (2.0 * t * d)).clamp(-1.0, 1.0);
        let v = t.powf(-1.0 - s) * cap_measure(p.n, c.acos()) * rho * u.sin();
        (v, 0.0)
    };
    let o = integrate_with_error(f, 0.0, PI, &[], 0.0, rel_tol, 2_000_000);
    PVResult { value: o.value, error_estimate: o.error, evaluations: o.evaluations, truncation_radius: 0.0 }
}

/// Correction integral; balls use a 1D cap quadrature, other bounded regions
/// stratified Monte-Carlo over a bounding box with the exact kernel.
pub fn correction_integral(d: &GeomSet, x: &[f64], params: &FracParams, cfg: &CorrectionConfig) -> Result<PVResult> {
    let p = FracParams::new(params.n, params.s)?;
    if x.len() != p.n + 1 {
        return Err(FracError::domain("point must lie in R^{n+1}"));
    }
    if matches!(d, GeomSet::Empty) {
        return Ok(PVResult { value: 0.0, error_estimate: 0.0, evaluations: 0, truncation_radius: 0.0 });
    }
    if d.contains(x) || d.level(x) <= 0.0 {
        return Err(FracError::domain("correction region must stay at positive distance from the point"));
    }
    if let GeomSet::Ball { center, radius } = d {
        return Ok(ball_integral(center, *radius, x, &p, cfg.rel_tol));
    }
    let (c, r) = d.bounding_ball().ok_or_else(|| FracError::domain("correction region must be bounded"))?;
    if r == 0.0 {
        return Ok(PVResult { value: 0.0, error_estimate: 0.0, evaluations: 0, truncation_radius: 0.0 });
    }
    if cfg.samples == 0 {
        return Err(FracError::domain("correction integral needs samples"));
    }
    let dim = p.n + 1;
    let window = Window::Box { lo: c.iter().map(|v| v - r).collect(), hi: c.iter().map(|v| v + r).collect() };
    let expo = -(dim as f64) - p.s;
    let strata = 1usize << dim;
    let counts = split(cfg.samples, strata);
    let sums: Vec<(f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|k| {
            let mut rng = stratum_rng(cfg.seed, k);
            let mut y = vec![0.0; dim];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..counts[k] {
                window.sample(k, &mut rng, &mut y);
                if d.contains(&y) {
                    let dist = y.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    let v = dist.powf(expo);
                    s1 += v;
                    s2 += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    // stratified estimator: each orthant box has volume |W| / 2^dim
    let vk = window.volume() / strata as f64;
    let (mut value, mut var) = (0.0, 0.0);
    for (k, (s1, s2)) in sums.iter().enumerate() {
        let m = counts[k].max(1) as f64;
        let mean = s1 / m;
        let v = (s2 / m - mean * mean).max(0.0);
        value += vk * mean;
        var += vk * vk * v / m;
    }
    Ok(PVResult { value, error_estimate: var.sqrt(), evaluations: cfg.samples, truncation_radius: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_region_is_zero() {
        let p = FracParams { n: 1, s: 0.5 };
        let r = correction_integral(&GeomSet::Empty, &[0.0, 0.0], &p, &CorrectionConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn ball_sandwich_and_mc_agree() {
        let p = FracParams { n: 2, s: 0.4 };
        let rho = 0.3;
        let ball = GeomSet::ball(vec![0.2, 0.0, -1.0], rho);
        let x = [0.0, 0.0, 0.0];
        let q = correction_integral(&ball, &x, &p, &CorrectionConfig::default()).unwrap();
        let d = (0.04f64 + 1.0).sqrt();
        let vol = 4.0 / 3.0 * PI * rho.powi(3);
        assert!(q.value > vol / (d + rho).powf(3.4) && q.value < vol / (d - rho).powf(3.4));
        // same ball through the Monte-Carlo path
        let wrapped = ball.clone().union(GeomSet::Empty);
        let m = correction_integral(&wrapped, &x, &p, &CorrectionConfig::default()).unwrap();
        assert!((m.value - q.value).abs() < 4.0 * m.error_estimate, "{m:?} {q:?}");
    }

    #[test]
    fn touching_region_is_rejected() {
        let p = FracParams { n: 1, s: 0.5 };
        let b = GeomSet::ball(vec![0.0, -1.0], 1.0);
        assert!(correction_integral(&b, &[0.0, 0.0], &p, &CorrectionConfig::default()).is_err());
        let u = GeomSet::lower_half_space(2, -1.0);
        assert!(correction_integral(&u, &[0.0, 0.0], &p, &CorrectionConfig::default()).is_err());
    }
}
