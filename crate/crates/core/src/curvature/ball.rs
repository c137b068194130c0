//! Radial evaluation for balls.
//!
//! Pairing antipodal rays at a boundary point of `B_1` leaves, per line at
//! angle φ from the inner normal, `2 (2 cos φ)^{-s} / s`. Integrating over the
//! inner hemisphere gives a single smooth 1D integral.

use super::{CurvatureResult, Method};
use crate::error::{FracError, Result};
use crate::num::sphere_area;
use crate::params::FracParams;
use crate::quadrature::integrate_with_error;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Mutex, OnceLock};

fn cache() -> &'static Mutex<HashMap<(usize, u64), (f64, f64, usize)>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), (f64, f64, usize)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compute_unit(n: usize, s: f64) -> (f64, f64, usize) {
    // ∫_0^{π/2} sin^{-s} w cos^{n-1} w dw with w = v^m, m = 1/(1-s)
    let m = 1.0 / (1.0 - s);
    let top = FRAC_PI_2.powf(1.0 - s);
    let f = |v: f64| {
        if v == 0.0 {
            // sin(v^m)^{-s} v^{m-1} → 1
            return (m, 0.0);
        }
        let w = v.powf(m);
        let val = m * v.powf(m - 1.0) * w.sin().powf(-s) * w.cos().powi(n as i32 - 1);
        (val, 0.0)
    };
    let out = integrate_with_error(f, 0.0, top, &[], 1e-15, 1e-14, 200_000);
    let pref = 2f64.powf(1.0 - s) / s * sphere_area(n);
    (pref * out.value, pref * out.error.max(out.value.abs() * 1e-15), out.evaluations)
}

/// `H_{s,B_1}` at any boundary point, with its quadrature error.
pub fn unit_ball_curvature(params: &FracParams) -> Result<(f64, f64)> {
    let p = FracParams::new(params.n, params.s)?;
    let key = (p.n, p.s.to_bits());
    let mut c = cache().lock().expect("ball cache poisoned");
    let e = *c.entry(key).or_insert_with(|| compute_unit(p.n, p.s));
    Ok((e.0, e.1))
}

/// `γ_{n,s} = ½ H_{s,B}(0)` for a unit ball touching the origin.
pub fn gamma_constant(params: &FracParams) -> Result<f64> {
    Ok(0.5 * unit_ball_curvature(params)?.0)
}

/// Curvature of `B_r` (or of its complement when `inside` is false) at a
/// boundary point; reported at the origin for `B_r(r e_{n+1})`.
pub fn curvature_ball(params: &FracParams, r: f64, inside: bool) -> Result<CurvatureResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FracError::domain("ball radius must be positive"));
    }
    let (h, e) = unit_ball_curvature(params)?;
    let scale = r.powf(-params.s);
    let sign = if inside { 1.0 } else { -1.0 };
    Ok(CurvatureResult {
        value: sign * scale * h,
        error_estimate: scale * e,
        method: Method::Radial,
        point: vec![0.0; params.n + 1],
        params: *params,
        evaluations: 0,
        config: None,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_for_n1_half() {
        // beta function form: 2^{-s}/s |S^0| B((1-s)/2, 1/2); B(1/4, 1/2) = 5.244115108584239
        let p = FracParams { n: 1, s: 0.5 };
        let (h, _) = unit_ball_curvature(&p).unwrap();
        let want = 2f64.powf(-0.5) / 0.5 * 2.0 * 5.244115108584239;
        assert!((h - want).abs() < 1e-12 * want, "{h} {want}");
    }

    #[test]
    fn n2_closed_form() {
        // n = 2: ∫ sin^{-s} cos = 1/(1-s)
        let s = 0.3;
        let p = FracParams { n: 2, s };
        let (h, _) = unit_ball_curvature(&p).unwrap();
        let want = 2f64.powf(1.0 - s) / s * 2.0 * std::f64::consts::PI / (1.0 - s);
        assert!((h - want).abs() < 1e-12 * want);
    }

    #[test]
    fn scaling_and_complement() {
        let p = FracParams { n: 2, s: 0.7 };
        let a = curvature_ball(&p, 1.0, true).unwrap();
        let b = curvature_ball(&p, 2.0, true).unwrap();
        let c = curvature_ball(&p, 2.0, false).unwrap();
        assert!(a.value > 0.0);
        assert_eq!(b.value, 2f64.powf(-0.7) * a.value);
        assert_eq!(c.value, -b.value);
        assert!(curvature_ball(&p, 0.0, true).is_err());
    }
}
