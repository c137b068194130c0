//! Caller-registered far-field containment used to close curvature integrals.

use super::set::{dot, norm, sub};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRegistration {
    /// The set lies inside `B_radius(center)`.
    Bounded { center: Vec<f64>, radius: f64 },
    /// The complement lies inside `B_radius(center)`.
    CoBounded { center: Vec<f64>, radius: f64 },
    /// The set agrees with `{normal · y < offset}` (unit normal) outside the
    /// band `|normal · y - offset| ≤ a + b |y|^gamma`, gamma < 1.
    HalfSpace { normal: Vec<f64>, offset: f64, a: f64, b: f64, gamma: f64 },
}

impl TailRegistration {
    pub fn lower_half_space(d: usize, offset: f64, a: f64, b: f64, gamma: f64) -> Self {
        let mut normal = vec![0.0; d];
        normal[d - 1] = 1.0;
        TailRegistration::HalfSpace { normal, offset, a, b, gamma }
    }

    /// Registration of the dilated set `factor · E`.
    pub fn scaled(&self, factor: f64) -> Self {
        use TailRegistration::*;
        match self {
            Bounded { center, radius } => Bounded { center: center.iter().map(|v| v * factor).collect(), radius: radius * factor },
            CoBounded { center, radius } => CoBounded { center: center.iter().map(|v| v * factor).collect(), radius: radius * factor },
            HalfSpace { normal, offset, a, b, gamma } => HalfSpace {
                normal: normal.clone(),
                offset: offset * factor,
                a: a * factor,
                b: b * factor.powf(1.0 - gamma),
                gamma: *gamma,
            },
        }
    }

    /// Registration of `E + v`; uses `|y - v|^γ ≤ |y|^γ + |v|^γ`.
    pub fn translated(&self, v: &[f64]) -> Self {
        use TailRegistration::*;
        let shift = |c: &[f64]| c.iter().zip(v).map(|(a, b)| a + b).collect();
        match self {
            Bounded { center, radius } => Bounded { center: shift(center), radius: *radius },
            CoBounded { center, radius } => CoBounded { center: shift(center), radius: *radius },
            HalfSpace { normal, offset, a, b, gamma } => HalfSpace {
                normal: normal.clone(),
                offset: offset + dot(normal, v),
                a: a + b * norm(v).powf(*gamma),
                b: *b,
                gamma: *gamma,
            },
        }
    }

    /// Sign `χ_{E^c} - χ_E` far along the ray `x + t ω`, if determined.
    pub fn far_sign(&self, omega: &[f64]) -> Option<f64> {
        match self {
            TailRegistration::Bounded { .. } => Some(1.0),
            TailRegistration::CoBounded { .. } => Some(-1.0),
            TailRegistration::HalfSpace { normal, .. } => {
                let v = dot(normal, omega);
                if v > 0.0 {
                    Some(1.0)
                } else if v < 0.0 {
                    Some(-1.0)
                } else {
                    None
                }
            }
        }
    }

    /// A distance beyond which the ray `x + t ω` (|ω| = 1) is guaranteed to
    /// be in its far state; infinite when no such distance exists.
    pub fn settle_distance(&self, x: &[f64], omega: &[f64]) -> f64 {
        match self {
            TailRegistration::Bounded { center, radius } | TailRegistration::CoBounded { center, radius } => {
                norm(&sub(x, center)) + radius
            }
            TailRegistration::HalfSpace { normal, offset, a, b, gamma } => {
                let v = dot(normal, omega).abs();
                if v == 0.0 {
                    return f64::INFINITY;
                }
                let h0 = (dot(normal, x) - offset).abs();
                let r0 = norm(x);
                let ok = |t: f64| t * v - h0 > a + b * (r0 + t).powf(*gamma);
                if *gamma >= 1.0 && v <= *b {
                    return f64::INFINITY;
                }
                let mut hi = 1.0;
                while !ok(hi) {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if ok(m) {
                        hi = m;
                    } else {
                        lo = m;
                    }
                }
                hi
            }
        }
    }
}
