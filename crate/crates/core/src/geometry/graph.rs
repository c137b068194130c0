//! Serializable height functions `u: R^n → R` used by subgraph sets.

use serde::{Deserialize, Serialize};

/// A registered bound `|u(y)| ≤ a + b |y|^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum GraphTerm {
    Constant { c: f64 },
    Linear { grad: Vec<f64> },
    /// `coef · |y - center|^alpha`
    RadialPower { coef: f64, alpha: f64, center: Vec<f64> },
    /// `amp · exp(-|y - center|² / (2 width²))`
    Gaussian { amp: f64, center: Vec<f64>, width: f64 },
}

/// Sum of [`GraphTerm`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFn {
    pub terms: Vec<GraphTerm>,
}

fn dist2(y: &[f64], c: &[f64]) -> f64 {
    y.iter()
        .enumerate()
        .map(|(i, v)| {
            let d = v - c.get(i).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

impl GraphTerm {
    fn value(&self, y: &[f64]) -> f64 {
        match self {
            GraphTerm::Constant { c } => *c,
            GraphTerm::Linear { grad } => grad.iter().zip(y).map(|(g, v)| g * v).sum(),
            GraphTerm::RadialPower { coef, alpha, center } => coef * dist2(y, center).powf(0.5 * alpha),
            GraphTerm::Gaussian { amp, center, width } => amp * (-dist2(y, center) / (2.0 * width * width)).exp(),
        }
    }

    /// `value(x) - value(x + dz)` without cancellation for small `dz`.
    fn drop_along(&self, x: &[f64], dz: &[f64]) -> f64 {
        match self {
            GraphTerm::Constant { .. } => 0.0,
            GraphTerm::Linear { grad } => -grad.iter().zip(dz).map(|(g, z)| g * z).sum::<f64>(),
            GraphTerm::RadialPower { coef, alpha, center } => {
                let rx2 = dist2(x, center);
                let y: Vec<f64> = x.iter().zip(dz).map(|(a, b)| a + b).collect();
                let ry2 = dist2(&y, center);
                if rx2 == 0.0 || ry2 == 0.0 {
                    return coef * (rx2.powf(0.5 * alpha) - ry2.powf(0.5 * alpha));
                }
                // ry² - rx² = 2 (x-c)·(y-x) + |y-x|²
                let mut delta = 0.0;
                for i in 0..x.len() {
                    let c = center.get(i).copied().unwrap_or(0.0);
                    let z = dz[i];
                    delta += 2.0 * (x[i] - c) * z + z * z;
                }
                -coef * rx2.powf(0.5 * alpha) * (0.5 * alpha * (delta / rx2).ln_1p()).exp_m1()
            }
            GraphTerm::Gaussian { amp, center, width } => {
                let w2 = 2.0 * width * width;
                let mut delta = 0.0;
                for i in 0..x.len() {
                    let c = center.get(i).copied().unwrap_or(0.0);
                    let z = dz[i];
                    delta += 2.0 * (x[i] - c) * z + z * z;
                }
                // e^{-a} - e^{-b} with b - a = delta / w2
                -amp * (-dist2(x, center) / w2).exp() * (-delta / w2).exp_m1()
            }
        }
    }

    fn add_gradient(&self, y: &[f64], out: &mut [f64]) {
        match self {
            GraphTerm::Constant { .. } => {}
            GraphTerm::Linear { grad } => {
                for (o, g) in out.iter_mut().zip(grad) {
                    *o += g;
                }
            }
            GraphTerm::RadialPower { coef, alpha, center } => {
                let r2 = dist2(y, center);
                if r2 > 0.0 {
                    let f = coef * alpha * r2.powf(0.5 * alpha - 1.0);
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += f * (y[i] - center.get(i).copied().unwrap_or(0.0));
                    }
                }
            }
            GraphTerm::Gaussian { amp, center, width } => {
                let w2 = width * width;
                let e = amp * (-dist2(y, center) / (2.0 * w2)).exp();
                for (i, o) in out.iter_mut().enumerate() {
                    *o -= e * (y[i] - center.get(i).copied().unwrap_or(0.0)) / w2;
                }
            }
        }
    }

    fn growth(&self) -> GrowthBound {
        match self {
            GraphTerm::Constant { c } => GrowthBound { a: c.abs(), b: 0.0, gamma: 0.0 },
            GraphTerm::Linear { grad } => GrowthBound {
                a: 0.0,
                b: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
                gamma: 1.0,
            },
            GraphTerm::RadialPower { coef, alpha, center } => {
                let c = dist2(&vec![0.0; center.len()], center).sqrt();
                // |y-c|^α ≤ |y|^α + |c|^α for α ≤ 1, and ≤ 2^{α-1}(|y|^α + |c|^α) otherwise.
                let k = if *alpha <= 1.0 { 1.0 } else { 2f64.powf(alpha - 1.0) };
                GrowthBound { a: coef.abs() * k * c.powf(*alpha), b: coef.abs() * k, gamma: *alpha }
            }
            GraphTerm::Gaussian { amp, .. } => GrowthBound { a: amp.abs(), b: 0.0, gamma: 0.0 },
        }
    }
}

impl GraphFn {
    pub fn constant(c: f64) -> Self {
        Self { terms: vec![GraphTerm::Constant { c }] }
    }

    pub fn affine(grad: Vec<f64>, c: f64) -> Self {
        Self { terms: vec![GraphTerm::Linear { grad }, GraphTerm::Constant { c }] }
    }

    pub fn radial_power(coef: f64, alpha: f64, n: usize) -> Self {
        Self { terms: vec![GraphTerm::RadialPower { coef, alpha, center: vec![0.0; n] }] }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(y)).sum()
    }

    /// `u(x) - u(y)` computed term by term to avoid cancellation.
    pub fn difference(&self, x: &[f64], y: &[f64]) -> f64 {
        let dz: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        self.drop_along(x, &dz)
    }

    /// `u(x) - u(x + dz)`.
    pub fn drop_along(&self, x: &[f64], dz: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.drop_along(x, dz)).sum()
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; y.len()];
        for t in &self.terms {
            t.add_gradient(y, &mut g);
        }
        g
    }

    /// Combined growth bound; the exponent is the largest term exponent.
    pub fn growth(&self) -> GrowthBound {
        let mut out = GrowthBound { a: 0.0, b: 0.0, gamma: 0.0 };
        for t in &self.terms {
            let g = t.growth();
            out.a += g.a;
            if g.b > 0.0 {
                // |y|^g ≤ 1 + |y|^G when g ≤ G.
                if g.gamma > out.gamma {
                    out.a += out.b;
                    out.gamma = g.gamma;
                    out.b = g.b;
                } else {
                    out.a += g.b;
                    out.b += g.b;
                }
            }
        }
        out
    }

    pub fn is_affine(&self) -> bool {
        self.terms.iter().all(|t| matches!(t, GraphTerm::Constant { .. } | GraphTerm::Linear { .. }))
    }

    /// `(center, width)` of the localized bumps.
    pub fn features(&self) -> Vec<(Vec<f64>, f64)> {
        self.terms
            .iter()
            .filter_map(|t| match t {
                GraphTerm::Gaussian { center, width, .. } => Some((center.clone(), *width)),
                _ => None,
            })
            .collect()
    }

    /// Points where the function fails to be smooth (power-law centres).
    pub fn kinks(&self) -> Vec<Vec<f64>> {
        self.terms
            .iter()
            .filter_map(|t| match t {
                GraphTerm::RadialPower { center, .. } => Some(center.clone()),
                _ => None,
            })
            .collect()
    }
}
