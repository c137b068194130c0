//! Graph formula `H = 2 P.V. ∫ G_s((u(x')-u(y'))/|x'-y'|) |x'-y'|^{-n-s} dy'`.

use super::{CurvatureResult, Method};
use crate::error::{FracError, Result};
use crate::geometry::{GraphFn, GrowthBound};
use crate::kernel::GKernel;
use crate::params::{FracParams, QuadConfig};
use crate::quadrature::{pv_integrate_nd, SingularNd};

/// Height function with gradient and a registered growth bound.
pub trait GraphFunction: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn growth(&self) -> Option<GrowthBound>;
    /// `u(x) - u(x + dz)`; override when cancellation matters.
    fn drop_along(&self, x: &[f64], dz: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(dz).map(|(a, b)| a + b).collect();
        self.value(x) - self.value(&y)
    }
    /// Distances from which the integrand may have kinks, seen from `x`.
    fn kink_radii(&self, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

impl GraphFunction for GraphFn {
    fn value(&self, x: &[f64]) -> f64 {
        GraphFn::value(self, x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        GraphFn::gradient(self, x)
    }
    fn growth(&self) -> Option<GrowthBound> {
        Some(GraphFn::growth(self))
    }
    fn drop_along(&self, x: &[f64], dz: &[f64]) -> f64 {
        GraphFn::drop_along(self, x, dz)
    }
    fn kink_radii(&self, x: &[f64]) -> Vec<f64> {
        self.kinks()
            .iter()
            .map(|c| x.iter().enumerate().map(|(i, v)| (v - c.get(i).copied().unwrap_or(0.0)).powi(2)).sum::<f64>().sqrt())
            .filter(|r| *r > 0.0)
            .collect()
    }
}

/// Closure-backed height function; `growth = None` models a missing registration.
pub struct ClosureGraph<U, D> {
    pub u: U,
    pub du: D,
    pub growth: Option<GrowthBound>,
}

impl<U, D> GraphFunction for ClosureGraph<U, D>
where
    U: Fn(&[f64]) -> f64 + Sync,
    D: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.u)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.du)(x)
    }
    fn growth(&self) -> Option<GrowthBound> {
        self.growth
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SubgraphOpts {
    /// Subtract `G_s(-∇u(x')·ω)`, whose shell averages vanish by symmetry.
    pub subtract_linear: bool,
}

/// Curvature of `{x_{n+1} < u(x')}` at `(x', u(x'))`.
pub fn curvature_subgraph(
    u: &dyn GraphFunction,
    x: &[f64],
    params: &FracParams,
    cfg: &QuadConfig,
    opts: SubgraphOpts,
) -> Result<CurvatureResult> {
    let params = FracParams::new(params.n, params.s)?;
    if x.len() != params.n {
        return Err(FracError::domain("base point must lie in R^n"));
    }
    let growth = u.growth().ok_or_else(|| FracError::domain("subgraph curvature needs a registered growth bound"))?;
    if !(growth.gamma <= 1.0) {
        return Err(FracError::domain("growth bound must be at most linear"));
    }
    let ker = GKernel::new(params)?;
    let s = params.s;
    let n = params.n;
    let grad = u.gradient(x);
    let x0 = x.to_vec();
    // integrate over the displacement so antipodal pairs are exact
    let f = |z: &[f64]| {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return 0.0;
        }
        let q = u.drop_along(&x0, z) / r;
        let mut g = ker.g(q);
        if opts.subtract_linear {
            let lin: f64 = grad.iter().zip(z).map(|(a, b)| a * b).sum();
            g -= ker.g(-lin / r);
        }
        g * r.powf(-(n as f64) - s)
    };
    // |G| ≤ min(|q|, G_∞) with |q| ≲ |y|^{gamma-1}: the radial integrand decays like ρ^{-1-κ}
    let kappa = if growth.gamma < 1.0 && growth.b > 0.0 {
        1.0 + s - growth.gamma
    } else if growth.b == 0.0 {
        1.0 + s
    } else {
        s
    };
    let prob = SingularNd {
        x0: vec![0.0; n],
        radius: None,
        decay_exponent: Some(kappa),
        inner_exponent: Some(s),
        breakpoints: u.kink_radii(x),
        // far below the excision radius the odd part of the pair is round-off only
        inner_floor: Some(cfg.excision_start / 64.0),
    };
    let res = pv_integrate_nd(f, &prob, cfg)?;
    let mut point = x0.clone();
    point.push(u.value(x));
    Ok(CurvatureResult {
        value: 2.0 * res.value,
        error_estimate: 2.0 * res.error_estimate,
        method: Method::GraphFormula,
        point,
        params,
        evaluations: res.evaluations,
        config: Some(*cfg),
        seed: None,
    })
}
