//! The barrier family `F_ε = {x_{n+1} < ε^{1-α} |x'|^α}`, its constant β and
//! its curvature profile.

mod profile;

pub use profile::{decay_fit, supersolution_radius, BarrierProfile, Certificate, ProfileRow, SupersolutionRadius, PROFILE_HEADER};

use crate::curvature::{CurvatureResult, Method};
use crate::error::{FracError, Result};
use crate::geometry::{GeomSet, GraphFn, TailRegistration};
use crate::kernel::GKernel;
use crate::params::{FracParams, PVResult, QuadConfig};
use crate::num::sphere_area;
use crate::quadrature::{gauss_legendre, integrate_with_error, radial_integral, RadialProblem};
use std::f64::consts::FRAC_PI_2;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl BarrierSpec {
    pub fn new(n: usize, s: f64, alpha: f64, eps: f64) -> Result<Self> {
        FracParams::new(n, s)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FracError::domain("barrier exponent must lie in (0, 1)"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(FracError::domain("barrier scale must be positive"));
        }
        Ok(Self { n, s, alpha, eps })
    }

    pub fn params(&self) -> FracParams {
        FracParams { n: self.n, s: self.s }
    }

    /// Smallest admissible `|x'|`, `2^{-1/(2α)} ε`.
    pub fn min_radius(&self) -> f64 {
        2f64.powf(-0.5 / self.alpha) * self.eps
    }

    pub fn height(&self, r: f64) -> f64 {
        self.eps.powf(1.0 - self.alpha) * r.powf(self.alpha)
    }

    pub fn set(&self) -> GeomSet {
        GeomSet::Barrier { n: self.n, alpha: self.alpha, eps: self.eps }
    }

    pub fn graph(&self) -> GraphFn {
        GraphFn::radial_power(self.eps.powf(1.0 - self.alpha), self.alpha, self.n)
    }

    pub fn tail(&self) -> TailRegistration {
        TailRegistration::lower_half_space(self.n + 1, 0.0, 0.0, self.eps.powf(1.0 - self.alpha), self.alpha)
    }

    /// Boundary point over `r e_1`.
    pub fn point(&self, r: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.n + 1];
        x[0] = r;
        x[self.n] = self.height(r);
        x
    }
}

fn n1_beta(s: f64, alpha: f64) -> PVResult {
    let a = alpha;
    let kern = |t: f64| (1.0 - t).powf(-2.0 - s) + (1.0 + t).powf(-2.0 - s);
    // [0, 1/2]: t^{s-α} is singular when α > s
    let m0 = 1.0 / (1.0 - (a - s).max(0.0));
    let lower = |v: f64| {
        if v == 0.0 {
            return (0.0, 0.0);
        }
        let t = 0.5 * v.powf(m0);
        let jac = 0.5 * m0 * v.powf(m0 - 1.0);
        ((1.0 - t.powf(a)) * (1.0 - t.powf(s - a)) * kern(t) * jac, 0.0)
    };
    // [1/2, 1]: w = 1 - t = v^{m}/2 absorbs (1-t)^{-s}
    let m = 1.0 / (1.0 - s);
    let upper = |v: f64| {
        if v == 0.0 {
            return (0.0, 0.0);
        }
        let w = 0.5 * v.powf(m);
        let jac = 0.5 * m * v.powf(m - 1.0);
        let l = (-w).ln_1p();
        let f1 = -(a * l).exp_m1();
        let f2 = -((s - a) * l).exp_m1();
        let k = w.powf(-2.0 - s) + (2.0 - w).powf(-2.0 - s);
        (f1 * f2 * k * jac, 0.0)
    };
    let o1 = integrate_with_error(lower, 0.0, 1.0, &[0.5], 1e-14, 1e-12, 400_000);
    let o2 = integrate_with_error(upper, 0.0, 1.0, &[0.5], 1e-14, 1e-12, 400_000);
    PVResult {
        value: o1.value + o2.value,
        error_estimate: o1.error + o2.error,
        evaluations: o1.evaluations + o2.evaluations,
        truncation_radius: 0.0,
    }
}

/// `f(u) + f(w)` for `f(u) = 1 - (1+u)^c`, `u, w = ρ² ± 2ρκ`, without cancellation.
fn paired_drop(c: f64, rho: f64, kappa: f64) -> f64 {
    let p = 2.0 * rho * kappa;
    let q = rho * rho;
    if rho >= 0.05 {
        let f = |u: f64| -(c * u.ln_1p()).exp_m1();
        return f(q + p) + f(q - p);
    }
    // -Σ binom(c, k) (u^k + w^k), u^k + w^k = 2 Σ_{j even} C(k, j) p^j q^{k-j}
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 1..40 {
        binom *= (c - (k - 1) as f64) / k as f64;
        let mut e = 0.0;
        let mut ckj = 1.0;
        for j in 0..=k {
            if j % 2 == 0 {
                e += ckj * p.powi(j as i32) * q.powi((k - j) as i32);
            }
            ckj *= (k - j) as f64 / (j + 1) as f64;
        }
        let term = binom * 2.0 * e;
        total -= term;
        if term.abs() <= 1e-18 * total.abs() {
            break;
        }
    }
    total
}

/// `∫_{R^n} f` for an integrand whose antipodal sum depends only on
/// `(ρ, κ = z_1/ρ)`; `pair(ρ, κ) = f(ρω) + f(-ρω)`.
pub(crate) fn radial_even(
    pair: &(dyn Fn(f64, f64) -> f64 + Sync),
    n: usize,
    decay: f64,
    inner: f64,
    cfg: &QuadConfig,
) -> Result<PVResult> {
    let prob = RadialProblem { start: 0.0, end: None, decay_exponent: Some(decay), inner_exponent: Some(inner), breakpoints: vec![1.0], floor: None };
    if n == 1 {
        return radial_integral(|rho: f64| (pair(rho, 1.0), 0.0), &prob, cfg);
    }
    let surf = sphere_area(n - 1);
    let per_call = (cfg.max_evaluations / 64).max(10_000);
    radial_integral(
        |rho: f64| {
            let w = rho.powi(n as i32 - 1);
            let inner_abs = cfg.abs_tol * 0.03 / (w * rho).max(f64::MIN_POSITIVE);
            let o = integrate_with_error(
                |th: f64| (pair(rho, th.cos()) * th.sin().powi(n as i32 - 2), 0.0),
                0.0,
                FRAC_PI_2,
                &[],
                inner_abs / surf,
                cfg.rel_tol * 0.1,
                per_call,
            );
            (surf * w * o.value, surf * w * o.error)
        },
        &prob,
        cfg,
    )
}

fn nd_beta(n: usize, s: f64, alpha: f64, cfg: &QuadConfig) -> Result<PVResult> {
    let pair = |rho: f64, k: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        paired_drop(0.5 * alpha, rho, k) * rho.powf(-(n as f64) - 1.0 - s)
    };
    radial_even(&pair, n, 1.0 + s - alpha, s, cfg)
}

fn beta_cache() -> &'static Mutex<HashMap<[u64; 5], PVResult>> {
    static C: OnceLock<Mutex<HashMap<[u64; 5], PVResult>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `β_{n,s,α} = P.V. ∫ (1 - |y'|^α) / |e_1 - y'|^{n+1+s} dy'`.
///
/// For n = 1, α may range over (0, 1+s) and the symmetrized integral on (0, 1)
/// is used, which vanishes identically at α = s.
pub fn beta_constant(n: usize, s: f64, alpha: f64, cfg: &QuadConfig) -> Result<PVResult> {
    FracParams::new(n, s)?;
    let hi = if n == 1 { 1.0 + s } else { 1.0 };
    if !(alpha > 0.0 && alpha < hi) {
        return Err(FracError::domain(format!("alpha must lie in (0, {hi})")));
    }
    let key = [n as u64, s.to_bits(), alpha.to_bits(), cfg.rel_tol.to_bits(), cfg.abs_tol.to_bits()];
    if let Some(r) = beta_cache().lock().expect("beta cache").get(&key) {
        return Ok(*r);
    }
    let r = if n == 1 { n1_beta(s, alpha) } else { nd_beta(n, s, alpha, cfg)? };
    beta_cache().lock().expect("beta cache").insert(key, r);
    Ok(r)
}

/// Barrier curvature split into its leading and remainder parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierEvaluation {
    pub spec: BarrierSpec,
    pub r: f64,
    pub curvature: CurvatureResult,
    pub beta: PVResult,
    /// `ε^{-s} 2 β R^{α-1-s}` with `R = r/ε`.
    pub leading: f64,
    /// `ε^{-s} 2 R^{-s} P.V. ∫ G̃_s(R^{α-1} φ) |e_1 - y'|^{-n-s} dy'`.
    pub remainder: f64,
    pub remainder_error: f64,
}

/// Curvature of `F_ε` at the boundary point over `r e_1`.
pub fn barrier_curvature(spec: &BarrierSpec, r: f64, cfg: &QuadConfig) -> Result<CurvatureResult> {
    Ok(barrier_evaluation(spec, r, cfg)?.curvature)
}

pub fn barrier_evaluation(spec: &BarrierSpec, r: f64, cfg: &QuadConfig) -> Result<BarrierEvaluation> {
    let spec = BarrierSpec::new(spec.n, spec.s, spec.alpha, spec.eps)?;
    if !(r >= spec.min_radius()) || !r.is_finite() {
        return Err(FracError::domain(format!("radius {r} below the admissible floor {}", spec.min_radius())));
    }
    let (n, s, a) = (spec.n, spec.s, spec.alpha);
    let big_r = r / spec.eps;
    let beta = beta_constant(n, s, a, cfg)?;
    let ker = GKernel::new(spec.params())?;
    let amp = big_r.powf(a - 1.0);
    let half_k = 0.5 * (n as f64 + 1.0 + s);
    let dg = |t: f64| (-half_k * (t * t).ln_1p()).exp_m1();
    let (gx, gw) = gauss_legendre(6);
    let pair = |rho: f64, k: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        let c = 0.5 * a;
        let fu = -(c * (rho * rho + 2.0 * rho * k).ln_1p()).exp_m1();
        let big_a = amp * fu / rho;
        let g = if rho >= 0.05 {
            let fw = -(c * (rho * rho - 2.0 * rho * k).ln_1p()).exp_m1();
            ker.g_tilde(big_a) + ker.g_tilde(amp * fw / rho)
        } else {
            // G̃(A) + G̃(B) = ∫_{A-S}^{A} G̃' with S = A + B formed without cancellation
            let sum = amp * paired_drop(c, rho, k) / rho;
            // the width comes from S itself; A - S alone would round it away
            let half = 0.5 * sum;
            let mid = big_a - half;
            gx.iter().zip(&gw).map(|(x, w)| w * dg(mid + half * x)).sum::<f64>() * half
        };
        g * rho.powf(-(n as f64) - s)
    };
    // the remainder is ~ R^{3(α-1)}: ask for accuracy relative to that scale
    let scale = amp.powi(3);
    let rcfg = QuadConfig { abs_tol: (cfg.abs_tol * scale).max(1e-300), ..*cfg };
    let rem = radial_even(&pair, n, 3.0 - 3.0 * a + s, s, &rcfg)?;
    let pre = spec.eps.powf(-s);
    let leading = pre * 2.0 * beta.value * big_r.powf(a - 1.0 - s);
    let lead_err = pre * 2.0 * beta.error_estimate * big_r.powf(a - 1.0 - s);
    let remainder = pre * 2.0 * big_r.powf(-s) * rem.value;
    let remainder_error = pre * 2.0 * big_r.powf(-s) * rem.error_estimate;
    let curvature = CurvatureResult {
        value: leading + remainder,
        error_estimate: lead_err + remainder_error,
        method: Method::GraphFormula,
        point: spec.point(r),
        params: spec.params(),
        evaluations: beta.evaluations + rem.evaluations,
        config: Some(*cfg),
        seed: None,
    };
    Ok(BarrierEvaluation { spec, r, curvature, beta, leading, remainder, remainder_error })
}
