//! Principal value of `(χ_{E^c} - χ_E)/|x-y|^{n+1+s}` from exact line traces.
//!
//! Pairing `y = x ± tω` turns the integral into `∫_{hemisphere} L(ω) dω` with
//! `L(ω) = ∫_R (σ(t) - sign t) |t|^{-1-s} dt`, where σ = ±1 is the state on the
//! line. Near t = 0 the state agrees with `sign t` on a C² boundary, so `L` is
//! a finite sum over the pieces between crossings.

use super::{CurvatureResult, Method, SNAP_TOL};
use crate::error::{FracError, Result};
use crate::geometry::measure::orthogonal_basis;
use crate::geometry::{line_intervals, GeomSet, Intervals, LineOpts, TailRegistration};
use crate::params::{FracParams, QuadConfig};
use crate::quadrature::integrate_with_error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorOpts {
    /// Restrict the integral to `B_cap(x)`; no far field is needed then.
    pub cap: Option<f64>,
    /// Elevation below which the angular integrand is extrapolated by a power law.
    pub psi_min: f64,
    /// Largest distance traced along a line; beyond it the registered far state is used.
    pub horizon_cap: f64,
    pub line: LineOpts,
    /// Relative round-off level of the boundary point.
    pub noise: f64,
}

impl Default for IndicatorOpts {
    fn default() -> Self {
        Self {
            cap: None,
            psi_min: 1e-5,
            horizon_cap: 1e8,
            line: LineOpts { t_min: 1e-10, horizon: 1e8, ratio: 1.15 },
            noise: 1e-13,
        }
    }
}

struct Ctx<'a> {
    set: &'a GeomSet,
    tail: Option<&'a TailRegistration>,
    x: Vec<f64>,
    nu: Vec<f64>,
    s: f64,
    opts: IndicatorOpts,
    noise: f64,
    lines: AtomicUsize,
}

fn inside(iv: &Intervals, t: f64) -> bool {
    iv.iter().any(|&(l, r)| l < t && t < r)
}

impl Ctx<'_> {
    /// (horizon, unresolved) along the ray `x + t ω`, t > 0.
    fn horizon(&self, omega: &[f64]) -> (f64, bool) {
        if let Some(c) = self.opts.cap {
            return (c, false);
        }
        let d = self.tail.expect("tail checked").settle_distance(&self.x, omega);
        if d > self.opts.horizon_cap {
            (self.opts.horizon_cap, true)
        } else {
            (d, false)
        }
    }

    fn line(&self, omega: &[f64]) -> (f64, f64) {
        self.lines.fetch_add(1, Ordering::Relaxed);
        let s = self.s;
        let neg: Vec<f64> = omega.iter().map(|v| -v).collect();
        let (hp, up) = self.horizon(omega);
        let (hm, um) = self.horizon(&neg);
        let lo = LineOpts { horizon: hp.max(hm) * 1.01, ..self.opts.line };
        let iv = line_intervals(self.set, &self.x, omega, &lo);
        let sin_psi = omega.iter().zip(&self.nu).map(|(a, b)| a * b).sum::<f64>().abs().max(1e-300);
        let delta = self.noise / sin_psi;
        let pw = |t: f64| t.powf(-s) / s;
        let (mut val, mut err) = (0.0, 0.0);
        for (side, h, unresolved, dir) in [(1.0, hp, up, omega), (-1.0, hm, um, &neg[..])] {
            let mut cuts: Vec<f64> = iv
                .iter()
                .flat_map(|&(l, r)| [l, r])
                .filter(|e| e.is_finite())
                .map(|e| side * e)
                .filter(|&e| e > delta && e < h)
                .collect();
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.push(h);
            // the piece touching t = 0 is in the boundary state by construction
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let sigma = if inside(&iv, side * 0.5 * (a + b)) { -1.0 } else { 1.0 };
                let jump = sigma - side;
                if jump != 0.0 {
                    val += jump * (pw(a) - pw(b));
                }
            }
            if self.opts.cap.is_none() {
                match self.tail.and_then(|t| t.far_sign(dir)) {
                    Some(f) => val += (f - side) * pw(h),
                    None => err += 2.0 * pw(h),
                }
                if unresolved {
                    err += 2.0 * pw(h);
                }
            }
        }
        (val, err)
    }

    /// Number of crossings along both halves of the line, inside the horizons.
    fn crossings(&self, omega: &[f64]) -> usize {
        let neg: Vec<f64> = omega.iter().map(|v| -v).collect();
        let (hp, hm) = (self.horizon(omega).0, self.horizon(&neg).0);
        let lo = LineOpts { horizon: hp.max(hm) * 1.01, ..self.opts.line };
        let iv = line_intervals(self.set, &self.x, omega, &lo);
        let sin_psi = omega.iter().zip(&self.nu).map(|(a, b)| a * b).sum::<f64>().abs().max(1e-300);
        let delta = self.noise / sin_psi;
        iv.iter()
            .flat_map(|&(l, r)| [l, r])
            .filter(|e| e.is_finite() && ((*e > delta && *e < hp) || (-*e > delta && -*e < hm)))
            .count()
    }

    /// Parameters in `(lo, hi)` where the crossing count along `dir(p)`
    /// changes, located by bisection from a uniform scan.
    fn topology_breaks(&self, dir: impl Fn(f64) -> Vec<f64> + Sync, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
        let count = |v: f64| self.crossings(&dir(v));
        let grid: Vec<f64> = (0..=scan).map(|k| lo + (hi - lo) * k as f64 / scan as f64).collect();
        let counts: Vec<usize> = grid.par_iter().map(|&v| count(v)).collect();
        let mut out = Vec::new();
        for k in 0..scan {
            if counts[k] == counts[k + 1] {
                continue;
            }
            let (mut a, mut b, ca) = (grid[k], grid[k + 1], counts[k]);
            for _ in 0..48 {
                let c = 0.5 * (a + b);
                if count(c) == ca {
                    a = c;
                } else {
                    b = c;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    /// ψ-breaks for n = 1, scanned uniformly in `v = (ψ/(π/2))^{1-s}`.
    fn psi_topology_breaks(&self, t: &[f64], lo: f64) -> Vec<f64> {
        let m = 1.0 / (1.0 - self.s);
        let psi = |v: f64| FRAC_PI_2 * v.powf(m);
        let v_lo = (lo / FRAC_PI_2).powf(1.0 - self.s);
        self.topology_breaks(|v| self.direction(psi(v), t), v_lo, 1.0, 192).into_iter().map(psi).collect()
    }

    fn direction(&self, psi: f64, theta_hat: &[f64]) -> Vec<f64> {
        let (sp, cp) = psi.sin_cos();
        self.nu.iter().zip(theta_hat).map(|(a, b)| sp * a + cp * b).collect()
    }
}

/// ∫_0^{π/2} g(ψ) dψ with `g ~ ψ^{-s}` at 0; returns (value, error).
fn psi_integral(
    g: &(dyn Fn(f64) -> (f64, f64) + Sync),
    s: f64,
    cfg: &QuadConfig,
    opts: &IndicatorOpts,
    psi_breaks: &[f64],
) -> (f64, f64) {
    let m = 1.0 / (1.0 - s);
    let vb: Vec<f64> = psi_breaks.iter().map(|p| (p / FRAC_PI_2).powf(1.0 - s)).collect();
    let pm = opts.psi_min.min(0.25);
    let v_lo = (pm / FRAC_PI_2).powf(1.0 - s);
    let mut cuts = vec![1.0];
    while cuts.last().unwrap() * 0.5 > v_lo {
        let c = cuts.last().unwrap() * 0.5;
        cuts.push(c);
    }
    cuts.push(v_lo);
    cuts.reverse();
    let nseg = cuts.len() - 1;
    let parts: Vec<(f64, f64)> = (0..nseg)
        .into_par_iter()
        .map(|k| {
            let f = |v: f64| {
                let psi = FRAC_PI_2 * v.powf(m);
                let jac = FRAC_PI_2 * m * v.powf(m - 1.0);
                let (a, e) = g(psi);
                (a * jac, e * jac)
            };
            let o = integrate_with_error(
                f,
                cuts[k],
                cuts[k + 1],
                &vb,
                cfg.abs_tol / nseg as f64,
                cfg.rel_tol,
                (cfg.max_evaluations / nseg).max(1000),
            );
            let miss = if o.converged { 0.0 } else { o.error };
            (o.value, o.error + miss)
        })
        .collect();
    let (mut val, mut err) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    // [0, ψ_min]: g ≈ C ψ^{-s} + D on a C² boundary, checked at 4ψ_min
    let (g1, e1) = g(pm);
    let (g2, e2) = g(2.0 * pm);
    let (g4, e4) = g(4.0 * pm);
    let c = (g1 - g2) / (pm.powf(-s) - (2.0 * pm).powf(-s));
    let d = g1 - c * pm.powf(-s);
    let resid = g4 - (c * (4.0 * pm).powf(-s) + d);
    val += c * pm.powf(1.0 - s) / (1.0 - s) + d * pm;
    err += 4.0 * resid.abs() * pm + (e1 + e2 + e4) * pm;
    (val, err)
}

/// Whether `set` contains a subgraph or barrier, whose line traces come from root finding.
fn curved_graphs(set: &GeomSet) -> bool {
    use GeomSet::*;
    match set {
        Subgraph { .. } | Barrier { .. } => true,
        Complement { set } | Translate { set, .. } | Scale { set, .. } => curved_graphs(set),
        Union { a, b } | Intersection { a, b } | Difference { a, b } => curved_graphs(a) || curved_graphs(b),
        _ => false,
    }
}

/// Bounding balls of the bounded primitives inside `set`.
fn bounded_parts(set: &GeomSet, out: &mut Vec<(Vec<f64>, f64)>) {
    use GeomSet::*;
    match set {
        Ball { .. } | TruncatedCone { .. } | IceCreamCone { .. } => out.extend(set.bounding_ball()),
        Complement { set } => bounded_parts(set, out),
        Union { a, b } | Intersection { a, b } | Difference { a, b } => {
            bounded_parts(a, out);
            bounded_parts(b, out);
        }
        Translate { set, by } => {
            let mut inner = Vec::new();
            bounded_parts(set, &mut inner);
            out.extend(inner.into_iter().map(|(c, r)| (c.iter().zip(by).map(|(a, b)| a + b).collect(), r)));
        }
        Scale { set, factor } => {
            let mut inner = Vec::new();
            bounded_parts(set, &mut inner);
            out.extend(inner.into_iter().map(|(c, r)| (c.iter().map(|v| v * factor).collect(), r * factor)));
        }
        _ => {}
    }
}

/// Direction caps `{ω : ω·u ≥ cos_r}` under which bounded primitives are seen
/// from `x`, for both ends of each line.
fn feature_caps(set: &GeomSet, x: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let mut parts = Vec::new();
    bounded_parts(set, &mut parts);
    let mut caps = Vec::new();
    for (c, r) in parts {
        let w: Vec<f64> = c.iter().zip(x).map(|(a, b)| a - b).collect();
        let d = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(d > r * (1.0 + 1e-9)) || r <= 0.0 {
            continue;
        }
        let u: Vec<f64> = w.iter().map(|v| v / d).collect();
        let cos_r = (1.0 - (r / d).powi(2)).sqrt();
        caps.push((u.iter().map(|v| -v).collect(), cos_r));
        caps.push((u, cos_r));
    }
    caps
}

/// Elevations in (0, π/2) where a cap edge enters or leaves.
fn cap_psi_breaks(caps: &[(Vec<f64>, f64)], nu: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (u, cos_r) in caps {
        let e = u.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0).asin();
        let r = cos_r.acos();
        for w in [e - r, e + r] {
            let w = w.abs();
            let w = if w > FRAC_PI_2 { PI - w } else { w };
            if w > 0.0 && w < FRAC_PI_2 {
                out.push(w);
            }
        }
    }
    out
}

/// Angles θ where `ω(ψ, θ)` crosses a cap edge (n = 2).
fn cap_theta_breaks(caps: &[(Vec<f64>, f64)], nu: &[f64], e1: &[f64], e2: &[f64], psi: f64) -> Vec<f64> {
    let (sp, cp) = psi.sin_cos();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut out = Vec::new();
    for (u, cos_r) in caps {
        let (a, b) = (dot(e1, u), dot(e2, u));
        let amp = a.hypot(b);
        if !(amp > 0.0 && cp > 0.0) {
            continue;
        }
        let q = (cos_r - sp * dot(nu, u)) / (cp * amp);
        if q.abs() < 1.0 {
            let phi = b.atan2(a);
            let dl = q.acos();
            for t in [phi - dl, phi + dl] {
                out.push(t.rem_euclid(2.0 * PI));
            }
        }
    }
    out
}

/// Indicator-PV curvature at `x` (snapped to the boundary) with a caller-registered tail.
pub fn curvature_indicator(
    set: &GeomSet,
    tail: Option<&TailRegistration>,
    x: &[f64],
    params: &FracParams,
    cfg: &QuadConfig,
) -> Result<CurvatureResult> {
    curvature_indicator_with(set, tail, x, params, cfg, &IndicatorOpts::default())
}

pub fn curvature_indicator_with(
    set: &GeomSet,
    tail: Option<&TailRegistration>,
    x: &[f64],
    params: &FracParams,
    cfg: &QuadConfig,
    opts: &IndicatorOpts,
) -> Result<CurvatureResult> {
    let p = FracParams::new(params.n, params.s)?;
    cfg.validate()?;
    let dim = p.n + 1;
    if x.len() != dim || set.dim().is_some_and(|d| d != dim) {
        return Err(FracError::domain("point and set must lie in R^{n+1}"));
    }
    if !(1..=2).contains(&p.n) {
        return Err(FracError::domain("indicator evaluation supports n = 1, 2"));
    }
    if opts.cap.is_none() && tail.is_none() {
        return Err(FracError::domain("indicator evaluation needs a registered tail"));
    }
    if let Some(c) = opts.cap {
        if !(c > 0.0) {
            return Err(FracError::domain("excision radius must be positive"));
        }
    }
    let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let point = set
        .snap_to_boundary(x, SNAP_TOL * scale)
        .ok_or_else(|| FracError::geometry("point is not on the boundary"))?;
    let nu = set.normal(&point).ok_or_else(|| FracError::geometry("no normal at the boundary point"))?;
    let ctx = Ctx { set, tail, x: point.clone(), nu: nu.clone(), s: p.s, opts: *opts, noise: opts.noise * scale, lines: AtomicUsize::new(0) };
    let tangent = orthogonal_basis(&nu);
    let caps = feature_caps(set, &point);
    let mut psi_breaks = cap_psi_breaks(&caps, &nu);
    let (value, error) = if p.n == 1 {
        let t = &tangent[0];
        let mt: Vec<f64> = t.iter().map(|v| -v).collect();
        // far tangencies give √ kinks in ψ; breaking there keeps GK's estimate honest
        let pm = opts.psi_min.min(0.25);
        psi_breaks.extend(ctx.psi_topology_breaks(t, pm));
        psi_breaks.extend(ctx.psi_topology_breaks(&mt, pm));
        let g = |psi: f64| {
            let (a, ea) = ctx.line(&ctx.direction(psi, t));
            let (b, eb) = ctx.line(&ctx.direction(psi, &mt));
            (a + b, ea + eb)
        };
        psi_integral(&g, p.s, cfg, opts, &psi_breaks)
    } else {
        let (e1, e2) = (&tangent[0], &tangent[1]);
        let has_bumps = curved_graphs(set);
        let inner_abs = cfg.abs_tol * 0.1;
        let g = |psi: f64| {
            let dir = |th: f64| {
                let (st, ct) = th.sin_cos();
                let d: Vec<f64> = e1.iter().zip(e2).map(|(a, b)| ct * a + st * b).collect();
                ctx.direction(psi, &d)
            };
            let h = |th: f64| ctx.line(&dir(th));
            let mut brk = vec![0.5 * PI, PI, 1.5 * PI];
            brk.extend(cap_theta_breaks(&caps, &nu, e1, e2, psi));
            if has_bumps {
                brk.extend(ctx.topology_breaks(dir, 0.0, 2.0 * PI, 64));
            }
            let o = integrate_with_error(h, 0.0, 2.0 * PI, &brk, inner_abs, cfg.rel_tol * 0.1, 200_000);
            let c = psi.cos();
            (c * o.value, c * o.error)
        };
        psi_integral(&g, p.s, cfg, opts, &psi_breaks)
    };
    Ok(CurvatureResult {
        value,
        error_estimate: error,
        method: Method::IndicatorPv,
        point,
        params: p,
        evaluations: ctx.lines.load(Ordering::Relaxed),
        config: Some(*cfg),
        seed: None,
    })
}

/// Contribution of `B_eps(x)` to the principal value.
pub fn excised_contribution(set: &GeomSet, x: &[f64], params: &FracParams, cfg: &QuadConfig, eps: f64) -> Result<CurvatureResult> {
    let opts = IndicatorOpts { cap: Some(eps), ..IndicatorOpts::default() };
    curvature_indicator_with(set, None, x, params, cfg, &opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    pub holds: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, error: f64) -> Self {
        Self { lhs, rhs, error, holds: (lhs - rhs).abs() <= 3.0 * error + 1e-12 * lhs.abs().max(rhs.abs()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub factor: f64,
    pub shift: Vec<f64>,
    /// `ε^s H_{εF}(εx)` against `H_F(x)`.
    pub scaling: IdentityCheck,
    /// `H_{F+v}(x+v)` against `H_F(x)`.
    pub translation: IdentityCheck,
}

/// Evaluates both sides of the dilation and translation identities.
pub fn scaling_translation_check(
    set: &GeomSet,
    tail: &TailRegistration,
    x: &[f64],
    factor: f64,
    shift: &[f64],
    params: &FracParams,
    cfg: &QuadConfig,
) -> Result<ScalingReport> {
    if !(factor > 0.0) || shift.len() != x.len() {
        return Err(FracError::domain("factor must be positive and the shift must match the dimension"));
    }
    let base = curvature_indicator(set, Some(tail), x, params, cfg)?;
    let xs: Vec<f64> = base.point.iter().map(|v| v * factor).collect();
    let scaled = curvature_indicator(&set.clone().scale(factor), Some(&tail.scaled(factor)), &xs, params, cfg)?;
    let xt: Vec<f64> = base.point.iter().zip(shift).map(|(a, b)| a + b).collect();
    let moved = curvature_indicator(&set.clone().translate(shift.to_vec()), Some(&tail.translated(shift)), &xt, params, cfg)?;
    let k = factor.powf(params.s);
    Ok(ScalingReport {
        factor,
        shift: shift.to_vec(),
        scaling: IdentityCheck::new(k * scaled.value, base.value, k * scaled.error_estimate + base.error_estimate),
        translation: IdentityCheck::new(moved.value, base.value, moved.error_estimate + base.error_estimate),
    })
}
