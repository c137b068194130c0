//! Replays the sliding argument on sampled candidate sets in the lower
//! half-space: containment infima, touching points, cone tests, witness
//! regions, the repaired supersolution check and density estimates.

mod cone;
mod density;
mod run;

pub use cone::{
    cone_inclusion_test, flatness_score, ice_cream_radius, lambda_hat_check, witness_region, CaseTag, ConeSampling,
    ConeTest, LambdaHatCheck, Witness,
};
pub use density::{density_check, DensityMode, DensityReport, DensityRow, TouchedBall, TouchedCeiling};
pub use run::{repaired_supersolution_check, run_slide, RepairVerdict, SlideConfig, SlideState, SlideSummary, SlideTrace, SlideVerdict, StateChecks};

use crate::error::{FracError, Result};
use crate::geometry::{line_intervals, GeomSet, LineOpts, TailRegistration};
use serde::{Deserialize, Serialize};

/// Boundary point of the base set with its outward normal (if defined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub x: Vec<f64>,
    pub normal: Option<Vec<f64>>,
}

/// Exact line traces on an axis-aligned grid: vertical lines over
/// `[-half_width, half_width]^n` and horizontal lines at heights in
/// `[-depth, 0]`, both with the given spacing, plus horizontal lines at
/// `-spacing·10^{-k}`, k = 1..12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySampler {
    pub half_width: f64,
    pub depth: f64,
    pub spacing: f64,
}

fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let k = ((hi - lo) / h).round() as usize;
    (0..=k).map(|i| lo + (hi - lo) * i as f64 / k.max(1) as f64).collect()
}

fn product(axes: &[f64], dims: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                axes.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

impl RaySampler {
    pub fn sample(&self, set: &GeomSet, n: usize) -> Result<Vec<BoundarySample>> {
        if !(self.spacing > 0.0 && self.half_width > 0.0 && self.depth >= 0.0) {
            return Err(FracError::domain("sampler needs positive spacing and width"));
        }
        let opts = LineOpts::default();
        let w = self.half_width;
        let xs = grid(-w, w, self.spacing);
        let mut ys = grid(-self.depth, 0.0, self.spacing);
        // Boundary reaching the hyperplane only in the limit (corners) is
        // approached by extra heights just below it.
        ys.extend((1..=12).map(|k| -self.spacing * 10f64.powi(-k)));
        let mut pts = Vec::new();
        let mut push = |x: Vec<f64>| {
            if x.iter().all(|v| v.is_finite()) && x[..n].iter().all(|v| v.abs() <= w) && x[n] >= -self.depth - w {
                pts.push(x);
            }
        };
        let mut up = vec![0.0; n + 1];
        up[n] = 1.0;
        for xp in product(&xs, n) {
            let mut o = xp.clone();
            o.push(0.0);
            for (a, b) in line_intervals(set, &o, &up, &opts) {
                for t in [a, b] {
                    if t.is_finite() {
                        let mut x = o.clone();
                        x[n] = t;
                        push(x);
                    }
                }
            }
        }
        for axis in 0..n {
            let mut d = vec![0.0; n + 1];
            d[axis] = 1.0;
            for rest in product(&xs, n - 1) {
                for &y in &ys {
                    let mut o = vec![0.0; n + 1];
                    let mut k = 0;
                    for (i, v) in o.iter_mut().enumerate().take(n) {
                        if i != axis {
                            *v = rest[k];
                            k += 1;
                        }
                    }
                    o[n] = y;
                    for (a, b) in line_intervals(set, &o, &d, &opts) {
                        for t in [a, b] {
                            if t.is_finite() {
                                let mut x = o.clone();
                                x[axis] = t;
                                push(x);
                            }
                        }
                    }
                }
            }
        }
        Ok(pts.into_iter().map(|x| BoundarySample { normal: set.normal(&x), x }).collect())
    }
}

/// A candidate set `E ⊂ {x_{n+1} < 0}` with its boundary samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub n: usize,
    pub base: GeomSet,
    pub sampler: RaySampler,
    pub tail: TailRegistration,
    pub samples: Vec<BoundarySample>,
    /// `-max x_{n+1}` over the samples: the sampled distance to the hyperplane.
    pub gap: f64,
}

impl CandidateSet {
    pub fn new(n: usize, base: GeomSet, sampler: RaySampler, tail: TailRegistration) -> Result<Self> {
        base.validate()?;
        let samples = sampler.sample(&base, n)?;
        if samples.is_empty() {
            return Err(FracError::Sampling("no boundary points found by the sampler".into()));
        }
        let top = samples.iter().map(|b| b.x[n]).fold(f64::NEG_INFINITY, f64::max);
        if top > 1e-12 {
            return Err(FracError::geometry(format!("boundary sample at height {top} above the hyperplane")));
        }
        Ok(Self { n, base, sampler, tail, samples, gap: -top.min(0.0) })
    }

    /// `{x_{n+1} < -depth}`.
    pub fn half_space(n: usize, depth: f64, sampler: RaySampler) -> Result<Self> {
        let tail = TailRegistration::lower_half_space(n + 1, -depth, 0.0, 0.0, 0.0);
        Self::new(n, GeomSet::lower_half_space(n + 1, depth), sampler, tail)
    }

    /// Lower half-plane with the closed box `[-w, w] × [-depth, 0]` removed.
    pub fn notched(w: f64, depth: f64, sampler: RaySampler) -> Result<Self> {
        let hs = |nx: f64, ny: f64, off: f64| GeomSet::half_space(vec![nx, ny], off);
        let outside = hs(-1.0, 0.0, -w).union(hs(1.0, 0.0, -w)).union(hs(0.0, 1.0, -depth));
        let base = GeomSet::lower_half_space(2, 0.0).intersect(outside);
        let tail = TailRegistration::lower_half_space(2, 0.0, depth, 0.0, 0.0);
        Self::new(1, base, sampler, tail)
    }

    /// Samples of `E + h e_{n+1}`.
    pub fn shifted_points(&self, h: f64) -> Vec<Vec<f64>> {
        self.samples
            .iter()
            .map(|b| {
                let mut x = b.x.clone();
                x[self.n] += h;
                x
            })
            .collect()
    }

    pub fn shifted_set(&self, h: f64) -> GeomSet {
        let mut v = vec![0.0; self.n + 1];
        v[self.n] = h;
        self.base.clone().translate(v)
    }
}

pub(crate) fn horiz(x: &[f64]) -> f64 {
    x[..x.len() - 1].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(FracError::domain("alpha must lie in (0, 1)"))
    }
}

/// Smallest ε with every sample in `F_ε`: the sup of
/// `(x_{n+1} / |x'|^α)^{1/(1-α)}` over samples above the hyperplane.
/// Samples with `0 < |x'| < cutoff` lie in the registered excluded cylinder
/// and are skipped.
pub fn epsilon_infimum(points: &[Vec<f64>], alpha: f64, cutoff: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mut eps = 0.0f64;
    for x in points {
        let top = x[x.len() - 1];
        if top <= 0.0 {
            continue;
        }
        let r = horiz(x);
        if r == 0.0 {
            return Err(FracError::geometry(format!("sample {x:?} above the hyperplane on the axis")));
        }
        if r < cutoff {
            continue;
        }
        eps = eps.max((top / r.powf(alpha)).powf(1.0 / (1.0 - alpha)));
    }
    Ok(eps)
}

/// Samples on `∂F_{ε₀}` to within `tol` with `|x'| ≥ 1`.
pub fn touching_points(points: &[Vec<f64>], eps0: f64, alpha: f64, tol: f64) -> Result<Vec<Vec<f64>>> {
    check_alpha(alpha)?;
    if !(eps0 > 0.0) {
        return Err(FracError::domain("touching points need a positive ε"));
    }
    let c = eps0.powf(1.0 - alpha);
    let out: Vec<Vec<f64>> = points
        .iter()
        .filter(|x| {
            let r = horiz(x);
            r >= 1.0 && (x[x.len() - 1] - c * r.powf(alpha)).abs() <= tol
        })
        .cloned()
        .collect();
    if out.is_empty() {
        return Err(FracError::Sampling(format!("no sample within {tol:e} of the barrier boundary")));
    }
    Ok(out)
}

/// `ℓ_j = max{1/√(j+1), (|p|+2)^{-(1-α)/(2(n+2))}}`.
pub fn ell_schedule(j: usize, p_norm: f64, n: usize, alpha: f64) -> f64 {
    let a = 1.0 / ((j + 1) as f64).sqrt();
    let b = (p_norm + 2.0).powf(-(1.0 - alpha) / (2.0 * (n as f64 + 2.0)));
    a.max(b)
}
