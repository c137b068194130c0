//! Seeded, stratified Monte-Carlo volumes and the fractional perimeter.

use super::lines::{line_intervals, Intervals, LineOpts};
use super::set::{norm, GeomSet};
use crate::error::{FracError, Result};
use crate::num::{ball_volume, sphere_area};
use crate::params::{FracParams, PVResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Window {
    pub fn dim(&self) -> usize {
        match self {
            Window::Ball { center, .. } => center.len(),
            Window::Box { lo, .. } => lo.len(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Window::Ball { center, radius } => ball_volume(center.len()) * radius.powi(center.len() as i32),
            Window::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
        }
    }

    /// Uniform point in the orthant `stratum` (bit i set ⇒ upper half in coordinate i).
    pub(crate) fn sample(&self, stratum: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            Window::Ball { center, radius } => loop {
                let mut r2 = 0.0;
                for (i, o) in out.iter_mut().enumerate() {
                    let u: f64 = rng.gen();
                    let v = if (stratum >> i) & 1 == 1 { u } else { -u };
                    r2 += v * v;
                    *o = v;
                }
                if r2 < 1.0 {
                    for (o, c) in out.iter_mut().zip(center) {
                        *o = c + radius * *o;
                    }
                    return;
                }
            },
            Window::Box { lo, hi } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let u: f64 = rng.gen();
                    let half = 0.5 * (hi[i] - lo[i]);
                    let base = if (stratum >> i) & 1 == 1 { lo[i] + half } else { lo[i] };
                    *o = base + half * u;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

pub(crate) fn stratum_rng(seed: u64, stratum: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stratum as u64);
    rng
}

pub(crate) fn split(samples: usize, strata: usize) -> Vec<usize> {
    (0..strata).map(|k| samples / strata + usize::from(k < samples % strata)).collect()
}

/// Estimates `|set ∩ window|` with one ChaCha stream per orthant stratum.
pub fn mc_volume(set: &GeomSet, window: &Window, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(FracError::domain("mc_volume needs at least one sample"));
    }
    let d = window.dim();
    let strata = if samples >= 1 << d { 1usize << d } else { 1 };
    let counts = split(samples, strata);
    let hits: Vec<usize> = (0..strata)
        .into_par_iter()
        .map(|k| {
            let mut rng = stratum_rng(seed, k);
            let mut x = vec![0.0; d];
            let mut h = 0usize;
            for _ in 0..counts[k] {
                if strata == 1 {
                    let st = rng.gen_range(0..1usize << d);
                    window.sample(st, &mut rng, &mut x);
                } else {
                    window.sample(k, &mut rng, &mut x);
                }
                h += usize::from(set.contains(&x));
            }
            h
        })
        .collect();
    let vol = window.volume();
    let mut value = 0.0;
    for k in 0..strata {
        value += vol / strata as f64 * hits[k] as f64 / counts[k] as f64;
    }
    let p = hits.iter().sum::<usize>() as f64 / samples as f64;
    Ok(VolumeEstimate { value, std_error: vol * (p * (1.0 - p) / samples as f64).sqrt(), samples, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterConfig {
    /// Number of random lines.
    pub samples: usize,
    pub seed: u64,
}

impl Default for PerimeterConfig {
    fn default() -> Self {
        Self { samples: 20_000, seed: 1 }
    }
}

/// ∫_a^b ∫_c^d (y-x)^{-1-s} dy dx for b ≤ c.
fn pair_kernel(a: f64, b: f64, c: f64, d: f64, s: f64) -> f64 {
    let p = |u: f64| u.powf(1.0 - s);
    let norm = 1.0 / (s * (1.0 - s));
    match (a.is_finite(), d.is_finite()) {
        (true, true) => (p(c - a) - p(c - b) - p(d - a) + p(d - b)) * norm,
        (false, true) => (p(d - b) - p(c - b)) * norm,
        (true, false) => (p(c - a) - p(c - b)) * norm,
        (false, false) => f64::INFINITY,
    }
}

fn member(iv: &Intervals, t: f64) -> bool {
    iv.iter().any(|&(a, b)| a < t && t < b)
}

/// One-dimensional interaction `∬ |χ(t₁)-χ(t₂)| 1_{Q} |t₁-t₂|^{-1-s}` on a line.
fn line_interaction(f: &Intervals, omega: &Intervals, s: f64) -> f64 {
    let mut cuts: Vec<f64> = f.iter().chain(omega.iter()).flat_map(|&(a, b)| [a, b]).filter(|t| t.is_finite()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(cuts);
    edges.push(f64::INFINITY);
    let pieces: Vec<(f64, f64, bool, bool)> = edges
        .windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| {
            let m = match (w[0].is_finite(), w[1].is_finite()) {
                (true, true) => 0.5 * (w[0] + w[1]),
                (true, false) => w[0] + 1.0,
                (false, true) => w[1] - 1.0,
                _ => 0.0,
            };
            (w[0], w[1], member(f, m), member(omega, m))
        })
        .collect();
    let mut total = 0.0;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let (a, b, fi, oi) = pieces[i];
            let (c, d, fj, oj) = pieces[j];
            if fi != fj && (oi || oj) {
                total += pair_kernel(a, b, c, d, s);
            }
        }
    }
    total
}

/// Orthonormal basis of `ω^⊥` by Gram–Schmidt on the coordinate axes.
pub(crate) fn orthogonal_basis(omega: &[f64]) -> Vec<Vec<f64>> {
    let d = omega.len();
    let mut basis: Vec<Vec<f64>> = vec![omega.to_vec()];
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| omega[i].abs().partial_cmp(&omega[j].abs()).unwrap());
    for &i in &order {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for k in 0..d {
                v[k] -= p * b[k];
            }
        }
        let l = norm(&v);
        if l > 1e-8 {
            basis.push(v.iter().map(|x| x / l).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// `Per_s(set; container)` by Monte-Carlo over random lines meeting the
/// container, each line's interaction being computed exactly from traces.
pub fn fractional_perimeter(
    set: &GeomSet,
    container: &GeomSet,
    params: &FracParams,
    cfg: &PerimeterConfig,
) -> Result<PVResult> {
    let Some((center, radius)) = container.bounding_ball() else {
        return Err(FracError::domain("fractional perimeter needs a bounded container"));
    };
    if radius == 0.0 || matches!(set, GeomSet::Empty | GeomSet::Full) {
        return Ok(PVResult { value: 0.0, error_estimate: 0.0, evaluations: 0, truncation_radius: radius.max(1e-300) });
    }
    let d = params.n + 1;
    if center.len() != d {
        return Err(FracError::domain("container dimension does not match n+1"));
    }
    if cfg.samples == 0 {
        return Err(FracError::domain("perimeter needs at least one sample"));
    }
    let s = params.s;
    let opts = LineOpts::default();
    let strata = 1usize << d;
    let counts = split(cfg.samples, strata);
    let stats: Vec<(f64, f64, usize)> = (0..strata)
        .into_par_iter()
        .map(|k| {
            let mut rng = stratum_rng(cfg.seed, k);
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..counts[k] {
                // direction: uniform on the sphere, sign of last coordinate from the stratum
                let omega = loop {
                    let v: Vec<f64> = (0..d).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
                    let l = norm(&v);
                    if l > 1e-3 && l < 1.0 {
                        let mut w: Vec<f64> = v.iter().map(|x| x / l).collect();
                        if (k & 1 == 1) != (w[d - 1] >= 0.0) {
                            w.iter_mut().for_each(|x| *x = -*x);
                        }
                        break w;
                    }
                };
                let basis = orthogonal_basis(&omega);
                // offset: uniform in the (d-1)-ball of radius `radius`, orthant from the stratum
                let z = loop {
                    let v: Vec<f64> = (0..d - 1)
                        .map(|i| {
                            let u = rng.gen::<f64>();
                            if (k >> (i + 1)) & 1 == 1 { u } else { -u }
                        })
                        .collect();
                    if norm(&v) < 1.0 {
                        break v;
                    }
                };
                let mut o = center.clone();
                for (b, zi) in basis.iter().zip(&z) {
                    for i in 0..d {
                        o[i] += radius * zi * b[i];
                    }
                }
                let tf = line_intervals(set, &o, &omega, &opts);
                let tc = line_intervals(container, &o, &omega, &opts);
                let v = line_interaction(&tf, &tc, s);
                sum += v;
                sum2 += v * v;
            }
            (sum, sum2, counts[k])
        })
        .collect();
    // measure of the line family: (|S^n|/2) · |B^n| R^n, each line counted once
    let family = 0.5 * sphere_area(d) * ball_volume(d - 1) * radius.powi(d as i32 - 1);
    let mut value = 0.0;
    let mut var = 0.0;
    for (sum, sum2, m) in &stats {
        if *m == 0 {
            continue;
        }
        let mf = *m as f64;
        let mean = sum / mf;
        let v = (sum2 / mf - mean * mean).max(0.0) / mf.max(1.0);
        let w = 1.0 / strata as f64;
        value += w * mean;
        var += w * w * v;
    }
    let half = 0.5 * family;
    Ok(PVResult {
        value: half * value,
        error_estimate: half * var.sqrt(),
        evaluations: cfg.samples,
        truncation_radius: radius,
    })
}
