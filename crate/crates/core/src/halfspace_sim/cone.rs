//! Cone dichotomy, witness regions, the Λ̂ inclusion and the ice-cream-cone radius.

use super::{horiz, norm};
use crate::error::{FracError, Result};
use crate::geometry::{mc_volume, GeomSet, Window};
use crate::num::ball_volume;
use crate::params::FracParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    GraphType,
    ConeEmpty,
    ConeHitsBoundary,
}

/// Resolution of the sampled cones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSampling {
    /// Depth levels below the apex.
    pub levels: usize,
    /// Points per lateral ray at each level.
    pub lateral: usize,
    /// Lateral directions for n = 2 (n = 1 uses ±e_1, n ≥ 3 uses ±e_i).
    pub directions: usize,
}

impl Default for ConeSampling {
    fn default() -> Self {
        Self { levels: 64, lateral: 32, directions: 16 }
    }
}

fn directions(n: usize, k: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..k.max(1))
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k.max(1) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => (0..2 * n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                v
            })
            .collect(),
    }
}

fn cone_point(p: &[f64], u: &[f64], t: f64, depth: f64) -> Vec<f64> {
    let n = p.len() - 1;
    let mut x = p.to_vec();
    for i in 0..n {
        x[i] += t * u[i];
    }
    x[n] -= depth;
    x
}

/// Points of `(Λ_ℓ ∩ B_radius) + p`, indexed `[level][direction][lateral]`.
fn cone_grid(p: &[f64], ell: f64, radius: f64, cs: &ConeSampling) -> (Vec<Vec<Vec<Vec<f64>>>>, f64) {
    let n = p.len() - 1;
    let dirs = directions(n, cs.directions);
    let h = radius / (cs.levels + 1) as f64;
    let grid = (1..=cs.levels)
        .map(|k| {
            let d = h * k as f64;
            let rmax = (d / ell).min((radius * radius - d * d).max(0.0).sqrt()) * (1.0 - 1e-9);
            dirs.iter()
                .map(|u| (0..=cs.lateral).map(|m| cone_point(p, u, rmax * m as f64 / cs.lateral as f64, d)).collect())
                .collect()
        })
        .collect();
    (grid, h)
}

fn bisect(set: &GeomSet, a: &[f64], b: &[f64]) -> Vec<f64> {
    let ina = set.contains(a);
    let (mut lo, mut hi) = (a.to_vec(), b.to_vec());
    for _ in 0..60 {
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(x, y)| 0.5 * (x + y)).collect();
        if set.contains(&mid) == ina {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.iter().zip(&hi).map(|(x, y)| 0.5 * (x + y)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeTest {
    pub tag: CaseTag,
    /// Boundary point located in the cone (cone-hits-boundary only).
    pub q: Option<Vec<f64>>,
    pub inside: usize,
    pub outside: usize,
    /// Depth spacing of the sample levels.
    pub resolution: f64,
    /// Mixed samples without a resolvable boundary point.
    pub indeterminate: bool,
}

/// Classifies `(Λ_ℓ ∩ B_{4|p|}) + p` against `set` on a sample grid. A mixed
/// verdict is resolved to the located boundary point with the smallest drop
/// below `p` that exceeds half the level spacing.
pub fn cone_inclusion_test(set: &GeomSet, p: &[f64], ell: f64, cs: &ConeSampling) -> Result<ConeTest> {
    if !(ell > 0.0 && ell < 1.0) {
        return Err(FracError::domain("cone aperture must lie in (0, 1)"));
    }
    if cs.levels == 0 || cs.lateral == 0 {
        return Err(FracError::domain("cone sampling needs levels and lateral points"));
    }
    let n = p.len() - 1;
    let radius = 4.0 * norm(p);
    let (g, h) = cone_grid(p, ell, radius, cs);
    let mem: Vec<Vec<Vec<bool>>> =
        g.iter().map(|lv| lv.iter().map(|row| row.iter().map(|x| set.contains(x)).collect()).collect()).collect();
    let inside = mem.iter().flatten().flatten().filter(|b| **b).count();
    let total = mem.iter().flatten().flatten().count();
    let outside = total - inside;
    let mut out = ConeTest { tag: CaseTag::GraphType, q: None, inside, outside, resolution: h, indeterminate: false };
    if outside == 0 {
        return Ok(out);
    }
    if inside == 0 {
        out.tag = CaseTag::ConeEmpty;
        return Ok(out);
    }
    out.tag = CaseTag::ConeHitsBoundary;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |a: &[f64], b: &[f64]| {
        let q = bisect(set, a, b);
        let drop = p[n] - q[n];
        let w: Vec<f64> = q.iter().zip(p).map(|(x, y)| x - y).collect();
        let in_cone = -w[n] > ell * horiz(&w) && norm(&w) < radius;
        if in_cone && drop >= 0.5 * h && best.as_ref().map_or(true, |(d, _)| drop < *d) {
            best = Some((drop, q));
        }
    };
    for k in 0..g.len() {
        for u in 0..g[k].len() {
            for m in 0..g[k][u].len() {
                if m + 1 < g[k][u].len() && mem[k][u][m] != mem[k][u][m + 1] {
                    consider(&g[k][u][m], &g[k][u][m + 1]);
                }
                if k + 1 < g.len() && mem[k][u][m] != mem[k + 1][u][m] {
                    consider(&g[k][u][m], &g[k + 1][u][m]);
                }
            }
        }
    }
    match best {
        Some((_, q)) => out.q = Some(q),
        None => out.indeterminate = true,
    }
    Ok(out)
}

/// Certified witness region `D` with its recorded bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub case: CaseTag,
    pub region: GeomSet,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Lower bound on `dist(D, p)`.
    pub distance: f64,
    pub volume: f64,
    pub volume_error: f64,
    /// `volume - 3σ` (exact volume for the cone-empty ball).
    pub volume_lower: f64,
    /// `D ⊂ B_enclosing(p)`.
    pub enclosing: f64,
    /// `volume_lower / enclosing^{n+1+s}`, a lower bound for the correction integral.
    pub integral_lower: f64,
}

/// Builds `D` for a cone verdict and certifies `dist(D, p) > 0`,
/// `D ⊂ Λ̂_ℓ + p` and a positive volume.
pub fn witness_region(
    set: &GeomSet,
    test: &ConeTest,
    p: &[f64],
    ell: f64,
    params: &FracParams,
    samples: usize,
    seed: u64,
) -> Result<Witness> {
    let n = p.len() - 1;
    let pn = norm(p);
    let k = params.kernel_exponent();
    match test.tag {
        CaseTag::GraphType => Err(FracError::domain("graph-type verdicts have no witness region")),
        CaseTag::ConeEmpty => {
            let radius = pn / 8.0;
            let mut center = p.to_vec();
            center[n] -= 0.5 * pn;
            let distance = 0.5 * pn - radius;
            // Distance from the axis point at depth |p|/2 to ∂Λ_ℓ, and to ∂B_{4|p|}.
            let to_cone = 0.5 * pn / (1.0 + ell * ell).sqrt();
            if !(distance > 0.0 && to_cone >= radius && 0.5 * pn + radius <= 4.0 * pn) {
                return Err(FracError::geometry("cone-empty ball fails the cone inclusion"));
            }
            let volume = ball_volume(n + 1) * radius.powi(n as i32 + 1);
            Ok(Witness {
                case: test.tag,
                region: GeomSet::ball(center.clone(), radius),
                center,
                radius,
                distance,
                volume,
                volume_error: 0.0,
                volume_lower: volume,
                enclosing: pn,
                integral_lower: volume / pn.powf(k),
            })
        }
        CaseTag::ConeHitsBoundary => {
            let q = test.q.as_ref().ok_or_else(|| FracError::geometry("no boundary point located in the cone"))?;
            let drop = p[n] - q[n];
            let w: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
            if !(drop > 0.0 && drop > ell * horiz(&w) && norm(&w) < 4.0 * pn) {
                return Err(FracError::geometry("boundary point is not inside the cone"));
            }
            // |x - p| < (1/2 + sqrt(1/ℓ² + 1)) drop ≤ (4/ℓ) drop on D.
            if 0.5 + (1.0 / (ell * ell) + 1.0).sqrt() > 4.0 / ell {
                return Err(FracError::geometry("enclosing-ball chain fails"));
            }
            // On D: (x-p)_{n+1} + (ℓ/4)|x'-p'| ≤ (5/4)|x-q| - drop + (ℓ/4)|q'-p'| < -drop/8.
            if !(1.25 * 0.5 * drop - drop + 0.25 * ell * horiz(&w) < 0.0) {
                return Err(FracError::geometry("Λ̂ inclusion chain fails"));
            }
            let radius = 0.5 * drop;
            let region = GeomSet::ball(q.clone(), radius).minus(set.clone());
            let v = mc_volume(&region, &Window::Ball { center: q.clone(), radius }, samples, seed)?;
            let volume_lower = v.value - 3.0 * v.std_error;
            if !(volume_lower > 0.0) {
                return Err(FracError::geometry("witness region has no certified volume"));
            }
            let enclosing = 4.0 * drop / ell;
            Ok(Witness {
                case: test.tag,
                region,
                center: q.clone(),
                radius,
                distance: drop - radius,
                volume: v.value,
                volume_error: v.std_error,
                volume_lower,
                enclosing,
                integral_lower: volume_lower / enclosing.powf(k),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaHatCheck {
    /// Whether the largeness conditions of the inclusion hold:
    /// `|p'| - 4 p_{n+1}/ℓ ≥ 1` and `j ℓ / 4 > 1`.
    pub applicable: bool,
    pub samples: usize,
    pub violations: usize,
}

impl LambdaHatCheck {
    pub fn passes(&self) -> bool {
        !self.applicable || self.violations == 0
    }
}

/// Samples the upper surface of `Λ̂_ℓ + p` over `B_{4 p_{n+1}/ℓ}(p')`
/// (elsewhere it lies below the hyperplane) and counts points outside `F_ε`.
pub fn lambda_hat_check(p: &[f64], ell: f64, eps: f64, alpha: f64, j: usize, per_ray: usize) -> LambdaHatCheck {
    let n = p.len() - 1;
    let f = GeomSet::Barrier { n, alpha, eps };
    let rho = (4.0 * p[n] / ell).max(0.0);
    let applicable = horiz(p) - rho >= 1.0 && j as f64 * ell / 4.0 > 1.0;
    let delta = 1e-12 * (1.0 + norm(p));
    let mut samples = 0;
    let mut violations = 0;
    for u in directions(n, 16) {
        for m in 0..=per_ray {
            let t = rho * m as f64 / per_ray.max(1) as f64;
            let x = cone_point(p, &u, t, 0.25 * ell * t + delta);
            samples += 1;
            violations += usize::from(!f.contains(&x));
        }
    }
    LambdaHatCheck { applicable, samples, violations }
}

/// Oscillation of the heights of boundary samples of `(E_j - p)/(2|p|)` in
/// the window `|z'| < 1, |z_{n+1}| < 1`.
pub fn flatness_score(points: &[Vec<f64>], p: &[f64]) -> Option<f64> {
    let n = p.len() - 1;
    let scale = 2.0 * norm(p);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in points {
        let z: Vec<f64> = y.iter().zip(p).map(|(a, b)| (a - b) / scale).collect();
        if horiz(&z) < 1.0 && z[n].abs() < 1.0 {
            lo = lo.min(z[n]);
            hi = hi.max(z[n]);
        }
    }
    (hi >= lo).then(|| hi - lo)
}

/// Sampled membership `G_{r} ⊂ set` for the ice-cream cone
/// `∪_{x ∈ (Λ_ℓ ∩ B_r) + p} B_{(p - x)_{n+1}/4}(x)`.
fn ice_cream_inside(set: &GeomSet, p: &[f64], ell: f64, r: f64, cs: &ConeSampling) -> bool {
    let n = p.len() - 1;
    let (g, _) = cone_grid(p, ell, r, cs);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..=n {
        for sgn in [1.0, -1.0] {
            let mut v = vec![0.0; n + 1];
            v[i] = sgn;
            dirs.push(v);
        }
    }
    g.iter().flatten().flatten().all(|x| {
        let rad = 0.25 * (p[n] - x[n]);
        set.contains(x)
            && dirs.iter().all(|d| {
                let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + rad * (1.0 - 1e-9) * b).collect();
                set.contains(&y)
            })
    })
}

/// `sup{r : G_r ⊂ set}` by bisection on `(0, 4|p|]`; `None` when no sampled
/// radius down to `4|p|·1e-6` is admissible.
pub fn ice_cream_radius(set: &GeomSet, p: &[f64], ell: f64, cs: &ConeSampling) -> Option<f64> {
    let top = 4.0 * norm(p);
    if ice_cream_inside(set, p, ell, top, cs) {
        return Some(top);
    }
    let mut lo = top * 1e-6;
    if !ice_cream_inside(set, p, ell, lo, cs) {
        return None;
    }
    let mut hi = top;
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if ice_cream_inside(set, p, ell, mid, cs) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}
