//! The repaired supersolution check and the full sliding trace.

use super::cone::{
    cone_inclusion_test, flatness_score, ice_cream_radius, lambda_hat_check, witness_region, CaseTag, ConeSampling,
    LambdaHatCheck, Witness,
};
use super::{ell_schedule, epsilon_infimum, horiz, norm, touching_points, CandidateSet};
use crate::barrier::{barrier_evaluation, BarrierSpec};
use crate::curvature::{correction_integral, CorrectionConfig};
use crate::error::{FracError, Result};
use crate::geometry::GeomSet;
use crate::params::QuadConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Both terms of `H_{F_ε ∖ D}(p) = H_{F_ε}(p) + 2 ∫_D |y - p|^{-(n+1+s)} dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairVerdict {
    pub barrier: f64,
    pub barrier_error: f64,
    pub correction: f64,
    pub correction_error: f64,
    pub total: f64,
    pub error: f64,
    /// `total > error`.
    pub positive: bool,
    /// `total < -error`.
    pub negative: bool,
}

pub fn repaired_supersolution_check(
    spec: &BarrierSpec,
    d: &GeomSet,
    p: &[f64],
    cfg: &QuadConfig,
    corr: &CorrectionConfig,
) -> Result<RepairVerdict> {
    if p.len() != spec.n + 1 {
        return Err(FracError::domain("point must lie in R^{n+1}"));
    }
    let r = horiz(p);
    if (p[spec.n] - spec.height(r)).abs() > 1e-9 * (1.0 + norm(p)) {
        return Err(FracError::geometry("point is not on the barrier boundary"));
    }
    let h = barrier_evaluation(spec, r, cfg)?.curvature;
    let c = correction_integral(d, p, &spec.params(), corr)?;
    let total = h.value + 2.0 * c.value;
    let error = h.error_estimate + 2.0 * c.error_estimate;
    Ok(RepairVerdict {
        barrier: h.value,
        barrier_error: h.error_estimate,
        correction: c.value,
        correction_error: c.error_estimate,
        total,
        error,
        positive: total > error,
        negative: total < -error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlideConfig {
    pub s: f64,
    pub quad: QuadConfig,
    pub correction: CorrectionConfig,
    pub cone: ConeSampling,
    /// Radius of the excluded cylinder around the vertical axis.
    pub cutoff: f64,
    pub touch_tol: f64,
    pub volume_samples: usize,
    /// Base seed; step j uses `seed + j`.
    pub seed: u64,
    /// Touching points beyond this norm end the step.
    pub p_horizon: f64,
    pub lambda_per_ray: usize,
}

impl Default for SlideConfig {
    fn default() -> Self {
        Self {
            s: 0.5,
            quad: QuadConfig::default(),
            correction: CorrectionConfig::default(),
            cone: ConeSampling::default(),
            cutoff: 1.0,
            touch_tol: 1e-9,
            volume_samples: 100_000,
            seed: 1,
            p_horizon: 1e6,
            lambda_per_ray: 200,
        }
    }
}

/// Which bookkeeping inequalities held at one step (`None`: not reached).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateChecks {
    /// `ε_j ≤ j^{-1/(1-α)}`.
    pub eps_bound: Option<bool>,
    /// `(p_j)_{n+1} ∈ (0, 1/j]`.
    pub altitude: Option<bool>,
    pub lambda_hat: Option<bool>,
    pub positivity: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideState {
    pub j: usize,
    pub eps: Option<f64>,
    pub eps_bound: f64,
    pub p: Option<Vec<f64>>,
    pub p_norm: Option<f64>,
    pub touching_count: usize,
    pub ell: Option<f64>,
    pub case_tag: Option<CaseTag>,
    pub q: Option<Vec<f64>>,
    pub indeterminate: bool,
    /// Report-only oscillation of the rescaled boundary samples.
    pub flatness: Option<f64>,
    /// Sampled ice-cream-cone supremum `r_j` (None when no radius is admissible).
    pub ice_cream_radius: Option<f64>,
    pub lambda_hat: Option<LambdaHatCheck>,
    pub witness: Option<Witness>,
    pub repaired: Option<RepairVerdict>,
    pub checks: StateChecks,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlideVerdict {
    /// Some `ε_j = 0`: the shifted set lies in the lower half-space.
    HalfSpace,
    /// A repaired barrier is a strict supersolution at a touching point.
    Contradiction,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideSummary {
    pub n: usize,
    pub alpha: f64,
    pub j_max: usize,
    pub config: SlideConfig,
    pub verdict: SlideVerdict,
    pub zero_eps: Vec<usize>,
    pub positive: Vec<usize>,
    pub eps_bound_held: bool,
    pub altitude_held: bool,
    pub lambda_hat_held: bool,
    /// `(j, j ℓ_j, ℓ_j^{n+2} |p_j|^{1-α})` along the trace.
    pub schedule_trend: Vec<(usize, f64, f64)>,
    /// Empirical minimum of `|p|^{s+1-α} ∫_D` over the witnesses (stand-in for c₂).
    pub c2_empirical: Option<f64>,
    pub violations: Vec<String>,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideTrace {
    pub states: Vec<SlideState>,
    pub summary: SlideSummary,
}

impl SlideTrace {
    /// One JSON object per state.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.states {
            out.push_str(&serde_json::to_string(s).expect("state serializes"));
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

fn step(e: &CandidateSet, alpha: f64, j: usize, cfg: &SlideConfig) -> SlideState {
    let seed = cfg.seed.wrapping_add(j as u64);
    let mut st = SlideState {
        j,
        eps: None,
        eps_bound: (j as f64).powf(-1.0 / (1.0 - alpha)),
        p: None,
        p_norm: None,
        touching_count: 0,
        ell: None,
        case_tag: None,
        q: None,
        indeterminate: false,
        flatness: None,
        ice_cream_radius: None,
        lambda_hat: None,
        witness: None,
        repaired: None,
        checks: StateChecks::default(),
        seed,
        error: None,
    };
    if let Err(err) = fill(e, alpha, cfg, &mut st) {
        st.error = Some(err.to_string());
    }
    st
}

fn fill(e: &CandidateSet, alpha: f64, cfg: &SlideConfig, st: &mut SlideState) -> Result<()> {
    let n = e.n;
    let j = st.j;
    let h = 1.0 / j as f64;
    let pts = e.shifted_points(h);
    let eps = epsilon_infimum(&pts, alpha, cfg.cutoff)?;
    st.eps = Some(eps);
    st.checks.eps_bound = Some(eps <= st.eps_bound * (1.0 + 1e-12));
    if eps == 0.0 {
        return Ok(());
    }
    let tps = touching_points(&pts, eps, alpha, cfg.touch_tol)?;
    st.touching_count = tps.len();
    let p = tps.iter().fold(&tps[0], |a, b| if norm(b) > norm(a) { b } else { a }).clone();
    let pn = norm(&p);
    st.p = Some(p.clone());
    st.p_norm = Some(pn);
    st.checks.altitude = Some(p[n] > 0.0 && p[n] <= h * (1.0 + 1e-12));
    if pn > cfg.p_horizon {
        return Err(FracError::Search(format!("touching point beyond the horizon |p| = {pn:e}")));
    }
    let ell = ell_schedule(j, pn, n, alpha);
    st.ell = Some(ell);
    let set = e.shifted_set(h);
    let test = cone_inclusion_test(&set, &p, ell, &cfg.cone)?;
    st.case_tag = Some(test.tag);
    st.q = test.q.clone();
    st.indeterminate = test.indeterminate;
    st.flatness = flatness_score(&pts, &p);
    st.ice_cream_radius = ice_cream_radius(&set, &p, ell, &cfg.cone);
    let lh = lambda_hat_check(&p, ell, eps, alpha, j, cfg.lambda_per_ray);
    st.lambda_hat = Some(lh);
    st.checks.lambda_hat = Some(lh.passes());
    if test.tag == CaseTag::GraphType || test.indeterminate {
        return Ok(());
    }
    let params = crate::params::FracParams::new(n, cfg.s)?;
    let w = witness_region(&set, &test, &p, ell, &params, cfg.volume_samples, seed_of(cfg, j))?;
    let spec = BarrierSpec::new(n, cfg.s, alpha, eps)?;
    let corr = CorrectionConfig { seed: seed_of(cfg, j), ..cfg.correction };
    let v = repaired_supersolution_check(&spec, &w.region, &p, &cfg.quad, &corr)?;
    st.witness = Some(w);
    st.repaired = Some(v);
    st.checks.positivity = Some(v.positive);
    Ok(())
}

fn seed_of(cfg: &SlideConfig, j: usize) -> u64 {
    cfg.seed.wrapping_add(j as u64)
}

/// Runs steps `j = 1..=j_max` (in parallel) on `E + e_{n+1}/j`.
pub fn run_slide(e: &CandidateSet, alpha: f64, j_max: usize, cfg: &SlideConfig) -> Result<SlideTrace> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FracError::domain("alpha must lie in (0, 1)"));
    }
    if j_max == 0 {
        return Err(FracError::domain("need at least one step"));
    }
    crate::params::FracParams::new(e.n, cfg.s)?;
    let states: Vec<SlideState> = (1..=j_max).into_par_iter().map(|j| step(e, alpha, j, cfg)).collect();

    let mut violations = Vec::new();
    let held = |f: fn(&StateChecks) -> Option<bool>, name: &str, v: &mut Vec<String>| {
        let bad: Vec<usize> = states.iter().filter(|s| f(&s.checks) == Some(false)).map(|s| s.j).collect();
        if !bad.is_empty() {
            v.push(format!("{name} fails at j = {bad:?}"));
        }
        bad.is_empty()
    };
    let eps_bound_held = held(|c| c.eps_bound, "ε_j bound (containment registration)", &mut violations);
    let altitude_held = held(|c| c.altitude, "touching altitude", &mut violations);
    let lambda_hat_held = held(|c| c.lambda_hat, "Λ̂ inclusion", &mut violations);
    let zero_eps: Vec<usize> = states.iter().filter(|s| s.eps == Some(0.0)).map(|s| s.j).collect();
    let positive: Vec<usize> = states.iter().filter(|s| s.checks.positivity == Some(true)).map(|s| s.j).collect();
    if !positive.is_empty() {
        violations.push(format!("repaired barrier is a strict supersolution at j = {positive:?}: not s-minimal"));
    }
    let verdict = if !zero_eps.is_empty() {
        SlideVerdict::HalfSpace
    } else if !positive.is_empty() {
        SlideVerdict::Contradiction
    } else {
        SlideVerdict::Inconclusive
    };
    let schedule_trend = states
        .iter()
        .filter_map(|s| Some((s.j, s.j as f64 * s.ell?, s.ell?.powi(e.n as i32 + 2) * s.p_norm?.powf(1.0 - alpha))))
        .collect();
    let c2_empirical = states
        .iter()
        .filter_map(|s| Some(s.repaired?.correction * s.p_norm?.powf(cfg.s + 1.0 - alpha)))
        .reduce(f64::min);
    let summary = SlideSummary {
        n: e.n,
        alpha,
        j_max,
        config: *cfg,
        verdict,
        zero_eps,
        positive,
        eps_bound_held,
        altitude_held,
        lambda_hat_held,
        schedule_trend,
        c2_empirical,
        violations,
        errors: states.iter().filter(|s| s.error.is_some()).count(),
    };
    Ok(SlideTrace { states, summary })
}
