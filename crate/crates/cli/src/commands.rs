use crate::args::*;
use crate::output::{to_json, Report};
use fracmin_core::barrier::{beta_constant, decay_fit, supersolution_radius, BarrierSpec};
use fracmin_core::curvature::{curvature_ball, curvature_indicator, curvature_subgraph, SubgraphOpts};
use fracmin_core::geometry::{fractional_perimeter, GeomDocument, GeomSet, GraphFn, PerimeterConfig, TailRegistration};
use fracmin_core::halfspace_sim::{density_check, run_slide, CandidateSet, DensityMode, RaySampler, SlideConfig, TouchedBall};
use fracmin_core::{CurvatureResult, FracError, FracParams, GKernel, QuadConfig, Result};
use serde::Serialize;
use std::fmt::Write;
use std::path::Path;

pub const DENSITY_HEADER: &str = "# fracmin density v1";

pub fn quad(g: &Global) -> Result<QuadConfig> {
    let base = QuadConfig::default();
    match g.tol {
        None => Ok(base),
        Some(t) if t > 0.0 && t.is_finite() => Ok(base.with_tol(t, t * 1e-3)),
        Some(t) => Err(FracError::Input(format!("--tol {t} must be positive"))),
    }
}

pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| FracError::Input(format!("{what}: cannot parse {t:?}"))))
        .collect()
}

fn parse_point(text: Option<&str>, dim: usize, default: Option<Vec<f64>>) -> Result<Vec<f64>> {
    let p = match text {
        None => default.ok_or_else(|| FracError::Input("--point is required for this set".into()))?,
        Some("origin") => vec![0.0; dim],
        Some(t) => parse_list(t, "--point")?,
    };
    if p.len() != dim {
        return Err(FracError::Input(format!("--point has {} coordinates, expected {dim}", p.len())));
    }
    Ok(p)
}

fn load_document(path: &Path) -> Result<GeomDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| FracError::Input(format!("{}: {e}", path.display())))?;
    GeomDocument::from_json(&text)
}

fn unit(dim: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[k] = 1.0;
    v
}

/// A resolved set with its registered tail and natural boundary point.
struct Resolved {
    set: GeomSet,
    tail: Option<TailRegistration>,
    point: Option<Vec<f64>>,
}

fn resolve(src: &SetSource, n: usize, complement: bool) -> Result<Resolved> {
    let dim = n + 1;
    let r = match (&src.set, src.shape) {
        (Some(path), _) => {
            let doc = load_document(path)?;
            if doc.set.dim().is_some_and(|d| d != dim) {
                return Err(FracError::domain(format!("set lives in R^{}, expected R^{dim}", doc.set.dim().unwrap())));
            }
            Resolved { set: doc.set, tail: doc.tail, point: None }
        }
        (None, Some(Shape::Halfspace)) => Resolved {
            set: GeomSet::lower_half_space(dim, 0.0),
            tail: Some(TailRegistration::lower_half_space(dim, 0.0, 0.0, 0.0, 0.0)),
            point: Some(vec![0.0; dim]),
        },
        (None, Some(Shape::Ball)) => {
            let c: Vec<f64> = unit(dim, n).iter().map(|v| v * src.radius).collect();
            Resolved {
                set: GeomSet::ball(c.clone(), src.radius),
                tail: Some(TailRegistration::Bounded { center: c, radius: src.radius }),
                point: Some(vec![0.0; dim]),
            }
        }
        (None, Some(Shape::Barrier)) => {
            let spec = BarrierSpec::new(n, 0.5, src.alpha, src.eps)?;
            Resolved { set: spec.set(), tail: Some(spec.tail()), point: Some(spec.point(src.r)) }
        }
        (None, None) => return Err(FracError::Input("one of --set or --shape is required".into())),
    };
    if !complement {
        return Ok(r);
    }
    let tail = match r.tail {
        Some(TailRegistration::Bounded { center, radius }) => Some(TailRegistration::CoBounded { center, radius }),
        Some(TailRegistration::CoBounded { center, radius }) => Some(TailRegistration::Bounded { center, radius }),
        Some(TailRegistration::HalfSpace { normal, offset, a, b, gamma }) => Some(TailRegistration::HalfSpace {
            normal: normal.iter().map(|v| -v).collect(),
            offset: -offset,
            a,
            b,
            gamma,
        }),
        None => None,
    };
    Ok(Resolved { set: r.set.complement(), tail, point: r.point })
}

pub fn curvature(a: &CurvatureArgs, g: &Global) -> Result<Report> {
    let cfg = quad(g)?;
    let params = FracParams::new(a.n, a.s)?;
    let dim = a.n + 1;
    let graph_at = |u: &GraphFn, x: &[f64]| -> Result<CurvatureResult> {
        curvature_subgraph(u, &x[..a.n], &params, &cfg, SubgraphOpts::default())
    };
    let res = match (a.source.shape, a.method) {
        (Some(Shape::Ball), MethodArg::Auto | MethodArg::Radial) => {
            if a.point.is_some() {
                return Err(FracError::Input("the radial ball evaluation is reported at the origin; drop --point".into()));
            }
            curvature_ball(&params, a.source.radius, !a.complement)?
        }
        (Some(Shape::Barrier), MethodArg::Auto) => {
            let spec = BarrierSpec::new(a.n, a.s, a.source.alpha, a.source.eps)?;
            fracmin_core::barrier::barrier_curvature(&spec, a.source.r, &cfg)?
        }
        (Some(Shape::Barrier), MethodArg::Graph) => {
            let spec = BarrierSpec::new(a.n, a.s, a.source.alpha, a.source.eps)?;
            graph_at(&spec.graph(), &spec.point(a.source.r))?
        }
        (Some(Shape::Halfspace), m) if !a.complement && (m == MethodArg::Graph || (m == MethodArg::Auto && a.n > 2)) => {
            let x = parse_point(a.point.as_deref(), dim, Some(vec![0.0; dim]))?;
            graph_at(&GraphFn::constant(0.0), &x)?
        }
        (_, MethodArg::Graph | MethodArg::Radial) => {
            return Err(FracError::domain("this set only supports the indicator evaluation"));
        }
        _ => {
            let r = resolve(&a.source, a.n, a.complement)?;
            let x = parse_point(a.point.as_deref(), dim, r.point)?;
            curvature_indicator(&r.set, r.tail.as_ref(), &x, &params, &cfg)?
        }
    };
    let json = to_json(&res);
    Ok(Report { stdout: json.clone(), ..Report::default() }.with_file("curvature.json", json))
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && k >= 2) {
        return Err(FracError::Input("radius grid needs 0 < r-min < r-max and at least 2 points".into()));
    }
    Ok((0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect())
}

#[derive(Serialize)]
struct BarrierSummary {
    spec: BarrierSpec,
    beta: f64,
    beta_error: f64,
    beta_sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    supersolution: Option<fracmin_core::barrier::SupersolutionRadius>,
}

#[derive(Serialize)]
struct FitSummary {
    radii: Vec<f64>,
    fitted_exponent: f64,
    target_exponent: f64,
    residual_exponent: f64,
    residual_bound: f64,
    c_empirical: f64,
    c0_empirical: f64,
}

fn sign_of(v: f64, err: f64) -> i8 {
    if v > 3.0 * err {
        1
    } else if v < -3.0 * err {
        -1
    } else {
        0
    }
}

pub fn barrier(a: &BarrierArgs, g: &Global) -> Result<Report> {
    let cfg = quad(g)?;
    let spec = BarrierSpec::new(a.n, a.s, a.alpha, a.eps)?;
    let beta = beta_constant(a.n, a.s, a.alpha, &cfg)?;
    let mut summary = BarrierSummary {
        spec,
        beta: beta.value,
        beta_error: beta.error_estimate,
        beta_sign: sign_of(beta.value, beta.error_estimate),
        fit: None,
        supersolution: None,
    };
    let mut csv = None;
    if !a.beta_only {
        if a.fit || !a.find_r {
            let grid = log_grid(a.r_min, a.r_max, a.r_points)?;
            let prof = decay_fit(&spec, &grid, &cfg)?;
            csv = Some(prof.to_csv());
            summary.fit = Some(FitSummary {
                radii: prof.radii(),
                fitted_exponent: prof.fitted_exponent,
                target_exponent: a.alpha - 1.0 - a.s,
                residual_exponent: prof.residual_exponent,
                residual_bound: 3.0 * (a.alpha - 1.0) - a.s,
                c_empirical: prof.c_empirical,
                c0_empirical: prof.c0_empirical,
            });
        }
        if a.find_r {
            if a.n != 1 {
                return Err(FracError::domain("the supersolution radius search is implemented for n = 1"));
            }
            summary.supersolution = Some(supersolution_radius(a.s, a.alpha, &cfg)?);
        }
    }
    let json = to_json(&summary);
    let mut r = Report { stdout: json.clone(), ..Report::default() }.with_file("barrier_summary.json", json);
    if let Some(c) = csv {
        r = r.with_file("barrier_profile.csv", c);
    }
    Ok(r)
}

#[derive(Serialize)]
struct BetaReport {
    n: usize,
    s: f64,
    alpha: f64,
    value: f64,
    error_estimate: f64,
    evaluations: usize,
    sign: i8,
}

pub fn beta(a: &BetaArgs, g: &Global) -> Result<Report> {
    let b = beta_constant(a.n, a.s, a.alpha, &quad(g)?)?;
    let r = BetaReport {
        n: a.n,
        s: a.s,
        alpha: a.alpha,
        value: b.value,
        error_estimate: b.error_estimate,
        evaluations: b.evaluations,
        sign: sign_of(b.value, b.error_estimate),
    };
    let json = to_json(&r);
    Ok(Report { stdout: json.clone(), ..Report::default() }.with_file("beta.json", json))
}

pub fn slide(a: &SlideArgs, g: &Global) -> Result<Report> {
    let sampler = RaySampler { half_width: a.sample_width, depth: a.sample_depth, spacing: a.spacing };
    let e = match (&a.set, a.fixture) {
        (Some(path), _) => {
            let doc = load_document(path)?;
            let tail = doc.tail.ok_or_else(|| FracError::domain("candidate set has no tail registration"))?;
            let dim = doc.set.dim().ok_or_else(|| FracError::domain("candidate set has no dimension"))?;
            if dim < 2 {
                return Err(FracError::domain("candidate set must live in R^{n+1} with n ≥ 1"));
            }
            CandidateSet::new(dim - 1, doc.set, sampler, tail)?
        }
        (None, Some(Fixture::Halfspace)) => CandidateSet::half_space(a.n, a.depth, sampler)?,
        (None, Some(Fixture::Notched)) => CandidateSet::notched(a.notch_width, a.depth, sampler)?,
        (None, None) => return Err(FracError::Input("one of --set or --fixture is required".into())),
    };
    let cfg = SlideConfig {
        s: a.s,
        quad: quad(g)?,
        volume_samples: a.volume_samples,
        seed: g.seed,
        ..SlideConfig::default()
    };
    let trace = run_slide(&e, a.alpha, a.j_max, &cfg)?;
    let summary = trace.summary_json();
    Ok(Report { stdout: summary.clone(), ..Report::default() }
        .with_file("slide_trace.jsonl", trace.to_jsonl())
        .with_file("slide_summary.json", summary))
}

pub fn density(a: &DensityArgs, g: &Global) -> Result<Report> {
    let dim = a.n + 1;
    let r = resolve(&a.source, a.n, false)?;
    let q = parse_point(a.point.as_deref(), dim, r.point)?;
    let rho = parse_list(&a.rho, "--rho")?;
    let touched = match a.source.shape {
        Some(Shape::Ball) => Some(TouchedBall {
            center: unit(dim, a.n).iter().map(|v| v * a.source.radius).collect(),
            radius: a.source.radius,
            params: FracParams::new(a.n, a.s)?,
        }),
        _ => None,
    };
    let mode = match a.mode {
        ModeArg::Both => DensityMode::BothSides,
        ModeArg::ComplementOnly => DensityMode::ComplementOnly,
    };
    let rep = density_check(&r.set, &q, &rho, mode, a.samples, g.seed, touched.as_ref())?;
    let mut csv = format!("{DENSITY_HEADER}\nrho,inside,complement,sigma\n");
    for row in &rep.rows {
        let inside = row.inside.map(|v| format!("{v:e}")).unwrap_or_default();
        let _ = writeln!(csv, "{:e},{inside},{:e},{:e}", row.rho, row.complement, row.sigma);
    }
    let json = to_json(&rep);
    Ok(Report { stdout: json.clone(), ..Report::default() }
        .with_file("density.csv", csv)
        .with_file("density_summary.json", json))
}

pub fn perimeter(a: &PerimeterArgs, g: &Global) -> Result<Report> {
    let dim = a.n + 1;
    let params = FracParams::new(a.n, a.s)?;
    let r = resolve(&a.source, a.n, false)?;
    let c = parse_point(a.container_center.as_deref(), dim, Some(vec![0.0; dim]))?;
    let container = GeomSet::ball(c, a.container_radius);
    let v = fractional_perimeter(&r.set, &container, &params, &PerimeterConfig { samples: a.lines, seed: g.seed })?;
    let json = to_json(&v);
    Ok(Report { stdout: json.clone(), ..Report::default() }.with_file("perimeter.json", json))
}

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct CheckReport {
    passed: bool,
    suites: Vec<Suite>,
}

fn kernel_grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| -20.0 + 40.0 * (i as f64 + 0.5) / k as f64).collect()
}

fn params_grid() -> Vec<FracParams> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for s in [0.3, 0.5, 0.7] {
            out.push(FracParams { n, s });
        }
    }
    out
}

fn suite_kernel(points: usize) -> Result<Vec<Suite>> {
    let ts = kernel_grid(points);
    let (mut odd, mut mono, mut lemma) = (0.0f64, 0usize, 0usize);
    for p in params_grid() {
        let k = GKernel::new(p)?;
        for w in ts.windows(2) {
            odd = odd.max((k.g(w[0]) + k.g(-w[0])).abs());
            if k.g(w[1]) < k.g(w[0]) {
                mono += 1;
            }
        }
        let c = k.tilde_bound_constant();
        // Weyl sequence pairs on [-10, 10]^2
        for i in 0..points {
            let a = 20.0 * ((i as f64 * 0.754_877_666_246_692_7).fract()) - 10.0;
            let b = 20.0 * ((i as f64 * 0.569_840_290_998_053_3).fract()) - 10.0;
            let lhs = (k.g_tilde(a) - k.g_tilde(b)).abs();
            let rhs = c * (a * a).max(b * b) * (a - b).abs();
            if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                lemma += 1;
            }
        }
    }
    Ok(vec![
        Suite { name: "kernel-oddness", passed: odd <= 1e-14, detail: format!("max |G(t) + G(-t)| = {odd:e}") },
        Suite { name: "kernel-monotone", passed: mono == 0, detail: format!("{mono} decreasing steps") },
        Suite { name: "tilde-lemma", passed: lemma == 0, detail: format!("{lemma} violations") },
    ])
}

fn suite_geometry(cfg: &QuadConfig) -> Result<Vec<Suite>> {
    let mut flat = 0.0f64;
    let mut ball_gap = 0.0f64;
    let mut anti_gap = 0.0f64;
    for n in [1, 2] {
        let p = FracParams { n, s: 0.5 };
        let d = n + 1;
        let o = vec![0.0; d];
        let hs = GeomSet::lower_half_space(d, 0.0);
        let h = curvature_indicator(&hs, Some(&TailRegistration::lower_half_space(d, 0.0, 0.0, 0.0, 0.0)), &o, &p, cfg)?;
        flat = flat.max(h.value.abs());
        let c = unit(d, n);
        let ball = GeomSet::ball(c.clone(), 1.0);
        let inside = curvature_indicator(&ball, Some(&TailRegistration::Bounded { center: c.clone(), radius: 1.0 }), &o, &p, cfg)?;
        let radial = curvature_ball(&p, 1.0, true)?;
        ball_gap = ball_gap.max((inside.value - radial.value).abs() / (3.0 * inside.combined_error(&radial)));
        let out = curvature_indicator(&ball.complement(), Some(&TailRegistration::CoBounded { center: c, radius: 1.0 }), &o, &p, cfg)?;
        anti_gap = anti_gap.max((inside.value + out.value).abs() / (3.0 * inside.combined_error(&out)));
    }
    let doc = GeomDocument::new(GeomSet::ball(vec![0.0, 1.0], 1.0).minus(GeomSet::lower_half_space(2, 0.5)));
    let round = GeomDocument::from_json(&doc.to_json())? == doc;
    Ok(vec![
        Suite { name: "flat-zero", passed: flat <= 1e-6, detail: format!("max |H| = {flat:e}") },
        Suite { name: "ball-methods-agree", passed: ball_gap <= 1.0, detail: format!("gap / 3σ = {ball_gap:.3}") },
        Suite { name: "complement-antisymmetry", passed: anti_gap <= 1.0, detail: format!("gap / 3σ = {anti_gap:.3}") },
        Suite { name: "geomset-roundtrip", passed: round, detail: String::new() },
    ])
}

fn suite_trichotomy(cfg: &QuadConfig) -> Result<Suite> {
    let mut wrong = Vec::new();
    for (s, alpha) in [(0.5, 0.25), (0.5, 0.75), (0.5, 1.25), (0.3, 0.6), (0.7, 0.2)] {
        let b = beta_constant(1, s, alpha, cfg)?;
        let want = if alpha < s { 1 } else { -1 };
        if sign_of(b.value, b.error_estimate) != want {
            wrong.push(format!("s={s} α={alpha}: β={:e}", b.value));
        }
    }
    let at = beta_constant(1, 0.5, 0.5, cfg)?.value.abs();
    let passed = wrong.is_empty() && at <= 1e-6;
    Ok(Suite { name: "beta-trichotomy", passed, detail: format!("|β(α=s)| = {at:e}; {}", wrong.join("; ")) })
}

pub fn check(a: &CheckArgs, g: &Global) -> Result<Report> {
    if a.points < 2 {
        return Err(FracError::Input("--points must be at least 2".into()));
    }
    let cfg = quad(g)?;
    let mut suites = suite_kernel(a.points)?;
    suites.extend(suite_geometry(&cfg)?);
    suites.push(suite_trichotomy(&cfg)?);
    let passed = suites.iter().all(|s| s.passed);
    let json = to_json(&CheckReport { passed, suites });
    let failure = (!passed).then(|| FracError::Certification("invariant suite failed".into()));
    Ok(Report { stdout: json.clone(), files: vec![("check.json".into(), json)], failure })
}
