use fracmin_core::curvature::{
    correction_integral, curvature_ball, gamma_constant, scaling_translation_check, unit_ball_curvature, CorrectionConfig,
};
use fracmin_core::geometry::{GeomSet, GraphFn, GraphTerm, TailRegistration};
use fracmin_core::{curvature_indicator, curvature_subgraph, FracParams, QuadConfig};
use fracmin_core::curvature::SubgraphOpts;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn within(a: f64, b: f64, err: f64, slack: f64) -> bool {
    (a - b).abs() <= 3.0 * err + slack
}

fn unit_ball(n: usize) -> (GeomSet, TailRegistration) {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    (GeomSet::ball(c.clone(), 1.0), TailRegistration::Bounded { center: c, radius: 1.0 })
}

fn bump(terms: &[(f64, f64, f64)]) -> GraphFn {
    GraphFn {
        terms: terms
            .iter()
            .map(|&(amp, c, width)| GraphTerm::Gaussian { amp, center: vec![c], width })
            .collect(),
    }
}

#[test]
fn gamma_one_half_closed_form() {
    // line pairing gives γ_{1,1/2} = Γ(1/4)² / √π
    let want = GAMMA_QUARTER * GAMMA_QUARTER / PI.sqrt();
    let p = FracParams { n: 1, s: 0.5 };
    let g = gamma_constant(&p).unwrap();
    assert!((g - want).abs() < 1e-5 * want, "{g} vs {want}");
    let (b, t) = unit_ball(1);
    let h = curvature_indicator(&b, Some(&t), &[0.0, 0.0], &p, &cfg()).unwrap();
    assert!((0.5 * h.value - want).abs() < 1e-5 * want, "{h:?}");
}

#[test]
fn ball_closed_forms_in_both_dimensions() {
    for s in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let n1 = 2f64.powf(1.0 - s) / s * PI.sqrt() * gamma(0.5 * (1.0 - s)) / gamma(1.0 - 0.5 * s);
        let (h1, e1) = unit_ball_curvature(&FracParams { n: 1, s }).unwrap();
        assert!((h1 - n1).abs() <= 3.0 * e1 + 1e-9 * n1, "n=1 s={s}: {h1} vs {n1}");
        let n2 = 4.0 * PI * 2f64.powf(-s) / (s * (1.0 - s));
        let (h2, e2) = unit_ball_curvature(&FracParams { n: 2, s }).unwrap();
        assert!((h2 - n2).abs() <= 3.0 * e2 + 1e-9 * n2, "n=2 s={s}: {h2} vs {n2}");
    }
    let p = FracParams { n: 2, s: 0.5 };
    let (b, t) = unit_ball(2);
    let h = curvature_indicator(&b, Some(&t), &[0.0; 3], &p, &cfg()).unwrap();
    let want = 4.0 * PI * 2f64.powf(-0.5) / 0.25;
    assert!((h.value - want).abs() < 1e-5 * want, "{h:?} vs {want}");
}

#[test]
fn radius_scaling_and_complement_of_balls() {
    let p = FracParams { n: 1, s: 0.3 };
    let unit = curvature_ball(&p, 1.0, true).unwrap();
    for r in [0.25, 3.0, 40.0] {
        let set = GeomSet::ball(vec![0.0, r], r);
        let tail = TailRegistration::Bounded { center: vec![0.0, r], radius: r };
        let h = curvature_indicator(&set, Some(&tail), &[0.0, 0.0], &p, &cfg()).unwrap();
        let want = r.powf(-p.s) * unit.value;
        assert!(within(h.value, want, h.error_estimate + unit.error_estimate, 1e-9 * want.abs()), "r={r}: {h:?}");
        let co = TailRegistration::CoBounded { center: vec![0.0, r], radius: r };
        let c = curvature_indicator(&set.complement(), Some(&co), &[0.0, 0.0], &p, &cfg()).unwrap();
        assert!(within(c.value, -h.value, c.error_estimate + h.error_estimate, 1e-9 * want.abs()));
        assert_eq!(curvature_ball(&p, r, false).unwrap().value, -curvature_ball(&p, r, true).unwrap().value);
    }
}

/// `∫_{B_r(c)} |y|^{-(2+s)} dy` in the plane by exact chords through the origin.
fn disk_kernel_integral(d: f64, r: f64, s: f64) -> f64 {
    let half = (r / d).asin();
    let m = 400_000;
    // midpoint rule on φ = half·sin(θ) removes the square-root endpoint behaviour
    let th_h = PI / m as f64;
    let mut acc = 0.0;
    for k in 0..m {
        let th = -0.5 * PI + (k as f64 + 0.5) * th_h;
        let phi = half * th.sin();
        let w = half * th.cos() * th_h;
        let disc = (r * r - d * d * phi.sin().powi(2)).max(0.0).sqrt();
        let (t1, t2) = (d * phi.cos() - disc, d * phi.cos() + disc);
        acc += w * (t1.powf(-s) - t2.powf(-s)) / s;
    }
    acc
}

#[test]
fn correction_of_a_small_ball_below_the_point() {
    let p = FracParams { n: 1, s: 0.5 };
    let want = disk_kernel_integral(0.5, 0.125, 0.5);
    let d = GeomSet::ball(vec![0.0, -0.5], 0.125);
    let quad = correction_integral(&d, &[0.0, 0.0], &p, &CorrectionConfig::default()).unwrap();
    assert!((quad.value - want).abs() < 1e-8 * want, "{quad:?} vs {want}");
    // the same region in a form that forces the Monte-Carlo path
    let wrapped = d.clone().intersect(GeomSet::Full);
    let mc_cfg = CorrectionConfig { samples: 4_000_000, ..CorrectionConfig::default() };
    let mc = correction_integral(&wrapped, &[0.0, 0.0], &p, &mc_cfg).unwrap();
    assert!(mc.error_estimate < 1e-3 * want);
    assert!((mc.value - want).abs() <= 3.0 * mc.error_estimate, "{mc:?} vs {want}");
}

#[test]
fn removing_a_region_adds_twice_its_correction() {
    let cfg = cfg();
    let p = FracParams { n: 1, s: 0.5 };
    let f = GeomSet::lower_half_space(2, 0.0);
    let tail = TailRegistration::lower_half_space(2, 0.0, 1.0, 0.0, 0.0);
    let hf = curvature_indicator(&f, Some(&tail), &[0.0, 0.0], &p, &cfg).unwrap();
    for d in [
        GeomSet::ball(vec![0.0, -0.5], 0.125),
        GeomSet::ball(vec![0.3, -0.4], 0.2).union(GeomSet::ball(vec![-0.4, -0.6], 0.1)),
    ] {
        let hd = curvature_indicator(&f.clone().minus(d.clone()), Some(&tail), &[0.0, 0.0], &p, &cfg).unwrap();
        let c = correction_integral(&d, &[0.0, 0.0], &p, &CorrectionConfig::default()).unwrap();
        let err = hd.error_estimate + hf.error_estimate + 2.0 * c.error_estimate;
        assert!(within(hd.value - hf.value, 2.0 * c.value, err, 1e-9), "{} vs {} ({err})", hd.value - hf.value, 2.0 * c.value);
    }
}

fn random_bump(rng: &mut ChaCha8Rng) -> GraphFn {
    let k = rng.gen_range(1..=3);
    let terms: Vec<(f64, f64, f64)> =
        (0..k).map(|_| (rng.gen_range(-0.8..0.8), rng.gen_range(-2.0..2.0), rng.gen_range(0.6..2.0))).collect();
    bump(&terms)
}

fn band(u: &GraphFn) -> f64 {
    u.terms
        .iter()
        .map(|t| match t {
            GraphTerm::Gaussian { amp, .. } => amp.abs(),
            _ => 0.0,
        })
        .sum::<f64>()
        + 1e-9
}

#[test]
fn graph_and_indicator_agree_on_random_bumps() {
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let s = rng.gen_range(0.2..0.8);
        let p = FracParams { n: 1, s };
        let u = random_bump(&mut rng);
        let x = rng.gen_range(-3.0..3.0);
        let g = curvature_subgraph(&u, &[x], &p, &cfg, SubgraphOpts::default()).unwrap();
        let set = GeomSet::Subgraph { u: u.clone() };
        let tail = TailRegistration::lower_half_space(2, 0.0, band(&u), 0.0, 0.0);
        let i = curvature_indicator(&set, Some(&tail), &[x, u.value(&[x])], &p, &cfg).unwrap();
        assert!(within(g.value, i.value, g.error_estimate + i.error_estimate, 1e-8 * g.value.abs().max(1.0)), "s={s} x={x} {u:?}: {g:?} {i:?}");
    }
}

#[test]
fn graph_and_indicator_agree_in_the_plane() {
    // nested angular integrals over root-found traces are costly; a looser target keeps this quick
    let cfg = QuadConfig { rel_tol: 1e-4, abs_tol: 1e-7, ..cfg() };
    let p = FracParams { n: 2, s: 0.5 };
    let u = GraphFn { terms: vec![GraphTerm::Gaussian { amp: 0.4, center: vec![0.3, -0.2], width: 1.0 }] };
    let set = GeomSet::Subgraph { u: u.clone() };
    let tail = TailRegistration::lower_half_space(3, 0.0, 0.4 + 1e-9, 0.0, 0.0);
    for x in [[1.1, 0.5]] {
        let g = curvature_subgraph(&u, &x, &p, &cfg, SubgraphOpts::default()).unwrap();
        let i = curvature_indicator(&set, Some(&tail), &[x[0], x[1], u.value(&x)], &p, &cfg).unwrap();
        assert!(within(g.value, i.value, g.error_estimate + i.error_estimate, 1e-8), "{g:?} {i:?}");
    }
}

#[test]
fn complement_is_antisymmetric_on_random_bumps() {
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..8 {
        let p = FracParams { n: 1, s: rng.gen_range(0.2..0.8) };
        let u = random_bump(&mut rng);
        let x = rng.gen_range(-3.0..3.0);
        let pt = [x, u.value(&[x])];
        let set = GeomSet::Subgraph { u: u.clone() };
        let a = band(&u);
        let tail = TailRegistration::lower_half_space(2, 0.0, a, 0.0, 0.0);
        let co = TailRegistration::HalfSpace { normal: vec![0.0, -1.0], offset: 0.0, a, b: 0.0, gamma: 0.0 };
        let h = curvature_indicator(&set, Some(&tail), &pt, &p, &cfg).unwrap();
        let c = curvature_indicator(&set.complement(), Some(&co), &pt, &p, &cfg).unwrap();
        assert!(within(c.value, -h.value, c.error_estimate + h.error_estimate, 1e-9 * h.value.abs().max(1.0)), "{h:?} {c:?}");
    }
}

#[test]
fn inclusion_orders_the_curvature() {
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = FracParams { n: 1, s: 0.5 };
    for _ in 0..8 {
        // u_E = -d(1 - e^{-y²/2w²}) ≤ u_F = +d'(1 - e^{-y²/2w'²}): both vanish at 0 and E ⊂ F
        let (d1, w1, d2, w2) = (rng.gen_range(0.1..1.0), rng.gen_range(0.5..2.0), rng.gen_range(0.0..1.0), rng.gen_range(0.5..2.0));
        let ue = GraphFn {
            terms: vec![GraphTerm::Constant { c: -d1 }, GraphTerm::Gaussian { amp: d1, center: vec![0.0], width: w1 }],
        };
        let uf = GraphFn {
            terms: vec![GraphTerm::Constant { c: d2 }, GraphTerm::Gaussian { amp: -d2, center: vec![0.0], width: w2 }],
        };
        let he = curvature_subgraph(&ue, &[0.0], &p, &cfg, SubgraphOpts::default()).unwrap();
        let hf = curvature_subgraph(&uf, &[0.0], &p, &cfg, SubgraphOpts::default()).unwrap();
        assert!(he.value + 3.0 * he.error_estimate >= hf.value - 3.0 * hf.error_estimate, "{he:?} {hf:?}");
        assert!(he.value > 0.0 && hf.value <= 3.0 * hf.error_estimate);
    }
    // nested balls touching at the origin
    let small = curvature_ball(&p, 0.5, true).unwrap();
    let big = curvature_ball(&p, 2.0, true).unwrap();
    assert!(small.value > big.value);
}

#[test]
fn dilation_and_translation_identities() {
    let cfg = cfg();
    let p = FracParams { n: 1, s: 0.6 };
    let (b, t) = unit_ball(1);
    let rep = scaling_translation_check(&b, &t, &[0.0, 0.0], 3.5, &[0.7, -2.0], &p, &cfg).unwrap();
    assert!(rep.scaling.holds && rep.translation.holds, "{rep:?}");
    let u = bump(&[(0.5, 0.2, 1.0), (-0.3, -1.0, 0.7)]);
    let set = GeomSet::Subgraph { u: u.clone() };
    let tail = TailRegistration::lower_half_space(2, 0.0, 0.8 + 1e-9, 0.0, 0.0);
    for (f, v) in [(0.5, [1.0, 1.0]), (4.0, [-3.0, 0.25])] {
        let rep = scaling_translation_check(&set, &tail, &[0.4, u.value(&[0.4])], f, &v, &p, &cfg).unwrap();
        assert!(rep.scaling.holds && rep.translation.holds, "{rep:?}");
    }
}

#[test]
fn points_off_the_boundary_are_rejected() {
    let (b, t) = unit_ball(1);
    let p = FracParams { n: 1, s: 0.5 };
    assert!(curvature_indicator(&b, Some(&t), &[0.0, 0.1], &p, &cfg()).is_err());
    assert!(curvature_indicator(&b, None, &[0.0, 0.0], &p, &cfg()).is_err());
}
