//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use fracmin_core::barrier::{barrier_curvature, beta_constant, decay_fit, supersolution_radius, BarrierSpec};
use fracmin_core::curvature::{
    correction_integral, curvature_indicator, curvature_subgraph, excised_contribution, gamma_constant, CorrectionConfig,
    SubgraphOpts,
};
use fracmin_core::geometry::{GeomSet, GraphFn, TailRegistration};
use fracmin_core::halfspace_sim::{
    density_check, run_slide, CandidateSet, DensityMode, RaySampler, SlideConfig, SlideVerdict, TouchedBall,
};
use fracmin_core::num::ball_volume;
use fracmin_core::{FracParams, GKernel, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn trichotomy() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for &s in &[0.3, 0.5, 0.7, 0.9] {
        for k in 1..=20 {
            let a = (1.0 + s) * k as f64 / 21.0;
            if (a - s).abs() < 0.02 {
                continue;
            }
            let b = beta_constant(1, s, a, &cfg()).map_err(e)?;
            let want = (s - a).signum();
            if b.value.signum() != want || b.value.abs() <= 3.0 * b.error_estimate {
                return Err(format!("s={s} α={a}: β = {:e} ± {:e}", b.value, b.error_estimate));
            }
            worst = worst.min(b.value.abs() / b.error_estimate.max(1e-300));
            count += 1;
        }
        let z = beta_constant(1, s, s, &cfg()).map_err(e)?;
        if z.value.abs() > 1e-6 {
            return Err(format!("β at α = s = {s} is {:e}", z.value));
        }
    }
    Ok(format!("{count} signs correct, min |β|/err = {worst:.1e}, |β(α=s)| ≤ 1e-6"))
}

fn flat_zero() -> Outcome {
    let mut worst = 0.0f64;
    for &(n, s) in &[(1usize, 0.3), (1, 0.7), (2, 0.5)] {
        let p = FracParams::new(n, s).map_err(e)?;
        let grads: [Vec<f64>; 3] = [vec![0.0; n], (0..n).map(|i| 0.5 - 0.2 * i as f64).collect(), (0..n).map(|i| -1.3 + 0.4 * i as f64).collect()];
        for g in grads {
            let u = GraphFn::affine(g.clone(), 0.0);
            let x = vec![0.4; n];
            let hg = curvature_subgraph(&u, &x, &p, &cfg(), SubgraphOpts::default()).map_err(e)?;
            // {x_{n+1} < g·x'} = {(−g, 1)·x < 0}
            let mut normal: Vec<f64> = g.iter().map(|v| -v).collect();
            normal.push(1.0);
            let l = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            normal.iter_mut().for_each(|v| *v /= l);
            let set = GeomSet::half_space(normal.clone(), 0.0);
            let tail = TailRegistration::HalfSpace { normal, offset: 0.0, a: 0.0, b: 0.0, gamma: 0.0 };
            let mut pt = x.clone();
            pt.push(g.iter().zip(&x).map(|(a, b)| a * b).sum());
            let hi = curvature_indicator(&set, Some(&tail), &pt, &p, &cfg()).map_err(e)?;
            worst = worst.max(hg.value.abs()).max(hi.value.abs());
            if hg.value.abs() > 1e-6 || hi.value.abs() > 1e-6 {
                return Err(format!("n={n} s={s} grad={g:?}: graph {:e}, indicator {:e}", hg.value, hi.value));
            }
        }
    }
    Ok(format!("max |H| = {worst:.1e} over 9 half-spaces and both methods"))
}

fn decay_law() -> Outcome {
    let grid: Vec<f64> = (0..21).map(|k| 10f64 * 100f64.powf(k as f64 / 20.0)).collect();
    let mut out = Vec::new();
    for &(n, s, a) in &[(2usize, 0.5, 0.5), (2, 0.3, 0.6), (1, 0.7, 0.4)] {
        let spec = BarrierSpec::new(n, s, a, 1.0).map_err(e)?;
        let prof = decay_fit(&spec, &grid, &cfg()).map_err(e)?;
        let want = a - 1.0 - s;
        let ceiling = 3.0 * (a - 1.0) - s + 0.1;
        if (prof.fitted_exponent - want).abs() > 0.05 || !(prof.residual_exponent <= ceiling) {
            return Err(format!(
                "({n},{s},{a}): exponent {:.4} vs {want:.2}, residual {:.3} vs ≤ {ceiling:.2}",
                prof.fitted_exponent, prof.residual_exponent
            ));
        }
        out.push(format!("({n},{s},{a}) {:.4}/{:.3}", prof.fitted_exponent, prof.residual_exponent));
    }
    Ok(out.join("; "))
}

fn supersolution() -> Outcome {
    let mut out = Vec::new();
    for &(s, a) in &[(0.5, 0.25), (0.7, 0.3)] {
        let r = supersolution_radius(s, a, &cfg()).map_err(e)?;
        let bad = r.certificates.iter().filter(|c| !(c.h > 3.0 * c.err)).count();
        if bad > 0 || !r.radius.is_finite() {
            return Err(format!("(s={s}, α={a}): {bad} certificates not positive"));
        }
        out.push(format!("(s={s}, α={a}) R = {} with {} certificates", r.radius, r.certificates.len()));
    }
    Ok(out.join("; "))
}

fn comparison_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let corr = CorrectionConfig::default();
    let mut ok = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = if rng.gen_bool(0.5) { 1 } else { 2 };
        let s = rng.gen_range(0.2..0.8);
        let p = FracParams::new(n, s).map_err(e)?;
        let x = vec![0.0; n + 1];
        let (f, tail, depth_of): (GeomSet, TailRegistration, Box<dyn Fn(&[f64]) -> f64>) = if rng.gen_bool(0.5) {
            let band = 3.0;
            (
                GeomSet::lower_half_space(n + 1, 0.0),
                TailRegistration::lower_half_space(n + 1, 0.0, band, 0.0, 0.0),
                Box::new(move |c: &[f64]| (-c[n]).min(band + c[n])),
            )
        } else {
            let r = rng.gen_range(1.0..3.0);
            let mut c = vec![0.0; n + 1];
            c[n] = -r;
            let cc = c.clone();
            (
                GeomSet::ball(c.clone(), r),
                TailRegistration::Bounded { center: c, radius: r },
                Box::new(move |y: &[f64]| r - y.iter().zip(&cc).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()),
            )
        };
        // D: a ball inside F at positive distance from x
        let (center, radius) = loop {
            let mut c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            c.push(-rng.gen_range(0.2..2.5));
            let room = depth_of(&c).min(c.iter().map(|v| v * v).sum::<f64>().sqrt());
            if room > 0.1 {
                break (c, rng.gen_range(0.3..0.9) * room);
            }
        };
        let d = GeomSet::ball(center, radius);
        let hf = curvature_indicator(&f, Some(&tail), &x, &p, &cfg()).map_err(e)?;
        let hd = curvature_indicator(&f.clone().minus(d.clone()), Some(&tail), &x, &p, &cfg()).map_err(e)?;
        let c = correction_integral(&d, &x, &p, &corr).map_err(e)?;
        let err = hf.error_estimate + hd.error_estimate + 2.0 * c.error_estimate;
        let gap = (hd.value - hf.value - 2.0 * c.value).abs();
        worst = worst.max(gap / err.max(1e-300));
        if gap <= 3.0 * err {
            ok += 1;
        }
    }
    let line = format!("{ok}/50 within 3× combined error (worst ratio {worst:.2})");
    if ok >= 48 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn scaling_law() -> Outcome {
    let eps = [0.25, 0.5, 1.0, 2.0, 4.0];
    let p = FracParams::new(1, 0.5).map_err(e)?;
    let lx: Vec<f64> = eps.iter().map(|v: &f64| v.ln()).collect();
    let mut ball = Vec::new();
    let mut bar = Vec::new();
    for &v in &eps {
        let set = GeomSet::ball(vec![0.0, 0.0], v);
        let tail = TailRegistration::Bounded { center: vec![0.0, 0.0], radius: v };
        ball.push(curvature_indicator(&set, Some(&tail), &[v, 0.0], &p, &cfg()).map_err(e)?.value.ln());
        let spec = BarrierSpec::new(1, 0.5, 0.3, v).map_err(e)?;
        bar.push(barrier_curvature(&spec, 3.0 * v, &cfg()).map_err(e)?.value.abs().ln());
    }
    let (a, b) = (slope(&lx, &ball), slope(&lx, &bar));
    let line = format!("ball slope {a:.5}, barrier slope {b:.5} (target -0.5)");
    if (a + 0.5).abs() <= 0.02 && (b + 0.5).abs() <= 0.02 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn density() -> Outcome {
    let samples = 400_000;
    let hs = GeomSet::lower_half_space(2, 0.0);
    let r = density_check(&hs, &[0.3, 0.0], &[0.1, 0.3, 1.0, 3.0, 10.0], DensityMode::BothSides, samples, 11, None).map_err(e)?;
    let half = 0.5 * ball_volume(2);
    for row in &r.rows {
        let inside = row.inside.unwrap_or(f64::NAN);
        if !((inside - half).abs() <= 3.0 * row.sigma && (row.complement - half).abs() <= 3.0 * row.sigma) {
            return Err(format!("half-space ratio at ρ = {}: {inside} / {}", row.rho, row.complement));
        }
    }
    let params = FracParams::new(1, 0.5).map_err(e)?;
    let gamma = gamma_constant(&params).map_err(e)?;
    let rho0 = (ball_volume(2) / (4.0 * gamma)).powf(1.0 / params.s).min(1.0);
    let b = TouchedBall { center: vec![0.0, 1.0], radius: 1.0, params };
    let e_set = GeomSet::ball(b.center.clone(), 1.0);
    let grid: Vec<f64> = (1..=5).map(|k| rho0 * k as f64 / 5.0).collect();
    let t = density_check(&e_set, &[0.0, 0.0], &grid, DensityMode::ComplementOnly, samples, 12, Some(&b)).map_err(e)?;
    let floor = 0.25 * ball_volume(2);
    for row in &t.rows {
        if row.complement < floor - 3.0 * row.sigma {
            return Err(format!("touched-ball complement ratio {} < |B1|/4 at ρ = {}", row.complement, row.rho));
        }
    }
    Ok(format!("half-space ratios at 5 scales within 3σ; touched complement min {:.4} ≥ {floor:.4} for ρ ≤ ρ₀ = {rho0:.4}", t.min_complement))
}

fn kernel_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for n in 1..=3 {
        for &s in &[0.3, 0.5, 0.7] {
            let k = GKernel::new(FracParams::new(n, s).map_err(e)?).map_err(e)?;
            let c = k.tilde_bound_constant();
            for _ in 0..100_000 {
                let a: f64 = rng.gen_range(-10.0..10.0);
                let b: f64 = rng.gen_range(-10.0..10.0);
                let lhs = (k.g_tilde(a) - k.g_tilde(b)).abs();
                let rhs = c * (a * a).max(b * b) * (a - b).abs();
                if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                    return Err(format!("n={n} s={s} a={a} b={b}: {lhs:e} > {rhs:e}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs, zero violations"))
}

fn slide_mechanics() -> Outcome {
    let sampler = RaySampler { half_width: 20.0, depth: 4.0, spacing: 0.25 };
    let slide = SlideConfig::default();
    let flat = CandidateSet::half_space(1, 2.0, sampler).map_err(e)?;
    let t = run_slide(&flat, 0.7, 20, &slide).map_err(e)?;
    if !t.states.iter().all(|s| s.eps == Some(0.0)) || t.summary.verdict != SlideVerdict::HalfSpace {
        return Err("half-space fixture has a nonzero ε_j".into());
    }
    let notched = CandidateSet::notched(2.0, 2.0, sampler).map_err(e)?;
    let t = run_slide(&notched, 0.7, 40, &slide).map_err(e)?;
    for s in &t.states {
        let c = s.checks;
        if s.error.is_some() || c.eps_bound != Some(true) || c.altitude != Some(true) || c.lambda_hat != Some(true) {
            return Err(format!("notched j={}: checks {:?}, error {:?}", s.j, c, s.error));
        }
    }
    let applicable = t.states.iter().filter(|s| s.lambda_hat.is_some_and(|l| l.applicable)).count();
    if t.summary.positive.is_empty() {
        return Err("no step reached repaired positivity".into());
    }
    Ok(format!(
        "half-space ε_j = 0 for j ≤ 20; notched: 40 states pass (Λ̂ sampled in {applicable}), positivity at {} steps",
        t.summary.positive.len()
    ))
}

fn excision_order() -> Outcome {
    let eps = [1e-3, 2e-3, 4e-3, 8e-3];
    let lx: Vec<f64> = eps.iter().map(|v: &f64| v.ln()).collect();
    let ball = GeomSet::ball(vec![0.0, -1.0], 1.0);
    let mut out = Vec::new();
    for &s in &[0.3, 0.5, 0.7] {
        let p = FracParams::new(1, s).map_err(e)?;
        let ys: Vec<f64> = eps
            .iter()
            .map(|&v| excised_contribution(&ball, &[0.0, 0.0], &p, &cfg(), v).map(|r| r.value.abs().ln()))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let k = slope(&lx, &ys);
        if (k - (1.0 - s)).abs() > 0.05 {
            return Err(format!("s={s}: exponent {k:.4} vs {:.2}", 1.0 - s));
        }
        out.push(format!("s={s}: {k:.4}"));
    }
    Ok(out.join("; "))
}

fn main() {
    let tests: [(usize, &str, fn() -> Outcome, Option<Duration>); 10] = [
        (1, "trichotomy sweep", trichotomy, Some(Duration::from_secs(60))),
        (2, "flat-set zero", flat_zero, Some(Duration::from_secs(30))),
        (3, "decay law", decay_law, Some(Duration::from_secs(600))),
        (4, "supersolution radius", supersolution, None),
        (5, "comparison identity", comparison_identity, None),
        (6, "scaling law", scaling_law, None),
        (7, "density", density, None),
        (8, "kernel lemma", kernel_lemma, None),
        (9, "slide mechanics", slide_mechanics, Some(Duration::from_secs(300))),
        (10, "excision order", excision_order, None),
    ];
    let mut failed = 0;
    for (k, name, f, limit) in tests {
        let t0 = Instant::now();
        let r = f();
        let dt = t0.elapsed();
        let over = limit.is_some_and(|l| dt > l);
        let (tag, msg) = match (&r, over) {
            (Ok(m), false) => ("PASS", m.clone()),
            (Ok(m), true) => ("FAIL", format!("{m} (over the {:?} budget)", limit.unwrap())),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {k:>2} [{tag}] {name}: {msg} ({:.1} s)", dt.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
