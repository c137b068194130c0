use fracmin_core::curvature::{correction_integral, CorrectionConfig};
use fracmin_core::geometry::{GeomDocument, GeomSet, TailRegistration};
use fracmin_core::halfspace_sim::{DensityReport, SlideState};
use fracmin_core::num::ball_volume;
use fracmin_core::{CurvatureResult, FracParams};
use proptest::prelude::*;
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmin")).args(args).env_remove("FRACMIN_THREADS").output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let o = fracmin(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> Option<i32> {
    fracmin(args).status.code()
}

fn write_doc(dir: &Path, name: &str, doc: &GeomDocument) -> String {
    let p = dir.join(name);
    fs::write(&p, doc.to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn half_space_curvature_vanishes() {
    let v = ok_json(&["curvature", "--shape", "halfspace", "--point", "origin", "--s", "0.5", "--n", "2"]);
    let r: CurvatureResult = serde_json::from_value(v).unwrap();
    assert!(r.value.abs() <= 1e-12);
}

#[test]
fn curvature_result_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let args = ["--out", out.to_str().unwrap(), "curvature", "--shape", "barrier", "--n", "1", "--s", "0.5", "--r", "4"];
    let printed: CurvatureResult = serde_json::from_value(ok_json(&args)).unwrap();
    let saved: CurvatureResult = serde_json::from_str(&fs::read_to_string(out.join("curvature.json")).unwrap()).unwrap();
    assert_eq!(printed, saved);
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["files"], serde_json::json!(["curvature.json"]));
}

#[test]
fn ball_curvature_is_positive_and_matches_indicator() {
    let radial: CurvatureResult = serde_json::from_value(ok_json(&["curvature", "--shape", "ball", "--radius", "1", "--s", "0.5", "--n", "1"])).unwrap();
    assert!(radial.value > 0.0);
    let ind: CurvatureResult = serde_json::from_value(ok_json(&[
        "curvature", "--shape", "ball", "--s", "0.5", "--n", "1", "--method", "indicator",
    ]))
    .unwrap();
    assert!((ind.value - radial.value).abs() <= 3.0 * ind.combined_error(&radial));
    let out: CurvatureResult = serde_json::from_value(ok_json(&[
        "curvature", "--shape", "ball", "--s", "0.5", "--n", "1", "--method", "indicator", "--complement",
    ]))
    .unwrap();
    assert!((out.value + ind.value).abs() <= 3.0 * ind.combined_error(&out));
}

#[test]
fn excised_set_file_matches_correction_integral() {
    let dir = tempfile::tempdir().unwrap();
    let d = GeomSet::ball(vec![0.4, -0.7], 0.25);
    let f = GeomSet::lower_half_space(2, 0.0);
    let mut doc = GeomDocument::new(f.minus(d.clone()));
    doc.tail = Some(TailRegistration::lower_half_space(2, 0.0, 1.0, 0.0, 0.0));
    let path = write_doc(dir.path(), "fd.json", &doc);
    let h: CurvatureResult =
        serde_json::from_value(ok_json(&["curvature", "--set", &path, "--point", "0,0", "--n", "1", "--s", "0.5"])).unwrap();
    let p = FracParams { n: 1, s: 0.5 };
    let c = correction_integral(&d, &[0.0, 0.0], &p, &CorrectionConfig::default()).unwrap();
    assert!((h.value - 2.0 * c.value).abs() <= 3.0 * (h.error_estimate + 2.0 * c.error_estimate), "{h:?} vs {c:?}");
}

#[test]
fn beta_vanishes_on_the_diagonal() {
    let v = ok_json(&["barrier", "--n", "1", "--s", "0.5", "--alpha", "0.5", "--beta-only"]);
    assert!(v["beta"].as_f64().unwrap().abs() <= 1e-6);
    assert!(v.get("fit").is_none());
    let b = ok_json(&["beta", "--n", "1", "--s", "0.5", "--alpha", "0.25"]);
    assert_eq!(b["sign"], 1);
}

#[test]
fn barrier_fit_and_profile_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let v = ok_json(&["barrier", "--n", "2", "--s", "0.5", "--alpha", "0.5", "--fit", "--out", out.to_str().unwrap()]);
    let e = v["fit"]["fitted_exponent"].as_f64().unwrap();
    assert!((e + 1.0).abs() <= 0.05, "{e}");
    let csv = fs::read_to_string(out.join("barrier_profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# fracmin barrier-profile v1"));
    assert_eq!(lines.next(), Some("r,H,err,residual"));
    assert_eq!(lines.count(), 21);
}

#[test]
fn supersolution_radius_is_certified() {
    let v = ok_json(&["barrier", "--n", "1", "--s", "0.5", "--alpha", "0.25", "--find-R"]);
    let r = &v["supersolution"];
    assert!(r["radius"].as_f64().unwrap().is_finite());
    for c in r["certificates"].as_array().unwrap() {
        assert!(c["h"].as_f64().unwrap() > 3.0 * c["err"].as_f64().unwrap());
    }
    assert_eq!(code(&["barrier", "--n", "2", "--s", "0.5", "--alpha", "0.25", "--find-R"]), Some(2));
}

#[test]
fn slide_fixtures() {
    let v = ok_json(&["slide", "--fixture", "halfspace", "--alpha", "0.7", "--j-max", "6"]);
    assert_eq!(v["verdict"], "half-space");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let v = ok_json(&["slide", "--fixture", "notched", "--alpha", "0.7", "--j-max", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(v["verdict"], "contradiction");
    let trace = fs::read_to_string(out.join("slide_trace.jsonl")).unwrap();
    let states: Vec<SlideState> = trace.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(states.len(), 8);
    assert!(states.iter().any(|s| s.case_tag.map(|t| serde_json::to_value(t).unwrap()) == Some("cone-hits-boundary".into())));
    assert!(states.iter().any(|s| s.checks.positivity == Some(true)));
}

#[test]
fn slide_without_tail_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "e.json", &GeomDocument::new(GeomSet::lower_half_space(2, 1.0)));
    assert_eq!(code(&["slide", "--set", &path, "--alpha", "0.7"]), Some(2));
}

#[test]
fn density_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let v = ok_json(&["density", "--shape", "halfspace", "--n", "1", "--out", out.to_str().unwrap()]);
    let rep: DensityReport = serde_json::from_value(v).unwrap();
    let half = 0.5 * ball_volume(2);
    for r in &rep.rows {
        assert!((r.inside.unwrap() - half).abs() <= 3.0 * r.sigma);
    }
    let csv = fs::read_to_string(out.join("density.csv")).unwrap();
    assert!(csv.starts_with("# fracmin density v1\nrho,inside,complement,sigma\n"));
    let v = ok_json(&["density", "--shape", "ball", "--n", "1", "--rho", "0.002,0.006,0.01", "--mode", "complement-only"]);
    let rep: DensityReport = serde_json::from_value(v).unwrap();
    for r in &rep.rows {
        assert!(r.inside.is_none());
        assert!(r.complement >= 0.25 * ball_volume(2) - 3.0 * r.sigma);
    }
    assert!(rep.ceiling.unwrap().holds);
}

#[test]
fn perimeter_and_check() {
    let v = ok_json(&["perimeter", "--shape", "halfspace", "--n", "1", "--s", "0.5"]);
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let v = ok_json(&["check", "--points", "500"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_fracmin"))
            .args(["density", "--shape", "ball", "--n", "2", "--seed", "11", "--samples", "20000", "--out", out.to_str().unwrap()])
            .env("FRACMIN_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        out
    };
    let (a, b) = (run("a", "1"), run("b", "3"));
    for f in ["density.csv", "density_summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m: Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "density");
    assert_eq!(m["seed"], 11);
    assert_eq!(m["global"]["threads"], 1);
    assert!(m["tool_version"].as_str().unwrap().starts_with("fracmin "));
    assert!(m["timestamps"]["finished_unix"].as_f64().unwrap() >= m["timestamps"]["started_unix"].as_f64().unwrap());
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_version = dir.path().join("v.json");
    fs::write(&bad_version, r#"{"version":"geomset-v0","set":{"kind":"empty"}}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["curvature", "--shape", "halfspace", "--n", "1", "--s", "0.5", "--point", "a,b"],
        vec!["curvature", "--shape", "halfspace", "--n", "1", "--s", "0.5", "--point", "0,0,0"],
        vec!["curvature", "--set", "/nonexistent/set.json", "--n", "1", "--s", "0.5", "--point", "0,0"],
        vec!["curvature", "--set", bad_version.to_str().unwrap(), "--n", "1", "--s", "0.5", "--point", "0,0"],
        vec!["curvature", "--n", "1"],
        vec!["density", "--shape", "halfspace", "--n", "1", "--rho", "1,x"],
        vec!["beta", "--n", "1", "--s", "0.5", "--alpha", "0.2", "--tol", "-1"],
        vec!["unknown-subcommand"],
    ];
    for c in &cases {
        assert_eq!(code(c), Some(1), "{c:?}");
    }
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn domain_errors_exit_two() {
    assert_eq!(code(&["beta", "--n", "1", "--s", "1.5", "--alpha", "0.2"]), Some(2));
    assert_eq!(code(&["curvature", "--shape", "halfspace", "--n", "1", "--s", "0.5", "--point", "0,-1"]), Some(2));
}

fn valid_doc_text() -> String {
    let mut doc = GeomDocument::new(GeomSet::ball(vec![0.0, 1.0], 1.0).union(GeomSet::lower_half_space(2, 3.0)));
    doc.tail = Some(TailRegistration::lower_half_space(2, -3.0, 0.0, 0.0, 0.0));
    doc.to_json()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn corrupted_set_files_never_succeed(cut in 1usize..200, junk in "[a-z{}\\[\\]:,\"0-9.-]{0,12}") {
        let text = valid_doc_text();
        let cut = cut.min(text.len() - 1);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.json");
        fs::write(&p, format!("{}{junk}", &text[..cut])).unwrap();
        let c = code(&["curvature", "--set", p.to_str().unwrap(), "--n", "1", "--s", "0.5", "--point", "0,0"]);
        prop_assert!(c == Some(1) || c == Some(2), "exit {:?}", c);
    }

    #[test]
    fn random_points_never_crash(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let pt = format!("{x},{y}");
        let c = code(&["curvature", "--shape", "halfspace", "--n", "1", "--s", "0.5", "--point", &pt]);
        prop_assert!(matches!(c, Some(0) | Some(2)), "exit {:?}", c);
    }
}
