use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scri-charges"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn vec3(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [0, 1, 2].map(|k| a[k].as_f64().unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn kerr_reports_spin() {
    let out = run(&["kerr", "--mass", "2", "--spin", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let j = vec3(&v["charges"]["angular_momentum"]);
    assert!((j[2] + 1.0).abs() < 1e-8 && j[0].abs() < 1e-10 && j[1].abs() < 1e-10, "{j:?}");
    assert_eq!(v["expected"]["angular_momentum.z"].as_f64(), Some(-1.0));
    assert!(v["residuals"]["kerr.angular_momentum.z"]["passed"].as_bool().unwrap());
}

#[test]
fn schwarzschild_has_only_energy() {
    let out = run(&["kerr", "--mass", "1.5", "--spin", "0", "--bandlimit", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let c = &json(&out)["charges"];
    assert_eq!(c["energy"].as_f64(), Some(1.5));
    for k in ["linear_momentum", "center_of_mass", "angular_momentum"] {
        assert!(vec3(&c[k]).iter().all(|x| x.abs() < 1e-14), "{k}");
    }
}

#[test]
fn kerr_stable_under_refinement() {
    let j = |l: &str| {
        let out = run(&["kerr", "--mass", "1", "--spin", "0.3", "--bandlimit", l]);
        assert_eq!(out.status.code(), Some(0));
        vec3(&json(&out)["charges"]["angular_momentum"])
    };
    let (a, b) = (j("32"), j("48"));
    for k in 0..3 {
        assert!((a[k] - b[k]).abs() < 1e-8);
    }
    assert!((a[2] + 0.3).abs() < 1e-8);
}

#[test]
fn generated_kerr_file_round_trips_through_charges() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("kerr.json");
    let g = run(&["generate", "--output", path(&file), "--bandlimit", "16", "--mass", "1", "--spin", "-0.2"]);
    assert_eq!(g.status.code(), Some(0), "{}", stderr(&g));
    let out = run(&["charges", "--input", path(&file), "--bandlimit", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["bandlimit"].as_u64(), Some(16));
    assert!((vec3(&v["charges"]["angular_momentum"])[2] - 0.2).abs() < 1e-8);
}

#[test]
fn bandlimit_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.json");
    run(&["generate", "--output", path(&file), "--bandlimit", "6", "--com-frame"]);
    let out = run(&["charges", "--input", path(&file), "--bandlimit", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("band limit"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn boosted_data_and_require_frame() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("boosted.json");
    run(&["generate", "--output", path(&file), "--bandlimit", "6", "--seed", "4"]);
    let plain = run(&["charges", "--input", path(&file)]);
    assert_eq!(plain.status.code(), Some(2));
    assert!(json(&plain)["charges"]["withheld"].is_string());
    let out = run(&["charges", "--input", path(&file), "--require-frame"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("frame"));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_input_names_the_path() {
    let out = run(&["charges", "--input", "/nonexistent/cut.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/cut.json"));
}

#[test]
fn unknown_suite_is_rejected() {
    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn zero_tolerance_fails_verification() {
    let out = run(&["verify", "--suite", "lemmas", "--seeds", "1", "--bandlimit", "6", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert!(v["residuals"].as_object().unwrap().values().any(|c| c["passed"] == false));
}

#[test]
fn small_identity_suite_passes() {
    let out = run(&["verify", "--suite", "identities", "--seeds", "2", "--bandlimit", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["residuals"].as_object().unwrap().len(), 14);
    assert!(v.get("timings").is_none());
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["charges", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["charges", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let args = ["kerr", "--mass", "1", "--spin", "0.1", "--bandlimit", "8"];
    let stdout = run(&args).stdout;
    let mut with = args.to_vec();
    with.extend(["--output", path(&file)]);
    let out = run(&with);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
}

#[test]
fn timings_are_opt_in() {
    let out = run(&["kerr", "--mass", "1", "--spin", "0.1", "--bandlimit", "8", "--timings"]);
    assert!(json(&out)["timings"]["total_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn strict_rejects_low_degree_shear() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("low.json");
    let doc = r#"{"version": 1, "bandlimit": 4, "u": 0.0,
        "mass_aspect": [[0, 0, 2.0]],
        "angmom_aspect": {"grad": [], "curl": []},
        "shear": {"electric": [[1, 0, 0.1], [2, 1, 0.3]], "magnetic": []}}"#;
    std::fs::write(&file, doc).unwrap();
    assert_eq!(run(&["charges", "--input", path(&file)]).status.code(), Some(0));
    let out = run(&["charges", "--input", path(&file), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("strict"), "{}", stderr(&out));
}
