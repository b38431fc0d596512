//! End-to-end tests of the `hvol` binary: exit codes, schema handling and
//! byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hvol-cli-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn orthant_json() -> String {
    let a = std::f64::consts::FRAC_PI_2;
    format!(
        r#"{{"dimension": 3, "curvature": "spherical", "angles": [{a}, {a}, {a}, {a}, {a}, {a}]}}"#
    )
}

fn cube_andreev_json() -> String {
    let cube = hvol::angle_space::fixtures::cube();
    let weights: Vec<String> = cube
        .edges()
        .iter()
        .map(|&(x, y)| format!("\"{x}-{y}\": {}", std::f64::consts::FRAC_PI_2))
        .collect();
    let faces: Vec<String> = cube
        .faces()
        .iter()
        .map(|f| format!("{f:?}"))
        .collect();
    format!(
        r#"{{"faces": [{}], "weights": {{{}}}, "mode": "andreev"}}"#,
        faces.join(", "),
        weights.join(", ")
    )
}

#[test]
fn simplex_orthant_exits_zero_with_volume() {
    let input = write_fixture("orthant.json", &orthant_json());
    let out = hvol(&["simplex", "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let vol = report["volume"]["value"].as_f64().unwrap();
    assert!((vol - std::f64::consts::PI.powi(2) / 8.0).abs() < 1e-10);
}

#[test]
fn simplex_bad_angle_exits_two() {
    let input = write_fixture(
        "bad_angle.json",
        r#"{"dimension": 3, "curvature": "spherical", "angles": [3.5, 1.5, 1.5, 1.5, 1.5, 1.5]}"#,
    );
    let out = hvol(&["simplex", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_json_exits_one_with_location() {
    let input = write_fixture("broken.json", "{\"dimension\": 3,\n  \"angles\": [1.0,]");
    let out = hvol(&["simplex", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "diagnostics missing: {err}");
}

#[test]
fn missing_file_exits_one() {
    let out = hvol(&["simplex", "--input", "/nonexistent/simplex.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_cube_exits_two_dodecahedron_zero() {
    let cube = write_fixture("cube.json", &cube_andreev_json());
    let out = hvol(&["validate", "--input", cube.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["accepted"], serde_json::Value::Bool(false));

    let dodeca = hvol::angle_space::fixtures::dodecahedron().unwrap();
    let weights: Vec<String> = dodeca
        .edges()
        .iter()
        .map(|&(x, y)| format!("\"{x}-{y}\": {}", std::f64::consts::FRAC_PI_2))
        .collect();
    let faces: Vec<String> = dodeca.faces().iter().map(|f| format!("{f:?}")).collect();
    let text = format!(
        r#"{{"faces": [{}], "weights": {{{}}}, "mode": "andreev"}}"#,
        faces.join(", "),
        weights.join(", ")
    );
    let input = write_fixture("dodeca.json", &text);
    let out = hvol(&["validate", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_bao_bonahon_tetrahedron_exits_zero() {
    let tetra = hvol::angle_space::fixtures::tetrahedron();
    let w = 2.0 * std::f64::consts::PI / 3.0;
    let weights: Vec<String> = tetra
        .edges()
        .iter()
        .map(|&(x, y)| format!("\"{x}-{y}\": {w}"))
        .collect();
    let faces: Vec<String> = tetra.faces().iter().map(|f| format!("{f:?}")).collect();
    let text = format!(
        r#"{{"faces": [{}], "weights": {{{}}}, "mode": "bao-bonahon"}}"#,
        faces.join(", "),
        weights.join(", ")
    );
    let input = write_fixture("bb_tetra.json", &text);
    let out = hvol(&["validate", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let excess = report["slack"]["min_nonelementary_excess"].as_f64().unwrap();
    assert!((excess - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
}

#[test]
fn degenerate_sweep_is_byte_identical_and_monotone() {
    let args = [
        "degenerate", "--k", "6", "--tau-min", "3", "--tau-max", "12", "--tau-steps", "10",
    ];
    let a = hvol(&args);
    let b = hvol(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "sweep must be byte-deterministic");
    let text = String::from_utf8(a.stdout).unwrap();
    let mut prev = f64::INFINITY;
    for line in text.trim_end().lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let excess: f64 = cells[5].parse().unwrap();
        assert!(excess < prev, "excess column must decrease");
        prev = excess;
    }
    assert_eq!(text.trim_end().lines().count(), 11);
}

#[test]
fn degenerate_accepts_polyhedron_json() {
    // A tetrahedron in Klein coordinates through the polyhedron schema.
    let real = hvol::gram::realize(&hvol::gram::build_gram(
        &hvol::gram::DihedralAngles::regular(3, 1.2).unwrap(),
    ))
    .unwrap();
    let mut rows = Vec::new();
    for j in 0..4 {
        let v = real.vertex_mvector(j).unwrap();
        let p = hvol::minkowski::HPoint::new(v).unwrap();
        let k = hvol::oracles::to_klein(&p);
        rows.push(format!("[{}, {}, {}]", k[0], k[1], k[2]));
    }
    let text = format!(
        r#"{{"model": "klein", "vertices": [{}],
            "faces": [[1,2,3],[0,2,3],[0,1,3],[0,1,2]]}}"#,
        rows.join(", ")
    );
    let input = write_fixture("tetra_klein.json", &text);
    let out = hvol(&["degenerate", "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("tau,"), "header row expected");
    assert_eq!(text.trim_end().lines().count(), 2);
}

#[test]
fn lemmas_zero_trials_is_empty_success() {
    let out = hvol(&["lemmas", "--samples", "0"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn lemmas_seeded_runs_are_reproducible() {
    let args = ["lemmas", "--t-list", "3,5", "--eps-list", "0.05", "--samples", "2000", "--seed", "4"];
    let a = hvol(&args);
    let b = hvol(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_writes_file() {
    let input = write_fixture("orthant2.json", &orthant_json());
    let out_path = write_fixture("report.json", "");
    let out = hvol(&[
        "simplex",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["classification"], "spherical");
}

#[test]
fn format_flag_is_validated() {
    let input = write_fixture("orthant3.json", &orthant_json());
    let ok = hvol(&["simplex", "--input", input.to_str().unwrap(), "--format", "json"]);
    assert!(ok.status.success());
    let bad = hvol(&["simplex", "--input", input.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(bad.status.code(), Some(2));
    let sweep = hvol(&["degenerate", "--tau-steps", "2", "--format", "csv"]);
    assert!(sweep.status.success());
}

#[test]
fn validate_and_lemmas_reports_reparse() {
    let cube = write_fixture("cube2.json", &cube_andreev_json());
    let out = hvol(&["validate", "--input", cube.to_str().unwrap()]);
    let _: hvol_cli::formats::ValidateReport = serde_json::from_slice(&out.stdout).unwrap();
    let out = hvol(&["lemmas", "--t-list", "3", "--eps-list", "0.05", "--samples", "500"]);
    assert!(out.status.success());
    let _: hvol_cli::formats::LemmasReport = serde_json::from_slice(&out.stdout).unwrap();
}

#[test]
fn ideal_simplex_report_reparses_with_null_lengths() {
    let third = std::f64::consts::PI / 3.0;
    let text = format!(
        r#"{{"dimension": 3, "curvature": "hyperbolic",
            "angles": [{third}, {third}, {third}, {third}, {third}, {third}]}}"#
    );
    let input = write_fixture("ideal.json", &text);
    let out = hvol(&["simplex", "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: hvol_cli::formats::SimplexReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.vertex_types.as_deref().unwrap(), ["ideal"; 4].as_slice());
    assert!(report.edge_lengths.unwrap().iter().all(|e| e.length.is_none()));
    let vol = report.volume.unwrap();
    // The exactly-ideal target is a boundary endpoint; the value must land
    // within its own reported error of 3Л(π/3).
    assert!((vol.value - 1.0149416064096535).abs() < 20.0 * vol.error_estimate.max(1e-9));
}
