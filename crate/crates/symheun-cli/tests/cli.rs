//! End-to-end checks of the binary: exit codes, file formats, determinism,
//! and the convert -> eval round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_symheun")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const STANDARD: &str = r#"{"type":"standard","a":[3.0,0.0],"gamma":[0.8,0.0],"delta":[0.6,0.0],"epsilon":[0.5,0.0],"alpha":[0.5,0.0],"beta":[0.4,0.0],"lambda":[0.7,0.0]}"#;

#[test]
fn usage_errors_exit_one() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["eval"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "missing required flags is a usage error"
    );
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.json");
    let out = run(&[
        "convert",
        "--params",
        "/nonexistent.json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(dir.path(), "bad.json", "{\"type\": \"standard\"}");
    let out = run(&[
        "convert",
        "--params",
        bad.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // eval insists on a canonical file
    let std_file = write(dir.path(), "std.json", STANDARD);
    let pts = write(dir.path(), "p.csv", "re,im\n0.1,0.1\n");
    let out = run(&[
        "eval",
        "--params",
        std_file.to_str().unwrap(),
        "--points",
        pts.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes() {
    let out = run(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all checks passed"));
}

#[test]
fn convert_reports_canonical_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let std_file = write(dir.path(), "std.json", STANDARD);
    let canon = dir.path().join("canon.json");
    let out = run(&[
        "convert",
        "--params",
        std_file.to_str().unwrap(),
        "--out",
        canon.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&canon).unwrap()).unwrap();
    assert_eq!(v["type"], "canonical");
    let sigma = v["report"]["sigma"].as_array().unwrap();
    let get = |k: usize, c: usize| sigma[k][c].as_f64().unwrap();
    assert!(
        get(0, 0).abs() <= 1e-12 && get(0, 1).abs() <= 1e-12,
        "sigma1 = 0"
    );
    assert!(
        get(2, 0).abs() <= 1e-12 && get(2, 1).abs() <= 1e-12,
        "sigma3 = 0"
    );
    assert!(
        (get(3, 0) - 1.0).abs() <= 1e-12 && get(3, 1).abs() <= 1e-12,
        "sigma4 = 1"
    );
    assert_eq!(
        v["report"]["is_circular"], true,
        "real standard input is circular"
    );
    assert!(v["report"]["chain"].as_array().unwrap().len() >= 2);
}

#[test]
fn eval_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let std_file = write(dir.path(), "std.json", STANDARD);
    let canon = dir.path().join("canon.json");
    assert_eq!(
        run(&[
            "convert",
            "--params",
            std_file.to_str().unwrap(),
            "--out",
            canon.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let pts = write(dir.path(), "p.csv", "re,im\n0.1,0.2\n0.5,0.0\n1.5,1.5\n");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let st = run(&[
            "eval",
            "--params",
            canon.to_str().unwrap(),
            "--points",
            pts.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(st.status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "identical inputs must produce byte-identical outputs");

    // the converted file re-ingests losslessly: re-converting is a no-op
    let canon2 = dir.path().join("canon2.json");
    assert_eq!(
        run(&[
            "convert",
            "--params",
            canon.to_str().unwrap(),
            "--out",
            canon2.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let v1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&canon).unwrap()).unwrap();
    let v2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&canon2).unwrap()).unwrap();
    assert_eq!(v1["phi"], v2["phi"]);
    assert_eq!(v1["lambda"], v2["lambda"]);

    let header = String::from_utf8_lossy(&a);
    assert!(header.starts_with("re,im,F_re,F_im,dF_re,dF_im,tail,residual\n"));
}

#[test]
fn series_both_engines_emits_erratum() {
    let dir = tempfile::tempdir().unwrap();
    let canon = write(
        dir.path(),
        "canon.json",
        r#"{"type":"canonical","phi":[0.7,0.0],"chi":[[0.3,0.0],[0.8,0.0],[1.1,0.0],[0.5,0.0]],"lambda":[1.3,0.4]}"#,
    );
    let out_path = dir.path().join("series.json");
    let out = run(&[
        "series",
        "--params",
        canon.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--max-terms",
        "200",
        "--engine",
        "both",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "erratum is a warning, not a failure"
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("warning"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["max_discrepancy"].as_f64().unwrap() > 1e-9);
    assert_eq!(v["erratum"]["failing_offsets"], serde_json::json!([2, 4]));
    assert_eq!(v["coefficients_oracle"].as_array().unwrap().len(), 201);
}

#[test]
fn laurent_dump_has_inverted_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let canon = write(
        dir.path(),
        "canon.json",
        r#"{"type":"canonical","phi":[0.7,0.0],"chi":[[0.3,0.0],[0.8,0.0],[1.1,0.0],[0.5,0.0]],"lambda":[1.3,0.4]}"#,
    );
    let out_path = dir.path().join("laurent.json");
    let out = run(&[
        "laurent",
        "--params",
        canon.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--max-terms",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    // inversion keeps phi and reverses the chi labels
    assert_eq!(v["inverted_phi"][0].as_f64().unwrap(), 0.7);
    assert_eq!(v["inverted_chi"][0][0].as_f64().unwrap(), 0.5);
    assert_eq!(v["inverted_chi"][3][0].as_f64().unwrap(), 0.3);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 101);
}

#[test]
fn eigen_and_ortho_on_golden_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let pi = std::f64::consts::PI;
    let canon = write(
        dir.path(),
        "golden.json",
        &format!(
            r#"{{"type":"canonical","phi":[{},0.0],"chi":[[{},0],[{},0],[{},0],[{},0]],"lambda":[0,0]}}"#,
            pi / 3.0,
            pi / 4.0,
            pi / 6.0,
            pi / 8.0,
            pi / 10.0
        ),
    );
    let eig = dir.path().join("eig.json");
    // coarse step keeps the test fast; the acceptance suite runs 0.01
    let out = run(&[
        "eigen",
        "--params",
        canon.to_str().unwrap(),
        "--out",
        eig.to_str().unwrap(),
        "--lambda-min",
        "-8",
        "--lambda-max",
        "0",
        "--step",
        "0.05",
        "--count",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&eig).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let l1 = rows[0]["lambda"][0].as_f64().unwrap();
    let l2 = rows[1]["lambda"][0].as_f64().unwrap();
    assert!((l1 + 1.2460386).abs() < 1e-4);
    assert!((l2 + 6.3539650).abs() < 1e-4);

    let ortho = dir.path().join("ortho.json");
    let lam_arg = format!(
        "{},{};{},{}",
        rows[0]["lambda"][0].as_f64().unwrap(),
        rows[0]["lambda"][1].as_f64().unwrap(),
        rows[1]["lambda"][0].as_f64().unwrap(),
        rows[1]["lambda"][1].as_f64().unwrap()
    );
    let out = run(&[
        "ortho",
        "--params",
        canon.to_str().unwrap(),
        "--out",
        ortho.to_str().unwrap(),
        "--lambdas",
        &lam_arg,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&ortho).unwrap()).unwrap();
    let ratio = v["pairs"][0]["ratio"].as_f64().unwrap();
    assert!(ratio <= 1e-6, "orthogonality ratio {ratio}");
}
