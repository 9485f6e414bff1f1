use std::path::Path;
use std::process::{Command, Output};

use wbicat::algebra::MultiMatrixAlgebra;
use wbicat::bimodule::Bimodule;
use wbicat::instance::{self, BimoduleSpec, ComplexMatrix, Instance, InstanceSpec};

fn wbicat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbicat"))
        .args(args)
        .env_remove("BIMODULE_TOL")
        .output()
        .expect("binary runs")
}

fn canonical(label: &str, left: usize, right: usize, mu: Vec<Vec<usize>>) -> BimoduleSpec {
    BimoduleSpec {
        label: label.into(),
        left,
        right,
        multiplicities: Some(mu),
        basis: None,
        dim: None,
        left_action: None,
        right_action: None,
    }
}

/// `ℂ`, `M_2`; the row module `R = ℂ²` over `(ℂ, M_2)`, the column module
/// `C` over `(M_2, ℂ)` and `L²(M_2)`.
fn row_column_spec() -> InstanceSpec {
    let mut spec = InstanceSpec::empty(7);
    spec.algebras = vec![MultiMatrixAlgebra::complex(), MultiMatrixAlgebra::full_matrix(2).unwrap()];
    spec.bimodules = vec![
        canonical("R", 0, 1, vec![vec![1]]),
        canonical("C", 1, 0, vec![vec![1]]),
        canonical("L2", 1, 1, vec![vec![1]]),
    ];
    spec.chain = Some(vec!["R".into(), "C".into()]);
    spec
}

fn write_spec(dir: &Path, name: &str, spec: &InstanceSpec) -> String {
    let path = dir.join(name);
    std::fs::write(&path, instance::save(spec).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_exits_zero() {
    for args in [&["--help"][..], &["verify", "--help"], &["gen", "--help"], &["tensor", "--help"]] {
        let out = wbicat(args);
        assert!(out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn verify_generated_instance_passes() {
    let out = wbicat(&["verify", "--seed", "42", "--max-dim", "24"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains(" 0 failed, 0 errors"), "{text}");
}

#[test]
fn verify_json_is_reproducible() {
    let args = ["verify", "--seed", "5", "--max-dim", "16", "--json", "--suite", "triangle,hexagon"];
    let (a, b) = (wbicat(&args), wbicat(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| {
        let n = c["name"].as_str().unwrap();
        n.starts_with("triangle") || n.starts_with("hexagon")
    }));
    assert_eq!(report["summary"]["total"], checks.len());
}

#[test]
fn corrupted_actions_fail_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = row_column_spec();
    // Replace R by explicit actions with a damaged left unit.
    let (c, m2) = (spec.algebras[0].clone(), spec.algebras[1].clone());
    let r = Bimodule::from_multiplicities(&c, &m2, &[vec![1]]).unwrap();
    let mut left: Vec<ComplexMatrix> = r.left_actions().iter().map(ComplexMatrix::from_mat).collect();
    left[0].0[0][1] = [0.25, 0.0];
    spec.bimodules[0] = BimoduleSpec {
        label: "R".into(),
        left: 0,
        right: 1,
        multiplicities: None,
        basis: None,
        dim: Some(r.dim()),
        left_action: Some(left),
        right_action: Some(r.right_actions().iter().map(ComplexMatrix::from_mat).collect()),
    };
    let path = write_spec(dir.path(), "bad.json", &spec);
    let out = wbicat(&["verify", "--instance", &path, "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let bad = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "bimodule/R").unwrap();
    assert_eq!(bad["status"], "fail");
}

#[test]
fn unreadable_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"version":1,"seed":0,"algebras":[{"blocks":[2]}],"bimodules":[{"label":"X","left":3,"right":0,"multiplicities":[[1]]}]}"#).unwrap();
    let out = wbicat(&["verify", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bimodules[0].left"));
    let out = wbicat(&["verify", "--instance", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_respects_limits() {
    let args = ["gen", "--seed", "11", "--max-dim", "20", "--max-blocks", "2", "--max-block-size", "2"];
    let (a, b) = (wbicat(&args), wbicat(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let spec = instance::load(&a.stdout).unwrap();
    assert!(spec.algebras.iter().all(|alg| alg.num_blocks() <= 2 && alg.blocks().iter().all(|&n| n <= 2)));
    let inst = Instance::from_spec(spec).unwrap();
    assert!(inst.bimodules.iter().all(|x| x.dim() <= 20));
    let other = wbicat(&["gen", "--seed", "12", "--max-dim", "20"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn gen_rejects_zero_limit() {
    for flag in ["--max-dim", "--max-blocks", "--max-block-size", "--max-multiplicity"] {
        let out = wbicat(&["gen", flag, "0"]);
        assert_eq!(out.status.code(), Some(2), "{flag}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("must be positive"));
    }
}

#[test]
fn gen_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let out = wbicat(&["gen", "--seed", "3", "--max-dim", "12", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let verify = wbicat(&["verify", "--instance", path.to_str().unwrap(), "--suite", "triangle"]);
    assert_eq!(verify.status.code(), Some(0));
}

fn tensor_json(path: &str, left: &str, right: &str) -> (Option<i32>, serde_json::Value) {
    let out = wbicat(&["tensor", "--instance", path, "--left", left, "--right", right, "--json"]);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code(), v)
}

#[test]
fn tensor_reports_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "rc.json", &row_column_spec());

    // Row times column over M_2 is one-dimensional.
    let (code, v) = tensor_json(&path, "R", "C");
    assert_eq!(code, Some(0));
    for kind in ["left", "right"] {
        assert_eq!(v[kind]["dim"], 1);
        assert_eq!(v[kind]["gramRank"], 1);
    }
    assert!(v["mIsometryDefect"].as_f64().unwrap() < 1e-12);

    // X ⋌ L²(B) has the dimension of X.
    let (code, v) = tensor_json(&path, "R", "L2");
    assert_eq!(code, Some(0));
    assert_eq!(v["leftFactor"]["dim"], 2);
    assert_eq!(v["right"]["dim"], 2);
    assert_eq!(v["left"]["dim"], 2);
}

#[test]
fn tensor_rejects_mismatched_algebras() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "rc.json", &row_column_spec());
    let out = wbicat(&["tensor", "--instance", &path, "--left", "R", "--right", "R"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wbicat(&["tensor", "--instance", &path, "--left", "R", "--right", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_flag_beats_environment() {
    let base = ["verify", "--seed", "2", "--max-dim", "12", "--suite", "triangle/left", "--json"];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_wbicat"));
        cmd.args(base).args(extra);
        match env {
            Some(v) => cmd.env("BIMODULE_TOL", v),
            None => cmd.env_remove("BIMODULE_TOL"),
        };
        let out = cmd.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["checks"][0]["tolerance"].as_f64().unwrap()
    };
    let default = run(None, &[]);
    let from_env = run(Some("1e-6"), &[]);
    let flag = run(Some("1e-6"), &["--tol", "1e-8"]);
    assert!((from_env / default - 1e3).abs() < 1e-6);
    assert!((flag / default - 10.0).abs() < 1e-9);
}
