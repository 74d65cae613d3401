use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .args(args)
        .env("FRACWAVE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("error report is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_prints_passing_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&["validate", "--out", s(dir.path())]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.contains("classical soliton"));
    assert!(!text.contains("FAIL"));
    assert!(dir.path().join("validation.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn groundstate_writes_record_field_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("phi.frw");
    let out = fracwave(&[
        "groundstate",
        "--s1",
        "1",
        "--p",
        "4",
        "--grid",
        "512,40",
        "--out",
        s(dir.path()),
        "--field",
        s(&field),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("record.json")).unwrap()).unwrap();
    assert!((record["mass"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        assert_eq!(f["sha256"].as_str().unwrap().len(), 64);
    }
    assert_eq!(manifest["config"]["task"], "groundstate");
    assert!(field.exists());
}

#[test]
fn bad_exponent_ordering_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&[
        "groundstate",
        "--s1",
        "0.5",
        "--s2",
        "0.75",
        "--p",
        "4",
        "--c",
        "1",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "Config");
    assert!(err["message"].as_str().unwrap().contains("s2 < s1"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "s1 = 1.0\np = 4.0\ngird = \"256,40\"\n").unwrap();
    let out = fracwave(&["groundstate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"]
        .as_str()
        .unwrap()
        .contains("gird"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "s1 = 1.0\np = 4.0\ngrid = \"64,40\"\n").unwrap();
    let out = fracwave(&[
        "groundstate",
        "--config",
        s(&cfg),
        "--grid",
        "256,40",
        "--out",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["grid"]["n_per_axis"], 256);
}

#[test]
fn evolve_is_deterministic_and_classify_reports_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.frw");
    let gs = fracwave(&[
        "groundstate",
        "--s1",
        "1",
        "--p",
        "7",
        "--grid",
        "256,40",
        "--out",
        s(&dir.path().join("gs")),
        "--field",
        s(&phi),
    ]);
    assert!(gs.status.success());

    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = fracwave(&[
            "evolve",
            "--init",
            s(&phi),
            "--s1",
            "1",
            "--s2",
            "0.6",
            "--p",
            "7",
            "--T",
            "0.2",
            "--out",
            s(&out_dir),
            "--snapshots",
            s(&out_dir.join("snaps")),
            "--snapshot-every",
            "5",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        csvs.push(fs::read(out_dir.join("traj.csv")).unwrap());
        assert!(out_dir.join("snaps/snap_00000.frw").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    let header = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(header.starts_with("t,mass,energy,grad_s1,grad_s2,virial,linf\n"));

    let out = fracwave(&[
        "classify",
        "--init",
        s(&phi),
        "--phi",
        s(&phi),
        "--s1",
        "1",
        "--s2",
        "0.6",
        "--p",
        "7",
        "--out",
        s(&dir.path().join("cls")),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let verdict: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("cls/verdict.json")).unwrap()).unwrap();
    assert!(
        verdict["classification"]["rationale"]
            .as_array()
            .unwrap()
            .len()
            >= 5
    );
}

#[test]
fn missing_input_field_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&[
        "evolve",
        "--init",
        s(&dir.path().join("nope.frw")),
        "--s1",
        "1",
        "--s2",
        "0.6",
        "--p",
        "4",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "Io");
}

#[test]
fn gamma_sweep_emits_branch_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(&[
        "gamma-sweep",
        "--s1",
        "1",
        "--s2",
        "0.5",
        "--p",
        "7",
        "--scaled-grid",
        "4000,8",
        "--c-list",
        "2.5,3",
        "--out",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("branch.csv")).unwrap();
    assert!(csv.starts_with("c,gamma,lambda,q_residual,el_residual\n"));
    assert_eq!(csv.lines().count(), 3);
}
