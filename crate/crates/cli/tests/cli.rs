use std::path::{Path, PathBuf};
use std::process::Command;

use moduli_cli::repfile::{write_rep, RepFile};
use moduli_cli::{read_report, Status};
use moduli_core::{AlgebraElement, CentralRep, GroupId, LieContext};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moduli-cli"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const U1: &str = "group_id = \"u1\"\ngenus = 2\nrep_strategy = \"trivial\"\nsuite_samples = 20\n";

#[test]
fn golden_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u1.toml", U1);
    let out = dir.path().join("pass.json");
    let (code, _, _) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = read_report(&out).unwrap();
    assert_eq!(report.status, Status::Pass);
    assert!(report.chart.unwrap().nonsingular);

    // A threshold below round-off makes the suite fail honestly.
    let out = dir.path().join("fail.json");
    let (code, _, stderr) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "group_id=su2",
        "--override",
        "central_target=[]",
        "--override",
        "rep_strategy=random-polish",
        "--override",
        "tolerances.identity_residual=1e-300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{stderr}");
    let report = read_report(&out).unwrap();
    assert_eq!(report.status, Status::Fail);
    assert!(report
        .failed_invariants()
        .all(|r| r.tolerance_name == "identity_residual"));
}

#[test]
fn non_central_file_is_a_construction_error() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = LieContext::new(GroupId::SU2);
    let t = 0.22;
    let images = vec![
        ctx.exp_coords(&AlgebraElement::from_slice(&[t, 0.0, 0.0]).coeffs),
        ctx.exp_coords(&AlgebraElement::from_slice(&[0.0, t, 0.0]).coeffs),
    ];
    let rep = CentralRep::with_twist(ctx, images, AlgebraElement::zero(3), 0).unwrap();
    assert!(
        rep.defect() > 0.05 && rep.defect() < 0.2,
        "{}",
        rep.defect()
    );
    write_rep(&dir.path().join("rep.toml"), &rep).unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "group_id = \"su2\"\ngenus = 1\nrep_strategy = \"from-file\"\nrep_file = \"rep.toml\"\n",
    );
    let out = dir.path().join("r.json");
    let (code, _, _) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    let report = read_report(&out).unwrap();
    assert_eq!(report.status, Status::Error);
    assert!(report.error.unwrap().contains("not central"));
}

#[test]
fn find_rep_then_verify_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pauli.toml",
        "group_id = \"su2\"\ngenus = 1\ncentral_twist = 1\nrep_strategy = \"pauli-genus1\"\nsuite_samples = 10\n",
    );
    let rep_path = dir.path().join("rep.toml");
    let (code, _, _) = run(&[
        "find-rep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        rep_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let file = RepFile::from_toml(&std::fs::read_to_string(&rep_path).unwrap()).unwrap();
    assert_eq!(file.central_twist, 1);
    let (code, stdout, _) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "rep_strategy=from-file",
        "--override",
        &format!("rep_file={:?}", rep_path.to_str().unwrap()),
    ]);
    assert_eq!(code, 0);
    let report = moduli_cli::Report::from_json(&stdout).unwrap();
    assert_eq!(report.chart.unwrap().h1_dim, 0);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u1.toml", U1);
    assert_eq!(run(&["verify"]).0, 2);
    assert_eq!(run(&["verify", "--config", "/nonexistent.toml"]).0, 2);
    assert_eq!(
        run(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--override",
            "genus=0"
        ])
        .0,
        2
    );
    assert_eq!(run(&["chart", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn report_subcommand_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u1.toml", U1);
    let out = dir.path().join("r.json");
    run(&[
        "chart",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "sample_count=5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (code, stdout, _) = run(&["report", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("chart report"));
    assert!(stdout.contains("samples 5: kept 5"));
    let text = std::fs::read_to_string(&out)
        .unwrap()
        .replace("\"version\": \"1\",", "");
    std::fs::write(&out, text).unwrap();
    assert_eq!(run(&["report", out.to_str().unwrap()]).0, 2);
}

#[test]
fn sweep_writes_one_report_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "u1.toml",
        &format!("{U1}sample_count = 4\nseed = 10\n"),
    );
    let out = dir.path().join("sweep");
    let (code, _, _) = run(&[
        "sweep",
        "--count",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for seed in 10..13 {
        assert_eq!(
            read_report(&out.join(format!("chart-{seed}.json")))
                .unwrap()
                .seed,
            seed
        );
    }
}
