use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rdetail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdetail"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn sidecar(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&rdetail(&["frobnicate"])), 1);
    assert_eq!(code(&rdetail(&["rtp", "--no-such-flag"])), 1);
    assert_eq!(code(&rdetail(&[])), 1);
    let help = rdetail(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("grid-biv"));
}

#[test]
fn validation_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = rdetail(&["mod2-theta", "--q", "1.5", "--out", out]);
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("q"), "{}", stderr(&bad));

    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "rde = \"mod2\"\n\nq = 1.5\n").unwrap();
    let bad = rdetail(&["rtp", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&bad), 1);
    let msg = stderr(&bad);
    assert!(msg.contains("q:") && msg.contains("run.toml:3"), "{msg}");

    fs::write(&cfg, "rde = \"mod2\"\nsamplez = 10\n").unwrap();
    let bad = rdetail(&["rtp", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("samplez"), "{}", stderr(&bad));
}

#[test]
fn resource_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdetail(&[
        "rtp",
        "--depth",
        "60",
        "--samples",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn mod2_theta_prints_the_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdetail(&[
        "mod2-theta",
        "--q",
        "0.3",
        "--tol",
        "1e-12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let line = stdout(&out);
    assert!(line.starts_with("0.250000000000 "), "{line}");
    assert!(line.contains("iterations="));
    let doc = sidecar(&dir.path().join("mod2_theta.json"));
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["config"]["q"], 0.3);
}

#[test]
fn config_file_fills_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "rde = \"mod2\"\nq = 0.5\nsamples = 500\n\n[rtp]\ndepth = 3\n").unwrap();
    let out = dir.path().join("o");
    let run = rdetail(&[
        "rtp",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let doc = sidecar(&out.join("roots.json"));
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["config"]["rde"], "mod2");
    assert_eq!(doc["config"]["depth"], 3);
    assert_eq!(doc["config"]["samples"], 500);
    let csv = fs::read_to_string(out.join("roots.csv")).unwrap();
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn grid_biv_converges_from_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let run = rdetail(&[
        "grid-biv",
        "--r",
        "3",
        "--k",
        "128",
        "--tol",
        "1e-3",
        "--start",
        "diagonal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,sup_h\n0,"), "{trace}");
    let doc = sidecar(&dir.path().join("trace.json"));
    assert_eq!(doc["summary"]["verdict"], "converged-to-product");
    assert!(dir.path().join("grid.txt").exists());
}

#[test]
fn grid_commands_refuse_other_equations() {
    let dir = tempfile::tempdir().unwrap();
    let run = rdetail(&["grid-biv", "--rde", "mod2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&run), 1);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<(String, Vec<u8>)>> = ["1", "8"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("w{w}"));
            let run = rdetail(&[
                "coupled",
                "--depth",
                "2",
                "--depth-max",
                "6",
                "--depth-step",
                "2",
                "--samples",
                "3000",
                "--seed",
                "9",
                "--workers",
                w,
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code(&run), 0, "{}", stderr(&run));
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort();
            files
        })
        .collect();
    assert_eq!(runs[0].len(), 8);
    assert_eq!(runs[0], runs[1]);
}
