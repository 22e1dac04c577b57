//! End-to-end checks of the command-line interface: file round trips,
//! the gen → plant → maximize → recover pipeline, experiment determinism
//! at the process level, and the documented exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parity-clique"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed: {}\n{}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str], dir: &Path) -> i32 {
    bin().args(args).current_dir(dir).output().unwrap().status.code().unwrap()
}

#[test]
fn pipeline_gen_plant_maximize_recover() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(&["gen", "--n", "128", "--seed", "7", "--out", "g.txt"], d);
    run_ok(
        &["plant", "--input", "g.txt", "--p", "32", "--seed", "9", "--out", "inst.txt"],
        d,
    );
    // the planted clique is recorded in the file
    let text = std::fs::read_to_string(d.join("inst.txt")).unwrap();
    let p_line = text.lines().last().unwrap();
    assert!(p_line.starts_with("P="));
    let clique: Vec<usize> = p_line[2..].split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(clique.len(), 32);

    let out = run_ok(
        &[
            "maximize",
            "--graph",
            "inst.txt",
            "--r",
            "2",
            "--restarts",
            "2",
            "--iters",
            "150",
            "--seed",
            "5",
            "--out-vector",
            "x.txt",
        ],
        d,
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("value="), "{stdout}");

    let out = run_ok(
        &["recover", "--graph", "inst.txt", "--p", "32", "--vector", "x.txt", "--r", "2"],
        d,
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("FOUND "), "{stdout}");
    let found: Vec<usize> = stdout.trim()[6..].split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(found, clique);
}

#[test]
fn eval_matches_single_and_multi_vector_forms() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(&["gen", "--n", "10", "--seed", "3", "--out", "g.txt"], d);
    let x: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin() / 4.0).collect();
    let body: String = x.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(d.join("x.txt"), &body).unwrap();
    let single = run_ok(&["eval", "--graph", "g.txt", "--r", "3", "--vector", "x.txt"], d);
    let multi = run_ok(
        &[
            "eval", "--graph", "g.txt", "--r", "3", "--vector", "x.txt", "--vector", "x.txt",
            "--vector", "x.txt",
        ],
        d,
    );
    assert_eq!(single.stdout, multi.stdout);
    let v: f64 = String::from_utf8_lossy(&single.stdout).trim().parse().unwrap();
    assert!(v.is_finite());
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("conc.cfg"),
        "kind=concentration\nn_grid=16\nt_over_n=1,2\nsamples=300\nseed=5\nout=conc.csv\n",
    )
    .unwrap();
    run_ok(&["experiment", "concentration", "--config", "conc.cfg"], d);
    let first = std::fs::read(d.join("conc.csv")).unwrap();
    run_ok(&["experiment", "concentration", "--config", "conc.cfg"], d);
    let second = std::fs::read(d.join("conc.csv")).unwrap();
    assert_eq!(first, second);

    // the checker recomputes the derived columns
    run_ok(&["verify", "--csv", "conc.csv", "--kind", "concentration"], d);

    std::fs::write(
        d.join("norm.cfg"),
        "kind=norm-scaling\nn_grid=8,16\nr=2\ntrials=2\nrestarts=2\niters=15\nseed=6\nout=norm.csv\n",
    )
    .unwrap();
    run_ok(&["experiment", "norm-scaling", "--config", "norm.cfg", "--plot"], d);
    let first = std::fs::read(d.join("norm.csv")).unwrap();
    assert!(d.join("norm.csv.gp").exists());
    run_ok(&["experiment", "norm-scaling", "--config", "norm.cfg"], d);
    let second = std::fs::read(d.join("norm.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn verify_suite_passes_and_exit_codes_match_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // quick oracle suite
    let out = run_ok(&["verify", "--n", "6", "--r", "3", "--samples", "300", "--tuples", "10"], d);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");

    // usage error -> 1
    assert_eq!(exit_code(&["experiment", "bogus-kind", "--config", "x.cfg"], d), 1);
    std::fs::write(d.join("bad.cfg"), "kind=norm-scaling\nn_grid=\n").unwrap();
    assert_eq!(exit_code(&["experiment", "norm-scaling", "--config", "bad.cfg"], d), 1);
    // empty grid: usage error, no file written
    std::fs::write(d.join("empty.cfg"), "kind=norm-scaling\nout=never.csv\n").unwrap();
    assert_eq!(exit_code(&["experiment", "norm-scaling", "--config", "empty.cfg"], d), 1);
    assert!(!d.join("never.csv").exists());

    // resource guard -> 2
    run_ok(&["gen", "--n", "8", "--seed", "1", "--out", "g.txt"], d);
    let ones: String = (0..8).map(|_| "0.25\n").collect();
    std::fs::write(d.join("x.txt"), ones).unwrap();
    assert_eq!(
        exit_code(&["eval", "--graph", "g.txt", "--r", "7", "--vector", "x.txt"], d),
        2
    );

    // verification failure -> 3
    std::fs::write(
        d.join("conc.cfg"),
        "kind=concentration\nn_grid=8\nt_over_n=1\nsamples=100\nseed=5\nout=conc.csv\n",
    )
    .unwrap();
    run_ok(&["experiment", "concentration", "--config", "conc.cfg"], d);
    let csv = std::fs::read_to_string(d.join("conc.csv")).unwrap();
    std::fs::write(d.join("conc.csv"), csv.replace("0.", "9.")).unwrap();
    assert_eq!(
        exit_code(&["verify", "--csv", "conc.csv", "--kind", "concentration"], d),
        3
    );
}

#[test]
fn malformed_instance_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.txt"), "n=3\n1\n1\n").unwrap();
    let out = bin()
        .args(["eval", "--graph", "bad.txt", "--r", "2", "--vector", "x.txt"])
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn vector_files_roundtrip_through_maximize() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(&["gen", "--n", "32", "--seed", "2", "--out", "g.txt"], d);
    run_ok(
        &[
            "maximize", "--graph", "g.txt", "--r", "3", "--restarts", "2", "--iters", "10",
            "--seed", "8", "--out-vector", "best.txt",
        ],
        d,
    );
    let text = std::fs::read_to_string(d.join("best.txt")).unwrap();
    let v: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(v.len(), 32);
    let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-9);

    let _out: PathBuf = d.join("best.txt");
    // the written vector feeds straight back into recover
    let out = run_ok(
        &["recover", "--graph", "g.txt", "--p", "30", "--vector", "best.txt", "--verbose"],
        d,
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.trim() == "FAILURE" || stdout.starts_with("FOUND"), "{stdout}");
}
