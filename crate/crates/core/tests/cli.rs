//! End-to-end runs of the `dilemma` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dilemma"));
    c.env_remove("DILEMMA_MAX_TOTAL_STEPS");
    c
}

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_symmetric_pd() {
    let o = run(&["check", "--pd", "-1000,-2000,-3000,-4000"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("valid PD: true"), "{s}");
    assert!(s.contains("dominant action: norepair"));
    assert!(s.contains("EU threshold: 3/4 (0.75)"));
}

#[test]
fn check_rejects_non_pd() {
    let o = run(&["check", "--pd", "3,5,1,0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("valid PD: false"));
}

#[test]
fn analyze_asymmetric_game() {
    let game = games_dir().join("table2.game");
    let o = run(&["analyze", "--game", game.to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("game: asymmetric"));
    assert!(s.contains("EU threshold: 3/4 (0.75)"));
    assert!(s.contains("EU threshold: 999/1000 (0.999)"));
    assert_eq!(s.matches("dominant action: norepair").count(), 2);
}

#[test]
fn table1_file_matches_builtin_pd() {
    let game = games_dir().join("table1.game");
    let o = run(&["check", "--game", game.to_str().unwrap()]);
    assert!(stdout(&o).contains("valid PD: true"));
}

#[test]
fn csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["newcomb", "--view", "robot", "--agents", "sarsa", "--seed", "7", "--steps", "2000", "--runs", "5"];
    let mut outs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("{i}.csv"));
        let svg = dir.path().join(format!("{i}.svg"));
        let o = bin()
            .args(args)
            .args(["--threads", threads, "--out", path.to_str().unwrap(), "--svg", svg.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push((std::fs::read(&path).unwrap(), std::fs::read(&svg).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);

    let csv = String::from_utf8(outs[0].0.clone()).unwrap();
    let result = dilemma::csv_io::parse_csv(&csv).unwrap();
    assert_eq!(result.seed, 7);
    assert_eq!(result.points.len(), 21);
    assert!(result.points.iter().all(|p| p.agent == "sarsa" && p.runs == 5));
}

#[test]
fn pd_modes_label_series() {
    let o = run(&["pd", "--agents", "always-repair", "--mode", "individual,sum", "--steps", "20", "--runs", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(",always-repair-I,"));
    assert!(s.contains(",always-repair-T,"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["newcomb", "--agents", "nobody"],
        vec!["newcomb", "--epsilon", "1.5"],
        vec!["newcomb", "--p-grid", "0:1:0"],
        vec!["pd", "--mode", "group"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn io_errors_exit_1() {
    let o = run(&["analyze", "--game", "/nonexistent/game.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing/out.csv");
    let o = run(&["newcomb", "--steps", "10", "--runs", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn step_budget_is_enforced() {
    let o = bin()
        .env("DILEMMA_MAX_TOTAL_STEPS", "1000")
        .args(["newcomb", "--steps", "1000", "--runs", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DILEMMA_MAX_TOTAL_STEPS"));

    let o = bin()
        .env("DILEMMA_MAX_TOTAL_STEPS", "1000")
        .args(["newcomb", "--steps", "10", "--runs", "2", "--p-grid", "0:1:0.5"])
        .output()
        .unwrap();
    assert!(o.status.success());
}
