use std::path::Path;
use std::process::{Command, Output};

fn setool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setool"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["construct", "--method", "recurrent", "--n", "8", "--t", "5", "--out", "r.blk"]);
    assert!(o.status.success(), "{o:?}");
    let o = setool(dir.path(), &["verify", "--kind", "se", "r.blk"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("valid se"));
}

#[test]
fn verify_failure_prints_witness_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.blk"), "4 2 1\n1 2\n").unwrap();
    let o = setool(dir.path(), &["verify", "--kind", "se", "bad.blk"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("is not hit"), "{}", stdout(&o));
}

#[test]
fn verify_other_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["construct", "--method", "kuzjurin", "--n", "7", "--k", "3", "--out", "c.blk"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(setool(dir.path(), &["verify", "c.blk"]).status.code(), Some(0));
    assert_eq!(setool(dir.path(), &["verify", "--kind", "covering", "--covered", "2", "c.blk"]).status.code(), Some(0));
    assert_eq!(setool(dir.path(), &["verify", "--kind", "covering", "--covered", "3", "c.blk"]).status.code(), Some(1));
}

#[test]
fn exact_prints_value_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["exact", "--kind", "se", "--n", "4", "--t", "2", "--out", "w.blk"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "3");
    let o = setool(dir.path(), &["verify", "w.blk"]);
    assert_eq!(o.status.code(), Some(0));
    let o = setool(dir.path(), &["exact", "--kind", "turan", "--n", "6", "--s", "3", "--t", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("6"));
}

#[test]
fn exact_budget_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["--budget", "10", "exact", "--kind", "se", "--n", "6", "--t", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget exceeded"));
}

#[test]
fn code_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["code", "make-h", "--n", "5", "--d", "3", "--out", "h.txt"]);
    assert!(o.status.success(), "{o:?}");
    let o = setool(dir.path(), &["code", "stopping", "h.txt"]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = setool(dir.path(), &["code", "decode", "h.txt", "--erased", "2,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "recovered");
    let o = setool(dir.path(), &["code", "decode", "h.txt", "--erased", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("stuck"));
    let o = setool(dir.path(), &["code", "replace-rows", "h.txt", "--d", "3"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("5 4 5\n"));
}

#[test]
fn replace_rows_on_heavy_matrix() {
    let dir = tempfile::tempdir().unwrap();
    // one weight-5 dual codeword of the [5,3,3] code over F_5
    std::fs::write(dir.path().join("h.txt"), "5 1 5\n4 2 1 3 4\n").unwrap();
    let o = setool(dir.path(), &["code", "replace-rows", "h.txt", "--d", "3", "--out", "r.txt"]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() <= 2);
    for r in rows {
        assert_eq!(r.split_whitespace().filter(|x| *x != "0").count(), 4);
    }
}

#[test]
fn bounds_eval_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["bounds", "eval", "--n", "31", "--d", "27"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("winner: recurrent_c (55905)"));
    let o = setool(dir.path(), &["--format", "csv", "bounds", "eval", "--n", "31", "--d", "23"]);
    assert!(stdout(&o).contains("31,23,winner,,6412596,probabilistic"));
}

#[test]
fn small_d_warns_and_routes() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["bounds", "eval", "--n", "5", "--d", "4"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(stdout(&o).contains("exact S(n,d-2) = 5"));
    let o = setool(dir.path(), &["bounds", "eval", "--n", "9", "--d", "3"]);
    assert!(stdout(&o).contains("= 8"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(setool(dir.path(), &["bounds", "eval", "--n", "5", "--d", "9"]).status.code(), Some(2));
    assert_eq!(setool(dir.path(), &["construct", "--method", "recurrent", "--n", "8"]).status.code(), Some(2));
    assert_eq!(setool(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(setool(dir.path(), &["verify", "missing.blk"]).status.code(), Some(2));
}

#[test]
fn sweep_and_fig1_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = setool(dir.path(), &["bounds", "sweep", "--n-max", "31", "--strategy", "sequential"]);
    let b = setool(dir.path(), &["bounds", "sweep", "--n-max", "31", "--strategy", "parallel"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    assert!(csv.starts_with("# se-sweep-csv v1\nn,d,rate,"));
    assert!(csv.contains("\n31,7,"));
    let o = setool(dir.path(), &["report", "fig1", "--n-max", "31", "--out", "fig1.csv"]);
    assert!(o.status.success(), "{o:?}");
    let fig = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert!(fig.contains("\n31,7,recurrent_b\n"));
    assert!(fig.contains("\n31,27,recurrent_c\n"));
    assert!(dir.path().join("fig1.gp").exists());
}

#[test]
fn random_greedy_depends_on_seed_only() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| stdout(&setool(dir.path(), &["--seed", seed, "construct", "--method", "random-greedy", "--n", "9", "--t", "4"]));
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn exact_stopping_redundancy() {
    let dir = tempfile::tempdir().unwrap();
    let o = setool(dir.path(), &["exact", "--kind", "rho", "--n", "5", "--d", "3", "--out", "h.txt"]);
    assert!(o.status.success(), "{o:?}");
    let rho: usize = stdout(&o).trim().parse().unwrap();
    assert!((2..=4).contains(&rho));
    let o = setool(dir.path(), &["code", "stopping", "h.txt"]);
    assert_eq!(stdout(&o).trim(), "3");
}
