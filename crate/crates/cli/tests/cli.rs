use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use distillery::experiments::Table;

fn distillery(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_distillery"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("DISTILLERY_THREADS", t),
        None => cmd.env_remove("DISTILLERY_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn sweep_to_stdout_round_trips() {
    let out = distillery(&["two-pair-sweep", "--grid-step", "0.05"], None);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# distillery"));
    let table = Table::from_csv(&text).unwrap();
    assert_eq!(table.columns, ["F", "alpha", "F_out", "F_out_sim", "p_succ"]);
    assert_eq!(table.rows.len(), 22);
    assert_eq!(table.to_csv(), text);
    let (fs_, closed, sim) = (table.column("F").unwrap(), table.column("F_out").unwrap(), table.column("F_out_sim").unwrap());
    for i in 0..fs_.len() {
        assert!((closed[i] - sim[i]).abs() < 1e-10);
        if fs_[i] == 0.5 {
            assert_eq!(closed[i], 0.5);
        }
    }
}

#[test]
fn iterate_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("iter.csv");
    let out = distillery(&["two-pair-iterate", "-F", "1", "--out", path.to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    let table = Table::from_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.columns, ["round", "F"]);
    assert_eq!(table.rows.len(), 11);
    assert!(table.column("F").unwrap().iter().all(|&f| (f - 1.0).abs() < 1e-15));
}

#[test]
fn family_json_output() {
    let out = distillery(&["pareto-family", "-F", "0.8", "--r-steps", "3", "--format", "json"], None);
    assert_eq!(code(&out), 0);
    let table: Table = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.columns.len(), 8);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["two-pair-iterate", "-F", "1.5"][..],
        &["two-pair-sweep", "--grid-step", "0.3"],
        &["three-pair-sample", "--samples", "0"],
        &["pareto-family", "-F", "0.5"],
        &["no-such-command"],
        &["two-pair-sweep", "--alpha", "abc"],
    ] {
        let out = distillery(args, None);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = distillery(&["two-pair-iterate"], Some("many"));
    assert_eq!(code(&out), 1);
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let bad = blocker.join("out.csv");
    let out = distillery(&["two-pair-iterate", "--out", bad.to_str().unwrap()], None);
    assert_eq!(code(&out), 3);
    let out = distillery(&["three-pair-sample", "--samples", "4", "--out", bad.to_str().unwrap()], None);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_passes_and_detects_perturbation() {
    let out = distillery(&["verify"], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max dev") && text.contains("overall: PASS"));

    let out = distillery(&["verify", "--perturb", "1e-6", "--format", "json"], None);
    assert_eq!(code(&out), 2);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn help_exits_zero() {
    let out = distillery(&["--help"], None);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("three-pair-sample"));
}

#[test]
fn sampling_is_byte_identical_across_runs_and_threads() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip(["1", "8", "8"]) {
        let out = distillery(
            &["three-pair-sample", "-F", "0.6", "-F", "0.9", "--samples", "500", "--seed", "42", "--out", dir.path().to_str().unwrap()],
            Some(threads),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let first = read_dir_sorted(dirs[0].path());
    assert_eq!(first.len(), 4);
    for d in &dirs[1..] {
        assert_eq!(read_dir_sorted(d.path()), first);
    }
    let table = Table::from_csv(std::str::from_utf8(&first[0].1).unwrap()).unwrap();
    assert_eq!(table.columns, ["F_out", "P_succ"]);
    for row in &table.rows {
        assert!(row.iter().all(|c| (0.0..=1.0 + 1e-12).contains(&c.as_f64())));
    }
}
