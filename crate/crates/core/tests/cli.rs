use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brt-sched"))
}

#[test]
fn run_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--policy", "baseline", "--seed", "3", "--no-timing", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace_baseline_seed3.csv")).unwrap();
    assert!(trace.lines().count() <= 602);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "--policy", "dp", "--la", "4", "--format", "jsonl"])
        .env("BRT_SCHED_OUT", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("trace_dp-4_seed0.jsonl").exists());
}

#[test]
fn batch_writes_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["batch", "--la", "4", "--runs", "2", "--out"])
        .arg(dir.path())
        .env("BRT_SCHED_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    let runs = std::fs::read_to_string(dir.path().join("runs.jsonl")).unwrap();
    assert_eq!(runs.lines().count(), 4);
    let batch = std::fs::read_to_string(dir.path().join("batch.csv")).unwrap();
    assert_eq!(batch.lines().count(), 3);
}

#[test]
fn empty_batch_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["batch", "--la", "5", "--runs", "0", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let batch = std::fs::read_to_string(dir.path().join("batch.csv")).unwrap();
    assert_eq!(batch.lines().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[params]\nlambda = 0.0\n").unwrap();
    let status = bin().args(["run", "--scenario"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(1));

    let status = bin()
        .args(["run", "--scenario"])
        .arg(dir.path().join("missing.toml"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let status = bin().args(["run", "--out"]).arg(blocker.join("sub")).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn verify_passes() {
    let out = bin()
        .args(["verify", "--instances", "3", "--episodes", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("3/3 instances agree"), "{text}");
}
