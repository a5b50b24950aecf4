use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn roadshare(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadshare"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn only_subdir(root: &Path) -> PathBuf {
    let dirs: Vec<_> = fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

#[test]
fn gen_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = roadshare(&["gen", "--seed", "3"], d.path());
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("|K| = 2") && text.contains("|T| = 48"), "{text}");
    }
    let (ra, rb) = (only_subdir(a.path()), only_subdir(b.path()));
    for f in ["network.csv", "demand.csv", "config.toml"] {
        assert_eq!(fs::read(ra.join(f)).unwrap(), fs::read(rb.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.toml");
    fs::write(&cfg, "[training]\nepochs = 3\nfoo = 1\n").unwrap();
    let out = roadshare(&["gen", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));
}

#[test]
fn bad_arguments_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(roadshare(&["train", "--algo", "ppo"], d.path()).status.code(), Some(2));
    assert_eq!(
        roadshare(&["ablate-noise", "--sigmas", "0.2"], d.path()).status.code(),
        Some(2)
    );
    assert_eq!(roadshare(&["frobnicate"], d.path()).status.code(), Some(2));
}

#[test]
fn train_then_plot() {
    let d = tempfile::tempdir().unwrap();
    let runs = d.path().join("runs");
    let out = roadshare(&["train", "--algo", "maddpg", "--epochs", "2", "--seed", "4"], &runs);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = only_subdir(&runs);
    assert_eq!(fs::read_dir(run.join("checkpoints")).unwrap().count(), 8);
    let metrics = fs::read_to_string(run.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    assert!(metrics.lines().skip(1).all(|l| l.ends_with(",0")), "wall_ms zeroed");

    let svg = d.path().join("curve.svg");
    let m = run.join("metrics.csv");
    let args = ["plot", m.to_str().unwrap(), "--out", svg.to_str().unwrap()];
    assert!(roadshare(&args, d.path()).status.success());
    let first = fs::read(&svg).unwrap();
    assert!(roadshare(&args, d.path()).status.success());
    assert_eq!(first, fs::read(&svg).unwrap());
    assert!(String::from_utf8(first).unwrap().starts_with("<svg"));
}

#[test]
fn plot_rejects_empty_metrics() {
    let d = tempfile::tempdir().unwrap();
    let csv = d.path().join("empty.csv");
    fs::write(&csv, "").unwrap();
    let svg = d.path().join("x.svg");
    let out = roadshare(
        &["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()],
        d.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!svg.exists());
}

#[test]
fn ablation_writes_summary() {
    let d = tempfile::tempdir().unwrap();
    let out = roadshare(
        &["ablate-noise", "--sigmas", "0.2,0.6", "--seeds", "1", "--epochs", "2"],
        d.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = only_subdir(d.path());
    assert!(dir.to_string_lossy().ends_with("-ablate"));
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let lines: Vec<_> = summary.lines().collect();
    assert_eq!(lines[0], "sigma0,seed,epochs_to_95pct");
    assert_eq!(lines.len(), 3);
    let metrics = fs::read_to_string(dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 5);
}
