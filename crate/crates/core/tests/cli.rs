use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clhui(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clhui"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn example_dir(dir: &Path) -> Vec<String> {
    let out = clhui(&["example", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let p = |f: &str| dir.join(f).to_str().unwrap().to_owned();
    vec![
        "--transactions".into(),
        p("transactions.txt"),
        "--taxonomy".into(),
        p("taxonomy.txt"),
        "--profits".into(),
        p("profits.txt"),
        "--format".into(),
        "quantity".into(),
    ]
}

fn run(base: &[String], extra: &[&str]) -> Output {
    let mut args: Vec<&str> = base.iter().map(String::as_str).collect();
    args.extend_from_slice(extra);
    clhui(&args)
}

fn with_cmd(cmd: &str, base: &[String]) -> Vec<String> {
    std::iter::once(cmd.to_owned())
        .chain(base.iter().cloned())
        .collect()
}

#[test]
fn mine_prints_itemsets() {
    let tmp = tempfile::tempdir().unwrap();
    let base = example_dir(tmp.path());
    let out = run(&with_cmd("mine", &base), &["--minutil", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("X Z #UTIL: 85"));
    let out = run(&with_cmd("mine", &base), &["--minutil", "1000"]);
    assert!(out.status.success() && out.stdout.is_empty());
}

#[test]
fn sanitize_all_strategies_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let base = example_dir(tmp.path());
    let out_dir = tmp.path().join("run");
    let sens = tmp.path().join("sensitive.txt");
    let out = run(
        &with_cmd("sanitize", &base),
        &[
            "--minutil",
            "50",
            "--sensitive-file",
            sens.to_str().unwrap(),
            "--strategy",
            "all",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("gidic.txt").exists());
    for name in ["min-rf", "max-rf", "best-nscf"] {
        let report: Value = serde_json::from_str(
            &std::fs::read_to_string(out_dir.join(format!("report_{name}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(report["hf"], 0.0, "{name}");
        assert_eq!(report["ac"], 0.0, "{name}");
        assert_eq!(report["strategy"], name);
        assert!(report["residual_utilities"]
            .as_object()
            .unwrap()
            .values()
            .all(|v| v.as_u64().unwrap() < 50));
        assert!(out_dir.join(format!("sanitized_{name}.txt")).exists());

        // Re-evaluating from the written database or from the log agrees.
        let sanitized = out_dir.join(format!("sanitized_{name}.txt"));
        let edits = out_dir.join(format!("edits_{name}.txt"));
        for (flag, path) in [("--sanitized", &sanitized), ("--edits", &edits)] {
            let ev = run(
                &with_cmd("evaluate", &base),
                &[
                    flag,
                    path.to_str().unwrap(),
                    "--sensitive-file",
                    sens.to_str().unwrap(),
                    "--minutil",
                    "50",
                ],
            );
            assert!(
                ev.status.success(),
                "{}",
                String::from_utf8_lossy(&ev.stderr)
            );
            let ev: Value = serde_json::from_slice(&ev.stdout).unwrap();
            for key in [
                "hf_exact",
                "mc_exact",
                "ac_exact",
                "ius_exact",
                "dus_exact",
                "tmr_exact",
            ] {
                assert_eq!(ev[key], report[key], "{name} {flag} {key}");
            }
        }
    }
}

#[test]
fn empty_sensitive_file_is_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let base = example_dir(tmp.path());
    let empty = tmp.path().join("none.txt");
    std::fs::write(&empty, "").unwrap();
    let out_dir = tmp.path().join("run");
    let out = run(
        &with_cmd("sanitize", &base),
        &[
            "--minutil",
            "50",
            "--sensitive-file",
            empty.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report_min-rf.json")).unwrap())
            .unwrap();
    for (k, v) in [
        ("hf", 0.0),
        ("mc", 0.0),
        ("ac", 0.0),
        ("tmr", 0.0),
        ("ius", 1.0),
        ("dus", 1.0),
    ] {
        assert_eq!(report[k], v, "{k}");
    }
    let original = std::fs::read_to_string(tmp.path().join("transactions.txt")).unwrap();
    assert_eq!(
        std::fs::read_to_string(out_dir.join("sanitized_min-rf.txt")).unwrap(),
        original
    );
}

#[test]
fn errors_exit_nonzero_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let base = example_dir(tmp.path());
    let out_dir = tmp.path().join("run");
    let bad = tmp.path().join("bad.txt");
    std::fs::write(&bad, "a b\n").unwrap();
    let out = run(
        &with_cmd("sanitize", &base),
        &[
            "--minutil",
            "50",
            "--sensitive-file",
            bad.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not among the mined"));

    let broken = tmp.path().join("broken.txt");
    std::fs::write(&broken, "a b:1 1\na b\n").unwrap();
    let mut args = base.clone();
    args[1] = broken.to_str().unwrap().to_owned();
    let out = run(&with_cmd("mine", &args), &["--minutil", "5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = run(
        &with_cmd("sanitize", &base),
        &[
            "--minutil",
            "50",
            "--sensitive-random",
            "20",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(!out.status.success());
    let out = run(
        &with_cmd("sanitize", &base),
        &[
            "--minutil",
            "50",
            "--sensitive-random",
            "1",
            "--strategy",
            "fastest",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn experiment_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let base = example_dir(tmp.path());
    let out = run(
        &with_cmd("experiment", &base),
        &[
            "--minutil",
            "50,60,70",
            "--sensitive-random",
            "1",
            "--seed",
            "1",
            "--strategy",
            "min-rf",
            "--name",
            "example",
        ],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.starts_with("example,min-rf,")));
}
