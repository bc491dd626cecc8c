use std::process::{Command, Output};

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss")).args(args).env_remove("QSS_OUTPUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn honest_run_accepts() {
    let o = qss(&["run", "--parties", "3", "--rounds", "20000", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["schema"], "qss-report/1");
    assert_eq!(report["seed"], 42);
    assert_eq!(report["decision"]["decision"], "accept");
    assert!((report["i1"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(report["config"]["num_rounds"], 20000);
    assert_eq!(report["phase_calibration"].as_array().unwrap().len(), 2);
}

#[test]
fn attacked_run_aborts() {
    let o = qss(&["run", "--attack", "intercept", "--p-psi", "0.5", "--rounds", "20000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn too_few_test_rounds_are_inconclusive() {
    let o = qss(&["run", "--rounds", "4", "--test-fraction", "0.25"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(qss(&["run", "--rounds", "0"]).status.code(), Some(1));
    assert_eq!(qss(&["run", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(qss(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(qss(&["run", "--q-z", "1.5"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(qss(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "rounds = 3000\nseed = 5\nformat = \"summary\"\noutput = \"report.json\"\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--seed", "6"])
        .env("QSS_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["seed"], 6);
    assert_eq!(report["config"]["num_rounds"], 3000);
}

#[test]
fn bad_config_file_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "rounds = 10\nsed = 5\n").unwrap();
    let o = qss(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("sed"), "{err}");
}

#[test]
fn transcripts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = qss(&[
            "run", "--rounds", "2000", "--attack", "intercept", "--format", "transcript", "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2));
        std::fs::read(path).unwrap()
    };
    let a = run("a.jsonl");
    assert_eq!(a, run("b.jsonl"));
    let first: serde_json::Value = serde_json::from_str(std::str::from_utf8(&a).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["schema"], "qss-transcript/1");
}

#[test]
fn truth_table_has_sixteen_entries() {
    let o = qss(&["truth-table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1], "x+\tx+\tx-\ty-\ty+");
    assert_eq!(rows[3], "y+\ty-\ty+\tx-\tx+");
}

#[test]
fn witness_table_reports_terms_and_value() {
    for (args, terms, value) in [
        (["--parties", "3", "--variant", "i1"], 8, 0.5),
        (["--parties", "3", "--variant", "i2"], 8, 0.5),
        (["--parties", "4", "--variant", "i1"], 16, 1.0),
    ] {
        let mut full = vec!["witness-table"];
        full.extend(args);
        let text = stdout(&qss(&full));
        assert!(text.contains(&format!("# terms {terms}")), "{text}");
        let v: f64 = text.lines().last().unwrap().trim_start_matches("# ghz value ").parse().unwrap();
        assert!((v - value).abs() < 1e-10);
    }
    assert_eq!(qss(&["witness-table", "--parties", "30"]).status.code(), Some(1));
}

#[test]
fn attack_demo_modes() {
    let text = stdout(&qss(&["attack-demo", "--rounds", "20000"]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).take(3).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(&rows[0][..4], ["original", "unchecked", "0.0000", "1.0000"]);
    assert_eq!(rows[1][1], "abort");
    assert_eq!(rows[2][1], "accept");
}

#[test]
fn sweep_exports_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.tsv");
    let o = qss(&["sweep", "--samples", "100", "--no-refine", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(path).unwrap();
    assert_eq!(table.lines().count(), 102);
    assert!(table.starts_with("l00\t"));
}
