use std::fs;
use std::process::{Command, Output};

fn dpmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpmon")).args(args).output().unwrap()
}

const SMALL_Q: [&str; 4] = ["--q-grid", "200", "--q-reps", "2000"];

#[test]
fn scenario_file_overrides_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dpmon(&["scenario", "--scenario", "a"]);
    assert!(out.status.success());
    let mut spec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    spec["id"] = "a-early".into();
    spec["change_time"] = 10.into();
    let file = dir.path().join("s.json");
    fs::write(&file, spec.to_string()).unwrap();

    let results = dir.path().join("r.csv");
    let cache = dir.path().join("q.txt");
    let mut args = vec![
        "run",
        "--scenario-file",
        file.to_str().unwrap(),
        "--reps",
        "3",
        "--t-horizon",
        "20",
        "--n",
        "100",
        "--cache",
        cache.to_str().unwrap(),
        "--out",
        results.to_str().unwrap(),
    ];
    args.extend(SMALL_Q);
    let out = dpmon(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(&results).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("scenario,rep,tau,d_value,q,detected,first_detection"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 20);
    assert!(rows.iter().all(|r| r.starts_with("a-early,")));
    let summary = fs::read_to_string(dir.path().join("r.summary.csv")).unwrap();
    assert!(summary.contains("scenario,mean_delay,median_delay,false_alarm_frac"));
}

#[test]
fn threshold_command_prints_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("q.txt");
    let args = ["threshold", "--alpha", "0.05", "--grid", "200", "--reps", "2000", "--cache", cache.to_str().unwrap()];
    let out = dpmon(&args);
    assert!(out.status.success());
    let q: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(q > 1.0 && q < 5.0, "{q}");
    let line = fs::read_to_string(&cache).unwrap();
    assert_eq!(line.split_whitespace().count(), 6);
    assert_eq!(dpmon(&args).stdout, out.stdout);
}

#[test]
fn errors_exit_with_message() {
    let out = dpmon(&["scenario", "--scenario", "q"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = dpmon(&["threshold", "--alpha", "0.001", "--reps", "1000"]);
    assert!(!out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"id\": \"x\"}").unwrap();
    let out = dpmon(&["run", "--scenario-file", bad.to_str().unwrap(), "--out", "unused.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}
