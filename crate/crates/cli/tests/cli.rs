use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nestprox(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestprox"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestprox(
        &["solve", "--instance", "tv-1d", "--k-max", "3", "--out", "run"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&dir.path().join("run/report.json"));
    assert_eq!(report["status"], "converged");
    assert!(report["distance_to_oracle"].as_f64().unwrap() <= 1e-5);
    assert_eq!(report["unsafe_used"], false);
    for key in [
        "iterations",
        "final_residuals",
        "rate",
        "config_echo",
        "wall_time_seconds",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let trace = fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    assert!(trace.starts_with("n,objective,r_p,r_d,dist_to_ref,lyapunov,inner_dual_step_norm_last\n"));
}

#[test]
fn unsafe_alpha_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestprox(&["solve", "--instance", "tv-1d", "--alpha", "3/L"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));
    assert!(!dir.path().join("trace.csv").exists());

    let out = nestprox(
        &[
            "solve",
            "--instance",
            "tv-1d",
            "--alpha",
            "3/L",
            "--unsafe",
            "--max-outer",
            "200",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["unsafe_used"], true);
    assert_eq!(report["status"], "diverged");
}

#[test]
fn cold_start_needs_the_unsafe_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestprox(&["solve", "--instance", "tv-1d", "--start-mode", "cold"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("start_mode"));
}

#[test]
fn config_file_round_trips_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let file = r#"{
        "instance": {"name": "fused-lasso", "d": 15, "lambda1": 0.5, "lambda2": 0.5, "seed": 3},
        "config": {"k_max": 5, "trace_every": 10},
        "outputs": {"trace_path": "t.csv", "report_path": "r.json"}
    }"#;
    fs::write(dir.path().join("run.json"), file).unwrap();
    let out = nestprox(&["solve", "--config", "run.json", "--k-max", "2"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&dir.path().join("r.json"));
    assert_eq!(report["config_echo"]["config"]["k_max"], 2);
    assert_eq!(report["config_echo"]["config"]["trace_every"], 10);
    let rows: Vec<u64> = fs::read_to_string(dir.path().join("t.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(rows[..rows.len() - 1].iter().all(|n| n % 10 == 0));
}

#[test]
fn malformed_config_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"instance": {"name": "tv-1d"}, "solver": "newton"}"#,
    )
    .unwrap();
    let out = nestprox(&["solve", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = nestprox(&["solve"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn proxgrad_objective_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestprox(
        &["solve", "--instance", "fused-lasso:lambda1=0", "--solver", "proxgrad"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let objectives: Vec<f64> = fs::read_to_string(dir.path().join("trace.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(objectives.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn compare_warm_versus_cold() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestprox(
        &[
            "compare",
            "--instance",
            "tv-1d",
            "--unsafe",
            "--variant",
            "warm:2",
            "--variant",
            "cold:2",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&dir.path().join("report.json"));
    let r_p = |i: usize| report["variants"][i]["final_residuals"]["r_p"].as_f64().unwrap();
    assert!(r_p(1) >= 10.0 * r_p(0));
    let header = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(header.starts_with("n,r_p_warm-k2,r_p_cold-k2\n"));
}

#[test]
fn compare_k_max_invariance_and_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["compare", "--instance", "tv-1d"];
    for v in ["warm:1", "warm:2", "warm:5", "warm:20", "warm:5"] {
        args.extend(["--variant", v]);
    }
    let out = nestprox(&args, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&dir.path().join("report.json"));
    let distances = report["pairwise_distances"].as_object().unwrap();
    assert_eq!(distances.len(), 10);
    for (pair, d) in distances {
        assert!(d.as_f64().unwrap() <= 2e-5, "{pair}: {d}");
    }
    assert_eq!(distances["warm-k5|warm-k5#2"], 0.0);

    let out = nestprox(&["compare", "--instance", "tv-1d", "--variant", "warm:1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_on_shipped_instances() {
    let dir = tempfile::tempdir().unwrap();
    for inst in ["tv-1d", "fused-lasso", "strongly-convex"] {
        let out = nestprox(&["verify", "--instance", inst, "--out", "v"], dir.path());
        assert!(out.status.success(), "{inst}: {}", stdout(&out));
        let report = json(&dir.path().join("v/verify.json"));
        assert_eq!(report["passed"], true);
    }
    let out = nestprox(&["verify", "--instance", "strongly-convex"], dir.path());
    assert!(stdout(&out).contains("PASS rate"));
}

#[test]
fn verify_rejects_a_corrupted_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let list = nestprox(&["list-instances"], dir.path());
    assert!(list.status.success());
    let instances: Value = serde_json::from_slice(&list.stdout).unwrap();
    assert_eq!(instances.as_array().unwrap().len(), 3);

    let mut u = vec![0.0; 20];
    u[4] = 10.0;
    fs::write(dir.path().join("bad.json"), serde_json::to_string(&u).unwrap()).unwrap();
    let out = nestprox(&["verify", "--instance", "tv-1d", "--oracle", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("oracle_residuals"), "{}", stderr(&out));
    assert!(stdout(&out).contains("FAIL oracle_residuals"));

    fs::write(dir.path().join("short.json"), "[1, 2]").unwrap();
    let out = nestprox(&["verify", "--instance", "tv-1d", "--oracle", "short.json"], dir.path());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn seed_flag_changes_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, sub) in [("7", "a"), ("8", "b")] {
        let out = nestprox(
            &["solve", "--instance", "tv-1d", "--seed", seed, "--out", sub],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a/trace.csv")).unwrap();
    let b = fs::read(dir.path().join("b/trace.csv")).unwrap();
    assert_ne!(a, b);
}
