use std::path::Path;
use std::process::{Command, Output};

use pdadapt_bench::{compare_runs, read_trace_file, run_experiment, Algorithm, RunConfig, Strategy};

fn pdbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdbench")).args(args).output().expect("binary runs")
}

fn summary_value(out: &Output, key: &str) -> String {
    let text = String::from_utf8_lossy(&out.stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in:\n{text}"))
        .to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toy_constant_run_reports_iterations_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["run", "--problem", "toy", "--n", "10", "--algo", "purecd", "--seed", "3", "--tol", "1e-10", "--no-time"];
    let out1 = pdbench(&[&args[..], &["--trace", path_str(&a)]].concat());
    let out2 = pdbench(&[&args[..], &["--trace", path_str(&b)]].concat());
    assert_eq!(out1.status.code(), Some(0), "{}", String::from_utf8_lossy(&out1.stderr));
    let summary = |o: &Output| {
        String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.starts_with("trace=")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(summary(&out1), summary(&out2));
    assert_eq!(summary_value(&out1, "stop_reason"), "tolerance");
    assert!(summary_value(&out1, "iterations").parse::<usize>().unwrap() > 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let header = std::fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("iter,time_seconds,tau,sigma,vnorm_diff,primal_res_1,dual_res_1,gap,rate_estimate,event\n"));
}

#[test]
fn invalid_combination_exits_with_one() {
    let out = pdbench(&["run", "--algo", "pdhg-vc", "--strategy", "monitor-iid"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monitor-iid"));
    let out = pdbench(&["run", "--problem", "svm", "--data", "/nonexistent/data.svm"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_with_two() {
    let out = pdbench(&["run", "--problem", "toy", "--algo", "pdhg-vc", "--max-iters", "5", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary_value(&out, "stop_reason"), "max-iters");
    assert_eq!(summary_value(&out, "iterations_to_tol"), "none");
    let out = pdbench(&["run", "--problem", "toy", "--algo", "pdhg-vc", "--tau0", "1e-6", "--max-iters", "100000000", "--time-budget", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary_value(&out, "stop_reason"), "time-budget");
}

#[test]
fn config_file_is_applied_and_unknown_keys_fail() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("run.toml");
    std::fs::write(&good, "[problem]\nname = \"least-squares\"\nrows = 20\ncols = 10\n[run]\nalgo = \"pdhg-tripd\"\nstrategy = \"goldstein\"\ntol = 1e-8\nmax_iters = 50000\n").unwrap();
    let out = pdbench(&["run", "--config", path_str(&good)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(summary_value(&out, "problem"), "least-squares");
    assert_eq!(summary_value(&out, "algorithm"), "pdhg-tripd");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[run]\nalgo = \"pdhg-vc\"\ncadence = 3\n").unwrap();
    let out = pdbench(&["run", "--config", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cadence"));
}

#[test]
fn step_changes_in_traces_carry_change_events() {
    for (algo, strategy) in [
        (Algorithm::PdhgVc, Strategy::Goldstein),
        (Algorithm::PdhgVc, Strategy::Combined),
        (Algorithm::PdhgTripd, Strategy::Rate),
        (Algorithm::Purecd, Strategy::ResidualBalance),
        (Algorithm::Purecd, Strategy::MonitorIid),
        (Algorithm::Purecd, Strategy::RbThenMonitor),
    ] {
        let mut c = RunConfig { algorithm: algo, strategy, tol: 1e-9, max_iters: 400_000, record_time: false, ..RunConfig::default() };
        c.problem.n = 20;
        if algo != Algorithm::Purecd {
            c.tau0 = Some(0.005);
        }
        let out = run_experiment(&c).unwrap();
        assert!(out.rows.windows(2).all(|w| w[0].iter < w[1].iter), "{algo} {strategy}");
        let mut changes = 0;
        for w in out.rows.windows(2) {
            if w[1].tau != w[0].tau || (w[1].sigma != w[0].sigma && !w[1].sigma.is_nan()) {
                changes += 1;
                assert!(w[1].has_step_change(), "{algo} {strategy}: step change without event at {}", w[1].iter);
            }
        }
        assert!(changes > 0, "{algo} {strategy} never changed steps");
    }
}

#[test]
fn compare_identical_and_incompatible_traces() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let out = pdbench(&["run", "--problem", "toy", "--n", "10", "--tol", "1e-8", "--trace", path_str(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let cmp = pdbench(&["compare", path_str(&a), path_str(&a), "--format", "csv"]);
    assert_eq!(cmp.status.code(), Some(0));
    let text = String::from_utf8_lossy(&cmp.stdout);
    assert!(text.lines().count() > 2);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")), "{text}");

    let broken = dir.path().join("broken.csv");
    let kept: Vec<String> = std::fs::read_to_string(&a)
        .unwrap()
        .lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split(',').collect();
            cols.remove(7);
            cols.join(",")
        })
        .collect();
    std::fs::write(&broken, kept.join("\n")).unwrap();
    let cmp = pdbench(&["compare", path_str(&a), path_str(&broken)]);
    assert_eq!(cmp.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&cmp.stderr).contains("gap"));
}

#[test]
fn combined_beats_constant_on_the_toy_problem() {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for strategy in ["constant", "combined"] {
        let path = dir.path().join(format!("{strategy}.csv"));
        let out = pdbench(&[
            "run", "--problem", "toy", "--algo", "pdhg-vc", "--strategy", strategy, "--tau0", "0.005", "--tol", "1e-6",
            "--max-iters", "400000", "--trace", path_str(&path),
        ]);
        assert_eq!(out.status.code(), Some(0));
        traces.push((strategy.to_string(), read_trace_file(&path).unwrap()));
    }
    let table = compare_runs(&traces).unwrap();
    let k = table.thresholds.iter().position(|&t| t == 1e-6).unwrap();
    let (constant, combined) = (table.reached[0][k].unwrap().0, table.reached[1][k].unwrap().0);
    assert!(combined < constant, "combined {combined} vs constant {constant}");
}

#[test]
fn five_seed_batch_orders_rb_then_monitor_before_constant() {
    let median = |strategy: &str| {
        let out = pdbench(&[
            "batch", "--problem", "toy", "--algo", "purecd", "--strategy", strategy, "--s0", "10", "--seeds", "1,2,3,4,5",
            "--max-iters", "3000000", "--no-time",
        ]);
        summary_value(&out, "median_iterations").parse::<f64>().unwrap()
    };
    let (adaptive, constant) = (median("rb-then-monitor"), median("constant"));
    assert!(adaptive < constant, "rb-then-monitor {adaptive} vs constant {constant}");
}
