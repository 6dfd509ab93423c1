//! End-to-end checks of the command-line surface, including the
//! determinism criterion: every solver must reproduce bit-identical
//! front files across executions and across job counts.

use std::path::{Path, PathBuf};
use std::process::Command;

fn echelon() -> Command {
    Command::new(env!("CARGO_BIN_EXE_echelon"))
}

fn run_ok(args: &[&str]) {
    let output = echelon().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "echelon {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn report(name: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion 12 ({name}): {verdict}");
    assert!(failures.is_empty(), "{name} failed:\n{}", failures.join("\n"));
}

#[test]
fn criterion_12_determinism() {
    let mut failures = Vec::new();
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path();

    struct Case {
        name: &'static str,
        args: Vec<&'static str>,
    }
    let cases = [
        Case {
            name: "nsga2",
            args: vec![
                "run", "nsga2", "--scenario", "simple", "--generations", "5", "--population",
                "12", "--offspring", "4",
            ],
        },
        Case {
            name: "scalarised",
            args: vec![
                "run", "scalarised", "--scenario", "simple", "--budget", "18",
                "--es-population", "6", "--eval-episodes", "2", "--weight-partitions", "1",
            ],
        },
        Case {
            name: "morld",
            args: vec![
                "run", "morld", "--scenario", "simple", "--budget", "18", "--es-population",
                "6", "--eval-episodes", "2", "--population", "3", "--exchange-interval", "2",
                "--psa", "--shared-pool",
            ],
        },
    ];

    for case in &cases {
        // Two executions, then a two-seed run at jobs 1 vs jobs 8.
        let dirs: Vec<PathBuf> = (0..4).map(|i| base.join(format!("{}-{i}", case.name))).collect();
        for (i, out) in dirs.iter().enumerate() {
            let mut args: Vec<String> = case.args.iter().map(|s| s.to_string()).collect();
            let out_str = out.display().to_string();
            if i < 2 {
                args.extend(["--seed".into(), "7".into()]);
            } else {
                args.extend(["--seed".into(), "3,4".into()]);
                args.extend(["--jobs".into(), if i == 2 { "1".into() } else { "8".into() }]);
            }
            args.extend(["--out".into(), out_str]);
            let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
            run_ok(&arg_refs);
        }

        let run_name = |seed: u64| format!("{}-seed{seed}", case.name);
        let a = read_bytes(&dirs[0].join(run_name(7)).join("front.csv"));
        let b = read_bytes(&dirs[1].join(run_name(7)).join("front.csv"));
        if a != b {
            failures.push(format!("{}: front.csv differs across executions", case.name));
        }
        for seed in [3, 4] {
            let jobs1 = read_bytes(&dirs[2].join(run_name(seed)).join("front.csv"));
            let jobs8 = read_bytes(&dirs[3].join(run_name(seed)).join("front.csv"));
            if jobs1 != jobs8 {
                failures.push(format!(
                    "{} seed {seed}: front.csv differs between --jobs 1 and --jobs 8",
                    case.name
                ));
            }
        }
        // History is part of the run record; hold it to the same bar.
        let h1 = read_bytes(&dirs[0].join(run_name(7)).join("history.csv"));
        let h2 = read_bytes(&dirs[1].join(run_name(7)).join("history.csv"));
        if h1 != h2 {
            failures.push(format!("{}: history.csv differs across executions", case.name));
        }
    }
    report("determinism", &failures);
}

#[test]
fn env_var_overrides_the_jobs_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let out_str = out.display().to_string();
    let output = echelon()
        .env("ECHELON_JOBS", "2")
        .args([
            "run", "nsga2", "--scenario", "simple", "--generations", "1", "--population", "8",
            "--offspring", "2", "--seed", "1,2", "--jobs", "1", "--out", &out_str,
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(out.join("nsga2-seed1/front.csv").is_file());
    assert!(out.join("nsga2-seed2/front.csv").is_file());
}

#[test]
fn rerun_without_force_is_a_collision() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let args = [
        "run", "nsga2", "--scenario", "simple", "--generations", "1", "--population", "8",
        "--offspring", "2", "--seed", "1", "--out",
    ];
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.display().to_string();
    full.push(&out_str);
    run_ok(&full);
    let second = echelon().args(&full).output().unwrap();
    assert_eq!(second.status.code(), Some(3), "collision must exit 3");
    let stderr = String::from_utf8_lossy(&second.stderr);
    assert!(stderr.contains("--force"), "collision names the remedy: {stderr}");
    // With --force the rerun succeeds.
    full.push("--force");
    run_ok(&full);
}

#[test]
fn exit_codes_for_usage_and_validation() {
    let usage = echelon().args(["run", "nsga2", "--scenario"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));

    let unknown = echelon()
        .args(["scenario", "show", "gigantic"])
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    let show = echelon().args(["scenario", "show", "simple"]).output().unwrap();
    assert!(show.status.success());
    let text = String::from_utf8(show.stdout).unwrap();
    std::fs::write(&bad, text.replace("capacity = 200.0", "capacity = -3.0")).unwrap();
    let invalid = echelon()
        .args(["scenario", "validate", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&invalid.stderr);
    assert!(stderr.contains("capacity"), "names the offending key: {stderr}");
}

#[test]
fn summary_hypervolume_matches_metrics_compute() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let out_str = out.display().to_string();
    run_ok(&[
        "run", "morld", "--scenario", "simple", "--budget", "24", "--es-population", "6",
        "--eval-episodes", "2", "--population", "3", "--exchange-interval", "2", "--seed", "7",
        "--out", &out_str,
    ]);
    let run_dir = out.join("morld-seed7");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("summary.json")).unwrap())
            .unwrap();
    let summary_hv = summary["hypervolume"].as_f64().unwrap();

    let front = run_dir.join("front.csv");
    let metrics = echelon()
        .args([
            "metrics", "compute", "--front",
            front.to_str().unwrap(),
            "--ref", "0,-2e5,-100",
        ])
        .output()
        .unwrap();
    assert!(metrics.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&metrics.stdout).expect("metrics emits JSON");
    let metrics_hv = parsed["hypervolume"].as_f64().unwrap();
    let scale = summary_hv.abs().max(metrics_hv.abs()).max(1.0);
    assert!(
        (summary_hv - metrics_hv).abs() / scale <= 1e-9,
        "summary {summary_hv} vs metrics {metrics_hv}"
    );
    assert_eq!(
        summary["n_front_points"].as_u64().unwrap(),
        parsed["n_points"].as_u64().unwrap()
    );
}

#[test]
fn aggregate_reports_every_run_and_zero_self_distance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let out_str = out.display().to_string();
    run_ok(&[
        "run", "morld", "--scenario", "simple", "--budget", "12", "--es-population", "6",
        "--eval-episodes", "2", "--population", "2", "--exchange-interval", "2", "--seed",
        "5,6", "--out", &out_str,
    ]);
    let agg = tmp.path().join("agg");
    run_ok(&["aggregate", out.to_str().unwrap(), "--out", agg.to_str().unwrap()]);

    let (header, rows) = read_csv(&agg.join("report.csv"));
    assert_eq!(rows.len(), 2, "one report row per run");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();

    // A single scenario's truth is the merge of both fronts; a run whose
    // front IS the truth has distance zero. At minimum every gd/igd is
    // non-negative and the dominated run's igd is positive when fronts
    // differ.
    for row in &rows {
        let gd: f64 = row[col("gd")].parse().unwrap();
        let igd: f64 = row[col("igd")].parse().unwrap();
        let ahd: f64 = row[col("ahd")].parse().unwrap();
        assert!(gd >= 0.0 && igd >= 0.0 && ahd >= 0.0);
        assert!((ahd - gd.max(igd)).abs() < 1e-12);
    }
    assert!(agg.join("truth_simple.csv").is_file());
    assert!(agg.join("plotdata").is_dir());

    // Aggregating one run alone: the truth equals its front, so both
    // distances vanish.
    let solo = tmp.path().join("solo");
    std::fs::create_dir_all(&solo).unwrap();
    let run_dir = out.join("morld-seed5");
    copy_dir(&run_dir, &solo.join("morld-seed5"));
    let agg2 = tmp.path().join("agg2");
    run_ok(&["aggregate", solo.to_str().unwrap(), "--out", agg2.to_str().unwrap()]);
    let (header2, rows2) = read_csv(&agg2.join("report.csv"));
    assert_eq!(rows2.len(), 1);
    let col2 = |name: &str| header2.iter().position(|h| h == name).unwrap();
    let ahd: f64 = rows2[0][col2("ahd")].parse().unwrap();
    assert_eq!(ahd, 0.0, "self-distance must vanish");
}

#[test]
fn operational_report_projects_the_log() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    let out_str = out.display().to_string();
    run_ok(&[
        "run", "nsga2", "--scenario", "simple", "--generations", "2", "--population", "8",
        "--offspring", "2", "--seed", "2", "--out", &out_str,
    ]);
    // Desk-budget genetic runs stay infeasible, so fabricate a log by
    // replaying the zero policy through the library and reporting it.
    let run_dir = out.join("nsga2-seed2");
    let cfg = echelon_core::scenario::builtin_scenario(
        echelon_core::scenario::BuiltinScenario::Simple,
    );
    let trace = echelon_core::demand::sample_trace(&cfg, 11);
    let sim = echelon_core::env::Simulator::new(&cfg, &trace).unwrap();
    let mut zero = |_: &[f64], _: u32| echelon_core::env::ActionVector::zeros(&cfg);
    let rollout = sim.rollout(&mut zero, 1.0).unwrap();
    echelon_cli::csvio::write_episode_log(&run_dir.join("logs/sol-0.csv"), &cfg, &rollout.log)
        .unwrap();

    let rep = tmp.path().join("op");
    run_ok(&[
        "report", "operational",
        run_dir.to_str().unwrap(),
        "--out", rep.to_str().unwrap(),
    ]);

    let (header, rows) = read_csv(&rep.join("sol-0/demand_loss.csv"));
    let demand_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("demand_"))
        .map(|(i, _)| i)
        .collect();
    let loss_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("loss_"))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(demand_cols.len(), 2);
    let total = |cols: &[usize]| -> f64 {
        rows.iter()
            .flat_map(|row| cols.iter().map(|&c| row[c].parse::<f64>().unwrap()))
            .sum()
    };
    // Zero policy: every unit of demand is lost, none absorbed.
    assert_eq!(total(&demand_cols), total(&loss_cols));
    assert_eq!(total(&demand_cols), trace.total_demand() as f64);

    // Inventory series of the zero policy never moves.
    let (inv_header, inv_rows) = read_csv(&rep.join("sol-0/inventory.csv"));
    assert!(inv_header.iter().skip(1).all(|h| h.starts_with("inv_")));
    let first = &inv_rows[0];
    for row in &inv_rows {
        assert_eq!(&row[1..], &first[1..]);
    }

    let (mfg_header, _) = read_csv(&rep.join("sol-0/manufacturing.csv"));
    assert_eq!(mfg_header, vec!["t", "prod_2", "prod_3"]);
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.path().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), &target).unwrap();
        }
    }
}
