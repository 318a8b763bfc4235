use std::fs;
use std::process::Command;

use memrep_core::learner::{QueryKind, RecoveryMode};
use memrep_core::strategy::CostModel;
use memrep_harness::report::{AGGREGATES_CSV, PLOT_JSON, SUMMARY_CSV, TRANSCRIPTS};
use memrep_harness::{
    aggregate, aggregate_robust, load_benchmark, mean_var, read_csv, run_experiment, run_robustness, write_experiment,
    write_robustness, Aggregate, Benchmark, PlotData, RobustAggregate, RobustRow, TrialRow,
};

fn cost(a: f64, b: f64) -> CostModel {
    CostModel::new(a, b).unwrap()
}

fn small(target: &str, trials: usize) -> Benchmark {
    let mut b = Benchmark::named(target).unwrap();
    b.trials = trials;
    b.costs = vec![cost(1.0, 1.0), cost(4.0, 1.0), cost(1.0, f64::INFINITY)];
    b
}

#[test]
fn same_seed_gives_byte_identical_files() {
    let bench = small("tomita_4", 1);
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (i, d) in dirs.iter().enumerate() {
        // Thread count must not matter either.
        let e = run_experiment(&bench, 1 + 3 * i).unwrap();
        write_experiment(d.path(), &e, true).unwrap();
    }
    for f in [SUMMARY_CSV, AGGREGATES_CSV, PLOT_JSON] {
        let a = fs::read(dirs[0].path().join(f)).unwrap();
        let b = fs::read(dirs[1].path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let t = dirs[0].path().join(TRANSCRIPTS);
    assert_eq!(fs::read_dir(t).unwrap().count(), 3);
}

#[test]
fn aggregates_are_recomputable_from_the_rows() {
    let bench = small("tomita_2", 4);
    let e = run_experiment(&bench, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_experiment(dir.path(), &e, false).unwrap();

    let rows: Vec<TrialRow> = read_csv(&dir.path().join(SUMMARY_CSV)).unwrap();
    assert_eq!(rows, e.rows());
    let written: Vec<Aggregate> = read_csv(&dir.path().join(AGGREGATES_CSV)).unwrap();
    assert_eq!(aggregate(&rows), written);
    assert_eq!(written.len(), 3);

    // Rows are read off the transcripts.
    for t in &e.trials {
        let count = |k: QueryKind| t.transcript.records.iter().filter(|r| r.kind == k).count();
        assert_eq!(t.row.n_mem, count(QueryKind::Membership));
        assert_eq!(t.row.n_pref, count(QueryKind::Preference));
        assert_eq!(t.row.n_equiv, count(QueryKind::Equivalence));
        assert_eq!(
            t.row.cost_total,
            t.row.a * t.row.n_mem as f64
                + if t.row.n_pref > 0 {
                    t.row.b * t.row.n_pref as f64
                } else {
                    0.0
                }
        );
        assert!(t.row.success);
        assert!(t.error.is_none());
    }
    // The mean is the plain average of the rows at that cost point.
    for g in &written {
        let mem: Vec<f64> = rows
            .iter()
            .filter(|r| r.a == g.a && r.b == g.b)
            .map(|r| r.n_mem as f64)
            .collect();
        assert_eq!(mean_var(&mem), (g.mean_mem, g.var_mem));
    }
    let baseline = written.iter().find(|g| g.b.is_infinite()).unwrap();
    assert_eq!(baseline.mean_pref, 0.0);

    let plot: PlotData = serde_json::from_str(&fs::read_to_string(dir.path().join(PLOT_JSON)).unwrap()).unwrap();
    assert_eq!(plot.layers, ["membership", "preference", "equivalence"]);
    assert_eq!(plot.bars.len(), 3);
    assert_eq!(plot.bars[0].membership, written[0].mean_mem);
}

#[test]
fn mean_and_sample_variance() {
    assert_eq!(mean_var(&[]), (0.0, 0.0));
    assert_eq!(mean_var(&[3.0]), (3.0, 0.0));
    assert_eq!(mean_var(&[1.0, 2.0, 3.0, 4.0]), (2.5, 5.0 / 3.0));
}

#[test]
fn failed_trials_do_not_stop_the_batch() {
    let mut bench = small("tomita_5", 3);
    bench.max_rounds = Some(2);
    let e = run_experiment(&bench, 2).unwrap();
    assert_eq!(e.trials.len(), 9);
    for t in &e.trials {
        assert!(!t.row.success);
        assert!(t.row.n_mem + t.row.n_pref + t.row.n_equiv <= 2);
    }
    assert!(aggregate(&e.rows()).iter().all(|g| g.success_rate == 0.0));
}

#[test]
fn grid_benchmarks_learn_every_drawn_threshold() {
    let mut bench = Benchmark::named("grid(2,5)").unwrap();
    bench.trials = 10;
    bench.costs = vec![cost(1.0, 1.0), cost(16.0, 1.0)];
    let e = run_experiment(&bench, 0).unwrap();
    let rows = e.rows();
    assert!(rows.iter().all(|r| r.success));
    // Same seed, same drawn threshold, same number of equivalence queries.
    let (lo, hi) = rows.split_at(10);
    for (x, y) in lo.iter().zip(hi) {
        assert_eq!(x.seed, y.seed);
        assert_eq!(x.n_equiv, y.n_equiv);
    }
}

#[test]
fn noiseless_robustness_run_matches_the_plain_run() {
    let mut bench = small("tomita_6", 5);
    bench.costs = vec![cost(1.0, 1.0)];
    let r = run_robustness(&bench, &[0.0, 0.1], 0).unwrap();
    let plain = run_experiment(&bench, 0).unwrap();
    let (rate, noiseless) = &r.runs[0];
    assert_eq!(*rate, 0.0);
    assert_eq!(noiseless.benchmark.recovery, RecoveryMode::DropCore);
    assert_eq!(noiseless.rows(), plain.rows());

    let dir = tempfile::tempdir().unwrap();
    let paths = write_robustness(dir.path(), &r).unwrap();
    let rows: Vec<RobustRow> = read_csv(&paths[0]).unwrap();
    assert_eq!(rows.len(), 10);
    let written: Vec<RobustAggregate> = read_csv(&paths[1]).unwrap();
    assert_eq!(aggregate_robust(&rows), written);
    assert_eq!(written[0].success_rate, 1.0);
    assert_eq!(written[1].noise_rate, 0.1);
}

#[test]
fn benchmarks_load_from_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    let config = serde_json::json!({
        "name": "small grid",
        "target": "grid(2,5)",
        "costs": [{ "a": 1, "b": "inf" }, { "a": 2, "b": 1 }],
        "trials": 2,
        "seed": 40,
        "levels": { "kind": "dyadic", "cap": 5 }
    });
    fs::write(&path, config.to_string()).unwrap();
    let bench = load_benchmark(path.to_str().unwrap()).unwrap();
    assert_eq!(bench.name, "small grid");
    assert_eq!(bench.costs[0].pref(), f64::INFINITY);
    assert_eq!(bench.trial_seed(1), 41);
    let e = run_experiment(&bench, 0).unwrap();
    assert!(e.rows().iter().all(|r| r.success && r.benchmark == "small grid"));

    fs::write(
        &path,
        r#"{"name": "x", "target": "grid(2,5)", "costs": [], "trials": 1}"#,
    )
    .unwrap();
    assert!(load_benchmark(path.to_str().unwrap()).is_err());
    assert!(load_benchmark("not_a_target").is_err());
}

#[test]
fn command_line_runs_a_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_memrep");
    let status = Command::new(bin)
        .args([
            "bench",
            "tomita_1",
            "--trials",
            "2",
            "--costs",
            "1,2",
            "--pref-cost",
            "1",
            "--baseline",
            "--jobs",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let rows: Vec<TrialRow> = read_csv(&dir.path().join(SUMMARY_CSV)).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows[4].b.is_infinite());
    let header = fs::read_to_string(dir.path().join(SUMMARY_CSV)).unwrap();
    assert!(header.starts_with("benchmark,a,b,trial,seed,n_mem,n_pref,n_equiv,cost_total,success,dropped\n"));

    let out = Command::new(bin)
        .args(["learn", "tomita_1", "-a", "2", "-b", "inf", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.iter().all(|r| r["kind"] != "preference"));
    assert_eq!(lines.last().unwrap()["answer"], "accept");

    let robust = tempfile::tempdir().unwrap();
    let status = Command::new(bin)
        .args(["robust", "tomita_1", "--trials", "2", "--rates", "0,0.2", "--out"])
        .arg(robust.path())
        .status()
        .unwrap();
    assert!(status.success());
    let agg: Vec<RobustAggregate> = read_csv(&robust.path().join("robust.csv")).unwrap();
    assert_eq!(agg.len(), 2);

    let bad = Command::new(bin)
        .args(["bench", "nope", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
