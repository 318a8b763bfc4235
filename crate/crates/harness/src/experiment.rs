//! Batch runs: every (cost point, trial) pair is an isolated learner session.

use memrep_core::learner::{learn, LearnerConfig, RecoveryMode, Summary, Transcript};
use memrep_core::monotone::grid_equivalence;
use memrep_core::strategy::CostModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{build_target, Benchmark, Target, TeacherSpec};
use crate::error::{HarnessError, Result};

/// One line of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub benchmark: String,
    pub a: f64,
    pub b: f64,
    pub trial: usize,
    pub seed: u64,
    pub n_mem: usize,
    pub n_pref: usize,
    pub n_equiv: usize,
    pub cost_total: f64,
    /// The learned concept equals the target.
    pub success: bool,
    pub dropped: usize,
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub transcript: Transcript,
    /// Set when the learner itself failed; the row then has zero counts.
    pub error: Option<String>,
}

struct Finished {
    transcript: Transcript,
    summary: Summary,
    success: bool,
}

fn learner_config(bench: &Benchmark, cost: CostModel, seed: u64) -> LearnerConfig {
    let mut config = LearnerConfig::new(cost, seed);
    config.recovery = bench.recovery;
    if let Some(m) = bench.max_rounds {
        config.max_rounds = m;
    }
    config
}

fn learn_target(
    bench: &Benchmark,
    target: &Target,
    teacher: &TeacherSpec,
    cost: CostModel,
    seed: u64,
) -> Result<Finished> {
    let config = learner_config(bench, cost, seed);
    match target {
        Target::Dfa { dfa, prior } => {
            let family = bench.dfa_family(dfa, prior.as_ref())?;
            let mut t = teacher.dfa_teacher(dfa, seed)?;
            let run = learn(family, config, &mut t)?;
            let success = match run.outcome.concept() {
                Some(c) => c.equivalent(dfa)?,
                None => false,
            };
            Ok(Finished {
                transcript: run.transcript,
                summary: run.summary,
                success,
            })
        }
        Target::Grid { grid, pinned } => {
            let theta = Target::grid_concept(grid, pinned.unwrap_or(seed));
            let family = bench.grid_family(grid)?;
            let mut t = teacher.grid_teacher(grid, &theta, seed)?;
            let run = learn(family, config, &mut t)?;
            let success = run
                .outcome
                .concept()
                .is_some_and(|c| grid_equivalence(grid, c, &theta).is_none());
            Ok(Finished {
                transcript: run.transcript,
                summary: run.summary,
                success,
            })
        }
    }
}

pub fn run_trial(bench: &Benchmark, target: &Target, cost: CostModel, trial: usize) -> TrialOutcome {
    let seed = bench.trial_seed(trial);
    let mut row = TrialRow {
        benchmark: bench.name.clone(),
        a: cost.mem(),
        b: cost.pref(),
        trial,
        seed,
        n_mem: 0,
        n_pref: 0,
        n_equiv: 0,
        cost_total: 0.0,
        success: false,
        dropped: 0,
    };
    match learn_target(bench, target, &bench.teacher(), cost, seed) {
        Ok(done) => {
            row.n_mem = done.summary.n_mem;
            row.n_pref = done.summary.n_pref;
            row.n_equiv = done.summary.n_equiv;
            row.cost_total = done.summary.cost_total;
            row.success = done.success;
            row.dropped = done.summary.dropped;
            TrialOutcome {
                row,
                transcript: done.transcript,
                error: None,
            }
        }
        Err(e) => TrialOutcome {
            row,
            transcript: Transcript::default(),
            error: Some(e.to_string()),
        },
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// A finished batch: trials ordered by cost point, then trial index.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub benchmark: Benchmark,
    pub trials: Vec<TrialOutcome>,
}

/// Runs every trial of `bench` on up to `jobs` threads (0 picks one per
/// core). Learner failures are recorded per trial and do not stop the batch.
pub fn run_experiment(bench: &Benchmark, jobs: usize) -> Result<Experiment> {
    bench.validate()?;
    let target = build_target(&bench.target)?;
    let tasks: Vec<(CostModel, usize)> = bench
        .costs
        .iter()
        .flat_map(|&c| (0..bench.trials).map(move |t| (c, t)))
        .collect();
    let trials = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(cost, trial)| run_trial(bench, &target, cost, trial))
            .collect()
    });
    Ok(Experiment {
        benchmark: bench.clone(),
        trials,
    })
}

impl Experiment {
    pub fn rows(&self) -> Vec<TrialRow> {
        self.trials.iter().map(|t| t.row.clone()).collect()
    }

    pub fn aggregates(&self) -> Vec<Aggregate> {
        aggregate(&self.rows())
    }

    pub fn errors(&self) -> impl Iterator<Item = (&TrialRow, &str)> {
        self.trials
            .iter()
            .filter_map(|t| t.error.as_deref().map(|e| (&t.row, e)))
    }
}

/// Per-cost-point statistics of `summary.csv`; variances are sample
/// variances (0 for a single trial).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub benchmark: String,
    pub a: f64,
    pub b: f64,
    pub trials: usize,
    pub mean_mem: f64,
    pub var_mem: f64,
    pub mean_pref: f64,
    pub var_pref: f64,
    pub mean_equiv: f64,
    pub var_equiv: f64,
    pub mean_cost: f64,
    pub mean_dropped: f64,
    pub success_rate: f64,
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Groups rows by (benchmark, a, b) in order of first appearance.
fn groups<R>(rows: &[R], key: impl Fn(&R) -> (String, f64, f64, f64)) -> Vec<Vec<&R>> {
    let mut keys: Vec<(String, f64, f64, f64)> = Vec::new();
    let mut out: Vec<Vec<&R>> = Vec::new();
    for r in rows {
        let k = key(r);
        match keys.iter().position(|x| *x == k) {
            Some(i) => out[i].push(r),
            None => {
                keys.push(k);
                out.push(vec![r]);
            }
        }
    }
    out
}

pub fn aggregate(rows: &[TrialRow]) -> Vec<Aggregate> {
    groups(rows, |r| (r.benchmark.clone(), r.a, r.b, 0.0))
        .into_iter()
        .map(|g| {
            let col = |f: fn(&TrialRow) -> f64| g.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (mean_mem, var_mem) = mean_var(&col(|r| r.n_mem as f64));
            let (mean_pref, var_pref) = mean_var(&col(|r| r.n_pref as f64));
            let (mean_equiv, var_equiv) = mean_var(&col(|r| r.n_equiv as f64));
            Aggregate {
                benchmark: g[0].benchmark.clone(),
                a: g[0].a,
                b: g[0].b,
                trials: g.len(),
                mean_mem,
                var_mem,
                mean_pref,
                var_pref,
                mean_equiv,
                var_equiv,
                mean_cost: mean_var(&col(|r| r.cost_total)).0,
                mean_dropped: mean_var(&col(|r| r.dropped as f64)).0,
                success_rate: mean_var(&col(|r| r.success as u8 as f64)).0,
            }
        })
        .collect()
}

/// One line of the robustness summary: a trial row tagged with its error rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustRow {
    pub benchmark: String,
    pub noise_rate: f64,
    pub a: f64,
    pub b: f64,
    pub trial: usize,
    pub seed: u64,
    pub n_mem: usize,
    pub n_pref: usize,
    pub n_equiv: usize,
    pub cost_total: f64,
    pub success: bool,
    pub dropped: usize,
}

impl RobustRow {
    fn new(noise_rate: f64, r: TrialRow) -> Self {
        RobustRow {
            benchmark: r.benchmark,
            noise_rate,
            a: r.a,
            b: r.b,
            trial: r.trial,
            seed: r.seed,
            n_mem: r.n_mem,
            n_pref: r.n_pref,
            n_equiv: r.n_equiv,
            cost_total: r.cost_total,
            success: r.success,
            dropped: r.dropped,
        }
    }

    pub fn queries(&self) -> usize {
        self.n_mem + self.n_pref + self.n_equiv
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustAggregate {
    pub benchmark: String,
    pub noise_rate: f64,
    pub a: f64,
    pub b: f64,
    pub trials: usize,
    pub mean_queries: f64,
    pub var_queries: f64,
    pub mean_dropped: f64,
    pub success_rate: f64,
}

pub fn aggregate_robust(rows: &[RobustRow]) -> Vec<RobustAggregate> {
    groups(rows, |r| (r.benchmark.clone(), r.a, r.b, r.noise_rate))
        .into_iter()
        .map(|g| {
            let col = |f: fn(&RobustRow) -> f64| g.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (mean_queries, var_queries) = mean_var(&col(|r| r.queries() as f64));
            RobustAggregate {
                benchmark: g[0].benchmark.clone(),
                noise_rate: g[0].noise_rate,
                a: g[0].a,
                b: g[0].b,
                trials: g.len(),
                mean_queries,
                var_queries,
                mean_dropped: mean_var(&col(|r| r.dropped as f64)).0,
                success_rate: mean_var(&col(|r| r.success as u8 as f64)).0,
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Robustness {
    pub runs: Vec<(f64, Experiment)>,
}

impl Robustness {
    pub fn rows(&self) -> Vec<RobustRow> {
        self.runs
            .iter()
            .flat_map(|(rate, e)| e.rows().into_iter().map(move |r| RobustRow::new(*rate, r)))
            .collect()
    }

    pub fn aggregates(&self) -> Vec<RobustAggregate> {
        aggregate_robust(&self.rows())
    }
}

/// Reruns `bench` with drop-core recovery once per labeling error rate.
pub fn run_robustness(bench: &Benchmark, error_rates: &[f64], jobs: usize) -> Result<Robustness> {
    let runs = error_rates
        .iter()
        .map(|&rate| {
            let mut b = bench.clone();
            b.recovery = RecoveryMode::DropCore;
            let mut teacher = bench.teacher();
            teacher.noise_rate = rate;
            b.teacher = Some(teacher);
            Ok((rate, run_experiment(&b, jobs)?))
        })
        .collect::<Result<_>>()?;
    Ok(Robustness { runs })
}
