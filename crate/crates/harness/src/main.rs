use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use memrep_core::strategy::{parse_cost, CostModel};
use memrep_harness::{
    build_target, load_benchmark, run_experiment, run_robustness, run_trial, write_experiment, write_robustness,
    Benchmark, Result,
};
use memrep_session::SessionStore;

#[derive(Parser)]
#[command(
    name = "memrep",
    version,
    about = "Learn specifications from membership and preference queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one learner session and print its transcript as JSON Lines.
    Learn {
        /// Target name or benchmark config file.
        benchmark: String,
        #[arg(short, default_value = "1", value_parser = parse_cost)]
        a: f64,
        #[arg(short, default_value = "1", value_parser = parse_cost)]
        b: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the transcript here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark over a grid of membership costs.
    Bench {
        benchmark: String,
        #[command(flatten)]
        batch: Batch,
        /// Membership costs; defaults to the benchmark's grid.
        #[arg(long, value_delimiter = ',', value_parser = parse_cost)]
        costs: Vec<f64>,
        #[arg(long, default_value = "1", value_parser = parse_cost)]
        pref_cost: f64,
        /// Add the membership-only run to a custom cost grid.
        #[arg(long)]
        baseline: bool,
        /// Also write one transcript per trial.
        #[arg(long)]
        transcripts: bool,
    },
    /// Rerun a benchmark at increasing labeling error rates.
    Robust {
        benchmark: String,
        #[command(flatten)]
        batch: Batch,
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1")]
        rates: Vec<f64>,
        #[arg(short, default_value = "1", value_parser = parse_cost)]
        a: f64,
        #[arg(short, default_value = "1", value_parser = parse_cost)]
        b: f64,
    },
    /// Start the teaching session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Persist sessions here; in memory when absent.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Batch {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl Batch {
    fn apply(&self, bench: &mut Benchmark) {
        if let Some(t) = self.trials {
            bench.trials = t;
        }
        if let Some(s) = self.seed {
            bench.seed = s;
        }
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Learn {
            benchmark,
            a,
            b,
            seed,
            out,
        } => {
            let mut bench = load_benchmark(&benchmark)?;
            bench.seed = seed;
            let target = build_target(&bench.target)?;
            let trial = run_trial(&bench, &target, CostModel::new(a, b)?, 0);
            if let Some(e) = &trial.error {
                eprintln!("learner failed: {e}");
            }
            let jsonl = trial.transcript.to_jsonl()?;
            match out {
                Some(path) => std::fs::write(&path, jsonl).map_err(|source| memrep_harness::HarnessError::Io {
                    path: path.display().to_string(),
                    source,
                })?,
                None => print!("{jsonl}"),
            }
            eprintln!("{}", serde_json::to_string(&trial.row)?);
        }
        Command::Bench {
            benchmark,
            batch,
            costs,
            pref_cost,
            baseline,
            transcripts,
        } => {
            let mut bench = load_benchmark(&benchmark)?;
            batch.apply(&mut bench);
            if !costs.is_empty() {
                bench.costs = costs
                    .iter()
                    .map(|&a| CostModel::new(a, pref_cost))
                    .collect::<std::result::Result<_, _>>()?;
                if baseline {
                    bench.costs.push(CostModel::new(1.0, f64::INFINITY)?);
                }
            }
            let experiment = run_experiment(&bench, batch.jobs)?;
            for (row, e) in experiment.errors() {
                eprintln!("trial {} at a={} b={} failed: {e}", row.trial, row.a, row.b);
            }
            report(&write_experiment(&batch.out, &experiment, transcripts)?);
        }
        Command::Robust {
            benchmark,
            batch,
            rates,
            a,
            b,
        } => {
            let mut bench = load_benchmark(&benchmark)?;
            batch.apply(&mut bench);
            bench.costs = vec![CostModel::new(a, b)?];
            report(&write_robustness(
                &batch.out,
                &run_robustness(&bench, &rates, batch.jobs)?,
            )?);
        }
        Command::Serve { addr, state_dir } => {
            let store = match state_dir {
                Some(dir) => SessionStore::persistent(dir)?,
                None => SessionStore::in_memory(),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|source| memrep_harness::HarnessError::Io {
                path: addr.to_string(),
                source,
            })?;
            eprintln!("serving on http://{addr}");
            runtime
                .block_on(memrep_session::serve(Arc::new(store), addr))
                .map_err(|source| memrep_harness::HarnessError::Io {
                    path: addr.to_string(),
                    source,
                })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
