//! CSV and plot-data output.

use std::fs;
use std::path::{Path, PathBuf};

use memrep_core::strategy::CostModel;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::{Aggregate, Experiment, Robustness};

pub const SUMMARY_CSV: &str = "summary.csv";
pub const AGGREGATES_CSV: &str = "aggregates.csv";
pub const PLOT_JSON: &str = "plot.json";
pub const ROBUST_SUMMARY_CSV: &str = "robust_summary.csv";
pub const ROBUST_CSV: &str = "robust.csv";
pub const TRANSCRIPTS: &str = "transcripts";

/// Stacked bars, one per cost point; `layers` lists the stack bottom to top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub benchmark: String,
    pub layers: Vec<String>,
    pub bars: Vec<Bar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub label: String,
    pub cost: CostModel,
    pub membership: f64,
    pub preference: f64,
    pub equivalence: f64,
}

fn cost_label(a: f64, b: f64) -> String {
    format!("a={a},b={b}")
}

pub fn plot_data(benchmark: &str, aggregates: &[Aggregate]) -> Result<PlotData> {
    let bars = aggregates
        .iter()
        .map(|g| {
            Ok(Bar {
                label: cost_label(g.a, g.b),
                cost: CostModel::new(g.a, g.b)?,
                membership: g.mean_mem,
                preference: g.mean_pref,
                equivalence: g.mean_equiv,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PlotData {
        benchmark: benchmark.to_string(),
        layers: ["membership", "preference", "equivalence"].map(String::from).to_vec(),
        bars,
    })
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io(path))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(io(path))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io(dir))
}

/// Writes `summary.csv`, `aggregates.csv` and `plot.json` into `dir`, plus one
/// JSON Lines transcript per trial when `transcripts` is set.
pub fn write_experiment(dir: &Path, experiment: &Experiment, transcripts: bool) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let aggregates = experiment.aggregates();
    let summary = dir.join(SUMMARY_CSV);
    write_csv(&summary, &experiment.rows())?;
    let agg = dir.join(AGGREGATES_CSV);
    write_csv(&agg, &aggregates)?;
    let plot = dir.join(PLOT_JSON);
    write_json(&plot, &plot_data(&experiment.benchmark.name, &aggregates)?)?;
    let mut written = vec![summary, agg, plot];
    if transcripts {
        let tdir = dir.join(TRANSCRIPTS);
        ensure_dir(&tdir)?;
        for t in &experiment.trials {
            let path = tdir.join(format!("a{}_b{}_trial{}.jsonl", t.row.a, t.row.b, t.row.trial));
            fs::write(&path, t.transcript.to_jsonl()?).map_err(io(&path))?;
        }
        written.push(tdir);
    }
    Ok(written)
}

pub fn write_robustness(dir: &Path, robustness: &Robustness) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let summary = dir.join(ROBUST_SUMMARY_CSV);
    write_csv(&summary, &robustness.rows())?;
    let agg = dir.join(ROBUST_CSV);
    write_csv(&agg, &robustness.aggregates())?;
    Ok(vec![summary, agg])
}
