//! CSV and JSON artifacts of a sweep.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::runner::ExperimentResult;
use crate::error::Result;

pub const CSV_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    fidelity: f64,
    leakage: f64,
    detect_prob: f64,
    allpass_prob: f64,
}

/// One row per `(N, seed)`: `N, seed, fidelity, leakage, detect_prob, allpass_prob`.
pub fn write_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &result.records {
        w.serialize(CsvRow {
            n: r.n,
            seed: r.seed,
            fidelity: r.fidelity,
            leakage: r.leakage,
            detect_prob: r.detect_prob,
            allpass_prob: r.allpass_prob,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(result: &ExperimentResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Slopes, grid means, extras and the config echo; per-seed records live in the CSV.
pub fn summary_json(result: &ExperimentResult) -> serde_json::Value {
    serde_json::json!({
        "name": result.name,
        "experiment": result.experiment,
        "version": result.version,
        "seeds": result.seeds,
        "slopes": result.slopes,
        "grid": result.grid,
        "extras": result.extras,
        "warnings": result.warnings,
        "wall_time_s": result.wall_time_s,
        "config": result.config,
    })
}

/// Writes `results.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(CSV_FILE);
    write_csv(result, fs::File::create(&csv_path)?)?;
    let json_path = dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary_json(result))?;
    fs::write(&json_path, text + "\n")?;
    Ok((csv_path, json_path))
}
