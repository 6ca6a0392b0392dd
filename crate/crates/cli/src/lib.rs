//! Command-line front end for `qzeno-core`.
//!
//! Every subcommand writes its report to the given writer and returns a
//! [`CliError`] carrying the process exit code on failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use qzeno_core::codes::{
    check_prevention_condition, codewords_from_json, codewords_to_json, error_orbit, search_three_qubit_codes,
    violation, ErrorOrbitReport, PreventionReport,
};
use qzeno_core::experiments::{run_experiment, summary_json, write_outputs, ExperimentResult, ExperimentSpec, SlopeFit};
use qzeno_core::{make_code, CodeName, Error};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "QZENO_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qzeno", version, about = "Exact simulator for Zeno-type quantum error prevention codes")]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment config and write results.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Error orbits and prevention condition of a built-in code.
    AnalyzeCode {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Check candidate codewords from a JSON file.
    CheckCode {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Random search for a three-qubit code that detects every single-qubit error.
    #[command(name = "search-3qubit")]
    Search3Qubit {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// List the built-in codes.
    ListCodes {
        #[arg(long)]
        json: bool,
    },
    /// Print the crate version
    Version {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Self::usage(e.to_string())
        } else {
            Self::runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // Reader went away (e.g. `| head`); nothing left to report.
            return Self {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        Self::runtime(e.to_string())
    }
}

pub type CliResult = Result<(), CliError>;

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Run { config, out: dir, json } => cmd_run(config, dir, *json, out),
        Command::AnalyzeCode { name, json } => cmd_analyze_code(name, *json, out),
        Command::CheckCode { file, json } => cmd_check_code(file, *json, out),
        Command::Search3Qubit { trials, seed, json } => cmd_search_3qubit(*trials, *seed, *json, out),
        Command::ListCodes { json } => cmd_list_codes(*json, out),
        Command::Version { json } => cmd_version(*json, out),
    }
}

/// Thread count from `QZENO_THREADS`; `None` means one per logical CPU.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
    }
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn cmd_run(config: &Path, dir: &Path, json: bool, out: &mut dyn Write) -> CliResult {
    let spec = ExperimentSpec::from_json(&read_input(config)?)?;
    log::info!("running {} from {}", spec.experiment.as_str(), config.display());
    let result = run_experiment(&spec)?;
    let (csv_path, json_path) = write_outputs(&result, dir)?;
    if json {
        let mut summary = summary_json(&result);
        summary["files"] = json!({
            "csv": csv_path.display().to_string(),
            "summary": json_path.display().to_string(),
        });
        return print_json(out, &summary);
    }
    write!(out, "{}", render_run(&result))?;
    writeln!(out, "wrote {} and {}", csv_path.display(), json_path.display())?;
    Ok(())
}

fn fmt_slope(fit: &Option<SlopeFit>) -> String {
    match fit {
        Some(f) => format!("{:+.3} ± {:.3} ({} points)", f.slope, f.stderr, f.points),
        None => "n/a".to_string(),
    }
}

fn render_run(r: &ExperimentResult) -> String {
    let cfg = &r.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} on {}: {} noise, {:?} gadgets, thetaT = {}, {} runs in {:.2} s",
        r.experiment.as_str(),
        cfg.code,
        cfg.noise.kind_name(),
        cfg.gadget.mode,
        cfg.theta_t,
        r.records.len(),
        r.wall_time_s
    );
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(
        s,
        "{:>6} {:>14} {:>12} {:>12} {:>12} {:>12}",
        "N", "fidelity", "infidelity", "leakage", "detect_prob", "allpass_prob"
    );
    for g in &r.grid {
        let _ = write!(
            s,
            "{:>6} {:>14.10} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.6}",
            g.n, g.fidelity, g.infidelity, g.leakage, g.detect_prob, g.allpass_prob
        );
        match g.fidelity_stderr {
            Some(se) => {
                let _ = writeln!(s, "  (fidelity stderr {se:.2e})");
            }
            None => s.push('\n'),
        }
    }
    let _ = writeln!(s, "slope infidelity:    {}", fmt_slope(&r.slopes.infidelity));
    let _ = writeln!(s, "slope detection:     {}", fmt_slope(&r.slopes.detection));
    let _ = writeln!(s, "slope leakage:       {}", fmt_slope(&r.slopes.leakage));
    let _ = writeln!(s, "slope logical error: {}", fmt_slope(&r.slopes.logical_error));
    if let Some(slope) = &r.extras.round_error_slope {
        let _ = writeln!(s, "slope round error:   {}", fmt_slope(&Some(*slope)));
    }
    if let Some(n) = r.extras.optimum_n {
        let interior = match r.extras.interior_optimum {
            Some(true) => " (interior)",
            Some(false) => " (at an endpoint)",
            None => "",
        };
        let _ = writeln!(s, "best N: {n}{interior}");
    }
    s
}

fn orbit_json(rep: &ErrorOrbitReport) -> serde_json::Value {
    let labels = |idx: &[usize]| idx.iter().map(|&i| rep.orbit[i].label()).collect::<Vec<_>>();
    json!({
        "codeword": rep.source,
        "errors": rep.orbit.len(),
        "distinct": rep.distinct.len(),
        "orthogonal_count": rep.orthogonal_count,
        "orthogonal": labels(&rep.orthogonal),
        "new_count": rep.new_states.len(),
        "new_states": labels(&rep.new_states),
        "overlaps_with_other_codewords": rep.overlaps_with_other_codewords,
    })
}

fn render_prevention(report: &PreventionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "prevention condition: {} (worst overlap {:.3e})",
        if report.pass { "pass" } else { "FAIL" },
        report.worst_overlap
    );
    if let Some(w) = &report.witness {
        let _ = writeln!(
            s,
            "  witness: {} maps codeword {} onto codeword {} with |overlap| = {:.6}",
            w.error, w.from, w.to, w.value
        );
    }
    let _ = writeln!(s, "logical drift: {:.3e}", report.logical_drift);
    if let Some(e) = &report.drift_witness {
        let _ = writeln!(s, "  largest in-code action from {e}");
    }
    let _ = writeln!(
        s,
        "detects every single-qubit error: {}",
        if report.detects_all() { "yes" } else { "no" }
    );
    s
}

pub fn cmd_analyze_code(name: &str, json: bool, out: &mut dyn Write) -> CliResult {
    let code_name: CodeName = name.parse()?;
    let code = make_code(code_name);
    let orbits = (0..code.codewords().len())
        .map(|i| error_orbit(&code, i))
        .collect::<Result<Vec<_>, _>>()?;
    let report = check_prevention_condition(code.codewords())?;
    if json {
        return print_json(
            out,
            &json!({
                "code": code_name,
                "n_physical": code.n_physical(),
                "n_codewords": code.codewords().len(),
                "orbits": orbits.iter().map(orbit_json).collect::<Vec<_>>(),
                "prevention": report,
                "detects_all": report.detects_all(),
            }),
        );
    }
    writeln!(
        out,
        "{code_name}: {} physical qubits, {} codewords",
        code.n_physical(),
        code.codewords().len()
    )?;
    for rep in &orbits {
        let labels: Vec<String> = rep.new_states.iter().map(|&i| rep.orbit[i].label()).collect();
        writeln!(
            out,
            "|{}_E>: {} errors, {} distinct images, {} mutually orthogonal, {} new [{}], max overlap with other codewords {:.3e}",
            rep.source,
            rep.orbit.len(),
            rep.distinct.len(),
            rep.orthogonal_count,
            rep.new_states.len(),
            labels.join(" "),
            rep.overlaps_with_other_codewords
        )?;
    }
    write!(out, "{}", render_prevention(&report))?;
    Ok(())
}

pub fn cmd_check_code(file: &Path, json: bool, out: &mut dyn Write) -> CliResult {
    let text = read_input(file)?;
    // anything wrong with the candidate is a problem with the input file
    let words = codewords_from_json(&text).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
    let report = check_prevention_condition(&words).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
    if json {
        return print_json(
            out,
            &json!({
                "file": file.display().to_string(),
                "n_codewords": words.len(),
                "n_physical": words[0].num_qubits(),
                "prevention": report,
                "violation": violation(&report),
                "detects_all": report.detects_all(),
            }),
        );
    }
    writeln!(
        out,
        "{}: {} codewords on {} qubits",
        file.display(),
        words.len(),
        words[0].num_qubits()
    )?;
    write!(out, "{}", render_prevention(&report))?;
    Ok(())
}

pub fn cmd_search_3qubit(trials: u64, seed: u64, json: bool, out: &mut dyn Write) -> CliResult {
    let rep = search_three_qubit_codes(trials, seed)?;
    if json {
        return print_json(
            out,
            &json!({
                "trials": rep.trials,
                "seed": rep.seed,
                "min_violation": rep.min_violation,
                "best_candidate": codewords_to_json(&rep.best_candidate),
                "repetition_code": {
                    "prevention": rep.repetition,
                    "violation": violation(&rep.repetition),
                },
            }),
        );
    }
    writeln!(out, "trials: {}  seed: {}", rep.trials, rep.seed)?;
    writeln!(out, "min violation: {:.6}", rep.min_violation)?;
    writeln!(out, "best candidate:")?;
    for (i, w) in rep.best_candidate.iter().enumerate() {
        let amps: Vec<String> = w
            .amplitudes()
            .iter()
            .map(|a| format!("{:+.4}{:+.4}i", a.re, a.im))
            .collect();
        writeln!(out, "  |{i}_E> = [{}]", amps.join(", "))?;
    }
    writeln!(
        out,
        "repetition code {{000, 111}}: worst overlap {:.3e}, logical drift {:.3e}",
        rep.repetition.worst_overlap, rep.repetition.logical_drift
    )?;
    Ok(())
}

pub fn cmd_list_codes(json: bool, out: &mut dyn Write) -> CliResult {
    if json {
        let codes: Vec<_> = CodeName::ALL
            .iter()
            .map(|&n| {
                let code = make_code(n);
                json!({
                    "name": n,
                    "description": n.description(),
                    "n_physical": code.n_physical(),
                    "n_codewords": code.codewords().len(),
                })
            })
            .collect();
        return print_json(out, &json!(codes));
    }
    for n in CodeName::ALL {
        let code = make_code(n);
        writeln!(
            out,
            "{:<28} {} qubits, {} codewords  {}",
            n.as_str(),
            code.n_physical(),
            code.codewords().len(),
            n.description()
        )?;
    }
    Ok(())
}

pub fn cmd_version(json: bool, out: &mut dyn Write) -> CliResult {
    if json {
        return print_json(out, &json!({"name": "qzeno", "version": qzeno_core::VERSION}));
    }
    writeln!(out, "qzeno {}", qzeno_core::VERSION)?;
    Ok(())
}
