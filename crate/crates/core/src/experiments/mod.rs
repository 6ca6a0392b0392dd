//! Declarative sweeps over the number of checks `N`.
//!
//! An [`ExperimentSpec`] fixes the code, the noise, the gadget mode and the
//! total noise `thetaT`; the runner evaluates every `(N, seed)` pair in
//! parallel, averages over seeds and fits log-log slopes of the resulting
//! metrics against `N`.

mod config;
mod fit;
mod output;
mod runner;

pub use config::{
    ExperimentKind, ExperimentSpec, GadgetConfig, GadgetNoiseConfig, LogicalInput, LogicalPreset, NoiseConfig,
    OutputKind, Simulation,
};
pub use fit::{fit_loglog_slope, SlopeFit};
pub use output::{csv_string, summary_json, write_csv, write_outputs, CSV_FILE, SUMMARY_FILE};
pub use runner::{
    run_dephasing_code, run_experiment, run_fast_noise_failure, run_gadget_noise_failure, run_unprotected_baseline,
    run_zeno_sweep, Extras, ExperimentResult, GridPoint, RunRecord, Slopes,
};
