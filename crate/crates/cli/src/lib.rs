//! Experiment runner for the `butterfly` simulator: TOML configuration,
//! CSV/JSON/SVG outputs and a checksummed run manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
mod svg;

use std::path::Path;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use config::ExperimentConfig;
pub use error::CliError;
use output::{sha256_hex, write_artifacts, write_manifest, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Loschmidt,
    Otoc,
    Fringe,
    Sensitivity,
    Scaling,
    Robustness,
    CalibrateDistortion,
    CalibrateFluxnoise,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Loschmidt,
        Experiment::Otoc,
        Experiment::Fringe,
        Experiment::Sensitivity,
        Experiment::Scaling,
        Experiment::Robustness,
        Experiment::CalibrateDistortion,
        Experiment::CalibrateFluxnoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Loschmidt => "loschmidt",
            Experiment::Otoc => "otoc",
            Experiment::Fringe => "fringe",
            Experiment::Sensitivity => "sensitivity",
            Experiment::Scaling => "scaling",
            Experiment::Robustness => "robustness",
            Experiment::CalibrateDistortion => "calibrate-distortion",
            Experiment::CalibrateFluxnoise => "calibrate-fluxnoise",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Loschmidt => "ideal and disorder-averaged echo fidelity -> loschmidt.csv",
            Experiment::Otoc => "F, C, C+ and C- over the time grid -> otoc.csv",
            Experiment::Fringe => "butterfly fringe <V>(phi) at every time -> fringe.csv",
            Experiment::Sensitivity => "fitted, OTOC and moment 1/eta over time -> sensitivity.csv",
            Experiment::Scaling => "peak 1/eta for each sub-lattice size -> scaling.csv",
            Experiment::Robustness => "noisy 1/eta for each noise kind and level -> robustness.csv",
            Experiment::CalibrateDistortion => "fit (A, tau) to a phase trace -> distortion.json",
            Experiment::CalibrateFluxnoise => "fit dephasing vs flux, derive sigma_Phi -> fluxnoise.json",
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            CliError::Usage(format!("unknown experiment '{s}' (expected one of: {})", names.join(", ")))
        })
    }
}

/// Validates, runs one experiment, writes its outputs to `out_dir` and
/// finally the manifest. Relative input paths resolve against `base_dir`.
pub fn execute(
    experiment: Experiment,
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<RunManifest, CliError> {
    let violations = config.validate(Some(experiment));
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let artifacts = experiments::run(experiment, config, base_dir)?;
    let files = write_artifacts(out_dir, &artifacts)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: experiment.name().to_string(),
        seed: config.seed,
        config_sha256: sha256_hex(config.canonical_json().as_bytes()),
        started_unix_s: started,
        wall_clock_s: clock.elapsed().as_secs_f64(),
        files,
    };
    write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}
