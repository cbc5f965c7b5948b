use std::path::{Path, PathBuf};
use std::process::ExitCode;

use butterfly_cli::{execute, CliError, Experiment, ExperimentConfig};
use clap::Parser;

/// Runs simulation experiments described by a TOML configuration.
#[derive(Parser, Debug)]
#[command(name = "butterfly", version)]
struct Args {
    /// Experiment name; see --list.
    experiment: Option<String>,
    /// TOML configuration file. Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lists the available experiments.
    #[arg(long)]
    list: bool,
    /// Validates the configuration and exits without running anything.
    #[arg(long)]
    validate: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("butterfly: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    if args.list {
        for e in Experiment::ALL {
            println!("{:<22} {}", e.name(), e.description());
        }
        return Ok(());
    }
    let experiment = args.experiment.as_deref().map(str::parse::<Experiment>).transpose()?;

    let (mut config, base_dir) = match &args.config {
        Some(path) => {
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (ExperimentConfig::load(path)?, base)
        }
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    if args.validate {
        let violations = config.validate(experiment);
        if violations.is_empty() {
            println!("configuration is valid");
            return Ok(());
        }
        return Err(CliError::Config(violations));
    }

    let Some(experiment) = experiment else {
        return Err(CliError::Usage("no experiment given (use --list to see them)".into()));
    };
    let out_dir = args
        .out
        .unwrap_or_else(|| base_dir.join(&config.output.directory));
    let manifest = execute(experiment, &config, &base_dir, &out_dir)?;
    for f in &manifest.files {
        println!("wrote {}", out_dir.join(&f.name).display());
    }
    println!("wrote {} ({:.2} s)", out_dir.join("manifest.json").display(), manifest.wall_clock_s);
    Ok(())
}
