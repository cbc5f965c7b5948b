//! One function per experiment, each returning its output files.

use std::path::Path;
use std::sync::Arc;

use butterfly::calibration::{fit_gamma_vs_flux, fit_step_response, flux_noise_sigma, step_phase};
use butterfly::metrology::{
    run_fringe, scaling_sweep, sensitivity_curve, FourierDesign, ProtocolSpec, ScalingConfig,
    ScalingMode,
};
use butterfly::noise::{noisy_butterfly_with, robustness_sweep, NoiseKind};
use butterfly::scrambling::{loschmidt_echo, otoc_curve, DetuningDisorder, LatticeDynamics};
use butterfly::StateVector;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{read_columns, Artifact, Cell, Table};
use crate::svg::{line_chart, Series};
use crate::Experiment;

struct Plot {
    title: &'static str,
    x_label: &'static str,
    y_label: &'static str,
    series: Vec<Series>,
}

fn series(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Series {
    Series { label: label.into(), x, y }
}

fn finish(
    config: &ExperimentConfig,
    stem: &str,
    table: &Table,
    plot: impl FnOnce(&Table) -> Plot,
) -> Result<Vec<Artifact>, CliError> {
    let mut out = vec![Artifact { name: format!("{stem}.csv"), bytes: table.to_csv()? }];
    if config.output.emit_svg {
        let p = plot(table);
        out.push(Artifact {
            name: format!("{stem}.svg"),
            bytes: line_chart(p.title, p.x_label, p.y_label, &p.series).into_bytes(),
        });
    }
    Ok(out)
}

fn dynamics(config: &ExperimentConfig) -> Result<Arc<LatticeDynamics>, CliError> {
    let graph = config.graph()?;
    let terms = config.terms(&graph);
    Ok(Arc::new(LatticeDynamics::new(graph, terms)?))
}

fn protocol(config: &ExperimentConfig) -> Result<ProtocolSpec, CliError> {
    Ok(ProtocolSpec::new(dynamics(config)?, 0.0)
        .with_v_op(config.v_op())
        .with_initial_bits(config.initial_bits())
        .with_phi_grid(config.phi_grid()))
}

pub fn run(
    experiment: Experiment,
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<Vec<Artifact>, CliError> {
    match experiment {
        Experiment::Loschmidt => loschmidt(config),
        Experiment::Otoc => otoc(config),
        Experiment::Fringe => fringe(config),
        Experiment::Sensitivity => sensitivity(config),
        Experiment::Scaling => scaling(config),
        Experiment::Robustness => robustness(config),
        Experiment::CalibrateDistortion => calibrate_distortion(config, base_dir),
        Experiment::CalibrateFluxnoise => calibrate_fluxnoise(config, base_dir),
    }
}

fn loschmidt(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let graph = config.graph()?;
    let terms = config.terms(&graph);
    let times = config.time_grid();
    let s = &config.scrambling;
    let disorder = DetuningDisorder {
        sigma_mhz: s.disorder_sigma_mhz,
        realizations: s.disorder_realizations,
        seed: config.seed,
    };
    let curve = loschmidt_echo(&graph, &terms, &times, s.probe_site, Some(disorder))?;
    let mut table = Table::new(vec![
        "t_ns",
        "fidelity_ideal",
        "fidelity_mean",
        "fidelity_std",
        "p_return_q0_mean",
    ]);
    for (k, &t) in times.iter().enumerate() {
        table.push(vec![
            Cell::Num(t),
            Cell::Num(curve.fidelity_ideal[k]),
            Cell::Num(curve.fidelity_mean[k]),
            Cell::Num(curve.fidelity_std[k]),
            Cell::Num(curve.probe_return_mean[k]),
        ]);
    }
    finish(config, "loschmidt", &table, |t| {
        let x = t.column("t_ns");
        Plot {
            title: "Loschmidt echo",
            x_label: "t (ns)",
            y_label: "fidelity",
            series: vec![
                series("ideal", x.clone(), t.column("fidelity_ideal")),
                series("disordered mean", x.clone(), t.column("fidelity_mean")),
                series("probe return", x, t.column("p_return_q0_mean")),
            ],
        }
    })
}

fn otoc(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let d = dynamics(config)?;
    let init = StateVector::basis_state(config.n_sites(), &config.initial_bits())?;
    let times = config.time_grid();
    let s = &config.scrambling;
    let curve = otoc_curve(&d, &times, s.v_site, s.w_site, &init)?;
    let mut table = Table::new(vec!["t_ns", "f_real", "f_imag", "c", "c_plus", "c_minus"]);
    for (k, &t) in times.iter().enumerate() {
        table.push(vec![
            Cell::Num(t),
            Cell::Num(curve.f_values[k].re),
            Cell::Num(curve.f_values[k].im),
            Cell::Num(curve.c_values[k]),
            Cell::Num(curve.c_plus[k]),
            Cell::Num(curve.c_minus[k]),
        ]);
    }
    finish(config, "otoc", &table, |t| {
        let x = t.column("t_ns");
        Plot {
            title: "Out-of-time-order correlator",
            x_label: "t (ns)",
            y_label: "value",
            series: ["c", "c_plus", "c_minus", "f_real"]
                .iter()
                .map(|c| series(*c, x.clone(), t.column(c)))
                .collect(),
        }
    })
}

fn fringe(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let base = protocol(config)?;
    let noise = config.noise_config();
    let design = FourierDesign::new(&base.phi_grid, base.n_sites())?;
    let times = config.time_grid();
    let mut table = Table::new(vec!["t_ns", "phi_rad", "expectation"]);
    for &t in &times {
        let spec = base.at_time(t);
        let values = if noise.is_noiseless() {
            run_fringe(&spec)?.expectations
        } else {
            noisy_butterfly_with(&spec, &noise, &design)?.mean_fringe
        };
        for (phi, m) in spec.phi_grid.iter().zip(values) {
            table.push(vec![Cell::Num(t), Cell::Num(*phi), Cell::Num(m)]);
        }
    }
    let points = base.phi_grid.len();
    finish(config, "fringe", &table, |t| {
        let ts = t.column("t_ns");
        let phi = t.column("phi_rad");
        let m = t.column("expectation");
        Plot {
            title: "Butterfly fringes",
            x_label: "phi (rad)",
            y_label: "<V>",
            series: (0..ts.len() / points.max(1))
                .map(|k| {
                    let r = k * points..(k + 1) * points;
                    series(format!("t = {} ns", ts[r.start]), phi[r.clone()].to_vec(), m[r].to_vec())
                })
                .collect(),
        }
    })
}

fn sensitivity(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let base = protocol(config)?;
    let noise = config.noise_config();
    let times = config.time_grid();
    let mut points = sensitivity_curve(&base, &times)?;
    if !noise.is_noiseless() {
        let design = FourierDesign::new(&base.phi_grid, base.n_sites())?;
        for p in &mut points {
            p.inv_eta_fit = noisy_butterfly_with(&base.at_time(p.t), &noise, &design)?.inv_eta_mean;
        }
    }
    let mut table = Table::new(vec!["t_ns", "inv_eta_fit", "inv_eta_otoc", "inv_eta_moment"]);
    for p in &points {
        table.push(vec![
            Cell::Num(p.t),
            Cell::Num(p.inv_eta_fit),
            Cell::Num(p.inv_eta_otoc),
            Cell::Num(p.inv_eta_moment),
        ]);
    }
    finish(config, "sensitivity", &table, |t| {
        let x = t.column("t_ns");
        Plot {
            title: "Inverse sensitivity",
            x_label: "t (ns)",
            y_label: "1/eta",
            series: ["inv_eta_fit", "inv_eta_otoc", "inv_eta_moment"]
                .iter()
                .map(|c| series(*c, x.clone(), t.column(c)))
                .collect(),
        }
    })
}

fn scaling(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let mode = match config.scaling.mode.as_str() {
        "random" => ScalingMode::Random { samples: config.scaling.samples, seed: config.seed },
        _ => ScalingMode::Fixed(config.initial_bits()),
    };
    let mut sc = ScalingConfig::new(config.scaling.n_list.clone(), mode);
    sc.coupling_mhz = config.hamiltonian.coupling_mhz;
    sc.v_op = config.v_op();
    sc.times = config.time_grid();
    sc.phi_grid = config.phi_grid();
    let rows = scaling_sweep(&sc)?;
    let mut table = Table::new(vec![
        "n",
        "mode",
        "inv_eta_max",
        "t_opt_ns",
        "std",
        "samples",
        "sql",
        "butterfly_bound",
        "heisenberg",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::Int(r.n as u64),
            Cell::Text(r.mode.to_string()),
            Cell::Num(r.inv_eta_max),
            Cell::Num(r.t_opt),
            Cell::Num(r.std),
            Cell::Int(r.samples as u64),
            Cell::Num(r.sql),
            Cell::Num(r.butterfly_bound),
            Cell::Num(r.heisenberg),
        ]);
    }
    finish(config, "scaling", &table, |t| {
        let x = t.column("n");
        Plot {
            title: "Peak inverse sensitivity vs N",
            x_label: "N",
            y_label: "max 1/eta",
            series: ["inv_eta_max", "sql", "butterfly_bound", "heisenberg"]
                .iter()
                .map(|c| series(*c, x.clone(), t.column(c)))
                .collect(),
        }
    })
}

fn robustness(config: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let spec = protocol(config)?;
    let n = &config.noise;
    let sweeps: Vec<(NoiseKind, Vec<f64>)> = [
        (NoiseKind::Frequency, &n.freq_levels_mhz),
        (NoiseKind::Phase, &n.phase_levels_rad),
        (NoiseKind::Coupling, &n.coupling_levels_mhz),
    ]
    .into_iter()
    .filter(|(_, levels)| !levels.is_empty())
    .map(|(k, levels)| (k, levels.clone()))
    .collect();
    let rows = robustness_sweep(&spec, &config.noise_config(), &sweeps, &config.time_grid())?;
    let mut table = Table::new(vec![
        "noise_kind",
        "sigma",
        "t_ns",
        "inv_eta_mean",
        "inv_eta_stderr",
        "n_realizations",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::Text(r.kind.name().to_string()),
            Cell::Num(r.sigma),
            Cell::Num(r.t),
            Cell::Num(r.inv_eta_mean),
            Cell::Num(r.inv_eta_stderr),
            Cell::Int(r.realizations as u64),
        ]);
    }
    finish(config, "robustness", &table, |_| {
        let mut groups: Vec<Series> = Vec::new();
        for r in &rows {
            let label = format!("{} {}", r.kind.name(), r.sigma);
            match groups.iter_mut().find(|s| s.label == label) {
                Some(s) => {
                    s.x.push(r.t);
                    s.y.push(r.inv_eta_mean);
                }
                None => groups.push(series(label, vec![r.t], vec![r.inv_eta_mean])),
            }
        }
        Plot {
            title: "Inverse sensitivity under noise",
            x_label: "t (ns)",
            y_label: "mean 1/eta",
            series: groups,
        }
    })
}

fn json_artifact<T: Serialize>(name: &str, value: &T) -> Result<Artifact, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(Artifact { name: name.into(), bytes: text.into_bytes() })
}

fn svg_artifact(name: &str, plot: Plot) -> Artifact {
    Artifact {
        name: name.into(),
        bytes: line_chart(plot.title, plot.x_label, plot.y_label, &plot.series).into_bytes(),
    }
}

#[derive(Serialize)]
struct DistortionReport {
    a_coef: f64,
    tau_ns: f64,
    a_stderr: f64,
    tau_stderr: f64,
    correlation: f64,
    residual_norm: f64,
    iterations: usize,
    sensitivity_ghz: f64,
    points: usize,
}

fn calibrate_distortion(config: &ExperimentConfig, base_dir: &Path) -> Result<Vec<Artifact>, CliError> {
    let c = &config.calibration;
    let path = base_dir.join(c.phase_trace.as_deref().unwrap_or_default());
    let s = c.sensitivity_ghz.unwrap_or_default();
    let (t, phi) = read_columns(&path, "t_ns", "phi_rad")?;
    let fit = fit_step_response(&t, &phi, s)?;
    let report = DistortionReport {
        a_coef: fit.model.a_coef,
        tau_ns: fit.model.tau,
        a_stderr: fit.a_stderr,
        tau_stderr: fit.tau_stderr,
        correlation: fit.correlation,
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
        sensitivity_ghz: s,
        points: t.len(),
    };
    let mut out = vec![json_artifact("distortion.json", &report)?];
    if config.output.emit_svg {
        let model: Vec<f64> = t.iter().map(|&ti| step_phase(&fit.model, s, ti)).collect();
        out.push(svg_artifact(
            "distortion.svg",
            Plot {
                title: "Step-response phase",
                x_label: "t (ns)",
                y_label: "phase (rad)",
                series: vec![series("data", t.clone(), phi), series("fit", t, model)],
            },
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct FluxNoiseReport {
    gamma_i_per_us: f64,
    k_mhz_per_phi0: f64,
    residual_norm: f64,
    a_curv_ghz: f64,
    sigma_phi_micro_phi0: f64,
    points: usize,
}

fn calibrate_fluxnoise(config: &ExperimentConfig, base_dir: &Path) -> Result<Vec<Artifact>, CliError> {
    let c = &config.calibration;
    let path = base_dir.join(c.dephasing.as_deref().unwrap_or_default());
    let a = c.a_curv_ghz.unwrap_or_default();
    let (flux, gamma) = read_columns(&path, "phi_Phi0", "gamma_per_us")?;
    let fit = fit_gamma_vs_flux(&flux, &gamma)?;
    let report = FluxNoiseReport {
        gamma_i_per_us: fit.gamma_i,
        k_mhz_per_phi0: fit.k,
        residual_norm: fit.residual_norm,
        a_curv_ghz: a,
        sigma_phi_micro_phi0: flux_noise_sigma(fit.k, a)?,
        points: flux.len(),
    };
    let mut out = vec![json_artifact("fluxnoise.json", &report)?];
    if config.output.emit_svg {
        let model: Vec<f64> = flux.iter().map(|&f| fit.rate(f)).collect();
        out.push(svg_artifact(
            "fluxnoise.svg",
            Plot {
                title: "Dephasing rate vs flux",
                x_label: "flux (Phi0)",
                y_label: "Gamma (1/us)",
                series: vec![series("data", flux.clone(), gamma), series("fit", flux, model)],
            },
        ));
    }
    Ok(out)
}
