//! Quasi-static Gaussian noise on detunings, couplings and the sensed phase.
//!
//! Noise is piecewise constant over segments of length `tau_noise`. Each
//! realization draws from its own ChaCha8 stream, so any single one can be
//! regenerated from `(seed, index)` alone. Within a stream the phase offset is
//! drawn first, then, segment by segment, the site offsets followed by the
//! edge offsets, all via the ziggurat standard normal sampler of `rand_distr`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::evolve::{propagate, Propagator};
use crate::lattice::{mhz_to_rad_per_ns, Bipartition, CouplingGraph, HamiltonianTerms};
use crate::metrology::{sense, FourierDesign, ProtocolSpec};
use crate::qstate::StateVector;

/// Streams per realization: forward trace (also supplies the phase offset)
/// and the independent reverse trace.
const STREAMS_PER_REALIZATION: u64 = 4;
const FORWARD_STAGE: u64 = 0;
const REVERSE_STAGE: u64 = 1;

/// Added to the seed for the bootstrap resampler so it never shares a stream
/// with the noise draws.
const BOOTSTRAP_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// `σ_ω/2π` per site, MHz.
    pub sigma_freq_mhz: f64,
    /// `σ_J/2π` per edge, MHz.
    pub sigma_coupling_mhz: f64,
    /// `σ_φ`, radians.
    pub sigma_phase: f64,
    /// Segment length in ns.
    pub tau_noise: f64,
    pub realizations: usize,
    pub seed: u64,
    /// Replay the forward trace during the reverse stage instead of drawing a
    /// fresh one.
    pub shared_traces: bool,
    /// Bootstrap resamples for the standard error.
    pub bootstrap: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma_freq_mhz: 0.0,
            sigma_coupling_mhz: 0.0,
            sigma_phase: 0.0,
            tau_noise: 10.0,
            realizations: 100,
            seed: 0,
            shared_traces: false,
            bootstrap: 200,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("sigma_freq", self.sigma_freq_mhz),
            ("sigma_coupling", self.sigma_coupling_mhz),
            ("sigma_phase", self.sigma_phase),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(argument(format!("{name} must be finite and ≥ 0, got {s}")));
            }
        }
        if !(self.tau_noise > 0.0 && self.tau_noise.is_finite()) {
            return Err(argument("tau_noise must be positive"));
        }
        if self.realizations == 0 {
            return Err(argument("realizations must be ≥ 1"));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_freq_mhz == 0.0 && self.sigma_coupling_mhz == 0.0 && self.sigma_phase == 0.0
    }
}

/// One sampled noise history. Offsets are angular, in rad/ns.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub tau_noise: f64,
    /// `detuning_offsets[segment][site]`.
    pub detuning_offsets: Vec<Vec<f64>>,
    /// `coupling_offsets[segment][edge]`.
    pub coupling_offsets: Vec<Vec<f64>>,
    pub phase_offset: f64,
}

impl NoiseRealization {
    pub fn segments(&self) -> usize {
        self.detuning_offsets.len()
    }

    /// Noise-free history covering `t_total`.
    pub fn quiet(graph: &CouplingGraph, tau_noise: f64, t_total: f64) -> Self {
        let k = segment_count(t_total, tau_noise);
        Self {
            tau_noise,
            detuning_offsets: vec![vec![0.0; graph.n_sites()]; k],
            coupling_offsets: vec![vec![0.0; graph.edges().len()]; k],
            phase_offset: 0.0,
        }
    }

    /// Durations of the segments needed to cover `[0, t]`, the last one partial.
    fn durations(&self, t: f64) -> Result<Vec<f64>> {
        let needed = segment_count(t, self.tau_noise);
        if needed > self.segments() {
            return Err(argument(format!(
                "noise trace covers {} ns, evolution needs {t} ns",
                self.segments() as f64 * self.tau_noise
            )));
        }
        Ok((0..needed)
            .map(|k| (t - k as f64 * self.tau_noise).min(self.tau_noise))
            .collect())
    }

    fn segment_terms(&self, terms: &HamiltonianTerms, segment: usize) -> HamiltonianTerms {
        let add = |base: &[f64], off: &[f64]| base.iter().zip(off).map(|(a, b)| a + b).collect();
        HamiltonianTerms {
            detunings: add(&terms.detunings, &self.detuning_offsets[segment]),
            couplings: add(&terms.couplings, &self.coupling_offsets[segment]),
        }
    }
}

/// `⌈t_total / tau⌉`, ignoring round-off just above an integer multiple.
pub fn segment_count(t_total: f64, tau: f64) -> usize {
    let ratio = t_total / tau;
    let k = ratio.ceil();
    if k - ratio > 1.0 - 1e-9 {
        (k - 1.0).max(0.0) as usize
    } else {
        k.max(0.0) as usize
    }
}

fn stream_rng(seed: u64, index: usize, stage: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 * STREAMS_PER_REALIZATION + stage);
    rng
}

fn sample_stage(
    config: &NoiseConfig,
    graph: &CouplingGraph,
    t_total: f64,
    index: usize,
    stage: u64,
) -> NoiseRealization {
    let mut rng = stream_rng(config.seed, index, stage);
    let mut draw = |sigma: f64| sigma * rng.sample::<f64, _>(StandardNormal);
    let phase_offset = draw(config.sigma_phase);
    let s_freq = mhz_to_rad_per_ns(config.sigma_freq_mhz);
    let s_coup = mhz_to_rad_per_ns(config.sigma_coupling_mhz);
    let k = segment_count(t_total, config.tau_noise);
    let mut detuning_offsets = Vec::with_capacity(k);
    let mut coupling_offsets = Vec::with_capacity(k);
    for _ in 0..k {
        detuning_offsets.push((0..graph.n_sites()).map(|_| draw(s_freq)).collect());
        coupling_offsets.push((0..graph.edges().len()).map(|_| draw(s_coup)).collect());
    }
    NoiseRealization {
        tau_noise: config.tau_noise,
        detuning_offsets,
        coupling_offsets,
        phase_offset,
    }
}

/// The forward-stage trace of realization `index`.
pub fn sample_realization(
    config: &NoiseConfig,
    graph: &CouplingGraph,
    t_total: f64,
    index: usize,
) -> Result<NoiseRealization> {
    config.validate()?;
    if index >= config.realizations {
        return Err(argument(format!(
            "realization index {index} ≥ configured count {}",
            config.realizations
        )));
    }
    Ok(sample_stage(config, graph, t_total, index, FORWARD_STAGE))
}

/// The trace used by the reverse stage: a replay of the forward one when
/// `shared_traces` is set, otherwise an independent draw.
pub fn sample_reverse_realization(
    config: &NoiseConfig,
    graph: &CouplingGraph,
    t_total: f64,
    index: usize,
) -> Result<NoiseRealization> {
    if config.shared_traces {
        return sample_realization(config, graph, t_total, index);
    }
    config.validate()?;
    Ok(sample_stage(config, graph, t_total, index, REVERSE_STAGE))
}

/// Piecewise-constant evolution under `H + noise` for `t` ns.
pub fn noisy_propagate(
    state: &StateVector,
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    realization: &NoiseRealization,
    t: f64,
) -> Result<StateVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(argument("noisy evolution time must be finite and ≥ 0"));
    }
    let mut out = state.clone();
    for (k, dt) in realization.durations(t)?.into_iter().enumerate() {
        let prop = Propagator::from_lattice(graph, &realization.segment_terms(terms, k))?;
        out = propagate(&out, &prop, dt)?;
    }
    Ok(out)
}

/// Noisy time reversal `Σ_z U′ Σ_z`, with `U′` the trace's segments applied in
/// reverse order.
///
/// Playing the segments backwards makes a shared, coupling-only trace undo the
/// forward stage exactly, since `Σ_z` negates each segment's hopping term.
/// Detuning offsets commute with `Σ_z` and are not undone.
pub fn noisy_reverse(
    state: &StateVector,
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    bipartition: &Bipartition,
    realization: &NoiseRealization,
    t: f64,
) -> Result<StateVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(argument("noisy evolution time must be finite and ≥ 0"));
    }
    let mut out = state.apply_sublattice_z(&bipartition.color_a)?;
    let durations = realization.durations(t)?;
    for (k, dt) in durations.into_iter().enumerate().rev() {
        let prop = Propagator::from_lattice(graph, &realization.segment_terms(terms, k))?;
        out = propagate(&out, &prop, dt)?;
    }
    out.apply_sublattice_z(&bipartition.color_a)
}

/// Fringe of realization `index`: noisy preparation, sensing at `φ + η_φ`,
/// noiseless readout.
pub fn noisy_fringe(spec: &ProtocolSpec, config: &NoiseConfig, index: usize) -> Result<Vec<f64>> {
    let d = &spec.dynamics;
    let (graph, terms) = (d.graph(), d.terms());
    let forward = sample_realization(config, graph, spec.t, index)?;
    let reverse = sample_reverse_realization(config, graph, spec.t, index)?;
    let evolved = noisy_propagate(&spec.initial_state()?, graph, terms, &forward, spec.t)?;
    let kicked = evolved.apply_site_rotation(spec.v_op, std::f64::consts::FRAC_PI_4)?;
    let prepared = noisy_reverse(&kicked, graph, terms, d.bipartition(), &reverse, spec.t)?;
    spec.phi_grid
        .iter()
        .map(|&phi| {
            let sensed = sense(&prepared, phi + forward.phase_offset);
            d.propagate(&sensed, spec.t)?.expectation(spec.v_op)
        })
        .collect()
}

/// Monte Carlo summary at one evolution time.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySensitivity {
    pub t: f64,
    /// `1/η` fitted to the realization-averaged fringe.
    pub inv_eta_mean: f64,
    /// Bootstrap standard error of `inv_eta_mean`.
    pub inv_eta_stderr: f64,
    pub realizations: usize,
    pub mean_fringe: Vec<f64>,
}

fn average(fringes: &[Vec<f64>], picks: impl Iterator<Item = usize>) -> Vec<f64> {
    let mut sum = vec![0.0; fringes[0].len()];
    let mut count = 0usize;
    for r in picks {
        for (s, v) in sum.iter_mut().zip(&fringes[r]) {
            *s += v;
        }
        count += 1;
    }
    sum.iter_mut().for_each(|s| *s /= count as f64);
    sum
}

/// Butterfly protocol with noise in the preparation and sensing stages.
///
/// Fringes are averaged over realizations (in index order) and then fitted
/// with `N` harmonics; the standard error comes from `config.bootstrap`
/// resamples of the realizations.
pub fn noisy_butterfly(spec: &ProtocolSpec, config: &NoiseConfig) -> Result<NoisySensitivity> {
    let design = FourierDesign::new(&spec.phi_grid, spec.n_sites())?;
    noisy_butterfly_with(spec, config, &design)
}

pub fn noisy_butterfly_with(
    spec: &ProtocolSpec,
    config: &NoiseConfig,
    design: &FourierDesign,
) -> Result<NoisySensitivity> {
    spec.validate()?;
    config.validate()?;
    let fringes: Vec<Vec<f64>> = (0..config.realizations)
        .into_par_iter()
        .map(|r| noisy_fringe(spec, config, r))
        .collect::<Result<_>>()?;
    let mean_fringe = average(&fringes, 0..fringes.len());
    let inv_eta_mean = design.fit(&mean_fringe)?.inv_eta;

    let n = fringes.len();
    let inv_eta_stderr = if n > 1 && config.bootstrap > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(BOOTSTRAP_SEED_OFFSET));
        rng.set_stream((spec.t.to_bits()).rotate_left(17));
        let resamples: Vec<Vec<usize>> = (0..config.bootstrap)
            .map(|_| (0..n).map(|_| rng.random_range(0..n)).collect())
            .collect();
        let values: Vec<f64> = resamples
            .par_iter()
            .map(|picks| Ok(design.fit(&average(&fringes, picks.iter().copied()))?.inv_eta))
            .collect::<Result<_>>()?;
        let m = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    Ok(NoisySensitivity {
        t: spec.t,
        inv_eta_mean,
        inv_eta_stderr,
        realizations: n,
        mean_fringe,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Frequency,
    Phase,
    Coupling,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Frequency => "frequency",
            NoiseKind::Phase => "phase",
            NoiseKind::Coupling => "coupling",
        }
    }

    /// `base` with only this kind of noise switched on, at `sigma`.
    pub fn config(self, base: &NoiseConfig, sigma: f64) -> NoiseConfig {
        let mut c = NoiseConfig {
            sigma_freq_mhz: 0.0,
            sigma_coupling_mhz: 0.0,
            sigma_phase: 0.0,
            ..base.clone()
        };
        match self {
            NoiseKind::Frequency => c.sigma_freq_mhz = sigma,
            NoiseKind::Phase => c.sigma_phase = sigma,
            NoiseKind::Coupling => c.sigma_coupling_mhz = sigma,
        }
        c
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" | "freq" => Ok(NoiseKind::Frequency),
            "phase" => Ok(NoiseKind::Phase),
            "coupling" => Ok(NoiseKind::Coupling),
            other => Err(argument(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// `{0.1, 0.2, 0.3, 0.4, 0.5}`, used for both MHz and radian sweeps.
pub fn default_levels() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub t: f64,
    pub inv_eta_mean: f64,
    pub inv_eta_stderr: f64,
    pub realizations: usize,
}

/// Noisy `1/η` for every `(kind, level, t)` cell.
pub fn robustness_sweep(
    spec: &ProtocolSpec,
    base: &NoiseConfig,
    sweeps: &[(NoiseKind, Vec<f64>)],
    times: &[f64],
) -> Result<Vec<RobustnessRow>> {
    let design = FourierDesign::new(&spec.phi_grid, spec.n_sites())?;
    let cells: Vec<(NoiseKind, f64, f64)> = sweeps
        .iter()
        .flat_map(|(kind, levels)| {
            levels
                .iter()
                .flat_map(move |&s| times.iter().map(move |&t| (*kind, s, t)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(kind, sigma, t)| {
            let r = noisy_butterfly_with(&spec.at_time(t), &kind.config(base, sigma), &design)?;
            Ok(RobustnessRow {
                kind,
                sigma,
                t,
                inv_eta_mean: r.inv_eta_mean,
                inv_eta_stderr: r.inv_eta_stderr,
                realizations: r.realizations,
            })
        })
        .collect()
}
