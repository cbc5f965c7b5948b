//! TOML experiment configuration.
//!
//! Every section and key is optional; missing values take the defaults
//! below. Unknown keys are rejected at parse time, everything else is
//! checked by [`ExperimentConfig::validate`], which lists all violations.

use std::f64::consts::PI;
use std::path::Path;

use butterfly::lattice::{cross_lattice_9, sub_lattice, CouplingGraph, HamiltonianTerms};
use butterfly::metrology::linspace;
use butterfly::noise::{default_levels, NoiseConfig};
use butterfly::{Axis, SitePauli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::Experiment;

/// Stream used to draw a random initial basis state, kept apart from the
/// noise and disorder streams of the same seed.
const INITIAL_STATE_STREAM: u64 = 0xB175;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub lattice: LatticeSection,
    pub hamiltonian: HamiltonianSection,
    pub protocol: ProtocolSection,
    pub scrambling: ScramblingSection,
    pub scaling: ScalingSection,
    pub noise: NoiseSection,
    pub calibration: CalibrationSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    /// `cross9` or `chain<N>`.
    pub preset: String,
    pub n_active: usize,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { preset: "cross9".into(), n_active: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HamiltonianSection {
    /// `J/2π` on every edge, MHz.
    pub coupling_mhz: f64,
    /// `Δω_i/2π` per active site, MHz. Empty means all zero.
    pub detunings_mhz: Vec<f64>,
}

impl Default for HamiltonianSection {
    fn default() -> Self {
        Self { coupling_mhz: butterfly::lattice::DEFAULT_COUPLING_MHZ, detunings_mhz: Vec::new() }
    }
}

/// Either explicit 0/1 occupations or the keyword `"random"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialBits {
    Bits(Vec<u8>),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub v_site: usize,
    /// `x`, `y` or `z`.
    pub v_axis: String,
    /// Empty list means every site in `|0⟩`.
    pub initial_bits: InitialBits,
    pub phi_min: f64,
    pub phi_max: f64,
    pub phi_points: usize,
    pub t_max_ns: f64,
    pub t_step_ns: f64,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            v_site: 0,
            v_axis: "x".into(),
            initial_bits: InitialBits::Bits(Vec::new()),
            phi_min: -1.1 * PI,
            phi_max: 1.1 * PI,
            phi_points: 81,
            t_max_ns: 200.0,
            t_step_ns: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScramblingSection {
    /// Site of `W = σ_z` in the OTOC.
    pub w_site: usize,
    /// Site of `V = σ_x` in the OTOC.
    pub v_site: usize,
    /// Initially excited site of the Loschmidt echo.
    pub probe_site: usize,
    pub disorder_sigma_mhz: f64,
    pub disorder_realizations: usize,
}

impl Default for ScramblingSection {
    fn default() -> Self {
        Self {
            w_site: 0,
            v_site: 1,
            probe_site: 0,
            disorder_sigma_mhz: 3.0,
            disorder_realizations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    pub n_list: Vec<usize>,
    /// `fixed` (uses `protocol.initial_bits`) or `random`.
    pub mode: String,
    pub samples: usize,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self { n_list: (5..=9).collect(), mode: "fixed".into(), samples: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub sigma_freq_mhz: f64,
    pub sigma_coupling_mhz: f64,
    pub sigma_phase: f64,
    pub tau_noise_ns: f64,
    pub realizations: usize,
    pub shared_traces: bool,
    pub bootstrap: usize,
    /// Levels swept by the robustness experiment.
    pub freq_levels_mhz: Vec<f64>,
    pub phase_levels_rad: Vec<f64>,
    pub coupling_levels_mhz: Vec<f64>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let base = NoiseConfig::default();
        Self {
            sigma_freq_mhz: base.sigma_freq_mhz,
            sigma_coupling_mhz: base.sigma_coupling_mhz,
            sigma_phase: base.sigma_phase,
            tau_noise_ns: base.tau_noise,
            realizations: base.realizations,
            shared_traces: base.shared_traces,
            bootstrap: base.bootstrap,
            freq_levels_mhz: default_levels(),
            phase_levels_rad: default_levels(),
            coupling_levels_mhz: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSection {
    /// CSV with columns `t_ns, phi_rad`, relative to the config file.
    pub phase_trace: Option<String>,
    /// Nominal detuning of the flux step, GHz.
    pub sensitivity_ghz: Option<f64>,
    /// CSV with columns `phi_Phi0, gamma_per_us`, relative to the config file.
    pub dephasing: Option<String>,
    /// Parabola curvature `A`, GHz/Φ₀².
    pub a_curv_ghz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
    pub emit_svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: "out".into(), emit_svg: false }
    }
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(vec![e.to_string()]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical JSON of the resolved configuration, used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_active
    }

    /// Every violation in the configuration. With `experiment`, inputs that
    /// only that experiment needs are checked too.
    pub fn validate(&self, experiment: Option<Experiment>) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.lattice.n_active;

        match CouplingGraph::preset(&self.lattice.preset) {
            Err(e) => v.push(format!("lattice.preset: {e}")),
            Ok(g) => {
                if n == 0 || n > g.n_sites() {
                    v.push(format!(
                        "lattice.n_active = {n} must be between 1 and the {} sites of preset '{}'",
                        g.n_sites(),
                        self.lattice.preset
                    ));
                }
            }
        }

        let h = &self.hamiltonian;
        if !finite(h.coupling_mhz) {
            v.push("hamiltonian.coupling_mhz must be finite".into());
        }
        if !h.detunings_mhz.is_empty() && h.detunings_mhz.len() != n {
            v.push(format!(
                "hamiltonian.detunings_mhz has {} entries, expected {n} (one per active site) or none",
                h.detunings_mhz.len()
            ));
        }
        if h.detunings_mhz.iter().any(|d| !finite(*d)) {
            v.push("hamiltonian.detunings_mhz entries must be finite".into());
        }

        let p = &self.protocol;
        if p.v_site >= n {
            v.push(format!("protocol.v_site = {} is not an active site (n_active = {n})", p.v_site));
        }
        if parse_axis(&p.v_axis).is_none() {
            v.push(format!("protocol.v_axis must be x, y or z, got '{}'", p.v_axis));
        }
        match &p.initial_bits {
            InitialBits::Bits(bits) => {
                if !bits.is_empty() && bits.len() != n {
                    v.push(format!(
                        "protocol.initial_bits has {} entries, expected {n} or none",
                        bits.len()
                    ));
                }
                if bits.iter().any(|b| *b > 1) {
                    v.push("protocol.initial_bits entries must be 0 or 1".into());
                }
            }
            InitialBits::Keyword(k) if k == "random" => {}
            InitialBits::Keyword(k) => {
                v.push(format!("protocol.initial_bits must be a 0/1 list or \"random\", got '{k}'"))
            }
        }
        if !(finite(p.phi_min) && finite(p.phi_max) && p.phi_min < p.phi_max) {
            v.push("protocol.phi_min must be finite and below a finite protocol.phi_max".into());
        }
        if p.phi_points < 2 * n + 1 {
            v.push(format!(
                "insufficient grid for Fourier fit: protocol.phi_points = {} but {n} harmonics need at least {}",
                p.phi_points,
                2 * n + 1
            ));
        }
        if !non_negative(p.t_max_ns) {
            v.push("protocol.t_max_ns must be finite and non-negative".into());
        }
        if !(finite(p.t_step_ns) && p.t_step_ns > 0.0) {
            v.push("protocol.t_step_ns must be positive".into());
        } else if non_negative(p.t_max_ns) && p.t_max_ns / p.t_step_ns > 1e6 {
            v.push("protocol time grid exceeds 10^6 points".into());
        }

        let s = &self.scrambling;
        for (key, site) in [("w_site", s.w_site), ("v_site", s.v_site), ("probe_site", s.probe_site)] {
            if site >= n {
                v.push(format!("scrambling.{key} = {site} is not an active site (n_active = {n})"));
            }
        }
        if !non_negative(s.disorder_sigma_mhz) {
            v.push("scrambling.disorder_sigma_mhz must be finite and non-negative".into());
        }
        if s.disorder_realizations == 0 {
            v.push("scrambling.disorder_realizations must be at least 1".into());
        }

        let sc = &self.scaling;
        if sc.n_list.is_empty() {
            v.push("scaling.n_list must not be empty".into());
        }
        if let Some(bad) = sc.n_list.iter().find(|k| !(1..=9).contains(*k)) {
            v.push(format!("scaling.n_list entry {bad} outside 1..=9"));
        }
        match sc.mode.as_str() {
            "random" => {
                if sc.samples == 0 {
                    v.push("scaling.samples must be at least 1 in random mode".into());
                }
            }
            "fixed" => {
                if matches!(p.initial_bits, InitialBits::Keyword(_)) {
                    v.push("scaling.mode = fixed needs an explicit protocol.initial_bits list".into());
                }
            }
            other => v.push(format!("scaling.mode must be fixed or random, got '{other}'")),
        }

        let nz = &self.noise;
        if let Err(e) = self.noise_config().validate() {
            v.push(format!("noise: {e}"));
        }
        for (key, levels) in [
            ("freq_levels_mhz", &nz.freq_levels_mhz),
            ("phase_levels_rad", &nz.phase_levels_rad),
            ("coupling_levels_mhz", &nz.coupling_levels_mhz),
        ] {
            if levels.iter().any(|l| !non_negative(*l)) {
                v.push(format!("noise.{key} entries must be finite and non-negative"));
            }
        }

        let c = &self.calibration;
        if let Some(s) = c.sensitivity_ghz {
            if !(finite(s) && s != 0.0) {
                v.push("calibration.sensitivity_ghz must be finite and non-zero".into());
            }
        }
        if let Some(a) = c.a_curv_ghz {
            if !(finite(a) && a > 0.0) {
                v.push("calibration.a_curv_ghz must be positive".into());
            }
        }
        match experiment {
            Some(Experiment::CalibrateDistortion) => {
                if c.phase_trace.is_none() {
                    v.push("calibration.phase_trace is required for calibrate-distortion".into());
                }
                if c.sensitivity_ghz.is_none() {
                    v.push("calibration.sensitivity_ghz is required for calibrate-distortion".into());
                }
            }
            Some(Experiment::CalibrateFluxnoise) => {
                if c.dephasing.is_none() {
                    v.push("calibration.dephasing is required for calibrate-fluxnoise".into());
                }
                if c.a_curv_ghz.is_none() {
                    v.push("calibration.a_curv_ghz is required for calibrate-fluxnoise".into());
                }
            }
            Some(Experiment::Scaling) => {
                if self.lattice.preset != "cross9" {
                    v.push("scaling runs on sub-lattices of the cross9 preset".into());
                }
                let smallest = sc.n_list.iter().copied().min().unwrap_or(1);
                let largest = sc.n_list.iter().copied().max().unwrap_or(1);
                if p.v_site >= smallest {
                    v.push(format!(
                        "protocol.v_site = {} is outside the smallest scaling size {smallest}",
                        p.v_site
                    ));
                }
                if p.phi_points < 2 * largest + 1 {
                    v.push(format!(
                        "insufficient grid for Fourier fit: protocol.phi_points = {} but N = {largest} needs at least {}",
                        p.phi_points,
                        2 * largest + 1
                    ));
                }
            }
            Some(Experiment::Robustness)
                if nz.freq_levels_mhz.is_empty()
                    && nz.phase_levels_rad.is_empty()
                    && nz.coupling_levels_mhz.is_empty() =>
            {
                v.push("robustness needs at least one noise level".into());
            }
            _ => {}
        }

        if self.output.directory.trim().is_empty() {
            v.push("output.directory must not be empty".into());
        }
        v
    }

    /// Active lattice. Only valid after [`validate`](Self::validate).
    pub fn graph(&self) -> Result<CouplingGraph, butterfly::Error> {
        let base = CouplingGraph::preset(&self.lattice.preset)?;
        if self.lattice.preset == "cross9" {
            sub_lattice(&cross_lattice_9(), self.lattice.n_active)
        } else {
            CouplingGraph::chain(self.lattice.n_active.min(base.n_sites()))
        }
    }

    pub fn terms(&self, graph: &CouplingGraph) -> HamiltonianTerms {
        let terms = HamiltonianTerms::uniform(graph, self.hamiltonian.coupling_mhz);
        if self.hamiltonian.detunings_mhz.is_empty() {
            terms
        } else {
            terms.with_detunings_mhz(&self.hamiltonian.detunings_mhz)
        }
    }

    pub fn v_op(&self) -> SitePauli {
        let axis = parse_axis(&self.protocol.v_axis).unwrap_or(Axis::X);
        SitePauli::new(self.protocol.v_site, axis)
    }

    /// Explicit bits, all zeros for an empty list, or a basis state drawn
    /// from the seed for `"random"`.
    pub fn initial_bits(&self) -> Vec<bool> {
        let n = self.n_sites();
        match &self.protocol.initial_bits {
            InitialBits::Bits(b) if b.is_empty() => vec![false; n],
            InitialBits::Bits(b) => b.iter().map(|x| *x == 1).collect(),
            InitialBits::Keyword(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(INITIAL_STATE_STREAM);
                let index = rng.random_range(0..1usize << n);
                (0..n).map(|site| index & (1 << (n - 1 - site)) != 0).collect()
            }
        }
    }

    pub fn phi_grid(&self) -> Vec<f64> {
        linspace(self.protocol.phi_min, self.protocol.phi_max, self.protocol.phi_points)
    }

    /// `0, Δt, 2Δt, …` up to `t_max_ns` (inclusive within round-off).
    pub fn time_grid(&self) -> Vec<f64> {
        let step = self.protocol.t_step_ns;
        let count = (self.protocol.t_max_ns / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| k as f64 * step).collect()
    }

    pub fn noise_config(&self) -> NoiseConfig {
        let n = &self.noise;
        NoiseConfig {
            sigma_freq_mhz: n.sigma_freq_mhz,
            sigma_coupling_mhz: n.sigma_coupling_mhz,
            sigma_phase: n.sigma_phase,
            tau_noise: n.tau_noise_ns,
            realizations: n.realizations,
            seed: self.seed,
            shared_traces: n.shared_traces,
            bootstrap: n.bootstrap,
        }
    }
}

fn parse_axis(s: &str) -> Option<Axis> {
    match s {
        "x" | "X" => Some(Axis::X),
        "y" | "Y" => Some(Axis::Y),
        "z" | "Z" => Some(Axis::Z),
        _ => None,
    }
}
