//! Butterfly phase sensing: preparation, sensing, readout, fringe fitting and
//! the qubit-number scaling sweep.
//!
//! The protocol for a basis state `|s⟩`, perturbation `V` and evolution time `t`:
//!
//! 1. prepare `Σ_z U(t) Σ_z · e^{iπV/4} · U(t) |s⟩`,
//! 2. sense `e^{−iφ S_z}`,
//! 3. read out `⟨V(t)⟩` by propagating forward by `t` and measuring `V`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::lattice::{cross_lattice_9, sub_lattice, HamiltonianTerms};
use crate::qstate::{PolarizationDistribution, SitePauli, StateVector};
use crate::scrambling::{otoc_sensitivity_oracle, qubit_resolved_otoc, LatticeDynamics};

/// 81 points over `[−1.1π, 1.1π]`.
pub fn default_phi_grid() -> Vec<f64> {
    linspace(-1.1 * PI, 1.1 * PI, 81)
}

/// `0, 5, …, 200` ns.
pub fn default_time_grid() -> Vec<f64> {
    (0..=40).map(|k| 5.0 * k as f64).collect()
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => (0..points)
            .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// One protocol configuration on a fixed lattice.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    pub dynamics: Arc<LatticeDynamics>,
    pub v_op: SitePauli,
    pub t: f64,
    pub initial_bits: Vec<bool>,
    pub phi_grid: Vec<f64>,
}

impl ProtocolSpec {
    /// `σ_x` on site 0, all-zeros initial state, default phase grid.
    pub fn new(dynamics: Arc<LatticeDynamics>, t: f64) -> Self {
        let n = dynamics.n_sites();
        Self {
            dynamics,
            v_op: SitePauli::x(0),
            t,
            initial_bits: vec![false; n],
            phi_grid: default_phi_grid(),
        }
    }

    pub fn with_v_op(mut self, v_op: SitePauli) -> Self {
        self.v_op = v_op;
        self
    }

    pub fn with_initial_bits(mut self, bits: Vec<bool>) -> Self {
        self.initial_bits = bits;
        self
    }

    pub fn with_phi_grid(mut self, phi_grid: Vec<f64>) -> Self {
        self.phi_grid = phi_grid;
        self
    }

    pub fn at_time(&self, t: f64) -> Self {
        Self { t, ..self.clone() }
    }

    pub fn n_sites(&self) -> usize {
        self.dynamics.n_sites()
    }

    pub fn validate(&self) -> Result<()> {
        if self.v_op.site >= self.n_sites() {
            return Err(argument(format!("v_op site {} not in graph", self.v_op.site)));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(argument("evolution time must be finite and non-negative"));
        }
        if self.initial_bits.len() != self.n_sites() {
            return Err(argument("initial_bits length must equal the number of sites"));
        }
        if self.phi_grid.iter().any(|p| !p.is_finite()) {
            return Err(argument("phase grid must be finite"));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        StateVector::basis_state(self.n_sites(), &self.initial_bits)
    }

    fn is_polarized(&self) -> bool {
        self.initial_bits.iter().all(|b| !b)
    }
}

/// Butterfly state with the default perturbation angle `π/4`.
pub fn prepare_butterfly(spec: &ProtocolSpec) -> Result<StateVector> {
    prepare_butterfly_with_angle(spec, FRAC_PI_4)
}

/// `Σ_z U(t) Σ_z · e^{iθV} · U(t) |s⟩`.
pub fn prepare_butterfly_with_angle(spec: &ProtocolSpec, theta: f64) -> Result<StateVector> {
    spec.validate()?;
    let d = &spec.dynamics;
    let forward = d.propagate(&spec.initial_state()?, spec.t)?;
    let kicked = forward.apply_site_rotation(spec.v_op, theta)?;
    d.reverse_evolve(&kicked, spec.t)
}

/// Idealized signal imprint `e^{−iφ S_z}` with the lattice dynamics frozen.
pub fn sense(state: &StateVector, phi: f64) -> StateVector {
    state.global_z_phase(phi)
}

/// `⟨V(t)⟩` evaluated as `⟨V⟩` on `U(t)|ψ⟩`.
pub fn readout_expectation(state: &StateVector, spec: &ProtocolSpec) -> Result<f64> {
    let evolved = spec.dynamics.propagate(state, spec.t)?;
    evolved.expectation(spec.v_op)
}

/// `χ(φ) = Σ_{S_z} e^{−iφ S_z} P(S_z)`.
pub fn characteristic_sum(dist: &PolarizationDistribution, phi: f64) -> Complex64 {
    dist.iter()
        .map(|(s_z, w)| Complex64::from_polar(w, -phi * s_z))
        .sum()
}

/// `⟨S_z⟩`, `⟨S_z²⟩`, `⟨S_z³⟩` under a polarization distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mu: f64,
    pub m2: f64,
    pub m3: f64,
}

pub fn moments(dist: &PolarizationDistribution) -> MomentSet {
    let (mut mu, mut m2, mut m3) = (0.0, 0.0, 0.0);
    for (s, w) in dist.iter() {
        mu += w * s;
        m2 += w * s * s;
        m3 += w * s * s * s;
    }
    MomentSet { mu, m2, m3 }
}

/// Small-φ expansion `−φ(N/2 − μ) − φ³(m₃/6 − N m₂/4 + μN²/8 − N³/48)`.
pub fn taylor_expectation(m: &MomentSet, n: usize, phi: f64) -> Result<f64> {
    if !(phi.abs() < 0.5) {
        return Err(argument(format!("expansion needs |φ| < 0.5, got {phi}")));
    }
    let n = n as f64;
    let cubic = m.m3 / 6.0 - n * m.m2 / 4.0 + m.mu * n * n / 8.0 - n.powi(3) / 48.0;
    Ok(-phi * (n / 2.0 - m.mu) - phi.powi(3) * cubic)
}

/// `V(t)|0⟩`, the scrambled branch of the butterfly state.
pub fn scrambled_branch(spec: &ProtocolSpec) -> Result<StateVector> {
    spec.dynamics
        .heisenberg_apply(spec.v_op, &spec.initial_state()?, spec.t)
}

/// Closed form of the fringe for the polarized initial state, with
/// `ψ = V(t)|0⟩`:
///
/// `⟨V⟩_φ = ½⟨0|ψ⟩ + ½⟨ψ|e^{iφS_z} V(t) e^{−iφS_z}|ψ⟩ − Im[e^{iφN/2} χ(φ)]`.
///
/// When the first two terms vanish, the last one alone is checked against the
/// total.
pub fn analytic_expectation(spec: &ProtocolSpec, phi: f64) -> Result<f64> {
    spec.validate()?;
    if !spec.is_polarized() {
        return Err(argument("closed-form fringe needs the all-zeros initial state"));
    }
    let n = spec.n_sites() as f64;
    let zero = spec.initial_state()?;
    let psi = scrambled_branch(spec)?;
    let first = 0.5 * zero.inner(&psi);
    let rotated = psi.global_z_phase(phi);
    let second = 0.5 * rotated.inner(&spec.dynamics.heisenberg_apply(spec.v_op, &rotated, spec.t)?);
    let chi = characteristic_sum(&psi.polarization_distribution(), phi);
    let third = -(Complex64::from_polar(1.0, phi * n / 2.0) * chi).im;
    let total = first.re + second.re + third;
    if first.norm() <= 1e-9 && second.norm() <= 1e-9 && (total - third).abs() > 1e-9 {
        return Err(Error::Consistency("characteristic-sum form disagrees".into()));
    }
    Ok(total)
}

/// Readout expectations over a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeData {
    pub t: f64,
    pub phi: Vec<f64>,
    pub expectations: Vec<f64>,
    pub measured_op: SitePauli,
    pub n_sites: usize,
}

pub fn run_fringe(spec: &ProtocolSpec) -> Result<FringeData> {
    let prepared = prepare_butterfly(spec)?;
    let expectations = spec
        .phi_grid
        .par_iter()
        .map(|&phi| readout_expectation(&sense(&prepared, phi), spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeData {
        t: spec.t,
        phi: spec.phi_grid.clone(),
        expectations,
        measured_op: spec.v_op,
        n_sites: spec.n_sites(),
    })
}

/// Least-squares projector onto `[1, cos kφ, sin kφ]`, `k = 1…K`, for a fixed
/// phase grid. Reused across every fringe measured on the same grid.
#[derive(Debug, Clone)]
pub struct FourierDesign {
    phi: Vec<f64>,
    n_harmonics: usize,
    design: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl FourierDesign {
    pub fn new(phi: &[f64], n_harmonics: usize) -> Result<Self> {
        let cols = 2 * n_harmonics + 1;
        if phi.len() < cols {
            return Err(Error::Fit(format!(
                "{} phase points cannot determine {cols} Fourier coefficients",
                phi.len()
            )));
        }
        let design = DMatrix::from_fn(phi.len(), cols, |r, c| match c {
            0 => 1.0,
            c if c % 2 == 1 => (c.div_ceil(2) as f64 * phi[r]).cos(),
            c => ((c / 2) as f64 * phi[r]).sin(),
        });
        let svd = design.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-10 * smax) {
            return Err(Error::Fit("Fourier design matrix is singular".into()));
        }
        let pinv = svd
            .pseudo_inverse(0.0)
            .map_err(|e| Error::Fit(e.to_string()))?;
        Ok(Self {
            phi: phi.to_vec(),
            n_harmonics,
            design,
            pinv,
        })
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn fit(&self, values: &[f64]) -> Result<SensitivityResult> {
        if values.len() != self.phi.len() {
            return Err(argument("fringe length does not match the design grid"));
        }
        let y = DVector::from_column_slice(values);
        let coef = &self.pinv * &y;
        let residual_norm = (&self.design * &coef - &y).norm();
        let k = self.n_harmonics;
        let mut a = vec![coef[0]];
        let mut b = vec![0.0];
        for h in 1..=k {
            a.push(coef[2 * h - 1]);
            b.push(coef[2 * h]);
        }
        let slope: f64 = b.iter().enumerate().map(|(h, bh)| h as f64 * bh).sum();
        let m0: f64 = a.iter().sum();
        let delta_m = (1.0 - m0.clamp(-1.0, 1.0).powi(2)).sqrt();
        if !(delta_m > 1e-12) {
            return Err(Error::Fit(format!(
                "fitted ⟨M⟩(0) = {m0} leaves no projection noise to normalize by"
            )));
        }
        Ok(SensitivityResult {
            inv_eta: slope.abs() / delta_m,
            slope,
            delta_m,
            m0,
            a,
            b,
            residual_norm,
        })
    }
}

/// Outcome of a Fourier fit of one fringe.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    /// `|slope| / delta_m`.
    pub inv_eta: f64,
    /// `d⟨M⟩/dφ` at `φ = 0`.
    pub slope: f64,
    /// `√(1 − ⟨M⟩(0)²)`.
    pub delta_m: f64,
    /// Fitted `⟨M⟩(0)`.
    pub m0: f64,
    /// Cosine coefficients `a_0 … a_K`.
    pub a: Vec<f64>,
    /// Sine coefficients `b_0 … b_K`, with `b_0 = 0`.
    pub b: Vec<f64>,
    pub residual_norm: f64,
}

pub fn fit_fringe(data: &FringeData, n_harmonics: usize) -> Result<SensitivityResult> {
    FourierDesign::new(&data.phi, n_harmonics)?.fit(&data.expectations)
}

/// Three estimates of `1/η` at one evolution time.
///
/// The OTOC and moment columns rely on the polarized initial state and are
/// `NaN` for any other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub t: f64,
    pub inv_eta_fit: f64,
    pub inv_eta_otoc: f64,
    pub inv_eta_moment: f64,
}

pub fn sensitivity_point(spec: &ProtocolSpec, design: &FourierDesign) -> Result<SensitivityPoint> {
    let fringe = run_fringe(spec)?;
    let fit = design.fit(&fringe.expectations)?;
    let (otoc, moment) = if spec.is_polarized() {
        let init = spec.initial_state()?;
        let c = qubit_resolved_otoc(&spec.dynamics, spec.t, spec.v_op, &init)?;
        let m = moments(&scrambled_branch(spec)?.polarization_distribution());
        (
            otoc_sensitivity_oracle(&c)?,
            spec.n_sites() as f64 / 2.0 - m.mu,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SensitivityPoint {
        t: spec.t,
        inv_eta_fit: fit.inv_eta,
        inv_eta_otoc: otoc,
        inv_eta_moment: moment,
    })
}

/// `1/η` over a time grid, with `N` Fourier harmonics.
pub fn sensitivity_curve(spec: &ProtocolSpec, times: &[f64]) -> Result<Vec<SensitivityPoint>> {
    let design = FourierDesign::new(&spec.phi_grid, spec.n_sites())?;
    times
        .par_iter()
        .map(|&t| sensitivity_point(&spec.at_time(t), &design))
        .collect()
}

/// How initial states are chosen in [`scaling_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingMode {
    /// The first `N` entries of the given bits (all zeros if shorter).
    Fixed(Vec<bool>),
    /// `samples` distinct basis states per `N`, drawn without replacement.
    Random { samples: usize, seed: u64 },
}

impl ScalingMode {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingMode::Fixed(_) => "fixed",
            ScalingMode::Random { .. } => "random",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub n_list: Vec<usize>,
    pub mode: ScalingMode,
    pub coupling_mhz: f64,
    pub v_op: SitePauli,
    pub times: Vec<f64>,
    pub phi_grid: Vec<f64>,
}

impl ScalingConfig {
    pub fn new(n_list: Vec<usize>, mode: ScalingMode) -> Self {
        Self {
            n_list,
            mode,
            coupling_mhz: crate::lattice::DEFAULT_COUPLING_MHZ,
            v_op: SitePauli::x(0),
            times: default_time_grid(),
            phi_grid: default_phi_grid(),
        }
    }
}

/// Peak `1/η` for one sub-lattice size.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub mode: &'static str,
    /// Maximum over the time grid of the (sample-mean) `1/η` curve.
    pub inv_eta_max: f64,
    /// First time at which the maximum is reached.
    pub t_opt: f64,
    /// Sample standard deviation of `1/η` at `t_opt`; 0 for fixed mode.
    pub std: f64,
    pub samples: usize,
    /// `√N`.
    pub sql: f64,
    /// `N/2`.
    pub butterfly_bound: f64,
    /// `N`.
    pub heisenberg: f64,
}

fn bits_of(n: usize, index: usize) -> Vec<bool> {
    (0..n).map(|site| index & (1 << (n - 1 - site)) != 0).collect()
}

pub fn scaling_sweep(config: &ScalingConfig) -> Result<Vec<ScalingRow>> {
    if config.times.is_empty() {
        return Err(argument("scaling sweep needs a non-empty time grid"));
    }
    let cross = cross_lattice_9();
    config
        .n_list
        .iter()
        .map(|&n| {
            let graph = sub_lattice(&cross, n)?;
            let terms = HamiltonianTerms::uniform(&graph, config.coupling_mhz);
            let dynamics = Arc::new(LatticeDynamics::new(graph, terms)?);
            let base = ProtocolSpec::new(dynamics, 0.0)
                .with_v_op(config.v_op)
                .with_phi_grid(config.phi_grid.clone());
            let initials: Vec<Vec<bool>> = match &config.mode {
                ScalingMode::Fixed(bits) => {
                    let mut b: Vec<bool> = bits.iter().copied().take(n).collect();
                    b.resize(n, false);
                    vec![b]
                }
                ScalingMode::Random { samples, seed } => {
                    if *samples == 0 {
                        return Err(argument("random mode needs at least one sample"));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(n as u64);
                    let dim = 1usize << n;
                    sample(&mut rng, dim, (*samples).min(dim))
                        .into_iter()
                        .map(|idx| bits_of(n, idx))
                        .collect()
                }
            };
            let curves: Vec<Vec<f64>> = initials
                .into_iter()
                .map(|bits| {
                    let spec = base.clone().with_initial_bits(bits);
                    Ok(sensitivity_curve(&spec, &config.times)?
                        .into_iter()
                        .map(|p| p.inv_eta_fit)
                        .collect())
                })
                .collect::<Result<_>>()?;
            let count = curves.len() as f64;
            let mean: Vec<f64> = (0..config.times.len())
                .map(|k| curves.iter().map(|c| c[k]).sum::<f64>() / count)
                .collect();
            let (k_opt, &max) = mean
                .iter()
                .enumerate()
                .fold((0, &mean[0]), |best, (k, v)| if *v > *best.1 { (k, v) } else { best });
            let std = if curves.len() > 1 {
                let ss: f64 = curves.iter().map(|c| (c[k_opt] - max).powi(2)).sum();
                (ss / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            let nf = n as f64;
            Ok(ScalingRow {
                n,
                mode: config.mode.name(),
                inv_eta_max: max,
                t_opt: config.times[k_opt],
                std,
                samples: curves.len(),
                sql: nf.sqrt(),
                butterfly_bound: nf / 2.0,
                heisenberg: nf,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CouplingGraph, cross_lattice_9};

    fn spec(graph: CouplingGraph, coupling_mhz: f64, t: f64) -> ProtocolSpec {
        let terms = HamiltonianTerms::uniform(&graph, coupling_mhz);
        ProtocolSpec::new(Arc::new(LatticeDynamics::new(graph, terms).unwrap()), t)
    }

    fn single() -> ProtocolSpec {
        spec(CouplingGraph::new(1, &[]).unwrap(), 5.0, 0.0)
    }

    #[test]
    fn single_qubit_fringe_is_minus_sine() {
        let s = single();
        let data = run_fringe(&s).unwrap();
        for (phi, m) in data.phi.iter().zip(&data.expectations) {
            assert!((m + phi.sin()).abs() < 1e-12);
            assert!((analytic_expectation(&s, *phi).unwrap() + phi.sin()).abs() < 1e-12);
        }
        let fit = fit_fringe(&data, 1).unwrap();
        assert!((fit.b[1] + 1.0).abs() < 1e-9);
        assert!(fit.a.iter().all(|a| a.abs() < 1e-9));
        assert!((fit.inv_eta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fit_of_constant_and_too_few_points() {
        let phi = default_phi_grid();
        let data = FringeData {
            t: 0.0,
            expectations: vec![0.3; phi.len()],
            phi: phi.clone(),
            measured_op: SitePauli::x(0),
            n_sites: 1,
        };
        let fit = fit_fringe(&data, 3).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!(fit.inv_eta.abs() < 1e-12);
        assert!(FourierDesign::new(&phi[..4], 2).is_err());
        let ones = FringeData { expectations: vec![1.0; phi.len()], ..data };
        assert!(fit_fringe(&ones, 3).is_err());
    }

    #[test]
    fn characteristic_sum_cases() {
        let top = PolarizationDistribution::from_excitation_weights(3, vec![1.0, 0.0, 0.0, 0.0]);
        let chi = characteristic_sum(&top, 0.7);
        assert!((chi - Complex64::from_polar(1.0, -0.7 * 1.5)).norm() < 1e-15);
        let two = PolarizationDistribution::from_excitation_weights(1, vec![0.5, 0.5]);
        assert!((characteristic_sum(&two, 0.9) - Complex64::new((0.45f64).cos(), 0.0)).norm() < 1e-15);
        assert!((characteristic_sum(&two, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let m = moments(&two);
        assert!(m.mu.abs() < 1e-15 && m.m3.abs() < 1e-15);
        let mt = moments(&top);
        assert_eq!((mt.mu, mt.m2), (1.5, 2.25));
    }

    #[test]
    fn polarized_moments_kill_the_expansion() {
        for n in 1..=9 {
            let h = n as f64 / 2.0;
            let m = MomentSet { mu: h, m2: h * h, m3: h * h * h };
            for phi in [-0.4, 0.1, 0.3] {
                assert!(taylor_expectation(&m, n, phi).unwrap().abs() < 1e-12);
            }
        }
        let m = MomentSet { mu: 0.0, m2: 0.0, m3: 0.0 };
        assert!(taylor_expectation(&m, 3, 0.6).is_err());
    }

    #[test]
    fn zero_angle_perturbation_cancels() {
        let s = spec(cross_lattice_9(), 5.0, 80.0);
        let out = prepare_butterfly_with_angle(&s, 0.0).unwrap();
        assert!(out.fidelity(&s.initial_state().unwrap()) >= 1.0 - 1e-9);
    }

    #[test]
    fn butterfly_state_at_zero_time() {
        let s = spec(cross_lattice_9(), 5.0, 0.0);
        let out = prepare_butterfly(&s).unwrap();
        let zero = s.initial_state().unwrap();
        let v = zero.apply_pauli(SitePauli::x(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected: Vec<Complex64> = zero
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(a, b)| (a + Complex64::new(0.0, 1.0) * b) * r)
            .collect();
        let expected = StateVector::from_amplitudes(9, expected).unwrap();
        assert!(out.distance(&expected) < 1e-12);
    }

    #[test]
    fn fringe_periodic_and_grid_order_free() {
        let s = spec(cross_lattice_9(), 5.0, 50.0)
            .with_initial_bits(vec![true, false, true, false, false, true, false, false, true])
            .with_phi_grid(vec![-PI, -1.0, 0.0, 0.5, PI]);
        let data = run_fringe(&s).unwrap();
        assert!((data.expectations[0] - data.expectations[4]).abs() < 1e-9);
        let mut rev = s.phi_grid.clone();
        rev.reverse();
        let back = run_fringe(&s.clone().with_phi_grid(rev)).unwrap();
        let mut e = back.expectations.clone();
        e.reverse();
        assert_eq!(e, data.expectations);
    }

    #[test]
    fn no_coupling_means_no_dynamics() {
        let s0 = spec(cross_lattice_9(), 0.0, 0.0);
        let s1 = s0.at_time(137.0);
        assert_eq!(run_fringe(&s0).unwrap().expectations, run_fringe(&s1).unwrap().expectations);
    }

    #[test]
    fn scaling_single_site_is_one() {
        let mut cfg = ScalingConfig::new(vec![1], ScalingMode::Fixed(vec![]));
        cfg.times = vec![0.0, 50.0];
        let row = &scaling_sweep(&cfg).unwrap()[0];
        assert!((row.inv_eta_max - 1.0).abs() < 1e-9);
        assert_eq!(row.t_opt, 0.0);
        assert_eq!(row.sql, 1.0);
    }

    #[test]
    fn random_mode_is_reproducible() {
        let mut cfg = ScalingConfig::new(vec![3, 4], ScalingMode::Random { samples: 3, seed: 8 });
        cfg.times = vec![0.0, 40.0, 80.0];
        let a = scaling_sweep(&cfg).unwrap();
        assert_eq!(a, scaling_sweep(&cfg).unwrap());
        assert!(a.iter().all(|r| r.samples == 3 && r.mode == "random"));
    }
}
