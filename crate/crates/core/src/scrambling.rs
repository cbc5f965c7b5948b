//! Loschmidt echo and out-of-time-order correlators.
//!
//! Heisenberg operators `W(t) = U†(t) W U(t)` are never formed as matrices;
//! they are applied to state copies by propagating forward, applying `W`, and
//! propagating back.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::evolve::{propagate, reverse_evolve, Propagator};
use crate::lattice::{mhz_to_rad_per_ns, two_coloring, Bipartition, CouplingGraph, HamiltonianTerms};
use crate::qstate::{site_mask, Axis, SitePauli, StateVector};

/// A lattice Hamiltonian together with its factorized propagator and the
/// two-colouring used for time reversal.
#[derive(Debug)]
pub struct LatticeDynamics {
    graph: CouplingGraph,
    terms: HamiltonianTerms,
    propagator: Propagator,
    bipartition: Bipartition,
}

impl LatticeDynamics {
    pub fn new(graph: CouplingGraph, terms: HamiltonianTerms) -> Result<Self> {
        let propagator = Propagator::from_lattice(&graph, &terms)?;
        let bipartition = two_coloring(&graph)?;
        Ok(Self {
            graph,
            terms,
            propagator,
            bipartition,
        })
    }

    pub fn graph(&self) -> &CouplingGraph {
        &self.graph
    }

    pub fn terms(&self) -> &HamiltonianTerms {
        &self.terms
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn bipartition(&self) -> &Bipartition {
        &self.bipartition
    }

    pub fn n_sites(&self) -> usize {
        self.graph.n_sites()
    }

    pub fn propagate(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        propagate(state, &self.propagator, t)
    }

    pub fn reverse_evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        reverse_evolve(state, &self.propagator, t, &self.bipartition)
    }

    /// `U†(t) P U(t) |ψ⟩`.
    pub fn heisenberg_apply(&self, op: SitePauli, state: &StateVector, t: f64) -> Result<StateVector> {
        let forward = self.propagate(state, t)?;
        self.propagate(&forward.apply_pauli(op)?, -t)
    }

    fn check_op(&self, op: SitePauli) -> Result<()> {
        if op.site >= self.n_sites() {
            return Err(argument(format!("site {} not in graph", op.site)));
        }
        Ok(())
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_sites() != self.n_sites() {
            return Err(argument("state size does not match the lattice"));
        }
        if (state.norm() - 1.0).abs() > 1e-9 {
            return Err(argument("initial state must be normalized"));
        }
        Ok(())
    }
}

/// Echo fidelity versus time.
///
/// `fidelity_ideal` is the run with the Hamiltonian as given. The `_mean`,
/// `_std` and probe columns come from the disorder-averaged run when one was
/// requested and repeat the ideal values otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoCurve {
    pub times: Vec<f64>,
    pub fidelity_ideal: Vec<f64>,
    pub fidelity_mean: Vec<f64>,
    pub fidelity_std: Vec<f64>,
    /// Probability that the probe site is still excited after the echo.
    pub probe_return_mean: Vec<f64>,
    pub realizations: usize,
}

/// Static detuning disorder for [`loschmidt_echo`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningDisorder {
    /// `σ_f` in MHz.
    pub sigma_mhz: f64,
    pub realizations: usize,
    pub seed: u64,
}

fn clip_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Returns `(full-state fidelity, probe excitation probability)` per time.
fn echo_trace(
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    bipartition: &Bipartition,
    times: &[f64],
    probe_site: usize,
) -> Result<Vec<(f64, f64)>> {
    let n = graph.n_sites();
    let initial = StateVector::basis_index(n, site_mask(n, probe_site))?;
    let prop = Propagator::from_lattice(graph, terms)?;
    times
        .iter()
        .map(|&t| {
            let forward = propagate(&initial, &prop, t)?;
            let back = reverse_evolve(&forward, &prop, t, bipartition)?;
            Ok((
                clip_unit(back.fidelity(&initial)),
                clip_unit(back.excitation_probability(probe_site)),
            ))
        })
        .collect()
}

/// Forward evolution followed by `σ_z`-sandwich reversal, starting from the
/// probe site excited and every other site in `|0⟩`.
///
/// With `disorder`, each realization adds an independent static Gaussian
/// offset `Δω_i ~ N(0, (2π σ_f)²)` to every site's detuning. Realization `r`
/// draws from the ChaCha8 stream `r` of `seed`.
pub fn loschmidt_echo(
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    times: &[f64],
    probe_site: usize,
    disorder: Option<DetuningDisorder>,
) -> Result<EchoCurve> {
    if probe_site >= graph.n_sites() {
        return Err(argument(format!("probe site {probe_site} not in graph")));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(argument("echo times must be finite and non-negative"));
    }
    terms.validate(graph)?;
    let bipartition = two_coloring(graph)?;
    let ideal = echo_trace(graph, terms, &bipartition, times, probe_site)?;
    let fidelity_ideal: Vec<f64> = ideal.iter().map(|p| p.0).collect();

    let Some(d) = disorder else {
        return Ok(EchoCurve {
            times: times.to_vec(),
            fidelity_mean: fidelity_ideal.clone(),
            fidelity_std: vec![0.0; times.len()],
            probe_return_mean: ideal.iter().map(|p| p.1).collect(),
            fidelity_ideal,
            realizations: 0,
        });
    };
    if d.realizations == 0 {
        return Err(argument("disorder averaging needs at least one realization"));
    }
    if !(d.sigma_mhz >= 0.0 && d.sigma_mhz.is_finite()) {
        return Err(argument("detuning sigma must be finite and non-negative"));
    }
    let normal = Normal::new(0.0, mhz_to_rad_per_ns(d.sigma_mhz))
        .map_err(|e| argument(e.to_string()))?;
    let runs: Vec<Vec<(f64, f64)>> = (0..d.realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
            rng.set_stream(r as u64);
            let mut disordered = terms.clone();
            for det in &mut disordered.detunings {
                *det += normal.sample(&mut rng);
            }
            echo_trace(graph, &disordered, &bipartition, times, probe_site)
        })
        .collect::<Result<_>>()?;

    let count = d.realizations as f64;
    let mut mean = vec![0.0; times.len()];
    let mut probe = vec![0.0; times.len()];
    for run in &runs {
        for (k, &(f, p)) in run.iter().enumerate() {
            mean[k] += f;
            probe[k] += p;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count);
    probe.iter_mut().for_each(|p| *p /= count);
    let std = (0..times.len())
        .map(|k| {
            if d.realizations < 2 {
                return 0.0;
            }
            let ss: f64 = runs.iter().map(|run| (run[k].0 - mean[k]).powi(2)).sum();
            (ss / (count - 1.0)).sqrt()
        })
        .collect();
    Ok(EchoCurve {
        times: times.to_vec(),
        fidelity_ideal,
        fidelity_mean: mean,
        fidelity_std: std,
        probe_return_mean: probe,
        realizations: d.realizations,
    })
}

/// `W(t) V W(t) V |ψ⟩`, applied right to left.
fn otoc_string(
    dynamics: &LatticeDynamics,
    t: f64,
    w: SitePauli,
    v: SitePauli,
    state: &StateVector,
) -> Result<StateVector> {
    let a = state.apply_pauli(v)?;
    let b = dynamics.heisenberg_apply(w, &a, t)?;
    let c = b.apply_pauli(v)?;
    dynamics.heisenberg_apply(w, &c, t)
}

/// `F(t) = ⟨ψ| W(t) V W(t) V |ψ⟩`.
pub fn otoc_f(
    dynamics: &LatticeDynamics,
    t: f64,
    w: SitePauli,
    v: SitePauli,
    initial: &StateVector,
) -> Result<Complex64> {
    dynamics.check_op(w)?;
    dynamics.check_op(v)?;
    dynamics.check_state(initial)?;
    let f = initial.inner(&otoc_string(dynamics, t, w, v, initial)?);
    if f.norm() > 1.0 + 1e-9 {
        return Err(Error::Consistency(format!("|F| = {} exceeds 1", f.norm())));
    }
    Ok(f)
}

/// Squared commutator `C(t) = 2 − 2 Re F(t)`.
pub fn otoc_c(
    dynamics: &LatticeDynamics,
    t: f64,
    w: SitePauli,
    v: SitePauli,
    initial: &StateVector,
) -> Result<f64> {
    Ok(2.0 - 2.0 * otoc_f(dynamics, t, w, v, initial)?.re)
}

/// `⟨ψ| P W(t) V W(t) P |ψ⟩` with `P = (1 + sign·V)/norm`.
pub(crate) fn pseudo_projected(
    dynamics: &LatticeDynamics,
    t: f64,
    w: SitePauli,
    v: SitePauli,
    initial: &StateVector,
    sign: f64,
    norm: f64,
) -> Result<Complex64> {
    let flipped = initial.apply_pauli(v)?;
    let projected = StateVector::from_raw(
        initial.n_sites(),
        initial
            .amplitudes()
            .iter()
            .zip(flipped.amplitudes())
            .map(|(a, b)| (a + sign * b) / norm)
            .collect(),
    );
    let wt = dynamics.heisenberg_apply(w, &projected, t)?;
    let middle = dynamics.heisenberg_apply(w, &wt.apply_pauli(v)?, t)?;
    Ok(projected.inner(&middle))
}

/// `C`, `C₊`, `C₋` for `V = σ_x` on `i_site` and `W = σ_z` on `j_site`.
///
/// `C₊` and `C₋` sandwich `W(t) V W(t)` between `(1 ± V)/√2`; together they
/// satisfy `C = 2 + C₋ − C₊`, which is checked against an independent
/// evaluation of `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocDecomposition {
    pub f: Complex64,
    pub c: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

pub fn otoc_c_decomposed(
    dynamics: &LatticeDynamics,
    t: f64,
    i_site: usize,
    j_site: usize,
    initial: &StateVector,
) -> Result<OtocDecomposition> {
    let v = SitePauli::x(i_site);
    let w = SitePauli::z(j_site);
    let f = otoc_f(dynamics, t, w, v, initial)?;
    let c = 2.0 - 2.0 * f.re;
    let sqrt2 = std::f64::consts::SQRT_2;
    let plus = pseudo_projected(dynamics, t, w, v, initial, 1.0, sqrt2)?;
    let minus = pseudo_projected(dynamics, t, w, v, initial, -1.0, sqrt2)?;
    for (name, value) in [("C+", plus), ("C-", minus)] {
        if value.im.abs() > 1e-9 {
            return Err(Error::Consistency(format!("{name} has imaginary part {}", value.im)));
        }
    }
    let (c_plus, c_minus) = (plus.re, minus.re);
    let mismatch = (c - (2.0 + c_minus - c_plus)).abs();
    if mismatch > 1e-9 {
        return Err(Error::Consistency(format!(
            "C = 2 + C- - C+ violated by {mismatch:e}"
        )));
    }
    Ok(OtocDecomposition {
        f,
        c,
        c_plus,
        c_minus,
    })
}

/// `C_i(t) = ⟨s| σ_i^z V(t) σ_i^z V(t) |s⟩` for every site `i`.
///
/// Restricted to computational basis states `|s⟩`, where it reduces to
/// `z_i(s) ⟨s|V(t) σ_i^z V(t)|s⟩`.
pub fn qubit_resolved_otoc(
    dynamics: &LatticeDynamics,
    t: f64,
    v: SitePauli,
    initial: &StateVector,
) -> Result<Vec<f64>> {
    dynamics.check_op(v)?;
    dynamics.check_state(initial)?;
    let s = initial
        .as_basis_index()
        .ok_or_else(|| argument("qubit-resolved OTOC needs a computational basis state"))?;
    let n = dynamics.n_sites();
    let scrambled = dynamics.heisenberg_apply(v, initial, t)?;
    (0..n)
        .map(|i| {
            let z_s = if s & site_mask(n, i) == 0 { 1.0 } else { -1.0 };
            let c = z_s * scrambled.expectation(SitePauli::new(i, Axis::Z))?;
            if c.abs() > 1.0 + 1e-9 {
                return Err(Error::Consistency(format!("C_{i} = {c} outside [-1, 1]")));
            }
            Ok(c)
        })
        .collect()
}

/// `1/η = ½ Σ_i (1 − C_i)`.
pub fn otoc_sensitivity_oracle(c_values: &[f64]) -> Result<f64> {
    if let Some(c) = c_values.iter().find(|c| !(c.abs() <= 1.0 + 1e-9)) {
        return Err(argument(format!("C_i = {c} outside [-1, 1]")));
    }
    Ok(0.5 * c_values.iter().map(|c| 1.0 - c).sum::<f64>())
}

/// OTOC time series for `V = σ_x(v_site)`, `W = σ_z(w_site)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OtocCurve {
    pub times: Vec<f64>,
    pub f_values: Vec<Complex64>,
    pub c_values: Vec<f64>,
    pub c_plus: Vec<f64>,
    pub c_minus: Vec<f64>,
}

pub fn otoc_curve(
    dynamics: &LatticeDynamics,
    times: &[f64],
    v_site: usize,
    w_site: usize,
    initial: &StateVector,
) -> Result<OtocCurve> {
    let rows: Vec<OtocDecomposition> = times
        .par_iter()
        .map(|&t| otoc_c_decomposed(dynamics, t, v_site, w_site, initial))
        .collect::<Result<_>>()?;
    Ok(OtocCurve {
        times: times.to_vec(),
        f_values: rows.iter().map(|r| r.f).collect(),
        c_values: rows.iter().map(|r| r.c).collect(),
        c_plus: rows.iter().map(|r| r.c_plus).collect(),
        c_minus: rows.iter().map(|r| r.c_minus).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cross_lattice_9;

    fn cross() -> LatticeDynamics {
        let g = cross_lattice_9();
        let terms = HamiltonianTerms::uniform(&g, 5.0);
        LatticeDynamics::new(g, terms).unwrap()
    }

    fn zero9() -> StateVector {
        StateVector::basis_index(9, 0).unwrap()
    }

    #[test]
    fn otoc_at_zero_time() {
        let d = cross();
        let f = otoc_f(&d, 0.0, SitePauli::x(5), SitePauli::x(0), &zero9()).unwrap();
        assert_eq!(f, Complex64::new(1.0, 0.0));
        let f = otoc_f(&d, 0.0, SitePauli::x(0), SitePauli::z(0), &zero9()).unwrap();
        assert!((f - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let c = otoc_c(&d, 0.0, SitePauli::x(0), SitePauli::z(0), &zero9()).unwrap();
        assert!((c - 4.0).abs() < 1e-15);
        assert_eq!(otoc_c(&d, 0.0, SitePauli::z(5), SitePauli::x(0), &zero9()).unwrap(), 0.0);
    }

    #[test]
    fn decomposition_identity_and_wrong_normalization() {
        let d = cross();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let psi = StateVector::random(9, &mut rng).unwrap();
        let dec = otoc_c_decomposed(&d, 100.0, 1, 0, &psi).unwrap();
        assert!((dec.c - (2.0 + dec.c_minus - dec.c_plus)).abs() < 1e-9);

        let dec0 = otoc_c_decomposed(&d, 0.0, 1, 5, &zero9()).unwrap();
        assert!(dec0.c.abs() < 1e-12);

        // (1 ± V)/2 instead of (1 ± V)/√2 halves C₊ − C₋.
        let (w, v) = (SitePauli::z(0), SitePauli::x(1));
        let p = pseudo_projected(&d, 100.0, w, v, &psi, 1.0, 2.0).unwrap().re;
        let m = pseudo_projected(&d, 100.0, w, v, &psi, -1.0, 2.0).unwrap().re;
        let broken = 2.0 + m - p;
        assert!((dec.c - broken).abs() > 1e-3);
        assert!(((p - m) * 2.0 - (dec.c_plus - dec.c_minus)).abs() < 1e-9);
    }

    #[test]
    fn qubit_resolved_at_zero_time() {
        let d = cross();
        let c = qubit_resolved_otoc(&d, 0.0, SitePauli::x(0), &zero9()).unwrap();
        assert!((c[0] + 1.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!((otoc_sensitivity_oracle(&c).unwrap() - 1.0).abs() < 1e-15);
        let cz = qubit_resolved_otoc(&d, 0.0, SitePauli::z(0), &zero9()).unwrap();
        assert!(cz.iter().all(|&x| (x - 1.0).abs() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = StateVector::random(9, &mut rng).unwrap();
        assert!(qubit_resolved_otoc(&d, 0.0, SitePauli::x(0), &psi).is_err());
    }

    #[test]
    fn oracle_values() {
        assert_eq!(otoc_sensitivity_oracle(&[1.0; 9]).unwrap(), 0.0);
        assert_eq!(otoc_sensitivity_oracle(&[0.0; 9]).unwrap(), 4.5);
        assert!(otoc_sensitivity_oracle(&[1.5]).is_err());
        let base = [0.2, 0.4, -0.3];
        let lower = [0.2, 0.1, -0.3];
        assert!(otoc_sensitivity_oracle(&lower).unwrap() > otoc_sensitivity_oracle(&base).unwrap());
    }

    #[test]
    fn echo_without_disorder_is_perfect() {
        let g = cross_lattice_9();
        let terms = HamiltonianTerms::uniform(&g, 5.0);
        let times: Vec<f64> = (0..=40).map(|k| 5.0 * k as f64).collect();
        let curve = loschmidt_echo(&g, &terms, &times, 0, None).unwrap();
        assert!(curve.fidelity_ideal.iter().all(|f| (f - 1.0).abs() < 1e-9));
        assert!(curve.probe_return_mean.iter().all(|f| (f - 1.0).abs() < 1e-9));

        let single = CouplingGraph::new(1, &[]).unwrap();
        let t1 = HamiltonianTerms::uniform(&single, 5.0);
        let c = loschmidt_echo(&single, &t1, &times, 0, None).unwrap();
        assert!(c.fidelity_ideal.iter().all(|f| (f - 1.0).abs() < 1e-12));
        assert!(loschmidt_echo(&g, &terms, &times, 9, None).is_err());
    }

    #[test]
    fn echo_disorder_is_reproducible() {
        let g = cross_lattice_9();
        let terms = HamiltonianTerms::uniform(&g, 5.0);
        let times = [0.0, 100.0, 200.0];
        let disorder = Some(DetuningDisorder {
            sigma_mhz: 3.0,
            realizations: 20,
            seed: 4,
        });
        let a = loschmidt_echo(&g, &terms, &times, 0, disorder).unwrap();
        let b = loschmidt_echo(&g, &terms, &times, 0, disorder).unwrap();
        assert_eq!(a, b);
        assert!((a.fidelity_mean[0] - 1.0).abs() < 1e-12);
        assert!(a.fidelity_mean[2] < 1.0);
    }
}
