//! Pure states of up to [`MAX_SITES`] two-level sites and single-site Pauli algebra.
//!
//! Basis convention: bit value 0 at a site is the `+1` eigenstate of `σ_z`, so the
//! all-zeros state carries `S_z = +N/2`. Site 0 is the most significant bit of the
//! basis index.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Error, Result};

/// Largest supported register.
pub const MAX_SITES: usize = 12;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Identity,
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "identity" => Ok(Axis::Identity),
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(argument(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// A Pauli operator acting on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SitePauli {
    pub site: usize,
    pub axis: Axis,
}

impl SitePauli {
    pub fn new(site: usize, axis: Axis) -> Self {
        Self { site, axis }
    }

    pub fn x(site: usize) -> Self {
        Self::new(site, Axis::X)
    }

    pub fn y(site: usize) -> Self {
        Self::new(site, Axis::Y)
    }

    pub fn z(site: usize) -> Self {
        Self::new(site, Axis::Z)
    }
}

/// Bit mask of `site` inside a basis index of an `n_sites` register.
#[inline]
pub fn site_mask(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - 1 - site)
}

/// `S_z` of a computational basis index: `N/2` minus the number of excitations.
#[inline]
pub fn basis_s_z(n_sites: usize, index: usize) -> f64 {
    n_sites as f64 / 2.0 - index.count_ones() as f64
}

/// Normalized complex amplitudes over the `2^n_sites` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(argument(format!(
            "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state; `bits[i]` is the occupation of site `i`.
    pub fn basis_state(n_sites: usize, bits: &[bool]) -> Result<Self> {
        check_sites(n_sites)?;
        if bits.len() != n_sites {
            return Err(argument(format!(
                "expected {n_sites} bits, got {}",
                bits.len()
            )));
        }
        let index = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0usize, |acc, (site, _)| acc | site_mask(n_sites, site));
        Self::basis_index(n_sites, index)
    }

    pub fn basis_index(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(argument(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// The polarized state `|0…0⟩`.
    pub fn zeros(n_sites: usize) -> Result<Self> {
        Self::basis_index(n_sites, 0)
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_sites(n_sites)?;
        if amplitudes.len() != 1usize << n_sites {
            return Err(argument(format!(
                "expected {} amplitudes, got {}",
                1usize << n_sites,
                amplitudes.len()
            )));
        }
        let state = Self {
            n_sites,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(argument(format!("state is not normalized (norm {norm})")));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_sites: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_sites(n_sites)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(argument("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n_sites, amplitudes)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        check_sites(n_sites)?;
        let amps = (0..1usize << n_sites)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(n_sites, amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Crate-internal constructor for operations known to preserve the norm.
    pub(crate) fn from_raw(n_sites: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n_sites);
        Self {
            n_sites,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude-wise distance, `‖self − other‖₂`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Index of the basis state this vector equals up to a phase, if any.
    pub fn as_basis_index(&self) -> Option<usize> {
        let (idx, amp) = self
            .amplitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))?;
        ((amp.norm_sqr() - 1.0).abs() <= 1e-12).then_some(idx)
    }

    /// Probability that `site` is excited.
    pub fn excitation_probability(&self, site: usize) -> f64 {
        let mask = site_mask(self.n_sites, site);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_op(&self, op: SitePauli) -> Result<()> {
        if op.site >= self.n_sites {
            return Err(argument(format!(
                "site {} out of range for {} sites",
                op.site, self.n_sites
            )));
        }
        Ok(())
    }

    /// `P|ψ⟩` for a single-site Pauli.
    pub fn apply_pauli(&self, op: SitePauli) -> Result<StateVector> {
        self.check_op(op)?;
        let mask = site_mask(self.n_sites, op.site);
        let src = &self.amplitudes;
        let i = Complex64::new(0.0, 1.0);
        let out: Vec<Complex64> = match op.axis {
            Axis::Identity => src.clone(),
            Axis::X => (0..src.len()).map(|s| src[s ^ mask]).collect(),
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
            Axis::Y => (0..src.len())
                .map(|s| {
                    if s & mask != 0 {
                        i * src[s ^ mask]
                    } else {
                        -i * src[s ^ mask]
                    }
                })
                .collect(),
            Axis::Z => (0..src.len())
                .map(|s| if s & mask != 0 { -src[s] } else { src[s] })
                .collect(),
        };
        Ok(Self::from_raw(self.n_sites, out))
    }

    /// `exp(iθP)|ψ⟩ = (cos θ + i sin θ P)|ψ⟩`; `θ = π/4` gives `(I + iP)/√2`.
    pub fn apply_site_rotation(&self, op: SitePauli, theta: f64) -> Result<StateVector> {
        if op.axis == Axis::Identity {
            return Err(argument("rotation axis must be X, Y or Z"));
        }
        let flipped = self.apply_pauli(op)?;
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let out = self
            .amplitudes
            .iter()
            .zip(flipped.amplitudes)
            .map(|(a, p)| a * c + is * p)
            .collect();
        Ok(Self::from_raw(self.n_sites, out))
    }

    /// Product of `σ_z` over `sites`: every amplitude picks up
    /// `(−1)^(excitations among sites)`.
    pub fn apply_sublattice_z(&self, sites: &[usize]) -> Result<StateVector> {
        let mut mask = 0usize;
        for &site in sites {
            if site >= self.n_sites {
                return Err(argument(format!("site {site} out of range")));
            }
            mask |= site_mask(self.n_sites, site);
        }
        let out = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(s, &a)| if (s & mask).count_ones() % 2 == 1 { -a } else { a })
            .collect();
        Ok(Self::from_raw(self.n_sites, out))
    }

    /// `⟨ψ|P|ψ⟩`, which is real for a Hermitian Pauli.
    pub fn expectation(&self, op: SitePauli) -> Result<f64> {
        let applied = self.apply_pauli(op)?;
        let value = self.inner(&applied);
        if value.im.abs() > 1e-9 {
            return Err(Error::Consistency(format!(
                "expectation of {op:?} has imaginary part {}",
                value.im
            )));
        }
        Ok(value.re)
    }

    /// `⟨ψ|S_z|ψ⟩` accumulated site by site.
    pub fn total_s_z(&self) -> Result<f64> {
        (0..self.n_sites)
            .map(|site| self.expectation(SitePauli::z(site)).map(|v| v / 2.0))
            .sum()
    }

    /// `exp(−iφ S_z)|ψ⟩`.
    pub fn global_z_phase(&self, phi: f64) -> StateVector {
        let n = self.n_sites;
        // Only N+1 distinct phases.
        let phases: Vec<Complex64> = (0..=n)
            .map(|k| Complex64::from_polar(1.0, -phi * (n as f64 / 2.0 - k as f64)))
            .collect();
        let out = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(s, &a)| a * phases[s.count_ones() as usize])
            .collect();
        Self::from_raw(n, out)
    }

    /// Distribution of `S_z` over the computational basis.
    pub fn polarization_distribution(&self) -> PolarizationDistribution {
        let mut weights = vec![0.0; self.n_sites + 1];
        for (s, a) in self.amplitudes.iter().enumerate() {
            weights[s.count_ones() as usize] += a.norm_sqr();
        }
        PolarizationDistribution::from_excitation_weights(self.n_sites, weights)
    }
}

/// `P(S_z)` for `S_z ∈ {−N/2, …, N/2}`.
///
/// Stored by excitation count `k`, with `S_z = N/2 − k`, so the half-integer
/// values never pass through floating-point keys.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationDistribution {
    n_sites: usize,
    weights: Vec<f64>,
}

impl PolarizationDistribution {
    /// Weights indexed by excitation count; tiny negatives are clipped to zero.
    pub fn from_excitation_weights(n_sites: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), n_sites + 1, "need N+1 weights");
        let weights = weights
            .into_iter()
            .map(|w| {
                debug_assert!(w >= -1e-12, "negative weight {w}");
                w.max(0.0)
            })
            .collect();
        Self { n_sites, weights }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `N/2`.
    pub fn half_n(&self) -> f64 {
        self.n_sites as f64 / 2.0
    }

    /// Weight of `S_z = N/2 − excitations`.
    pub fn by_excitations(&self, excitations: usize) -> f64 {
        self.weights.get(excitations).copied().unwrap_or(0.0)
    }

    /// Weight at a given `S_z`; values off the half-integer lattice have weight 0.
    pub fn weight(&self, s_z: f64) -> f64 {
        let k = self.half_n() - s_z;
        if k < -0.25 || (k - k.round()).abs() > 1e-9 {
            return 0.0;
        }
        self.by_excitations(k.round() as usize)
    }

    /// `(S_z, P(S_z))` pairs from `S_z = N/2` downward.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = self.half_n();
        self.weights
            .iter()
            .enumerate()
            .map(move |(k, &w)| (half - k as f64, w))
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}
