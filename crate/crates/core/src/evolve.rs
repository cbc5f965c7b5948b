//! Exact propagation `|ψ(t)⟩ = e^{−iHt}|ψ⟩` and the `σ_z`-sandwich time reversal.
//!
//! `H` is split into blocks of fixed excitation number and each block is
//! diagonalized once, on first use. A state that only occupies a few sectors
//! never pays for the others.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{argument, Result};
use crate::lattice::{sector_block, Bipartition, CouplingGraph, ExcitationSectors, HamiltonianMatrix, HamiltonianTerms};
use crate::qstate::StateVector;

/// Lattice data used to build sector blocks on demand.
#[derive(Debug)]
struct LatticeSource {
    graph: CouplingGraph,
    terms: HamiltonianTerms,
    sectors: Arc<ExcitationSectors>,
}

#[derive(Debug)]
struct Block {
    excitations: usize,
    members: Vec<usize>,
    hamiltonian: OnceLock<DMatrix<f64>>,
    eigen: OnceLock<SymmetricEigen<f64, nalgebra::Dyn>>,
}

impl Block {
    fn dense(members: Vec<usize>, hamiltonian: DMatrix<f64>) -> Self {
        Self {
            excitations: 0,
            members,
            hamiltonian: OnceLock::from(hamiltonian),
            eigen: OnceLock::new(),
        }
    }

    fn lazy(excitations: usize, members: Vec<usize>) -> Self {
        Self {
            excitations,
            members,
            hamiltonian: OnceLock::new(),
            eigen: OnceLock::new(),
        }
    }

    fn hamiltonian(&self, source: Option<&LatticeSource>) -> &DMatrix<f64> {
        self.hamiltonian.get_or_init(|| {
            let src = source.expect("lazy block needs its lattice");
            sector_block(&src.graph, &src.terms, &src.sectors, self.excitations)
        })
    }

    fn eigen(&self, source: Option<&LatticeSource>) -> &SymmetricEigen<f64, nalgebra::Dyn> {
        self.eigen
            .get_or_init(|| SymmetricEigen::new(self.hamiltonian(source).clone()))
    }

    /// Writes `e^{−iH_b t}` applied to the block's slice of `src` into `dst`.
    fn apply(&self, source: Option<&LatticeSource>, src: &[Complex64], dst: &mut [Complex64], t: f64) {
        if self.members.iter().all(|&s| src[s] == Complex64::new(0.0, 0.0)) {
            return;
        }
        if self.members.len() == 1 {
            let s = self.members[0];
            dst[s] = src[s] * Complex64::from_polar(1.0, -self.hamiltonian(source)[(0, 0)] * t);
            return;
        }
        let eig = self.eigen(source);
        let q = &eig.eigenvectors;
        let re = DVector::from_iterator(self.members.len(), self.members.iter().map(|&s| src[s].re));
        let im = DVector::from_iterator(self.members.len(), self.members.iter().map(|&s| src[s].im));
        let mut cre = q.tr_mul(&re);
        let mut cim = q.tr_mul(&im);
        for k in 0..eig.eigenvalues.len() {
            let (sin, cos) = (-eig.eigenvalues[k] * t).sin_cos();
            let (a, b) = (cre[k], cim[k]);
            cre[k] = a * cos - b * sin;
            cim[k] = a * sin + b * cos;
        }
        let out_re = q * cre;
        let out_im = q * cim;
        for (k, &s) in self.members.iter().enumerate() {
            dst[s] = Complex64::new(out_re[k], out_im[k]);
        }
    }
}

/// Cached spectral factorization of a Hamiltonian.
///
/// Immutable once built; sharing it between threads is safe, and concurrent
/// callers that need the same not-yet-factorized block wait for one another.
#[derive(Debug)]
pub struct Propagator {
    n_sites: usize,
    blocks: Vec<Block>,
    source: Option<LatticeSource>,
}

impl Propagator {
    /// Factorizes a dense Hamiltonian. It is split into excitation sectors when
    /// it conserves excitation number, otherwise treated as one block.
    pub fn new(hamiltonian: &HamiltonianMatrix) -> Self {
        let n = hamiltonian.n_sites();
        let m = hamiltonian.matrix();
        let conserving = (0..m.ncols()).all(|c| {
            (0..m.nrows()).all(|r| m[(r, c)] == 0.0 || r.count_ones() == c.count_ones())
        });
        if !conserving {
            let all: Vec<usize> = (0..m.nrows()).collect();
            return Self {
                n_sites: n,
                blocks: vec![Block::dense(all, m.clone())],
                source: None,
            };
        }
        let sectors = ExcitationSectors::for_sites(n);
        let blocks = (0..sectors.count())
            .map(|k| {
                let members = sectors.members(k).to_vec();
                let block = DMatrix::from_fn(members.len(), members.len(), |r, c| {
                    m[(members[r], members[c])]
                });
                Block::dense(members, block)
            })
            .collect();
        Self {
            n_sites: n,
            blocks,
            source: None,
        }
    }

    /// Builds sector blocks straight from the lattice terms, each one only
    /// when a state first reaches it. The dense `2^N × 2^N` matrix is never formed.
    pub fn from_lattice(graph: &CouplingGraph, terms: &HamiltonianTerms) -> Result<Self> {
        terms.validate(graph)?;
        let sectors = ExcitationSectors::for_sites(graph.n_sites());
        let blocks = (0..sectors.count())
            .map(|k| Block::lazy(k, sectors.members(k).to_vec()))
            .collect();
        Ok(Self {
            n_sites: graph.n_sites(),
            blocks,
            source: Some(LatticeSource {
                graph: graph.clone(),
                terms: terms.clone(),
                sectors,
            }),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Dense `H` assembled from the stored blocks.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        self.assemble(|b| b.hamiltonian(self.source.as_ref()).clone())
    }

    /// `Q Λ Qᵀ` from the factorization, block by block.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.assemble(|b| {
            let e = b.eigen(self.source.as_ref());
            &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues) * e.eigenvectors.transpose()
        })
    }

    /// All eigenvalues of `H`, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.eigen(self.source.as_ref()).eigenvalues.iter().copied().collect::<Vec<_>>())
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn assemble(&self, f: impl Fn(&Block) -> DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for b in &self.blocks {
            let sub = f(b);
            for (c, &sc) in b.members.iter().enumerate() {
                for (r, &sr) in b.members.iter().enumerate() {
                    out[(sr, sc)] = sub[(r, c)];
                }
            }
        }
        out
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_sites() != self.n_sites {
            return Err(argument(format!(
                "state has {} sites, propagator {}",
                state.n_sites(),
                self.n_sites
            )));
        }
        Ok(())
    }
}

/// `e^{−iHt}|ψ⟩`. Negative `t` gives the exact backward evolution.
pub fn propagate(state: &StateVector, prop: &Propagator, t: f64) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(argument(format!("evolution time must be finite, got {t}")));
    }
    prop.check_state(state)?;
    if t == 0.0 {
        return Ok(state.clone());
    }
    let src = state.amplitudes();
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    for b in &prop.blocks {
        b.apply(prop.source.as_ref(), src, &mut dst, t);
    }
    Ok(StateVector::from_raw(state.n_sites(), dst))
}

/// `Σ_z U(t) Σ_z |ψ⟩` with `Σ_z` the product of `σ_z` over `color_a`.
///
/// For a zero-detuning hopping Hamiltonian on a bipartite graph this is
/// `U(−t)|ψ⟩`.
pub fn reverse_evolve(
    state: &StateVector,
    prop: &Propagator,
    t: f64,
    bipartition: &Bipartition,
) -> Result<StateVector> {
    if t < 0.0 {
        return Err(argument(format!("reverse evolution time must be ≥ 0, got {t}")));
    }
    let flipped = state.apply_sublattice_z(&bipartition.color_a)?;
    let evolved = propagate(&flipped, prop, t)?;
    evolved.apply_sublattice_z(&bipartition.color_a)
}
