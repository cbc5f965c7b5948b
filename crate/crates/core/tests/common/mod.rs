//! Brute-force dense-matrix reference implementations.
//!
//! Operators are built from Kronecker products of 2x2 Paulis and the
//! propagator from a Padé matrix exponential, so nothing here shares code
//! with the library's bit-mask and sector machinery.

#![allow(dead_code)]

use butterfly::lattice::{build_hamiltonian, CouplingGraph, HamiltonianTerms};
use butterfly::{Axis, SitePauli, StateVector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli2(axis: Axis) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match axis {
        Axis::Identity => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        Axis::X => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        Axis::Y => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        Axis::Z => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `P` on `site`, identity elsewhere; site 0 is the leftmost factor.
pub fn pauli(n: usize, op: SitePauli) -> CMat {
    (0..n).fold(CMat::identity(1, 1), |acc, s| {
        let f = if s == op.site { pauli2(op.axis) } else { pauli2(Axis::Identity) };
        acc.kronecker(&f)
    })
}

pub fn s_z(n: usize) -> CMat {
    (0..n).fold(CMat::zeros(1 << n, 1 << n), |acc, s| acc + pauli(n, SitePauli::z(s)) * c(0.5, 0.0))
}

pub fn hamiltonian(graph: &CouplingGraph, terms: &HamiltonianTerms) -> CMat {
    let n = graph.n_sites();
    let mut h = CMat::zeros(1 << n, 1 << n);
    for (site, d) in terms.detunings.iter().enumerate() {
        h += pauli(n, SitePauli::z(site)) * c(d / 2.0, 0.0);
    }
    for (&(a, b), j) in graph.edges().iter().zip(&terms.couplings) {
        // σ⁺σ⁻ + σ⁻σ⁺ = (XX + YY)/2
        let xx = pauli(n, SitePauli::x(a)) * pauli(n, SitePauli::x(b));
        let yy = pauli(n, SitePauli::y(a)) * pauli(n, SitePauli::y(b));
        h += (xx + yy) * c(j / 2.0, 0.0);
    }
    h
}

/// `H` from the library's builder, promoted to complex.
pub fn library_hamiltonian(graph: &CouplingGraph, terms: &HamiltonianTerms) -> CMat {
    build_hamiltonian(graph, terms).unwrap().matrix().map(|x| c(x, 0.0))
}

pub fn unitary(h: &CMat, t: f64) -> CMat {
    (h * c(0.0, -t)).exp()
}

pub fn vec_of(state: &StateVector) -> CVec {
    CVec::from_column_slice(state.amplitudes())
}

pub fn dist(a: &CVec, state: &StateVector) -> f64 {
    (a - vec_of(state)).norm()
}

pub fn expect(op: &CMat, psi: &CVec) -> Complex64 {
    psi.dotc(&(op * psi))
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spearman rank correlation for data without ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}
