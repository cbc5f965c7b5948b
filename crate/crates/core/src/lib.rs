//! Simulation of butterfly-echo metrology on small superconducting-qubit
//! lattices: exact time evolution of a hopping Hamiltonian, its `σ_z`-sandwich
//! time reversal, scrambling diagnostics, phase-sensing fringes, noise models
//! and device calibration fits.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod evolve;
pub mod lattice;
pub mod metrology;
pub mod noise;
pub mod qstate;
pub mod scrambling;

pub use error::{Error, Result};
pub use evolve::{propagate, reverse_evolve, Propagator};
pub use lattice::{
    build_hamiltonian, cross_lattice_9, sub_lattice, two_coloring, verify_negation, Bipartition,
    CouplingGraph, HamiltonianMatrix, HamiltonianTerms, NegationReport,
};
pub use qstate::{Axis, PolarizationDistribution, SitePauli, StateVector};
