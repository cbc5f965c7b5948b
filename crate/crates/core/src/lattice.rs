//! Lattice geometry and the rotating-frame hopping Hamiltonian
//! `H = Σ_i (Δω_i/2) σ_i^z + Σ_⟨ij⟩ J_ij (σ_i^+ σ_j^- + σ_i^- σ_j^+)`.
//!
//! Frequencies are stored as angular rates in rad/ns. Every matrix element of
//! `H` in the computational basis is real, so the dense form is a real
//! symmetric matrix.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use crate::error::{argument, Error, Result};
use crate::qstate::{site_mask, MAX_SITES};

/// Converts an ordinary frequency in MHz to an angular frequency in rad/ns.
pub fn mhz_to_rad_per_ns(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e-3
}

pub fn rad_per_ns_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e-3)
}

/// Default nearest-neighbour coupling `J/2π` in MHz.
pub const DEFAULT_COUPLING_MHZ: f64 = 5.0;

/// Undirected, connected site graph without self-loops or duplicate edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
    positions: Option<Vec<(f64, f64)>>,
    /// For each site, its index in the graph this one was cut from.
    origin: Vec<usize>,
}

impl CouplingGraph {
    pub fn new(n_sites: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(argument(format!("n_sites must be in 1..={MAX_SITES}")));
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n_sites || b >= n_sites {
                return Err(argument(format!("edge ({a}, {b}) has an endpoint out of range")));
            }
            if a == b {
                return Err(argument(format!("self-loop on site {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(argument(format!("duplicate edge ({a}, {b})")));
            }
            normalized.push(e);
        }
        let graph = Self {
            n_sites,
            edges: normalized,
            labels: (0..n_sites).map(|i| format!("q{i}")).collect(),
            positions: None,
            origin: (0..n_sites).collect(),
        };
        if !graph.is_connected() {
            return Err(argument("coupling graph must be connected"));
        }
        Ok(graph)
    }

    /// Open chain `0 – 1 – … – (n−1)`.
    pub fn chain(n_sites: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n_sites).map(|i| (i - 1, i)).collect();
        let mut g = Self::new(n_sites, &edges)?;
        g.positions = Some((0..n_sites).map(|i| (i as f64, 0.0)).collect());
        Ok(g)
    }

    /// Looks up a preset by name: `cross9` or `chain<N>`.
    pub fn preset(name: &str) -> Result<Self> {
        if name == "cross9" {
            return Ok(cross_lattice_9());
        }
        if let Some(n) = name.strip_prefix("chain") {
            let n: usize = n
                .parse()
                .map_err(|_| argument(format!("bad chain length in preset '{name}'")))?;
            return Self::chain(n);
        }
        Err(argument(format!("unknown lattice preset '{name}'")))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn degree(&self, site: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == site || b == site)
            .count()
    }

    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == site, b == site) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    fn is_connected(&self) -> bool {
        let mut visited = vec![false; self.n_sites];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        visited.into_iter().all(|v| v)
    }

    /// Induced subgraph on `sites` (in the given order), re-indexed densely.
    fn induced(&self, sites: &[usize]) -> Result<Self> {
        let index_of = |s: usize| sites.iter().position(|&x| x == s);
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| Some((index_of(a)?, index_of(b)?)))
            .collect();
        let mut g = Self::new(sites.len(), &edges)?;
        g.labels = sites.iter().map(|&s| self.labels[s].clone()).collect();
        g.positions = self
            .positions
            .as_ref()
            .map(|p| sites.iter().map(|&s| p[s]).collect());
        g.origin = sites.iter().map(|&s| self.origin[s]).collect();
        Ok(g)
    }
}

const CROSS_EDGES: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
    (4, 8),
];

/// The nine-site cross: centre `q0`, first neighbours `q1…q4`, and one outer
/// site `q5…q8` at the end of each arm.
pub fn cross_lattice_9() -> CouplingGraph {
    let mut g = CouplingGraph::new(9, &CROSS_EDGES).expect("cross preset is valid");
    g.positions = Some(vec![
        (0.0, 0.0),
        (0.0, 1.0),
        (1.0, 0.0),
        (0.0, -1.0),
        (-1.0, 0.0),
        (0.0, 2.0),
        (2.0, 0.0),
        (0.0, -2.0),
        (-2.0, 0.0),
    ]);
    g
}

fn is_cross(graph: &CouplingGraph) -> bool {
    graph.n_sites == 9 && graph.edges == CROSS_EDGES
}

/// First `n_active` sites of the cross, grown in label order `q0, q1, …, q8`.
pub fn sub_lattice(graph: &CouplingGraph, n_active: usize) -> Result<CouplingGraph> {
    if !is_cross(graph) {
        return Err(argument("sub_lattice requires the cross9 preset as base graph"));
    }
    if !(1..=9).contains(&n_active) {
        return Err(argument(format!("n_active must be in 1..=9, got {n_active}")));
    }
    let sites: Vec<usize> = (0..n_active).collect();
    graph.induced(&sites)
}

/// Two-colouring of a bipartite graph. Hopping along any edge connects the
/// two colours, so conjugating by `σ_z` on `color_a` negates the hopping part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub color_a: Vec<usize>,
    pub color_b: Vec<usize>,
}

impl Bipartition {
    /// Checks disjointness, coverage, and that every edge crosses colours.
    pub fn is_valid_for(&self, graph: &CouplingGraph) -> bool {
        let mut color = vec![None; graph.n_sites()];
        for (sites, tag) in [(&self.color_a, 0u8), (&self.color_b, 1u8)] {
            for &s in sites {
                if s >= graph.n_sites() || color[s].is_some() {
                    return false;
                }
                color[s] = Some(tag);
            }
        }
        color.iter().all(Option::is_some)
            && graph.edges().iter().all(|&(a, b)| color[a] != color[b])
    }
}

/// Deterministic BFS colouring; site 0 always lands in `color_b`.
pub fn two_coloring(graph: &CouplingGraph) -> Result<Bipartition> {
    let n = graph.n_sites();
    let mut color: Vec<Option<bool>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for v in graph.neighbors(u) {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        parent[v] = u;
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => {
                        return Err(Error::NonBipartite {
                            cycle: odd_cycle(&parent, u, v),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (site, c) in color.into_iter().enumerate() {
        if c == Some(true) {
            a.push(site);
        } else {
            b.push(site);
        }
    }
    Ok(Bipartition {
        color_a: a,
        color_b: b,
    })
}

/// Closes the BFS-tree paths from `u` and `v` into the cycle through edge `(u, v)`.
fn odd_cycle(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let pu = path(u);
    let pv = path(v);
    let lca = *pu.iter().find(|x| pv.contains(x)).expect("same BFS tree");
    let mut cycle: Vec<usize> = pu.iter().copied().take_while(|&x| x != lca).collect();
    cycle.push(lca);
    let tail: Vec<usize> = pv.iter().copied().take_while(|&x| x != lca).collect();
    cycle.extend(tail.into_iter().rev());
    cycle
}

/// Site detunings `Δω_i` and per-edge couplings `J_e` in rad/ns.
///
/// `couplings[k]` belongs to `graph.edges()[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    pub detunings: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl HamiltonianTerms {
    /// Uniform coupling `J/2π = coupling_mhz` and zero detuning.
    pub fn uniform(graph: &CouplingGraph, coupling_mhz: f64) -> Self {
        Self {
            detunings: vec![0.0; graph.n_sites()],
            couplings: vec![mhz_to_rad_per_ns(coupling_mhz); graph.edges().len()],
        }
    }

    pub fn with_detunings_mhz(mut self, detunings_mhz: &[f64]) -> Self {
        self.detunings = detunings_mhz.iter().map(|&f| mhz_to_rad_per_ns(f)).collect();
        self
    }

    pub fn validate(&self, graph: &CouplingGraph) -> Result<()> {
        if self.detunings.len() != graph.n_sites() {
            return Err(argument(format!(
                "{} detunings for {} sites",
                self.detunings.len(),
                graph.n_sites()
            )));
        }
        if self.couplings.len() != graph.edges().len() {
            return Err(argument(format!(
                "{} couplings for {} edges",
                self.couplings.len(),
                graph.edges().len()
            )));
        }
        if !self
            .detunings
            .iter()
            .chain(&self.couplings)
            .all(|x| x.is_finite())
        {
            return Err(argument("Hamiltonian terms must be finite"));
        }
        Ok(())
    }

    pub fn has_zero_detuning(&self) -> bool {
        self.detunings.iter().all(|&d| d == 0.0)
    }

    /// Diagonal energy of a basis index.
    pub(crate) fn diagonal(&self, n_sites: usize, index: usize) -> f64 {
        self.detunings
            .iter()
            .enumerate()
            .map(|(site, d)| {
                if index & site_mask(n_sites, site) == 0 {
                    d / 2.0
                } else {
                    -d / 2.0
                }
            })
            .sum()
    }
}

/// Dense real symmetric Hamiltonian over the full `2^N` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    n_sites: usize,
    matrix: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn from_dense(n_sites: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(argument(format!("expected a {dim}x{dim} matrix")));
        }
        if (&matrix - matrix.transpose()).amax() > 0.0 {
            return Err(argument("Hamiltonian must be symmetric"));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_hamiltonian(graph: &CouplingGraph, terms: &HamiltonianTerms) -> Result<HamiltonianMatrix> {
    terms.validate(graph)?;
    let n = graph.n_sites();
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = terms.diagonal(n, s);
        for (&(a, b), &j) in graph.edges().iter().zip(&terms.couplings) {
            let (ma, mb) = (site_mask(n, a), site_mask(n, b));
            // σ⁺σ⁻ + σ⁻σ⁺ moves an excitation across the edge.
            if ((s & ma) == 0) != ((s & mb) == 0) {
                h[(s ^ (ma | mb), s)] += j;
            }
        }
    }
    Ok(HamiltonianMatrix { n_sites: n, matrix: h })
}

/// Outcome of checking `Σ_z H Σ_z = −H`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegationReport {
    /// `max |(Σ_z H Σ_z + H)_rc|`.
    pub residual: f64,
    pub exact_negation: bool,
}

pub fn verify_negation(
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    bipartition: &Bipartition,
) -> Result<NegationReport> {
    let h = build_hamiltonian(graph, terms)?;
    let n = graph.n_sites();
    let mask = bipartition
        .color_a
        .iter()
        .fold(0usize, |m, &s| m | site_mask(n, s));
    let sign = |s: usize| if (s & mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    let m = h.matrix();
    let mut residual: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v != 0.0 {
                residual = residual.max((sign(r) * sign(c) * v + v).abs());
            }
        }
    }
    Ok(NegationReport {
        residual,
        exact_negation: terms.has_zero_detuning() && residual <= 1e-12,
    })
}

/// Basis indices grouped by excitation number.
///
/// The hopping Hamiltonian never connects different groups, so each one can be
/// diagonalized on its own.
#[derive(Debug)]
pub struct ExcitationSectors {
    n_sites: usize,
    members: Vec<Vec<usize>>,
    /// Position of each basis index within its sector.
    position: Vec<usize>,
}

impl ExcitationSectors {
    /// Shared table for an `n_sites` register.
    pub fn for_sites(n_sites: usize) -> Arc<Self> {
        static TABLES: [OnceLock<Arc<ExcitationSectors>>; MAX_SITES + 1] =
            [const { OnceLock::new() }; MAX_SITES + 1];
        TABLES[n_sites]
            .get_or_init(|| Arc::new(Self::build(n_sites)))
            .clone()
    }

    fn build(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut members = vec![Vec::new(); n_sites + 1];
        let mut position = vec![0; dim];
        for s in 0..dim {
            let k = s.count_ones() as usize;
            position[s] = members[k].len();
            members[k].push(s);
        }
        Self {
            n_sites,
            members,
            position,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, excitations: usize) -> &[usize] {
        &self.members[excitations]
    }

    pub fn position(&self, index: usize) -> usize {
        self.position[index]
    }
}

/// The block of `H` restricted to one excitation sector.
pub(crate) fn sector_block(
    graph: &CouplingGraph,
    terms: &HamiltonianTerms,
    sectors: &ExcitationSectors,
    excitations: usize,
) -> DMatrix<f64> {
    let n = graph.n_sites();
    let members = sectors.members(excitations);
    let mut block = DMatrix::<f64>::zeros(members.len(), members.len());
    for (col, &s) in members.iter().enumerate() {
        block[(col, col)] = terms.diagonal(n, s);
        for (&(a, b), &j) in graph.edges().iter().zip(&terms.couplings) {
            let (ma, mb) = (site_mask(n, a), site_mask(n, b));
            if ((s & ma) == 0) != ((s & mb) == 0) {
                block[(sectors.position(s ^ (ma | mb)), col)] += j;
            }
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s_z_diagonal(n: usize) -> Vec<f64> {
        (0..1usize << n)
            .map(|s| n as f64 / 2.0 - s.count_ones() as f64)
            .collect()
    }

    #[test]
    fn cross_topology() {
        let g = cross_lattice_9();
        assert_eq!(g.n_sites(), 9);
        assert_eq!(g.edges().len(), 8);
        assert_eq!(g.edges().len(), g.n_sites() - 1);
        assert_eq!(g.degree(0), 4);
        assert_eq!(g.labels()[5], "q5");
        for outer in 5..9 {
            assert_eq!(g.degree(outer), 1);
        }
    }

    #[test]
    fn cross_coloring_matches_z_sites() {
        let b = two_coloring(&cross_lattice_9()).unwrap();
        assert_eq!(b.color_a, vec![1, 2, 3, 4]);
        assert_eq!(b.color_b, vec![0, 5, 6, 7, 8]);
        assert!(b.is_valid_for(&cross_lattice_9()));
        // stable across calls
        assert_eq!(two_coloring(&cross_lattice_9()).unwrap(), b);
    }

    #[test]
    fn coloring_of_chain_and_triangle() {
        let b = two_coloring(&CouplingGraph::chain(2).unwrap()).unwrap();
        assert_eq!(b.color_a, vec![1]);
        assert_eq!(b.color_b, vec![0]);

        let tri = CouplingGraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        match two_coloring(&tri) {
            Err(Error::NonBipartite { cycle }) => {
                assert_eq!(cycle.len(), 3);
                let set: BTreeSet<_> = cycle.into_iter().collect();
                assert_eq!(set, BTreeSet::from([0, 1, 2]));
            }
            other => panic!("expected odd cycle, got {other:?}"),
        }

        let pentagon =
            CouplingGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        match two_coloring(&pentagon) {
            Err(Error::NonBipartite { cycle }) => assert_eq!(cycle.len(), 5),
            other => panic!("expected odd cycle, got {other:?}"),
        }
    }

    #[test]
    fn graph_validation() {
        assert!(CouplingGraph::new(3, &[(0, 0), (1, 2)]).is_err());
        assert!(CouplingGraph::new(3, &[(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(CouplingGraph::new(3, &[(0, 1), (1, 3)]).is_err());
        assert!(CouplingGraph::new(3, &[(0, 1)]).is_err());
        assert!(CouplingGraph::preset("chain4").is_ok());
        assert!(CouplingGraph::preset("ring4").is_err());
    }

    #[test]
    fn sub_lattice_growth() {
        let cross = cross_lattice_9();
        assert_eq!(sub_lattice(&cross, 9).unwrap().edges(), cross.edges());
        let star = sub_lattice(&cross, 5).unwrap();
        assert_eq!(star.edges().len(), 4);
        assert_eq!(star.degree(0), 4);
        let single = sub_lattice(&cross, 1).unwrap();
        assert!(single.edges().is_empty());
        assert!(sub_lattice(&cross, 0).is_err());
        assert!(sub_lattice(&cross, 10).is_err());
        assert!(sub_lattice(&CouplingGraph::chain(9).unwrap(), 3).is_err());
        for k in 1..9 {
            let small = sub_lattice(&cross, k).unwrap();
            let big = sub_lattice(&cross, k + 1).unwrap();
            assert!(small.origin().iter().all(|s| big.origin().contains(s)));
            assert!(small.edges().iter().all(|e| big.edges().contains(e)));
        }
    }

    #[test]
    fn two_site_hamiltonian_by_hand() {
        let g = CouplingGraph::chain(2).unwrap();
        let terms = HamiltonianTerms::uniform(&g, 5.0);
        let h = build_hamiltonian(&g, &terms).unwrap();
        let j = 2.0 * PI * 0.005;
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, j,   0.0,
            0.0, j,   0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ]);
        assert!((h.matrix() - expected).amax() < 1e-15);
    }

    #[test]
    fn zero_coupling_is_diagonal() {
        let g = CouplingGraph::chain(3).unwrap();
        let mut terms = HamiltonianTerms::uniform(&g, 0.0).with_detunings_mhz(&[1.0, -2.0, 0.5]);
        terms.couplings = vec![0.0; 2];
        let h = build_hamiltonian(&g, &terms).unwrap();
        let m = h.matrix();
        for r in 0..8 {
            for c in 0..8 {
                if r != c {
                    assert_eq!(m[(r, c)], 0.0);
                }
            }
        }
        // |000⟩: all +Δω/2
        let expected: f64 = terms.detunings.iter().sum::<f64>() / 2.0;
        assert!((m[(0, 0)] - expected).abs() < 1e-15);
        // |111⟩: all −Δω/2
        assert!((m[(7, 7)] + expected).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_symmetric_and_conserves_s_z() {
        let g = cross_lattice_9();
        let terms = HamiltonianTerms {
            detunings: (0..9).map(|i| 0.01 * i as f64 - 0.03).collect(),
            couplings: (0..8).map(|i| 0.02 + 0.001 * i as f64).collect(),
        };
        let h = build_hamiltonian(&g, &terms).unwrap();
        let m = h.matrix();
        assert_eq!((m - m.transpose()).amax(), 0.0);
        let sz = s_z_diagonal(9);
        let mut comm: f64 = 0.0;
        for c in 0..512 {
            for r in 0..512 {
                comm = comm.max((m[(r, c)] * (sz[c] - sz[r])).abs());
            }
        }
        assert!(comm <= 1e-12);
    }

    #[test]
    fn negation_examples() {
        let g = cross_lattice_9();
        let b = two_coloring(&g).unwrap();
        let terms = HamiltonianTerms::uniform(&g, 5.0);
        let r = verify_negation(&g, &terms, &b).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.exact_negation);

        let mut detuned = terms.clone();
        detuned.detunings[0] = mhz_to_rad_per_ns(3.0);
        let r = verify_negation(&g, &detuned, &b).unwrap();
        assert!((r.residual - detuned.detunings[0]).abs() < 1e-12);
        assert!(!r.exact_negation);

        // Edge (0,1) with both endpoints in colour A.
        let bad = Bipartition {
            color_a: vec![0, 1, 2, 3, 4],
            color_b: vec![5, 6, 7, 8],
        };
        assert!(!bad.is_valid_for(&g));
        let r = verify_negation(&g, &terms, &bad).unwrap();
        assert!((r.residual - 2.0 * terms.couplings[0]).abs() < 1e-12);
        assert!(!r.exact_negation);
    }

    #[test]
    fn sector_blocks_match_dense() {
        let g = cross_lattice_9();
        let terms = HamiltonianTerms {
            detunings: (0..9).map(|i| 0.003 * i as f64).collect(),
            couplings: (0..8).map(|i| 0.03 - 0.001 * i as f64).collect(),
        };
        let h = build_hamiltonian(&g, &terms).unwrap();
        let sectors = ExcitationSectors::for_sites(9);
        for k in 0..=9 {
            let block = sector_block(&g, &terms, &sectors, k);
            let members = sectors.members(k);
            for (c, &sc) in members.iter().enumerate() {
                for (r, &sr) in members.iter().enumerate() {
                    assert_eq!(block[(r, c)], h.matrix()[(sr, sc)]);
                }
            }
        }
    }

    #[test]
    fn units() {
        assert!((mhz_to_rad_per_ns(5.0) - 0.031_415_926_535_897_93).abs() < 1e-15);
        assert!((rad_per_ns_to_mhz(mhz_to_rad_per_ns(3.3)) - 3.3).abs() < 1e-12);
    }
}
