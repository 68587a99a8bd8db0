//! Local Hamiltonians over an interaction graph.
//!
//! A Hamiltonian is a map edge -> Hermitian term supported on that edge. Spin
//! terms are stored on their own edge sites and embedded on demand; fermionic
//! terms are stored as dense matrices on the full Fock space (their qubit
//! representation after ordering the modes need not be local, only the mode
//! support matters). The local interaction strength J = max over edges of the
//! operator norm of the term is cached at construction.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeSubset, InteractionGraph, Vertex};
use crate::opalg::{
    kron, pauli_i, pauli_x, pauli_y, pauli_z, DenseOperator, HERMITICITY_TOLERANCE,
};

/// Largest mode count accepted for the dense Fock-space construction.
/// Each mode operator is a 2^n x 2^n complex matrix.
pub const MAX_FERMIONIC_MODES: usize = 12;

/// Which tensor-product structure the terms live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    /// Terms act on their edge's sites and are embedded when assembling.
    Spin,
    /// Terms act on the full Fock space; the edge records the mode support.
    Fermionic,
}

/// A local Hamiltonian: interaction graph plus one Hermitian term per edge.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    graph: InteractionGraph,
    terms: BTreeMap<usize, DenseOperator>,
    statistics: Statistics,
    j: f64,
}

impl LocalHamiltonian {
    /// Spin Hamiltonian from per-edge terms given on their edge sites.
    pub fn new_spin(graph: InteractionGraph, terms: Vec<(Edge, DenseOperator)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (edge, op) in terms {
            let idx = graph.edge_index(&edge).ok_or_else(|| {
                Error::InvalidTerm(format!("edge {edge:?} is not in the graph"))
            })?;
            let canonical = &graph.edges()[idx];
            if op.sites() != canonical.as_slice() {
                return Err(Error::InvalidTerm(format!(
                    "term sites {:?} must equal its edge {canonical:?}",
                    op.sites()
                )));
            }
            if op.hermiticity_deviation() > HERMITICITY_TOLERANCE {
                return Err(Error::InvalidTerm(format!(
                    "term on {canonical:?} is not Hermitian"
                )));
            }
            if map.insert(idx, op).is_some() {
                return Err(Error::InvalidTerm(format!("duplicate term on {canonical:?}")));
            }
        }
        let j = local_interaction_strength(map.values())?;
        Ok(LocalHamiltonian {
            graph,
            terms: map,
            statistics: Statistics::Spin,
            j,
        })
    }

    /// Fermionic Hamiltonian from (mode support, full-Fock-space matrix)
    /// pairs. Every term must be Hermitian and even: it has to commute with
    /// the parity operator, per the fermion number parity superselection
    /// rule. Terms sharing a support are summed.
    pub fn new_fermionic(sys: &FermionicSystem, terms: Vec<(Edge, Array2<Complex64>)>) -> Result<Self> {
        let n = sys.mode_count();
        let dim = 1usize << n;
        let parity = sys.parity();
        let mut by_edge: BTreeMap<Edge, Array2<Complex64>> = BTreeMap::new();
        for (support, m) in terms {
            let mut edge = support;
            edge.sort_unstable();
            edge.dedup();
            if edge.is_empty() || edge.iter().any(|&x| x >= n) {
                return Err(Error::InvalidTerm(format!(
                    "support {edge:?} is not a set of modes below {n}"
                )));
            }
            if m.dim() != (dim, dim) {
                return Err(Error::InvalidTerm("term matrix must act on the full Fock space".into()));
            }
            let comm = &m.dot(&parity) - &parity.dot(&m);
            let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
            if comm.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / scale > 1e-12 {
                return Err(Error::ParityViolation);
            }
            match by_edge.entry(edge) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(m);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() = e.get() + &m;
                }
            }
        }
        let graph = InteractionGraph::new(
            (0..n).collect(),
            by_edge.keys().cloned().collect(),
            BTreeMap::new(),
        )?;
        let sites: Vec<Vertex> = (0..n).collect();
        let dims = vec![2usize; n];
        let mut map = BTreeMap::new();
        for (edge, m) in by_edge {
            let idx = graph.edge_index(&edge).unwrap();
            let support: BTreeSet<Vertex> = edge.iter().copied().collect();
            let op = DenseOperator::new(sites.clone(), dims.clone(), Some(support), m)?;
            if op.hermiticity_deviation() > HERMITICITY_TOLERANCE {
                return Err(Error::InvalidTerm(format!("term on {edge:?} is not Hermitian")));
            }
            map.insert(idx, op);
        }
        let j = local_interaction_strength(map.values())?;
        Ok(LocalHamiltonian {
            graph,
            terms: map,
            statistics: Statistics::Fermionic,
            j,
        })
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Local interaction strength J = max over edges of the term's operator norm.
    pub fn j_strength(&self) -> f64 {
        self.j
    }

    pub fn term(&self, edge_index: usize) -> Option<&DenseOperator> {
        self.terms.get(&edge_index)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The full operator H = sum of embedded terms; zero when there are none.
    pub fn assemble(&self) -> Result<DenseOperator> {
        self.assemble_edges(&self.graph.all_edges())
    }

    /// H_F: the sum restricted to an edge subset, on the full space.
    pub fn assemble_edges(&self, f: &EdgeSubset) -> Result<DenseOperator> {
        let mut acc = zero_on(&self.graph);
        for &idx in f.indices() {
            if let Some(term) = self.terms.get(&idx) {
                let embedded = match self.statistics {
                    Statistics::Spin => term.embed(&self.graph)?,
                    Statistics::Fermionic => term.clone(),
                };
                acc = acc.add(&embedded)?;
            }
        }
        Ok(acc)
    }

    /// Truncated Hamiltonian on the region `b`.
    ///
    /// Spin: realized on the Hilbert space of `b` alone (induced subgraph).
    /// Fermionic: the edge set is restricted but terms stay on the full Fock
    /// space; expectation values and partition functions over the truncated
    /// mode space are handled by the thermal layer.
    pub fn truncate(&self, b: &BTreeSet<Vertex>) -> Result<LocalHamiltonian> {
        match self.statistics {
            Statistics::Spin => {
                let sub = self.graph.induced_subgraph(b)?;
                let mut terms = BTreeMap::new();
                for &idx in self.graph.restricted_edges(b).indices() {
                    if let Some(op) = self.terms.get(&idx) {
                        let sub_idx = sub.edge_index(&self.graph.edges()[idx]).unwrap();
                        terms.insert(sub_idx, op.clone());
                    }
                }
                let j = local_interaction_strength(terms.values())?;
                Ok(LocalHamiltonian {
                    graph: sub,
                    terms,
                    statistics: Statistics::Spin,
                    j,
                })
            }
            Statistics::Fermionic => {
                let keep = self.graph.restricted_edges(b);
                let terms: BTreeMap<usize, DenseOperator> = self
                    .terms
                    .iter()
                    .filter(|(idx, _)| keep.contains(**idx))
                    .map(|(idx, op)| (*idx, op.clone()))
                    .collect();
                let j = local_interaction_strength(terms.values())?;
                Ok(LocalHamiltonian {
                    graph: self.graph.clone(),
                    terms,
                    statistics: Statistics::Fermionic,
                    j,
                })
            }
        }
    }

    /// Boundary Hamiltonian H_dB: the sum of terms crossing the boundary of
    /// `b`, as an operator on the full space.
    pub fn boundary_hamiltonian(&self, b: &BTreeSet<Vertex>) -> Result<DenseOperator> {
        self.assemble_edges(&self.graph.boundary_edges(b))
    }
}

/// Zero operator on the full space of a graph.
pub fn zero_on(g: &InteractionGraph) -> DenseOperator {
    let sites: Vec<Vertex> = g.vertices().to_vec();
    let dims: Vec<usize> = sites.iter().map(|v| g.local_dim(*v).unwrap()).collect();
    let n: usize = dims.iter().product();
    DenseOperator::new(sites, dims, Some(BTreeSet::new()), Array2::zeros((n, n)))
        .expect("zero operator is well-formed")
}

fn local_interaction_strength<'a>(
    terms: impl Iterator<Item = &'a DenseOperator>,
) -> Result<f64> {
    let mut j: f64 = 0.0;
    for t in terms {
        j = j.max(t.schatten_norm(f64::INFINITY)?);
    }
    Ok(j)
}

/// Convex interpolation H0 + s (H1 - H0), endpoint-exact.
pub fn interpolate(h0: &DenseOperator, h1: &DenseOperator, s: f64) -> Result<DenseOperator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s must be in [0,1], got {s}")));
    }
    if s == 0.0 {
        return Ok(h0.clone());
    }
    if s == 1.0 {
        return Ok(h1.clone());
    }
    h0.scale(Complex64::new(1.0 - s, 0.0))
        .add(&h1.scale(Complex64::new(s, 0.0)))
}

/// The standard spin models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// J_c Z Z per edge, transverse field h X per site as size-1 edges.
    Ising,
    /// J_c (XX + YY)/2 per edge.
    Xy,
    /// J_c (XX + YY + ZZ)/4 per edge.
    Heisenberg,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(ModelKind::Ising),
            "xy" => Ok(ModelKind::Xy),
            "heisenberg" => Ok(ModelKind::Heisenberg),
            other => Err(Error::UnsupportedModel(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Builds one of the standard nearest-neighbor spin models on a qubit graph.
///
/// `coupling` multiplies the two-site term (positive values are written with
/// +J_c; the bounds depend only on the operator norm, not the sign). A
/// nonzero `field` adds h X on every site as a size-1 hyperedge, so field
/// terms take part in boundaries and animal counting like any interaction.
pub fn standard_model(
    kind: ModelKind,
    g: &InteractionGraph,
    coupling: f64,
    field: f64,
) -> Result<LocalHamiltonian> {
    if g.vertices().iter().any(|v| g.local_dim(*v) != Some(2)) {
        return Err(Error::UnsupportedModel("spin models need qubit sites".into()));
    }
    if g.edges().iter().any(|e| e.len() != 2) {
        return Err(Error::UnsupportedModel(
            "spin models need two-site edges; on-site fields are added via the field argument"
                .into(),
        ));
    }
    let jc = Complex64::new(coupling, 0.0);
    let two_site = |a: &Array2<Complex64>, b: &Array2<Complex64>| kron(a, b);
    let mut edges: Vec<Edge> = g.edges().to_vec();
    let mut terms: Vec<(Edge, DenseOperator)> = Vec::new();
    for e in g.edges() {
        let m = match kind {
            ModelKind::Ising => two_site(&pauli_z(), &pauli_z()).mapv(|z| z * jc),
            ModelKind::Xy => {
                let xx = two_site(&pauli_x(), &pauli_x());
                let yy = two_site(&pauli_y(), &pauli_y());
                (&xx + &yy).mapv(|z| z * jc * 0.5)
            }
            ModelKind::Heisenberg => {
                let xx = two_site(&pauli_x(), &pauli_x());
                let yy = two_site(&pauli_y(), &pauli_y());
                let zz = two_site(&pauli_z(), &pauli_z());
                (&(&xx + &yy) + &zz).mapv(|z| z * jc * 0.25)
            }
        };
        let op = DenseOperator::new(e.clone(), vec![2, 2], None, m)?;
        terms.push((e.clone(), op));
    }
    if field != 0.0 {
        for &v in g.vertices() {
            let m = pauli_x().mapv(|z| z * Complex64::new(field, 0.0));
            let op = DenseOperator::new(vec![v], vec![2], None, m)?;
            edges.push(vec![v]);
            terms.push((vec![v], op));
        }
    }
    let graph = InteractionGraph::new(g.vertices().to_vec(), edges, g.local_dims().clone())?;
    LocalHamiltonian::new_spin(graph, terms)
}

/// Mode operators of a fermionic lattice system on the 2^n Fock space.
///
/// Annihilators follow the fixed mode-order sign-string construction
/// f_x = (prod_{y<x} Z_y) sigma^-_x, which satisfies the canonical
/// anticommutation relations exactly.
#[derive(Debug, Clone)]
pub struct FermionicSystem {
    mode_count: usize,
    annihilators: Vec<Array2<Complex64>>,
}

impl FermionicSystem {
    pub fn new(mode_count: usize) -> Result<Self> {
        if mode_count < 1 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if mode_count > MAX_FERMIONIC_MODES {
            return Err(Error::ResourceLimit(format!(
                "{mode_count} modes exceeds the dense Fock-space limit {MAX_FERMIONIC_MODES}"
            )));
        }
        let sigma_minus: Array2<Complex64> = {
            let mut m = Array2::zeros((2, 2));
            m[(0, 1)] = Complex64::new(1.0, 0.0);
            m
        };
        let z = pauli_z();
        let eye = pauli_i();
        let annihilators = (0..mode_count)
            .map(|x| {
                let mut m: Option<Array2<Complex64>> = None;
                for y in 0..mode_count {
                    let factor = if y < x {
                        &z
                    } else if y == x {
                        &sigma_minus
                    } else {
                        &eye
                    };
                    m = Some(match m {
                        None => factor.clone(),
                        Some(acc) => kron(&acc, factor),
                    });
                }
                m.unwrap()
            })
            .collect();
        Ok(FermionicSystem {
            mode_count,
            annihilators,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn fock_dim(&self) -> usize {
        1 << self.mode_count
    }

    /// f_x
    pub fn annihilation(&self, x: usize) -> &Array2<Complex64> {
        &self.annihilators[x]
    }

    /// f_x^dagger
    pub fn creation(&self, x: usize) -> Array2<Complex64> {
        self.annihilators[x].t().mapv(|z| z.conj())
    }

    /// n_x = f_x^dagger f_x
    pub fn number(&self, x: usize) -> Array2<Complex64> {
        self.creation(x).dot(&self.annihilators[x])
    }

    /// P = prod_x (1 - 2 n_x)
    pub fn parity(&self) -> Array2<Complex64> {
        let z = pauli_z();
        let mut m = z.clone();
        for _ in 1..self.mode_count {
            m = kron(&m, &z);
        }
        m
    }

    pub fn identity(&self) -> Array2<Complex64> {
        Array2::eye(self.fock_dim())
    }

    /// Hopping term t (f_x^dagger f_y + h.c.)
    pub fn hopping(&self, x: usize, y: usize, t: f64) -> Array2<Complex64> {
        let m = self.creation(x).dot(&self.annihilators[y]);
        let mh = m.t().mapv(|z| z.conj());
        (&m + &mh).mapv(|z| z * t)
    }
}

/// Nearest-neighbor hopping + density-density chain:
/// sum_i [ t (f_i^dagger f_{i+1} + h.c.) + u n_i n_{i+1} ].
pub fn fermionic_hopping_chain(sys: &FermionicSystem, t: f64, u: f64) -> Result<LocalHamiltonian> {
    let n = sys.mode_count();
    if n < 2 {
        return Err(Error::InvalidSize("hopping chain needs at least 2 modes".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n - 1 {
        let mut m = sys.hopping(i, i + 1, t);
        if u != 0.0 {
            let nn = sys.number(i).dot(&sys.number(i + 1));
            m = &m + &nn.mapv(|z| z * u);
        }
        terms.push((vec![i, i + 1], m));
    }
    LocalHamiltonian::new_fermionic(sys, terms)
}
