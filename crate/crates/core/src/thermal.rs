//! Gibbs states, generalized covariance, and the exact perturbation and
//! truncation identities.
//!
//! The generalized covariance at interpolation parameter tau is
//! Tr(rho^tau A rho^(1-tau) B) - Tr(rho A) Tr(rho B). Its tau-integral is
//! evaluated in closed form in the eigenbasis through the divided-difference
//! kernel of the exponential, so only the s-integral of the perturbation
//! formula is quadratured.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{interpolate, LocalHamiltonian, Statistics};
use crate::lattice::Vertex;
use crate::opalg::{fractional_power, DenseOperator, Spectrum};
use crate::quad::GaussLegendre;

/// Relative eigenvalue gap below which the divided-difference kernel switches
/// to its analytic limit (removable singularity).
const DEGENERACY_CUTOFF: f64 = 1e-12;

/// Thermal state g(beta) = exp(-beta H)/Z(beta), cached in the eigenbasis of H.
///
/// Negative beta is allowed; the decay bounds are stated in |beta|.
#[derive(Debug, Clone)]
pub struct ThermalState {
    spectrum: Spectrum,
    beta: f64,
    /// p_j = exp(-beta (E_j - E_ref)) / Z_shift, summing to one
    populations: Array1<f64>,
    /// ln Z(beta), shift-stabilized
    log_partition: f64,
}

impl ThermalState {
    /// Thermal state of a Hermitian operator at inverse temperature `beta`.
    pub fn gibbs(h: &DenseOperator, beta: f64) -> Result<Self> {
        Ok(Self::from_spectrum(h.hermitian_spectrum()?, beta))
    }

    /// Thermal state from a cached eigendecomposition.
    pub fn from_spectrum(spectrum: Spectrum, beta: f64) -> Self {
        let evs = spectrum.eigenvalues();
        let e_ref = if beta >= 0.0 {
            spectrum.min_eigenvalue()
        } else {
            spectrum.max_eigenvalue()
        };
        let weights = evs.mapv(|e| (-beta * (e - e_ref)).exp());
        let z_shift = weights.sum();
        let populations = weights.mapv(|w| w / z_shift);
        let log_partition = z_shift.ln() - beta * e_ref;
        ThermalState {
            spectrum,
            beta,
            populations,
            log_partition,
        }
    }

    /// Wraps an arbitrary full-rank density matrix as the thermal state of
    /// its effective Hamiltonian -ln(rho) at beta = 1.
    pub fn from_state(rho: &DenseOperator) -> Result<Self> {
        let spec = rho.hermitian_spectrum()?;
        let p = spec.eigenvalues();
        let trace: f64 = p.sum();
        if (trace - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "state trace is {trace}, expected 1"
            )));
        }
        if p[0] <= 1e-14 {
            return Err(Error::InvalidArgument(
                "state is not full rank within tolerance".into(),
            ));
        }
        // reverse so the effective eigenvalues -ln p are ascending
        let d = spec.dim();
        let mut vecs = Array2::zeros((d, d));
        let mut evs = Array1::zeros(d);
        for j in 0..d {
            let src = d - 1 - j;
            evs[j] = -(p[src] / trace).ln();
            vecs.column_mut(j).assign(&spec.eigenvectors().column(src));
        }
        let eff = Spectrum::from_parts(spec.sites().to_vec(), spec.dims().to_vec(), evs, vecs);
        Ok(Self::from_spectrum(eff, 1.0))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// ln Z(beta).
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    /// Eigenbasis populations of g(beta), ascending in energy.
    pub fn populations(&self) -> &Array1<f64> {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// The density matrix g(beta).
    pub fn state_matrix(&self) -> DenseOperator {
        let p = &self.populations;
        self.spectrum.function_indexed(|j, _| Complex64::new(p[j], 0.0))
    }

    /// g(beta)^tau for tau in [0, 1] (continuous convention at tau = 0).
    pub fn power(&self, tau: f64) -> Result<DenseOperator> {
        fractional_power(&self.spectrum, tau, self.beta)
    }

    /// Tr(A g(beta)).
    pub fn expectation(&self, a: &DenseOperator) -> Result<Complex64> {
        if a.dim() != self.dim() {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let au = a.matrix().dot(self.spectrum.eigenvectors());
        let u = self.spectrum.eigenvectors();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            let col_j = au.column(j);
            let diag: Complex64 = u
                .column(j)
                .iter()
                .zip(col_j.iter())
                .map(|(uc, y)| uc.conj() * y)
                .sum();
            acc += diag * self.populations[j];
        }
        Ok(acc)
    }

    /// Reduced state g^S(beta) on the kept sites.
    pub fn reduced(&self, keep: &BTreeSet<Vertex>) -> Result<DenseOperator> {
        self.state_matrix().partial_trace(keep)
    }
}

/// A covariance query: two operators and the insertion parameter tau.
#[derive(Debug, Clone)]
pub struct CovarianceQuery {
    pub a: DenseOperator,
    pub b: DenseOperator,
    pub tau: f64,
}

/// Eigenbasis data for covariance evaluations of one operator pair, reusable
/// across tau and beta (the transforms depend only on the spectrum).
#[derive(Debug, Clone)]
pub struct CovariancePair {
    /// m[j][k] = A~_{jk} B~_{kj}
    m: Array2<Complex64>,
    diag_a: Array1<Complex64>,
    diag_b: Array1<Complex64>,
}

impl CovariancePair {
    pub fn new(spectrum: &Spectrum, a: &DenseOperator, b: &DenseOperator) -> Result<Self> {
        let at = spectrum.to_eigenbasis(a)?;
        let bt = spectrum.to_eigenbasis(b)?;
        Ok(Self::from_transformed(&at, &bt))
    }

    /// From operators already rotated into the eigenbasis.
    pub fn from_transformed(at: &Array2<Complex64>, bt: &Array2<Complex64>) -> Self {
        let d = at.dim().0;
        let mut m = Array2::zeros((d, d));
        for j in 0..d {
            for k in 0..d {
                m[(j, k)] = at[(j, k)] * bt[(k, j)];
            }
        }
        CovariancePair {
            m,
            diag_a: at.diag().to_owned(),
            diag_b: bt.diag().to_owned(),
        }
    }

    fn mean_product(&self, t: &ThermalState) -> Complex64 {
        let p = &t.populations;
        let mean = |d: &Array1<Complex64>| -> Complex64 {
            d.iter().zip(p.iter()).map(|(z, &w)| z * w).sum()
        };
        mean(&self.diag_a) * mean(&self.diag_b)
    }

    /// cov^tau for this pair in the given state.
    pub fn covariance(&self, t: &ThermalState, tau: f64) -> Result<Complex64> {
        Ok(self.covariance_batch(t, &[tau])?[0])
    }

    /// cov^tau on a whole tau grid at once; the columns p^{1-tau} are stacked
    /// so the kernel contraction is a single matrix product.
    pub fn covariance_batch(&self, t: &ThermalState, taus: &[f64]) -> Result<Vec<Complex64>> {
        if let Some(&bad) = taus.iter().find(|tau| !(0.0..=1.0).contains(*tau)) {
            return Err(Error::InvalidArgument(format!("tau must be in [0,1], got {bad}")));
        }
        let p = &t.populations;
        let d = p.len();
        let mut v = Array2::zeros((d, taus.len()));
        for (c, &tau) in taus.iter().enumerate() {
            for j in 0..d {
                v[(j, c)] = Complex64::new(p[j].powf(1.0 - tau), 0.0);
            }
        }
        let w = self.m.dot(&v);
        let mean = self.mean_product(t);
        Ok(taus
            .iter()
            .enumerate()
            .map(|(c, &tau)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    acc += w[(j, c)] * p[j].powf(tau);
                }
                acc - mean
            })
            .collect())
    }

    /// Closed-form integral of cov^tau over tau in [0, 1]: the pair weight is
    /// the divided difference (e^{x_j} - e^{x_k}) / (x_j - x_k) of the
    /// shifted exponents, with the analytic limit on (near-)degenerate pairs.
    pub fn tau_averaged(&self, t: &ThermalState) -> Complex64 {
        let p = &t.populations;
        let evs = t.spectrum.eigenvalues();
        let scale = evs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let cutoff = DEGENERACY_CUTOFF * scale.max(f64::MIN_POSITIVE);
        let d = p.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                let diff = -t.beta * (evs[j] - evs[k]);
                let w = if (evs[j] - evs[k]).abs() < cutoff || diff.abs() < 1e-30 {
                    p[k]
                } else {
                    p[k] * diff.exp_m1() / diff
                };
                acc += self.m[(j, k)] * w;
            }
        }
        acc - self.mean_product(t)
    }
}

/// Generalized covariance cov^tau_rho(A, B) in the cached eigenbasis.
pub fn generalized_covariance(t: &ThermalState, q: &CovarianceQuery) -> Result<Complex64> {
    if q.a.dim() != t.dim() || q.b.dim() != t.dim() {
        return Err(Error::InvalidArgument("operator/state dimension mismatch".into()));
    }
    CovariancePair::new(&t.spectrum, &q.a, &q.b)?.covariance(t, q.tau)
}

/// Integral over tau of the generalized covariance, in closed form.
pub fn tau_averaged_covariance(
    t: &ThermalState,
    a: &DenseOperator,
    b: &DenseOperator,
) -> Result<Complex64> {
    if a.dim() != t.dim() || b.dim() != t.dim() {
        return Err(Error::InvalidArgument("operator/state dimension mismatch".into()));
    }
    Ok(CovariancePair::new(&t.spectrum, a, b)?.tau_averaged(t))
}

/// The averaged covariance of the perturbation formula:
/// beta * int_0^1 ds int_0^1 dtau cov^tau_{g_s}(H - H0, A),
/// with the tau-integral closed-form and the s-integral Gauss-Legendre.
pub fn averaged_covariance(
    h0: &DenseOperator,
    h: &DenseOperator,
    beta: f64,
    a: &DenseOperator,
    s_order: usize,
) -> Result<Complex64> {
    let rule = GaussLegendre::new(s_order)?;
    let dh = h.sub(h0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        let hs = interpolate(h0, h, s)?;
        let gs = ThermalState::gibbs(&hs, beta)?;
        acc += tau_averaged_covariance(&gs, &dh, a)? * w;
    }
    Ok(acc * beta)
}

/// Defect of the exact perturbation identity
/// Tr(A g[H0]) - Tr(A g[H]) = beta int int cov_{g_s}(H - H0, A);
/// vanishes up to quadrature error.
pub fn perturbation_residual(
    h0: &DenseOperator,
    h: &DenseOperator,
    beta: f64,
    a: &DenseOperator,
    s_order: usize,
) -> Result<f64> {
    let lhs0 = ThermalState::gibbs(h0, beta)?.expectation(a)?;
    let lhs1 = ThermalState::gibbs(h, beta)?.expectation(a)?;
    let rhs = averaged_covariance(h0, h, beta, a, s_order)?;
    Ok((lhs0 - lhs1 - rhs).norm())
}

/// Expectation of `a` (supported in `b`) in the thermal state of the
/// truncated Hamiltonian.
///
/// Spin systems evaluate on the Hilbert space of `b` alone. Fermionic
/// systems evaluate on the full Fock space, where the normalized state of
/// the truncated Hamiltonian is the truncated thermal state times the
/// maximally mixed state outside; both give the expectation over the
/// truncated mode space.
pub fn truncated_expectation(
    h: &LocalHamiltonian,
    b: &BTreeSet<Vertex>,
    beta: f64,
    a: &DenseOperator,
) -> Result<Complex64> {
    let trunc = h.truncate(b)?;
    match h.statistics() {
        Statistics::Spin => {
            let a_b = a.embed(trunc.graph())?;
            ThermalState::gibbs(&trunc.assemble()?, beta)?.expectation(&a_b)
        }
        Statistics::Fermionic => {
            let a_full = a.embed(h.graph())?;
            ThermalState::gibbs(&trunc.assemble()?, beta)?.expectation(&a_full)
        }
    }
}

/// Defect of the exact truncation identity (boundary-interpolation form of
/// the perturbation formula):
/// Tr(A_B g|B) - Tr(A g) = beta int int cov_{g_s}(H_dB, A)
/// with H(s) = H - (1-s) H_dB. `a` must be supported inside `b`.
pub fn truncation_residual(
    h: &LocalHamiltonian,
    b: &BTreeSet<Vertex>,
    beta: f64,
    a: &DenseOperator,
    s_order: usize,
) -> Result<f64> {
    let supported_inside = match h.statistics() {
        // spin observables are given on their own sites and must embed into
        // the subspace of b
        Statistics::Spin => a.sites().iter().all(|v| b.contains(v)),
        // fermionic observables live on the full Fock space; the declared
        // mode support is what must lie inside b
        Statistics::Fermionic => a.support().iter().all(|v| b.contains(v)),
    };
    if !supported_inside {
        return Err(Error::InvalidArgument(
            "observable support must lie inside the truncation region".into(),
        ));
    }
    let term_truncated = truncated_expectation(h, b, beta, a)?;

    let h_full = h.assemble()?;
    let a_full = a.embed(h.graph())?;
    let term_full = ThermalState::gibbs(&h_full, beta)?.expectation(&a_full)?;

    let h_boundary = h.boundary_hamiltonian(b)?;
    let h0 = h_full.sub(&h_boundary)?;
    let avg = averaged_covariance(&h0, &h_full, beta, &a_full, s_order)?;

    Ok((term_truncated - term_full - avg).norm())
}

/// || g^S(beta) - (g|B)^S(beta) ||_1: the trace-norm gap between the reduced
/// full thermal state and the reduced thermal state of the truncated
/// Hamiltonian. For fermionic systems `s` and `b` must be contiguous mode
/// ranges, where tracing out Jordan-Wigner qubits coincides with the
/// fermionic reduction of even states.
pub fn locality_gap(
    h: &LocalHamiltonian,
    s: &BTreeSet<Vertex>,
    b: &BTreeSet<Vertex>,
    beta: f64,
) -> Result<f64> {
    if s.is_empty() || !s.is_subset(b) {
        return Err(Error::InvalidArgument("need nonempty S with S subset of B".into()));
    }
    if !b.iter().all(|v| h.graph().local_dim(*v).is_some()) {
        return Err(Error::InvalidArgument("B must consist of graph vertices".into()));
    }
    if h.statistics() == Statistics::Fermionic && !(contiguous(s) && contiguous(b)) {
        return Err(Error::InvalidArgument(
            "fermionic reductions need contiguous mode ranges".into(),
        ));
    }
    let full = ThermalState::gibbs(&h.assemble()?, beta)?;
    let reduced_full = full.reduced(s)?;

    let trunc = h.truncate(b)?;
    let reduced_trunc = ThermalState::gibbs(&trunc.assemble()?, beta)?
        .state_matrix()
        .partial_trace(s)?;

    reduced_full.sub(&reduced_trunc)?.schatten_norm(1.0)
}

fn contiguous(s: &BTreeSet<Vertex>) -> bool {
    match (s.iter().next(), s.iter().next_back()) {
        (Some(&lo), Some(&hi)) => hi - lo + 1 == s.len(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        fermionic_hopping_chain, standard_model, zero_on, FermionicSystem, ModelKind,
    };
    use crate::lattice::InteractionGraph;
    use crate::opalg::{kron, pauli_i, pauli_x, pauli_z, random_hermitian};
    use approx::assert_abs_diff_eq;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_qubit_state(seed: u64, beta: f64) -> ThermalState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = DenseOperator::new(vec![0, 1], vec![2, 2], None, random_hermitian(4, &mut rng))
            .unwrap();
        ThermalState::gibbs(&h, beta).unwrap()
    }

    fn op2(m: ndarray::Array2<Complex64>) -> DenseOperator {
        DenseOperator::new(vec![0, 1], vec![2, 2], None, m).unwrap()
    }

    #[test]
    fn gibbs_basics() {
        // beta = 0 is maximally mixed with Z = dim
        let g = InteractionGraph::chain(2, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.3).unwrap();
        let t = ThermalState::gibbs(&h.assemble().unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(t.log_partition(), (4.0f64).ln(), epsilon = 1e-12);
        for &p in t.populations() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
        // single qubit H = Z at beta = 1: populations e^{-+1}/(2 cosh 1)
        let z = DenseOperator::new(vec![0], vec![2], None, pauli_z()).unwrap();
        let t = ThermalState::gibbs(&z, 1.0).unwrap();
        assert_abs_diff_eq!(t.populations()[0], 0.880_797_077_977_882_4, epsilon = 1e-12);
        assert_abs_diff_eq!(t.populations()[1], 0.119_202_922_022_117_56, epsilon = 1e-12);
        // normalization for a random instance
        let t = two_qubit_state(1, 1.7);
        assert_abs_diff_eq!(t.state_matrix().trace().re, 1.0, epsilon = 1e-12);
        // positivity / full rank
        assert!(t.populations().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn gibbs_negative_beta() {
        let t = two_qubit_state(2, -2.3);
        assert_abs_diff_eq!(t.state_matrix().trace().re, 1.0, epsilon = 1e-12);
        assert!(t.populations().iter().all(|&p| p > 0.0));
        // populations now favor the top of the spectrum
        let p = t.populations();
        assert!(p[p.len() - 1] > p[0]);
    }

    #[test]
    fn covariance_with_identity_vanishes() {
        let t = two_qubit_state(3, 1.1);
        let id = op2(ndarray::Array2::eye(4));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = op2(random_hermitian(4, &mut rng));
        for tau in [0.0, 0.25, 0.7, 1.0] {
            let c = generalized_covariance(
                &t,
                &CovarianceQuery { a: id.clone(), b: b.clone(), tau },
            )
            .unwrap();
            assert!(c.norm() < 1e-12);
        }
        let avg = tau_averaged_covariance(&t, &id, &b).unwrap();
        assert!(avg.norm() < 1e-12);
    }

    #[test]
    fn covariance_product_state_disjoint_supports() {
        // product state, disjoint supports: all versions vanish
        let ha = random_hermitian(2, &mut ChaCha8Rng::seed_from_u64(5));
        let hb = random_hermitian(2, &mut ChaCha8Rng::seed_from_u64(6));
        let h = op2(&kron(&ha, &pauli_i()) + &kron(&pauli_i(), &hb));
        let t = ThermalState::gibbs(&h, 0.8).unwrap();
        let a = op2(kron(&pauli_z(), &pauli_i()));
        let b = op2(kron(&pauli_i(), &pauli_x()));
        for tau in [0.0, 0.5, 1.0] {
            let c = generalized_covariance(
                &t,
                &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
            )
            .unwrap();
            assert!(c.norm() < 1e-12, "tau={tau}: {c}");
        }
    }

    #[test]
    fn ising_two_site_closed_form() {
        // H = Z x Z at beta = 1: cov^tau(Z_1, Z_2) = -tanh(1) for every tau
        let h = op2(kron(&pauli_z(), &pauli_z()));
        let t = ThermalState::gibbs(&h, 1.0).unwrap();
        let a = op2(kron(&pauli_z(), &pauli_i()));
        let b = op2(kron(&pauli_i(), &pauli_z()));
        for tau in [0.0, 0.3, 0.5, 0.9, 1.0] {
            let c = generalized_covariance(
                &t,
                &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
            )
            .unwrap();
            assert_abs_diff_eq!(c.re, -0.761_594_155_955_764_9, epsilon = 1e-12);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn covariance_from_full_rank_state_matches_gibbs_path() {
        let t = two_qubit_state(7, 1.3);
        let rho = t.state_matrix();
        let t2 = ThermalState::from_state(&rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = op2(random_hermitian(4, &mut rng));
        let b = op2(random_hermitian(4, &mut rng));
        for tau in [0.2, 0.6] {
            let c1 = generalized_covariance(
                &t,
                &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
            )
            .unwrap();
            let c2 = generalized_covariance(
                &t2,
                &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
            )
            .unwrap();
            assert!((c1 - c2).norm() < 1e-9, "{c1} vs {c2}");
        }
    }

    #[test]
    fn tau_average_matches_quadrature_oracle() {
        // closed-form divided-difference kernel against a 64-node
        // Gauss-Legendre quadrature of the generalized covariance over tau
        let t = two_qubit_state(9, 1.9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = op2(random_hermitian(4, &mut rng));
        let b = op2(random_hermitian(4, &mut rng));
        let closed = tau_averaged_covariance(&t, &a, &b).unwrap();
        let rule = GaussLegendre::new(64).unwrap();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
            acc += generalized_covariance(
                &t,
                &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
            )
            .unwrap()
                * w;
        }
        assert!((closed - acc).norm() < 1e-10, "{closed} vs {acc}");
    }

    #[test]
    fn tau_average_commuting_case_is_plain_covariance() {
        // diagonal H, A, B: the covariance is tau-independent
        let h = op2(kron(&pauli_z(), &pauli_z()));
        let t = ThermalState::gibbs(&h, 0.7).unwrap();
        let a = op2(kron(&pauli_z(), &pauli_i()));
        let b = op2(kron(&pauli_i(), &pauli_z()));
        let avg = tau_averaged_covariance(&t, &a, &b).unwrap();
        let plain = generalized_covariance(
            &t,
            &CovarianceQuery { a: a.clone(), b: b.clone(), tau: 1.0 },
        )
        .unwrap();
        assert!((avg - plain).norm() < 1e-12);
    }

    #[test]
    fn averaged_covariance_vanishes_for_equal_hamiltonians() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = op2(random_hermitian(4, &mut rng));
        let a = op2(random_hermitian(4, &mut rng));
        let v = averaged_covariance(&h, &h, 1.2, &a, 8).unwrap();
        assert!(v.norm() < 1e-14);
        assert!(averaged_covariance(&h, &h, 1.2, &a, 1).is_err());
    }

    #[test]
    fn averaged_covariance_matches_classical_double_integral() {
        // diagonal H0, H, A reduce to a classical covariance in the
        // interpolated Boltzmann distribution; compare against a scalar
        // quadrature oracle over s with plain probability covariances
        let diag = |v: &[f64]| {
            op2(ndarray::Array2::from_diag(
                &v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Array1<_>>(),
            ))
        };
        let h0 = diag(&[0.3, -0.6, 1.1, 0.2]);
        let h1 = diag(&[1.0, 0.4, -0.8, 0.5]);
        let a = diag(&[0.2, 1.4, -0.3, 0.9]);
        let beta = 1.15;
        let got = averaged_covariance(&h0, &h1, beta, &a, 48).unwrap();

        let e0: Vec<f64> = (0..4).map(|i| h0.matrix()[(i, i)].re).collect();
        let e1: Vec<f64> = (0..4).map(|i| h1.matrix()[(i, i)].re).collect();
        let ea: Vec<f64> = (0..4).map(|i| a.matrix()[(i, i)].re).collect();
        let rule = GaussLegendre::new(48).unwrap();
        let oracle = beta
            * rule.integrate(|s| {
                let es: Vec<f64> = e0.iter().zip(&e1).map(|(&x, &y)| x + s * (y - x)).collect();
                let zmax = es.iter().copied().fold(f64::INFINITY, f64::min);
                let w: Vec<f64> = es.iter().map(|&e| (-beta * (e - zmax)).exp()).collect();
                let z: f64 = w.iter().sum();
                let p: Vec<f64> = w.iter().map(|&x| x / z).collect();
                let dh: Vec<f64> = e1.iter().zip(&e0).map(|(&y, &x)| y - x).collect();
                let mean_dh: f64 = p.iter().zip(&dh).map(|(&pi, &x)| pi * x).sum();
                let mean_a: f64 = p.iter().zip(&ea).map(|(&pi, &x)| pi * x).sum();
                let mean_prod: f64 = p
                    .iter()
                    .zip(dh.iter().zip(&ea))
                    .map(|(&pi, (&x, &y))| pi * x * y)
                    .sum();
                mean_prod - mean_dh * mean_a
            });
        assert!((got.re - oracle).abs() < 1e-10, "{got} vs {oracle}");
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn averaged_covariance_self_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h0 = op2(random_hermitian(4, &mut rng));
        let h1 = op2(random_hermitian(4, &mut rng));
        let a = op2(random_hermitian(4, &mut rng));
        let v32 = averaged_covariance(&h0, &h1, 1.0, &a, 32).unwrap();
        let v64 = averaged_covariance(&h0, &h1, 1.0, &a, 64).unwrap();
        assert!((v32 - v64).norm() < 1e-10);
    }

    #[test]
    fn perturbation_residual_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        // H0 = H: exactly zero
        let h = op2(random_hermitian(4, &mut rng));
        let a = op2(random_hermitian(4, &mut rng));
        assert_eq!(perturbation_residual(&h, &h, 1.0, &a, 8).unwrap(), 0.0);
        // beta = 0: both sides vanish
        let h0 = op2(random_hermitian(4, &mut rng));
        assert!(perturbation_residual(&h0, &h, 0.0, &a, 8).unwrap() < 1e-13);
        // random 3-qubit instances at beta = 1 with order 64
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let h0 = DenseOperator::new(
                vec![0, 1, 2],
                vec![2, 2, 2],
                None,
                random_hermitian(8, &mut rng),
            )
            .unwrap();
            let h1 = DenseOperator::new(
                vec![0, 1, 2],
                vec![2, 2, 2],
                None,
                random_hermitian(8, &mut rng),
            )
            .unwrap();
            let a = DenseOperator::new(
                vec![0, 1, 2],
                vec![2, 2, 2],
                None,
                random_hermitian(8, &mut rng),
            )
            .unwrap();
            let r = perturbation_residual(&h0, &h1, 1.0, &a, 64).unwrap();
            assert!(r < 1e-8, "seed {seed}: residual {r}");
        }
    }

    #[test]
    fn perturbation_residual_gauss_legendre_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let h0 = op2(random_hermitian(4, &mut rng));
        let h1 = op2(random_hermitian(4, &mut rng));
        let a = op2(random_hermitian(4, &mut rng));
        let beta = 2.5;
        let r4 = perturbation_residual(&h0, &h1, beta, &a, 4).unwrap();
        let r8 = perturbation_residual(&h0, &h1, beta, &a, 8).unwrap();
        let r16 = perturbation_residual(&h0, &h1, beta, &a, 16).unwrap();
        assert!(r8 < r4 || r8 < 1e-12, "r4={r4:e} r8={r8:e}");
        assert!(r16 < r8 || r16 < 1e-12, "r8={r8:e} r16={r16:e}");
    }

    #[test]
    fn truncation_residual_spin() {
        // B = V: exactly zero (empty boundary)
        let g = InteractionGraph::chain(4, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.4).unwrap();
        let all: BTreeSet<Vertex> = g.vertices().iter().copied().collect();
        let a = DenseOperator::single_site(&g, 0, pauli_z()).unwrap();
        let r = truncation_residual(&h, &all, 0.7, &a, 8).unwrap();
        assert!(r < 1e-12);

        // transverse-field Ising chain(5), B = first three sites
        let g = InteractionGraph::chain(5, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.5).unwrap();
        let b: BTreeSet<Vertex> = [0, 1, 2].into_iter().collect();
        for a in [
            DenseOperator::single_site(&g, 0, pauli_z()).unwrap(),
            DenseOperator::single_site(&g, 0, pauli_x()).unwrap(),
        ] {
            let r = truncation_residual(&h, &b, 0.5, &a, 64).unwrap();
            assert!(r < 1e-8, "residual {r}");
        }
        // support outside B is rejected
        let a_out = DenseOperator::single_site(&g, 4, pauli_z()).unwrap();
        assert!(truncation_residual(&h, &b, 0.5, &a_out, 8).is_err());
    }

    #[test]
    fn truncation_residual_fermionic() {
        let sys = FermionicSystem::new(4).unwrap();
        let h = fermionic_hopping_chain(&sys, 1.0, 0.5).unwrap();
        let b: BTreeSet<Vertex> = [0, 1].into_iter().collect();
        let sites: Vec<Vertex> = (0..4).collect();
        let dims = vec![2usize; 4];
        let n0 = DenseOperator::new(
            sites.clone(),
            dims.clone(),
            Some([0usize].into_iter().collect()),
            sys.number(0),
        )
        .unwrap();
        let hop01 = DenseOperator::new(
            sites,
            dims,
            Some([0usize, 1].into_iter().collect()),
            sys.hopping(0, 1, 1.0),
        )
        .unwrap();
        for a in [n0, hop01] {
            let r = truncation_residual(&h, &b, 0.6, &a, 64).unwrap();
            assert!(r < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn fermionic_truncated_thermal_state_factorizes() {
        // g[H|B](beta) g[H|Bc](beta) = g[H - H_dB](beta) with partition
        // functions over the truncated mode spaces
        let sys = FermionicSystem::new(4).unwrap();
        let h = fermionic_hopping_chain(&sys, 1.0, 0.7).unwrap();
        let beta = 0.9;
        let b: BTreeSet<Vertex> = [0, 1].into_iter().collect();
        let comp: BTreeSet<Vertex> = [2, 3].into_iter().collect();

        let fock_z = |region: &BTreeSet<Vertex>| -> (DenseOperator, f64) {
            let ht = h.truncate(region).unwrap().assemble().unwrap();
            let spec = ht.hermitian_spectrum().unwrap();
            let exp_op = spec.function(|e| Complex64::new((-beta * e).exp(), 0.0));
            // partition function over the region's Fock space: full-space
            // trace divided by 2^(modes outside)
            let z = exp_op.trace().re / 2f64.powi((4 - region.len()) as i32);
            (exp_op, z)
        };
        let (eb, zb) = fock_z(&b);
        let (ec, zc) = fock_z(&comp);
        let lhs = eb
            .matmul(&ec)
            .unwrap()
            .scale(Complex64::new(1.0 / (zb * zc), 0.0));

        let h_boundary = h.boundary_hamiltonian(&b).unwrap();
        let h0 = h.assemble().unwrap().sub(&h_boundary).unwrap();
        let rhs = ThermalState::gibbs(&h0, beta).unwrap().state_matrix();
        let diff = lhs.sub(&rhs).unwrap().schatten_norm(f64::INFINITY).unwrap();
        assert!(diff < 1e-10, "factorization defect {diff}");
    }

    #[test]
    fn locality_gap_cases() {
        let g = InteractionGraph::chain(6, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.3).unwrap();
        let all: BTreeSet<Vertex> = g.vertices().iter().copied().collect();
        let s: BTreeSet<Vertex> = [2].into_iter().collect();
        // B = V gives zero
        let gap = locality_gap(&h, &s, &all, 0.4).unwrap();
        assert!(gap < 1e-12);
        // a buffer region gives a small positive gap
        let b: BTreeSet<Vertex> = [1, 2, 3, 4].into_iter().collect();
        let gap = locality_gap(&h, &s, &b, 0.4).unwrap();
        assert!(gap > 0.0 && gap < 0.5);
        // nesting violation
        let s_bad: BTreeSet<Vertex> = [0].into_iter().collect();
        assert!(locality_gap(&h, &s_bad, &b, 0.4).is_err());
    }

    #[test]
    fn locality_gap_noninteracting_vanishes() {
        // no boundary terms cut: the reduced states coincide
        let g = InteractionGraph::chain(4, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 0.0, 0.8).unwrap();
        let s: BTreeSet<Vertex> = [1].into_iter().collect();
        let b: BTreeSet<Vertex> = [0, 1, 2].into_iter().collect();
        let gap = locality_gap(&h, &s, &b, 0.9).unwrap();
        assert!(gap < 1e-12, "gap {gap}");
    }

    #[test]
    fn covariance_bound_symmetry_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let t = ThermalState::gibbs(
                &op2(random_hermitian(4, &mut rng)),
                0.5 + 2.0 * (rng.next_u64() % 1000) as f64 / 1000.0,
            )
            .unwrap();
            let a = op2(random_hermitian(4, &mut rng));
            let b = op2(random_hermitian(4, &mut rng));
            let na = a.schatten_norm(f64::INFINITY).unwrap();
            let nb = b.schatten_norm(f64::INFINITY).unwrap();
            for tau in [0.0, 0.21, 0.5, 0.77, 1.0] {
                let c = generalized_covariance(
                    &t,
                    &CovarianceQuery { a: a.clone(), b: b.clone(), tau },
                )
                .unwrap();
                // |cov^tau(A,B)| <= ||A|| ||B||
                assert!(c.norm() <= na * nb * (1.0 + 1e-12));
                // cov^tau(A,B) = cov^{1-tau}(B,A)
                let sym = generalized_covariance(
                    &t,
                    &CovarianceQuery { a: b.clone(), b: a.clone(), tau: 1.0 - tau },
                )
                .unwrap();
                assert!((c - sym).norm() < 1e-12);
            }
            // tau -> cov^tau(A,A) is convex on a grid for Hermitian A
            let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
            let vals: Vec<f64> = grid
                .iter()
                .map(|&tau| {
                    generalized_covariance(
                        &t,
                        &CovarianceQuery { a: a.clone(), b: a.clone(), tau },
                    )
                    .unwrap()
                    .re
                })
                .collect();
            for w in vals.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-10);
            }
        }
    }

    #[test]
    fn golden_thompson_chain_bound() {
        // || exp(-beta(H - sum_j H_{G_j})) ||_1 <= Z(beta) prod_j || exp(|beta| H_{G_j}) ||_inf
        let g = InteractionGraph::chain(4, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.45).unwrap();
        let h_full = h.assemble().unwrap();
        let beta = 0.8;
        let z = ThermalState::gibbs(&h_full, beta).unwrap().log_partition().exp();

        let g1 = crate::lattice::EdgeSubset::from_indices(h.graph(), vec![0]).unwrap();
        let g2 = crate::lattice::EdgeSubset::from_indices(h.graph(), vec![2, 3]).unwrap();
        let hg1 = h.assemble_edges(&g1).unwrap();
        let hg2 = h.assemble_edges(&g2).unwrap();

        let perturbed = h_full.sub(&hg1).unwrap().sub(&hg2).unwrap();
        let lhs = perturbed
            .hermitian_spectrum()
            .unwrap()
            .function(|e| Complex64::new((-beta * e).exp(), 0.0))
            .schatten_norm(1.0)
            .unwrap();
        let norm_exp = |m: &DenseOperator| {
            m.hermitian_spectrum()
                .unwrap()
                .function(|e| Complex64::new((beta.abs() * e).exp(), 0.0))
                .schatten_norm(f64::INFINITY)
                .unwrap()
        };
        let rhs = z * norm_exp(&hg1) * norm_exp(&hg2);
        assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} > {rhs}");
    }

    #[test]
    fn spin_truncated_expectation_full_space_consistency() {
        // evaluating the truncated thermal expectation on the B subspace or
        // on the full space (truncated terms embedded) must agree
        let g = InteractionGraph::chain(5, false).unwrap();
        let h = standard_model(ModelKind::Ising, &g, 1.0, 0.5).unwrap();
        let b: BTreeSet<Vertex> = [0, 1, 2].into_iter().collect();
        let a = DenseOperator::single_site(&g, 1, pauli_z()).unwrap();
        let beta = 0.8;
        let subspace = truncated_expectation(&h, &b, beta, &a).unwrap();

        let keep = h.graph().restricted_edges(&b);
        let h_inside = h.assemble_edges(&keep).unwrap();
        let full = ThermalState::gibbs(&h_inside, beta)
            .unwrap()
            .expectation(&a.embed(h.graph()).unwrap())
            .unwrap();
        assert!((subspace - full).norm() < 1e-11, "{subspace} vs {full}");
    }

    #[test]
    fn zero_hamiltonian_state_is_uniform() {
        let g = InteractionGraph::chain(3, false).unwrap();
        let t = ThermalState::gibbs(&zero_on(&g), 5.0).unwrap();
        for &p in t.populations() {
            assert_abs_diff_eq!(p, 1.0 / 8.0, epsilon = 1e-12);
        }
    }
}
