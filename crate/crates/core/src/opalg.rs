//! Dense operator algebra on finite tensor-product spaces.
//!
//! Operators carry their site list (ascending vertex ids), per-site local
//! dimensions and a declared support. Index arithmetic is mixed-radix with
//! the first site as the most significant digit, matching the graph's vertex
//! order everywhere; one global convention avoids permutation bugs.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Norm, SVD, UPLO};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{InteractionGraph, Vertex};

/// Relative Frobenius deviation below which a matrix is symmetrized and
/// accepted as Hermitian. Kronecker assembly accumulates roundoff well below
/// this; anything above it is treated as a real error.
pub const HERMITICITY_TOLERANCE: f64 = 1e-6;

/// A dense complex matrix on a tensor-product space with declared support.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    sites: Vec<Vertex>,
    dims: Vec<usize>,
    support: BTreeSet<Vertex>,
    matrix: Array2<Complex64>,
}

/// Cached Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    sites: Vec<Vertex>,
    dims: Vec<usize>,
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 identity.
pub fn pauli_i() -> Array2<Complex64> {
    Array2::eye(2)
}

pub fn pauli_x() -> Array2<Complex64> {
    ndarray::array![[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]
}

pub fn pauli_y() -> Array2<Complex64> {
    ndarray::array![[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]]
}

pub fn pauli_z() -> Array2<Complex64> {
    ndarray::array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]
}

/// Kronecker product in the row-major tensor convention.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == c(0., 0.) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Random Hermitian matrix with independent normal entries, symmetrized.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> Array2<Complex64> {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = c(standard_normal(rng), standard_normal(rng));
        }
    }
    let mh = m.t().mapv(|z| z.conj());
    (&m + &mh).mapv(|z| z * 0.5)
}

/// Standard normal deviate by Box-Muller; depends only on the generator's
/// u64 stream, so seeded output is stable across dependency upgrades.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let v: f64 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > f64::MIN_POSITIVE {
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Mixed-radix strides, first site most significant.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

impl DenseOperator {
    /// Wraps a matrix acting on the given sites. `support` defaults to all
    /// sites when `None`.
    pub fn new(
        sites: Vec<Vertex>,
        dims: Vec<usize>,
        support: Option<BTreeSet<Vertex>>,
        matrix: Array2<Complex64>,
    ) -> Result<Self> {
        if sites.len() != dims.len() {
            return Err(Error::InvalidArgument("sites/dims length mismatch".into()));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("sites must be strictly ascending".into()));
        }
        let dim: usize = dims.iter().product();
        if matrix.dim() != (dim, dim) {
            return Err(Error::InvalidArgument(format!(
                "matrix is {:?}, expected {dim}x{dim}",
                matrix.dim()
            )));
        }
        let support = support.unwrap_or_else(|| sites.iter().copied().collect());
        if !support.iter().all(|v| sites.contains(v)) {
            return Err(Error::InvalidArgument("support must be a subset of sites".into()));
        }
        Ok(DenseOperator {
            sites,
            dims,
            support,
            matrix,
        })
    }

    /// Identity operator on the given sites.
    pub fn identity(sites: Vec<Vertex>, dims: Vec<usize>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        Self::new(sites, dims, Some(BTreeSet::new()), Array2::eye(dim))
    }

    /// Identity on the full space of a graph.
    pub fn identity_on(g: &InteractionGraph) -> Self {
        let sites: Vec<Vertex> = g.vertices().to_vec();
        let dims: Vec<usize> = sites.iter().map(|v| g.local_dim(*v).unwrap()).collect();
        Self::identity(sites, dims).expect("graph dims are valid")
    }

    /// Single-site operator on one vertex of a graph.
    pub fn single_site(g: &InteractionGraph, v: Vertex, m: Array2<Complex64>) -> Result<Self> {
        let d = g
            .local_dim(v)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown vertex {v}")))?;
        if m.dim() != (d, d) {
            return Err(Error::InvalidArgument("matrix does not match the site dimension".into()));
        }
        Self::new(vec![v], vec![d], None, m)
    }

    /// Operator from per-site factors via Kronecker product; sites ascending.
    pub fn from_factors(sites: Vec<Vertex>, factors: &[Array2<Complex64>]) -> Result<Self> {
        if sites.len() != factors.len() || sites.is_empty() {
            return Err(Error::InvalidArgument("one factor per site required".into()));
        }
        let dims: Vec<usize> = factors.iter().map(|f| f.dim().0).collect();
        let mut m = factors[0].clone();
        for f in &factors[1..] {
            m = kron(&m, f);
        }
        Self::new(sites, dims, None, m)
    }

    pub fn sites(&self) -> &[Vertex] {
        &self.sites
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn support(&self) -> &BTreeSet<Vertex> {
        &self.support
    }

    pub fn set_support(&mut self, support: BTreeSet<Vertex>) -> Result<()> {
        if !support.iter().all(|v| self.sites.contains(v)) {
            return Err(Error::InvalidArgument("support must be a subset of sites".into()));
        }
        self.support = support;
        Ok(())
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim().0
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum()
    }

    pub fn dagger(&self) -> Self {
        DenseOperator {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            support: self.support.clone(),
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        DenseOperator {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            support: self.support.clone(),
            matrix: self.matrix.mapv(|x| x * z),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(DenseOperator {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            support: self.support.union(&other.support).copied().collect(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c(-1., 0.)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(DenseOperator {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            support: self.support.union(&other.support).copied().collect(),
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    /// Relative Frobenius deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let diff = &self.matrix - &self.matrix.t().mapv(|z| z.conj());
        let denom = self.matrix.norm_l2().max(1.0);
        diff.norm_l2() / denom
    }

    /// Tensor-product embedding into the full space of `g`, identity on the
    /// sites the operator does not act on.
    pub fn embed(&self, g: &InteractionGraph) -> Result<DenseOperator> {
        let full_sites: Vec<Vertex> = g.vertices().to_vec();
        let full_dims: Vec<usize> =
            full_sites.iter().map(|v| g.local_dim(*v).unwrap()).collect();
        for (s, d) in self.sites.iter().zip(&self.dims) {
            match g.local_dim(*s) {
                Some(gd) if gd == *d => {}
                Some(gd) => {
                    return Err(Error::InvalidArgument(format!(
                        "site {s}: operator dim {d} != graph dim {gd}"
                    )))
                }
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "site {s} is not a graph vertex"
                    )))
                }
            }
        }
        if self.sites == full_sites {
            return Ok(self.clone());
        }
        let full_strides = strides(&full_dims);
        let positions: Vec<usize> = self
            .sites
            .iter()
            .map(|s| full_sites.iter().position(|v| v == s).unwrap())
            .collect();
        let comp_positions: Vec<usize> =
            (0..full_sites.len()).filter(|p| !positions.contains(p)).collect();

        // offsets contributed by the operator's own digits and by the
        // complement digits; a full index is the sum of the two
        let own = offsets(&self.dims, &positions, &full_strides);
        let comp_dims: Vec<usize> = comp_positions.iter().map(|&p| full_dims[p]).collect();
        let comp = offsets(&comp_dims, &comp_positions, &full_strides);

        let n: usize = full_dims.iter().product();
        let mut out = Array2::zeros((n, n));
        for (a, &ra) in own.iter().enumerate() {
            for (b, &cb) in own.iter().enumerate() {
                let v = self.matrix[(a, b)];
                if v == c(0., 0.) {
                    continue;
                }
                for &k in &comp {
                    out[(ra + k, cb + k)] = v;
                }
            }
        }
        DenseOperator::new(full_sites, full_dims, Some(self.support.clone()), out)
    }

    /// Partial trace keeping the given sites; `keep` empty reduces to the
    /// scalar trace as a 1x1 operator.
    pub fn partial_trace(&self, keep: &BTreeSet<Vertex>) -> Result<DenseOperator> {
        if let Some(&v) = keep.iter().find(|v| !self.sites.contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "keep site {v} is not among the operator's sites"
            )));
        }
        if keep.is_empty() {
            let mut out = Array2::zeros((1, 1));
            out[(0, 0)] = self.trace();
            return DenseOperator::new(vec![0], vec![1], Some(BTreeSet::new()), out);
        }
        let my_strides = strides(&self.dims);
        let keep_pos: Vec<usize> = self
            .sites
            .iter()
            .enumerate()
            .filter(|(_, s)| keep.contains(s))
            .map(|(p, _)| p)
            .collect();
        let comp_pos: Vec<usize> = self
            .sites
            .iter()
            .enumerate()
            .filter(|(_, s)| !keep.contains(s))
            .map(|(p, _)| p)
            .collect();
        let keep_dims: Vec<usize> = keep_pos.iter().map(|&p| self.dims[p]).collect();
        let comp_dims: Vec<usize> = comp_pos.iter().map(|&p| self.dims[p]).collect();
        let keep_off = offsets(&keep_dims, &keep_pos, &my_strides);
        let comp_off = offsets(&comp_dims, &comp_pos, &my_strides);

        let dk: usize = keep_dims.iter().product();
        let mut out = Array2::zeros((dk, dk));
        for (a, &ra) in keep_off.iter().enumerate() {
            for (b, &cb) in keep_off.iter().enumerate() {
                let mut acc = c(0., 0.);
                for &k in &comp_off {
                    acc += self.matrix[(ra + k, cb + k)];
                }
                out[(a, b)] = acc;
            }
        }
        let keep_sites: Vec<Vertex> = keep_pos.iter().map(|&p| self.sites[p]).collect();
        let support: BTreeSet<Vertex> =
            self.support.iter().copied().filter(|v| keep.contains(v)).collect();
        DenseOperator::new(keep_sites, keep_dims, Some(support), out)
    }

    /// Full eigendecomposition of a Hermitian operator, eigenvalues ascending.
    ///
    /// Deviations below [`HERMITICITY_TOLERANCE`] are symmetrized away;
    /// anything larger is rejected.
    pub fn hermitian_spectrum(&self) -> Result<Spectrum> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: HERMITICITY_TOLERANCE,
            });
        }
        let mh = self.matrix.t().mapv(|z| z.conj());
        let sym = (&self.matrix + &mh).mapv(|z| z * 0.5);
        let (vals, vecs) = sym
            .eigh(UPLO::Lower)
            .map_err(|e| Error::InvalidArgument(format!("eigendecomposition failed: {e}")))?;
        // row-major input reaches LAPACK transposed, i.e. conjugated for a
        // Hermitian matrix; conjugate back so columns satisfy A U = U Lambda
        let vecs = vecs.mapv(|z| z.conj());
        Ok(Spectrum {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            eigenvalues: vals,
            eigenvectors: vecs,
        })
    }

    /// Schatten p-norm (p >= 1, infinity allowed) of the singular values.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("schatten norm needs p >= 1, got {p}")));
        }
        let (_, sv, _) = self
            .matrix
            .svd(false, false)
            .map_err(|e| Error::InvalidArgument(format!("svd failed: {e}")))?;
        if p.is_infinite() {
            return Ok(sv.iter().copied().fold(0.0, f64::max));
        }
        if p == 1.0 {
            return Ok(sv.sum());
        }
        Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.sites != other.sites || self.dims != other.dims {
            return Err(Error::InvalidArgument("operators act on different spaces".into()));
        }
        Ok(())
    }
}

/// index offsets contributed by digits at `positions` with ambient `strides`
fn offsets(dims: &[usize], positions: &[usize], ambient_strides: &[usize]) -> Vec<usize> {
    let count: usize = dims.iter().product();
    let local_strides = strides(dims);
    (0..count)
        .map(|idx| {
            positions
                .iter()
                .zip(dims)
                .zip(&local_strides)
                .map(|((&pos, &d), &ls)| (idx / ls % d) * ambient_strides[pos])
                .sum()
        })
        .collect()
}

impl Spectrum {
    /// Assembles a spectrum from precomputed parts (eigenvalues ascending,
    /// eigenvectors as columns).
    pub fn from_parts(
        sites: Vec<Vertex>,
        dims: Vec<usize>,
        eigenvalues: Array1<f64>,
        eigenvectors: Array2<Complex64>,
    ) -> Self {
        debug_assert!(eigenvalues.windows(2).into_iter().all(|w| w[0] <= w[1]));
        Spectrum {
            sites,
            dims,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn sites(&self) -> &[Vertex] {
        &self.sites
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// U f(Lambda) U^dagger for a scalar function of the eigenvalues.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> DenseOperator {
        self.function_indexed(|_, e| f(e))
    }

    /// Like [`Self::function`] with access to the eigenvalue index.
    pub fn function_indexed(&self, f: impl Fn(usize, f64) -> Complex64) -> DenseOperator {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
            let fj = f(j, self.eigenvalues[j]);
            col.mapv_inplace(|z| z * fj);
        }
        let m = scaled.dot(&self.eigenvectors.t().mapv(|z| z.conj()));
        DenseOperator {
            sites: self.sites.clone(),
            dims: self.dims.clone(),
            support: self.sites.iter().copied().collect(),
            matrix: m.into_shape_with_order((d, d)).unwrap(),
        }
    }

    /// Transforms an operator into this eigenbasis: U^dagger A U.
    pub fn to_eigenbasis(&self, op: &DenseOperator) -> Result<Array2<Complex64>> {
        if op.dim() != self.dim() {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let udag = self.eigenvectors.t().mapv(|z| z.conj());
        Ok(udag.dot(op.matrix()).dot(&self.eigenvectors))
    }
}

/// Fractional power `g(beta)^tau` of the thermal state of the decomposed
/// Hamiltonian: U diag(p_j^tau) U^dagger with shift-stabilized populations
/// p_j = exp(-beta (E_j - E_ref)) / Z_shift.
pub fn fractional_power(s: &Spectrum, tau: f64, beta: f64) -> Result<DenseOperator> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("tau must be in [0,1], got {tau}")));
    }
    let p = gibbs_populations(s.eigenvalues(), beta);
    let d = s.dim();
    let mut scaled = s.eigenvectors.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let w = p[j].powf(tau);
        col.mapv_inplace(|z| z * w);
    }
    let m = scaled.dot(&s.eigenvectors.t().mapv(|z| z.conj()));
    DenseOperator::new(
        s.sites.clone(),
        s.dims.clone(),
        None,
        m.into_shape_with_order((d, d)).unwrap(),
    )
}

/// Thermal populations exp(-beta (E_j - E_ref)) / Z, stabilized by shifting
/// with the dominant eigenvalue (min for beta >= 0, max otherwise).
pub fn gibbs_populations(eigenvalues: &Array1<f64>, beta: f64) -> Array1<f64> {
    let e_ref = if beta >= 0.0 {
        eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let mut w = eigenvalues.mapv(|e| (-beta * (e - e_ref)).exp());
    let z = w.sum();
    w.mapv_inplace(|x| x / z);
    w
}

/// Permutation operator on `copies` tensor factors of dimension `dim` that
/// swaps factors `i` and `j` (1-based, i < j).
pub fn swap_operator(copies: usize, which: (usize, usize), dim: usize) -> Result<DenseOperator> {
    let (i, j) = which;
    if !(1 <= i && i < j && j <= copies) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= i < j <= copies, got ({i},{j}) with {copies} copies"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dim must be positive".into()));
    }
    let dims = vec![dim; copies];
    let st = strides(&dims);
    let n: usize = dims.iter().product();
    let mut m = Array2::zeros((n, n));
    for row in 0..n {
        let di = (row / st[i - 1] % dim) as isize;
        let dj = (row / st[j - 1] % dim) as isize;
        // swap the i-th and j-th digits of the row index
        let col = (row as isize
            + (dj - di) * st[i - 1] as isize
            + (di - dj) * st[j - 1] as isize) as usize;
        m[(row, col)] = c(1., 0.);
    }
    DenseOperator::new((0..copies).collect(), dims, None, m)
}
