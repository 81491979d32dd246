//! Dense complex linear algebra over multipartite tensor spaces.
//!
//! Everything here is plain dense storage: states are flat amplitude
//! vectors, operators are row-major complex matrices. Subsystem structure
//! is carried separately by [`MultipartiteDims`], and the flat index of a
//! basis vector `|h₁ h₂ … hₙ⟩` is the mixed-radix value with `h₁` most
//! significant, so `kron` and subsystem indexing agree by construction.
//!
//! The sizes this crate targets (ambient dimension ≤ 729) make dense
//! operations and full SVDs cheap; there is no sparse path.

pub use num_complex::Complex64;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Errors from tensor-space operations.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem index {j} out of range for {n} subsystems")]
    SubsystemOutOfRange { j: usize, n: usize },
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),
}

pub type TensorResult<T> = Result<T, TensorError>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    /// Build from row-major entries; the length must equal `rows × cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> TensorResult<Self> {
        if entries.len() != rows * cols {
            return Err(TensorError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, c: usize) -> StateVector {
        assert!(c < self.cols, "column index out of range");
        StateVector::from_amplitudes((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vector(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for c in 0..self.cols {
                acc += self.get(r, c) * v.amplitudes()[c];
            }
            *slot = acc;
        }
        StateVector::from_amplitudes(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    /// Conjugate transpose A†.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖A†A − I‖_F, the isometry defect of a tall matrix.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.sub(&ComplexMatrix::identity(self.cols)).frobenius_norm()
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        self.rows >= self.cols && self.isometry_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self.isometry_defect() <= tol
            && self.mul(&self.adjoint()).sub(&ComplexMatrix::identity(self.rows)).frobenius_norm()
                <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.adjoint()).frobenius_norm() <= tol
    }

    fn to_na(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    fn from_na(m: &nalgebra::DMatrix<Complex64>) -> Self {
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    /// Thin singular value decomposition `A = U Σ V†` with singular values
    /// in non-increasing order. Returns `(U, σ, V†)`.
    pub fn svd(&self) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
        let svd = self.to_na().svd(true, true);
        let u = ComplexMatrix::from_na(&svd.u.expect("svd requested u"));
        let vt = ComplexMatrix::from_na(&svd.v_t.expect("svd requested v_t"));
        (u, svd.singular_values.as_slice().to_vec(), vt)
    }

    /// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
    /// non-increasing order. Returns `(eigenvalues, eigenvector columns)`.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        assert!(self.is_square(), "hermitian_eigen of a non-square matrix");
        let eig = nalgebra::SymmetricEigen::new(self.to_na());
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors =
            ComplexMatrix::from_fn(self.rows, self.rows, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        let (values, _) = self.hermitian_eigen();
        *values.last().expect("empty matrix")
    }

    /// Unitary polar factor `U V†` from the SVD; for a full-column-rank tall
    /// matrix this is its nearest isometry in Frobenius norm.
    pub fn polar_orthonormal(&self) -> ComplexMatrix {
        let (u, _, vt) = self.svd();
        u.mul(&vt)
    }
}

// JSON encoding shared by all file formats and reports: a complex scalar
// is [re, im], a matrix is its rows, a state is a flat amplitude list.
impl serde::Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            let row: Vec<[f64; 2]> = (0..self.cols)
                .map(|c| {
                    let v = self.get(r, c);
                    [v.re, v.im]
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl serde::Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for a in &self.amplitudes {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// Dense complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amplitudes: vec![ZERO; dim] }
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    /// ⟨self|other⟩ with the conjugate on `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Outer product |self⟩⟨other|.
    pub fn outer(&self, other: &StateVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |r, c| {
            self.amplitudes[r] * other.amplitudes[c].conj()
        })
    }

    /// |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        assert_eq!(self.dim(), other.dim());
        Self {
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        assert_eq!(self.dim(), other.dim());
        Self {
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> StateVector {
        Self { amplitudes: self.amplitudes.iter().map(|a| a * factor).collect() }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.sub(other).norm()
    }

    /// Interpret the amplitudes as a `rows × cols` row-major matrix.
    pub fn reshape(&self, rows: usize, cols: usize) -> TensorResult<ComplexMatrix> {
        ComplexMatrix::from_entries(rows, cols, self.amplitudes.clone())
    }

    pub fn as_column(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), 1, |r, _| self.amplitudes[r])
    }
}

/// Ordered subsystem dimensions `(d₀, …, d_{n−1})` of a multipartite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipartiteDims {
    dims: Vec<usize>,
}

impl serde::Serialize for MultipartiteDims {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.dims.serialize(serializer)
    }
}

impl MultipartiteDims {
    pub fn new(dims: Vec<usize>) -> TensorResult<Self> {
        if dims.is_empty() {
            return Err(TensorError::InvalidDims("no subsystems".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(TensorError::InvalidDims(format!("subsystem dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    /// Tripartite space with all three factors of dimension `d`.
    pub fn uniform_tripartite(d: usize) -> Self {
        Self::new(vec![d, d, d]).expect("d >= 2")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, j: usize) -> usize {
        self.dims[j]
    }

    /// Dimensions reordered with subsystem `j` moved to the front.
    pub fn moved_to_front(&self, j: usize) -> TensorResult<Self> {
        self.check_index(j)?;
        let mut dims = Vec::with_capacity(self.n());
        dims.push(self.dims[j]);
        dims.extend(self.dims.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &d)| d));
        Ok(Self { dims })
    }

    fn check_index(&self, j: usize) -> TensorResult<()> {
        if j >= self.n() {
            return Err(TensorError::SubsystemOutOfRange { j, n: self.n() });
        }
        Ok(())
    }
}

/// Index bookkeeping for one subsystem of a multipartite space: the flat
/// index of `|…, h_j = a, …⟩` with remaining digits at pattern `r` is
/// `offsets[r] + a · stride`, and `offsets` is sorted so that `r` is the
/// flat index of the remaining digits in their original order.
pub(crate) struct SubsystemIndex {
    pub dim: usize,
    pub rest_dim: usize,
    pub stride: usize,
    pub offsets: Vec<usize>,
}

pub(crate) fn subsystem_index(dims: &MultipartiteDims, j: usize) -> TensorResult<SubsystemIndex> {
    if j >= dims.n() {
        return Err(TensorError::SubsystemOutOfRange { j, n: dims.n() });
    }
    let d = dims.dims();
    let stride: usize = d[j + 1..].iter().product();
    let dim = d[j];
    let total = dims.total_dim();
    let rest_dim = total / dim;
    let mut offsets = Vec::with_capacity(rest_dim);
    for flat in 0..total {
        if (flat / stride) % dim == 0 {
            offsets.push(flat);
        }
    }
    Ok(SubsystemIndex { dim, rest_dim, stride, offsets })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let f = a.get(ar, ac);
            if f == ZERO {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out.set(ar * b.rows() + br, ac * b.cols() + bc, f * b.get(br, bc));
                }
            }
        }
    }
    out
}

/// The unitary relabeling `|h₀…h_j…⟩ ↦ |h_j h₀…⟩` that moves subsystem `j`
/// to the front, applied to a state vector.
pub fn permute_to_front(
    v: &StateVector,
    dims: &MultipartiteDims,
    j: usize,
) -> TensorResult<StateVector> {
    if v.dim() != dims.total_dim() {
        return Err(TensorError::DimensionMismatch(format!(
            "state dimension {} vs subsystem product {}",
            v.dim(),
            dims.total_dim()
        )));
    }
    let idx = subsystem_index(dims, j)?;
    let mut out = vec![ZERO; v.dim()];
    for (r, &off) in idx.offsets.iter().enumerate() {
        for a in 0..idx.dim {
            out[a * idx.rest_dim + r] = v.amplitudes()[off + a * idx.stride];
        }
    }
    Ok(StateVector::from_amplitudes(out))
}

/// Dense matrix of [`permute_to_front`]; a permutation unitary.
pub fn permute_to_front_matrix(dims: &MultipartiteDims, j: usize) -> TensorResult<ComplexMatrix> {
    let idx = subsystem_index(dims, j)?;
    let total = dims.total_dim();
    let mut m = ComplexMatrix::zeros(total, total);
    for (r, &off) in idx.offsets.iter().enumerate() {
        for a in 0..idx.dim {
            m.set(a * idx.rest_dim + r, off + a * idx.stride, ONE);
        }
    }
    Ok(m)
}

/// Reduced operator on subsystem `keep`: traces out every other factor.
/// Preserves the trace exactly up to rounding.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &MultipartiteDims,
    keep: usize,
) -> TensorResult<ComplexMatrix> {
    let total = dims.total_dim();
    if rho.rows() != total || rho.cols() != total {
        return Err(TensorError::DimensionMismatch(format!(
            "operator is {}x{}, subsystem product is {}",
            rho.rows(),
            rho.cols(),
            total
        )));
    }
    let idx = subsystem_index(dims, keep)?;
    let mut out = ComplexMatrix::zeros(idx.dim, idx.dim);
    for a in 0..idx.dim {
        for b in 0..idx.dim {
            let mut acc = ZERO;
            for &off in &idx.offsets {
                acc += rho.get(off + a * idx.stride, off + b * idx.stride);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// `tr_ĵ |x⟩⟨y|` computed directly from the two vectors, without forming
/// the ambient outer product. With `x = y` this is the marginal state.
pub fn cross_marginal(
    x: &StateVector,
    y: &StateVector,
    dims: &MultipartiteDims,
    keep: usize,
) -> TensorResult<ComplexMatrix> {
    let total = dims.total_dim();
    if x.dim() != total || y.dim() != total {
        return Err(TensorError::DimensionMismatch(format!(
            "state dimensions {} and {} vs subsystem product {}",
            x.dim(),
            y.dim(),
            total
        )));
    }
    let idx = subsystem_index(dims, keep)?;
    let xe = x.amplitudes();
    let ye = y.amplitudes();
    let mut out = ComplexMatrix::zeros(idx.dim, idx.dim);
    for a in 0..idx.dim {
        for b in 0..idx.dim {
            let mut acc = ZERO;
            for &off in &idx.offsets {
                acc += xe[off + a * idx.stride] * ye[off + b * idx.stride].conj();
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Marginal density operator `tr_ĵ |v⟩⟨v|` of a pure state.
pub fn pure_marginal(
    v: &StateVector,
    dims: &MultipartiteDims,
    keep: usize,
) -> TensorResult<ComplexMatrix> {
    cross_marginal(v, v, dims, keep)
}

/// Embed a local operator on subsystem `j` as `A_j ⊗ I` on the full space
/// (in the original factor order).
pub fn embed_local_operator(
    local: &ComplexMatrix,
    dims: &MultipartiteDims,
    j: usize,
) -> TensorResult<ComplexMatrix> {
    let idx = subsystem_index(dims, j)?;
    if local.rows() != idx.dim || local.cols() != idx.dim {
        return Err(TensorError::DimensionMismatch(format!(
            "local operator is {}x{}, subsystem {} has dimension {}",
            local.rows(),
            local.cols(),
            j,
            idx.dim
        )));
    }
    let total = dims.total_dim();
    let mut out = ComplexMatrix::zeros(total, total);
    for a in 0..idx.dim {
        for b in 0..idx.dim {
            let v = local.get(a, b);
            if v == ZERO {
                continue;
            }
            for &off in &idx.offsets {
                out.set(off + a * idx.stride, off + b * idx.stride, v);
            }
        }
    }
    Ok(out)
}

/// Result of a bipartite Schmidt decomposition.
///
/// A normalized input reconstructs as `Σᵢ cᵢ |leftᵢ⟩ ⊗ |rightᵢ⟩` with the
/// coefficients non-increasing and both vector families orthonormal.
#[derive(Debug, Clone)]
pub struct SchmidtResult {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<StateVector>,
    pub right_vectors: Vec<StateVector>,
    /// Number of coefficients above the rank tolerance.
    pub rank: usize,
}

impl SchmidtResult {
    pub fn reconstruct(&self) -> StateVector {
        let left_dim = self.left_vectors[0].dim();
        let right_dim = self.right_vectors[0].dim();
        let mut out = StateVector::zeros(left_dim * right_dim);
        for (i, &c) in self.coefficients.iter().enumerate() {
            let term =
                self.left_vectors[i].tensor(&self.right_vectors[i]).scale(Complex64::new(c, 0.0));
            out = out.add(&term);
        }
        out
    }
}

/// Schmidt decomposition of `v` across the `left_dim | right_dim` cut,
/// via SVD of its coefficient matrix. `tol` is the rank threshold.
pub fn schmidt_decompose(
    v: &StateVector,
    left_dim: usize,
    right_dim: usize,
    tol: f64,
) -> TensorResult<SchmidtResult> {
    if v.dim() != left_dim * right_dim {
        return Err(TensorError::DimensionMismatch(format!(
            "state dimension {} vs cut {}x{}",
            v.dim(),
            left_dim,
            right_dim
        )));
    }
    let coeff = v.reshape(left_dim, right_dim)?;
    let (u, sigma, vt) = coeff.svd();
    let left_vectors = (0..sigma.len()).map(|i| u.column(i)).collect();
    let right_vectors = (0..sigma.len())
        .map(|i| {
            StateVector::from_amplitudes((0..right_dim).map(|b| vt.get(i, b)).collect())
        })
        .collect();
    let rank = sigma.iter().filter(|&&s| s > tol).count();
    Ok(SchmidtResult { coefficients: sigma, left_vectors, right_vectors, rank })
}

/// Haar-distributed normalized state, deterministic per seed.
pub fn random_pure_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_pure_state(dim, &mut rng)
}

/// Haar-distributed normalized state drawn from an existing RNG.
pub fn sample_pure_state(dim: usize, rng: &mut impl Rng) -> StateVector {
    assert!(dim >= 1, "state dimension must be at least 1");
    let amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::from_amplitudes(amplitudes).normalized()
}

/// Haar-distributed `rows × cols` isometry (`rows ≥ cols`): thin QR of a
/// complex Gaussian matrix with the R-diagonal phases absorbed into Q.
pub fn sample_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    let g = nalgebra::DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..cols {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..rows {
            q[(row, c)] *= phase.conj();
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[(i, j)])
}

/// Haar-distributed unitary of size `dim`.
pub fn sample_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    sample_isometry(dim, dim, rng)
}

/// Extend `existing` (orthonormal vectors in dimension `dim`) to a full
/// orthonormal basis and return only the new vectors, in a deterministic
/// order given the RNG. Gram–Schmidt with one re-orthogonalization pass.
pub fn complete_orthonormal_basis(
    existing: &[StateVector],
    dim: usize,
    rng: &mut impl Rng,
) -> Vec<StateVector> {
    let mut basis: Vec<StateVector> = existing.to_vec();
    let mut complement = Vec::with_capacity(dim - existing.len());
    while basis.len() < dim {
        let mut candidate = sample_pure_state(dim, rng);
        let mut ok = true;
        for _pass in 0..2 {
            for b in &basis {
                let overlap = b.inner(&candidate);
                candidate = candidate.sub(&b.scale(overlap));
            }
            let n = candidate.norm();
            if n < 1e-8 {
                ok = false;
                break;
            }
            candidate = candidate.scale(Complex64::new(1.0 / n, 0.0));
        }
        if ok {
            basis.push(candidate.clone());
            complement.push(candidate);
        }
    }
    complement
}
