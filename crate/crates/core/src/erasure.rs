//! One-erasure channels and recovery.
//!
//! A `j`-erasure channel damages only subsystem `j`: every Kraus operator
//! is `T_j†(A ⊗ I_rest)T_j` for some local `A`. Two concrete instances are
//! provided (reset to `|0⟩` and full depolarization), plus a structural
//! test for the factored form, the standard recovery synthesis for codes
//! passing the Knill–Laflamme check, and encode–corrupt–recover fidelity
//! measurement.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use thiserror::Error;

use crate::tensor::{
    embed_local_operator, subsystem_index, ComplexMatrix, MultipartiteDims, StateVector,
    TensorError,
};
use crate::verifier::{kl_check, CodeSubspace, VerifierError};

/// Eigenvalue threshold separating zero from nonzero error directions in
/// the recovery synthesis.
const OVERLAP_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ErasureError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Verifier(#[from] Box<VerifierError>),
    #[error("Kraus family is not trace-preserving: ||sum E'E - I|| = {defect:.3e}")]
    IncompleteKraus { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("channel carries no erasure index; recovery needs a j-erasure channel")]
    MissingErasureIndex,
    #[error(
        "Knill-Laflamme conditions violated at tolerance {tolerance} \
         (worst deviation {worst:.3e}); no recovery exists"
    )]
    KlViolated { worst: f64, tolerance: f64 },
}

pub type ErasureResult<T> = Result<T, ErasureError>;

/// An operator acting as `A_j` on subsystem `j` and as the identity
/// elsewhere. `global` is derived from `local` at construction.
#[derive(Debug, Clone)]
pub struct ErasureOperator {
    dims: MultipartiteDims,
    j: usize,
    local: ComplexMatrix,
    global: ComplexMatrix,
}

impl ErasureOperator {
    pub fn new(dims: MultipartiteDims, j: usize, local: ComplexMatrix) -> ErasureResult<Self> {
        let global = embed_local_operator(&local, &dims, j)?;
        Ok(Self { dims, j, local, global })
    }

    pub fn dims(&self) -> &MultipartiteDims {
        &self.dims
    }

    pub fn subsystem(&self) -> usize {
        self.j
    }

    pub fn local(&self) -> &ComplexMatrix {
        &self.local
    }

    pub fn global(&self) -> &ComplexMatrix {
        &self.global
    }
}

/// A quantum channel in Kraus form, optionally tagged with the subsystem
/// its operators act on.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    dims: MultipartiteDims,
    erasure_index: Option<usize>,
}

impl KrausChannel {
    /// Build a channel, enforcing completeness `‖Σ E†E − I‖_F ≤ 1e−10`.
    pub fn new(
        kraus: Vec<ComplexMatrix>,
        dims: MultipartiteDims,
        erasure_index: Option<usize>,
    ) -> ErasureResult<Self> {
        let total = dims.total_dim();
        for e in &kraus {
            if e.rows() != total || e.cols() != total {
                return Err(ErasureError::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, ambient space {total}",
                    e.rows(),
                    e.cols()
                )));
            }
        }
        let mut sum = ComplexMatrix::zeros(total, total);
        for e in &kraus {
            sum = sum.add(&e.adjoint().mul(e));
        }
        let defect = sum.sub(&ComplexMatrix::identity(total)).frobenius_norm();
        if defect > 1e-10 {
            return Err(ErasureError::IncompleteKraus { defect });
        }
        Ok(Self { kraus, dims, erasure_index })
    }

    /// The identity channel, tagged as a `j`-erasure channel for any `j`
    /// (the identity factors through every subsystem).
    pub fn identity(dims: MultipartiteDims, erasure_index: Option<usize>) -> Self {
        let total = dims.total_dim();
        Self { kraus: vec![ComplexMatrix::identity(total)], dims, erasure_index }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dims(&self) -> &MultipartiteDims {
        &self.dims
    }

    pub fn erasure_index(&self) -> Option<usize> {
        self.erasure_index
    }

    /// `ρ ↦ Σ_k E_k ρ E_k†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let total = self.dims.total_dim();
        assert_eq!((rho.rows(), rho.cols()), (total, total), "state dimension mismatch");
        let mut out = ComplexMatrix::zeros(total, total);
        for e in &self.kraus {
            out = out.add(&e.mul(rho).mul(&e.adjoint()));
        }
        out
    }

    /// The (unnormalized) branch vectors `E_k |v⟩`; their outer products
    /// sum to the channel output on `|v⟩⟨v|`.
    pub fn apply_to_pure(&self, v: &StateVector) -> Vec<StateVector> {
        self.kraus.iter().map(|e| e.mul_vector(v)).collect()
    }
}

/// The channel resetting subsystem `j` to `|0⟩`: Kraus operators
/// `T_j†((|0⟩⟨k|) ⊗ I)T_j` for `k = 0..d_j`.
pub fn reset_channel(dims: &MultipartiteDims, j: usize) -> ErasureResult<KrausChannel> {
    let idx = subsystem_index(dims, j)?;
    let mut kraus = Vec::with_capacity(idx.dim);
    for k in 0..idx.dim {
        let local = StateVector::basis(idx.dim, 0).outer(&StateVector::basis(idx.dim, k));
        kraus.push(embed_local_operator(&local, dims, j)?);
    }
    KrausChannel::new(kraus, dims.clone(), Some(j))
}

/// The channel replacing subsystem `j` by the maximally mixed state:
/// Kraus operators `(1/√d_j) T_j†((|i⟩⟨k|) ⊗ I)T_j` over all `i, k`.
pub fn depolarize_channel(dims: &MultipartiteDims, j: usize) -> ErasureResult<KrausChannel> {
    let idx = subsystem_index(dims, j)?;
    let scale = Complex64::new(1.0 / (idx.dim as f64).sqrt(), 0.0);
    let mut kraus = Vec::with_capacity(idx.dim * idx.dim);
    for i in 0..idx.dim {
        for k in 0..idx.dim {
            let local = StateVector::basis(idx.dim, i)
                .outer(&StateVector::basis(idx.dim, k))
                .scale(scale);
            kraus.push(embed_local_operator(&local, dims, j)?);
        }
    }
    KrausChannel::new(kraus, dims.clone(), Some(j))
}

/// Structural test: does every Kraus operator factor as `A ⊗ I_rest`
/// across subsystem `j` (within Frobenius residual `1e−10`)? The local
/// block is estimated by averaging the rest-diagonal blocks and the full
/// operator compared against its embedding.
pub fn is_one_erasure(ch: &KrausChannel, j: usize) -> ErasureResult<bool> {
    let idx = subsystem_index(ch.dims(), j)?;
    for e in ch.kraus() {
        let mut local = ComplexMatrix::zeros(idx.dim, idx.dim);
        for a in 0..idx.dim {
            for b in 0..idx.dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for &off in &idx.offsets {
                    acc += e.get(off + a * idx.stride, off + b * idx.stride);
                }
                local.set(a, b, acc / idx.rest_dim as f64);
            }
        }
        let mut residual_sq = 0.0f64;
        for a in 0..idx.dim {
            for b in 0..idx.dim {
                for (r, &off_r) in idx.offsets.iter().enumerate() {
                    for (rp, &off_rp) in idx.offsets.iter().enumerate() {
                        let actual = e.get(off_r + a * idx.stride, off_rp + b * idx.stride);
                        let expected = if r == rp {
                            local.get(a, b)
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        residual_sq += (actual - expected).norm_sqr();
                    }
                }
            }
        }
        if residual_sq.sqrt() > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A recovery channel targeted at a code subspace.
#[derive(Debug, Clone)]
pub struct RecoveryMap {
    kraus: Vec<ComplexMatrix>,
    projector: ComplexMatrix,
}

impl RecoveryMap {
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    /// The do-nothing recovery; useful as a baseline.
    pub fn identity(dim: usize) -> Self {
        Self { kraus: vec![ComplexMatrix::identity(dim)], projector: ComplexMatrix::identity(dim) }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for r in &self.kraus {
            out = out.add(&r.mul(rho).mul(&r.adjoint()));
        }
        out
    }
}

/// Orthonormal completion against `existing` using standard basis
/// candidates in index order; deterministic.
fn deterministic_completion(existing: &[StateVector], dim: usize) -> Vec<StateVector> {
    let mut basis: Vec<StateVector> = existing.to_vec();
    let mut out = Vec::new();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut cand = StateVector::basis(dim, i);
        let mut ok = true;
        for _pass in 0..2 {
            for b in &basis {
                let overlap = b.inner(&cand);
                cand = cand.sub(&b.scale(overlap));
            }
            let n = cand.norm();
            if n < 1e-6 {
                ok = false;
                break;
            }
            cand = cand.scale(Complex64::new(1.0 / n, 0.0));
        }
        if ok {
            basis.push(cand.clone());
            out.push(cand);
        }
    }
    // The standard basis spans the space, so the sweep always fills it.
    assert_eq!(basis.len(), dim, "orthonormal completion fell short");
    out
}

/// Synthesize a recovery channel for `code` against the `j`-erasure
/// channel `ch`, given that the Knill–Laflamme check passes at `tol`.
///
/// Standard synthesis: diagonalize the code-restricted error overlap
/// matrix, rotate the Kraus family so the corrected errors map the code
/// onto mutually orthogonal subspaces, and take the polar isometries back
/// onto the code. Outside the corrected subspaces the map sends everything
/// to the first code word, which makes it trace-preserving on the whole
/// space.
pub fn kl_recovery(code: &CodeSubspace, ch: &KrausChannel, tol: f64) -> ErasureResult<RecoveryMap> {
    let j = ch.erasure_index().ok_or(ErasureError::MissingErasureIndex)?;
    if ch.dims() != code.dims() {
        return Err(ErasureError::DimensionMismatch(format!(
            "channel dims {:?} vs code dims {:?}",
            ch.dims().dims(),
            code.dims().dims()
        )));
    }
    let report = kl_check(code, j, tol).map_err(Box::new)?;
    if !report.verdict {
        return Err(ErasureError::KlViolated { worst: report.worst_deviation, tolerance: tol });
    }

    let basis = code.basis();
    let code_dim = code.dim();
    let total = code.dims().total_dim();
    let m = ch.kraus().len();

    // Branch images E_k |b_p⟩ and the overlap matrix
    // α[k][l] = tr(P E_k† E_l P) / dim(V).
    let images: Vec<Vec<StateVector>> =
        ch.kraus().iter().map(|e| basis.iter().map(|b| e.mul_vector(b)).collect()).collect();
    let mut overlap = ComplexMatrix::zeros(m, m);
    for k in 0..m {
        for l in 0..m {
            let acc: Complex64 =
                images[k].iter().zip(&images[l]).map(|(a, b)| a.inner(b)).sum();
            overlap.set(k, l, acc / code_dim as f64);
        }
    }
    let (evals, evecs) = overlap.hermitian_eigen();

    let mut kraus = Vec::new();
    let mut corrected: Vec<StateVector> = Vec::new();
    for (col, &weight) in evals.iter().enumerate() {
        if weight <= OVERLAP_RANK_TOL {
            continue;
        }
        let inv_sqrt = Complex64::new(1.0 / weight.sqrt(), 0.0);
        // Corrected-error images (F_m b_p)/√d_m form an orthonormal frame.
        let frame: Vec<StateVector> = (0..code_dim)
            .map(|p| {
                let mut acc = StateVector::zeros(total);
                for (k, branch) in images.iter().enumerate() {
                    acc = acc.add(&branch[p].scale(evecs.get(k, col)));
                }
                acc.scale(inv_sqrt)
            })
            .collect();
        // R_m = Σ_p |b_p⟩⟨frame_p|: the isometry back onto the code.
        let mut r = ComplexMatrix::zeros(total, total);
        for p in 0..code_dim {
            r = r.add(&basis[p].outer(&frame[p]));
        }
        kraus.push(r);
        corrected.extend(frame);
    }

    // Trace-preserving completion: dump the uncorrected complement onto
    // the first code word.
    let complement = deterministic_completion(&corrected, total);
    for u in complement {
        kraus.push(basis[0].outer(&u));
    }

    Ok(RecoveryMap { kraus, projector: code.projector() })
}

/// Round-trip fidelity statistics over seeded random code states.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub samples: usize,
    pub seed: u64,
    pub worst: f64,
    pub mean: f64,
}

/// Sample random code states, push them through channel and recovery, and
/// report pure-state fidelity `⟨v|σ|v⟩` statistics.
pub fn roundtrip_fidelity(
    code: &CodeSubspace,
    ch: &KrausChannel,
    rec: &RecoveryMap,
    samples: usize,
    seed: u64,
) -> FidelityReport {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let basis = code.basis();
    let code_dim = code.dim();
    // Compressed recovery rows C_m = B†R_m, so each branch amplitude is a
    // code-dimension inner product instead of an ambient-space one.
    let compressed: Vec<ComplexMatrix> = rec
        .kraus()
        .iter()
        .map(|r| {
            ComplexMatrix::from_fn(code_dim, r.cols(), |p, col| {
                let mut acc = Complex64::new(0.0, 0.0);
                for row in 0..r.rows() {
                    acc += basis[p].amplitudes()[row].conj() * r.get(row, col);
                }
                acc
            })
        })
        .collect();

    let mut worst = f64::INFINITY;
    let mut sum = 0.0f64;
    for _ in 0..samples {
        let weights = crate::tensor::sample_pure_state(code_dim, &mut rng);
        let mut v = StateVector::zeros(code.dims().total_dim());
        for (p, b) in basis.iter().enumerate() {
            v = v.add(&b.scale(weights.amplitudes()[p]));
        }
        let branches = ch.apply_to_pure(&v);
        // fidelity = Σ_{m,k} |⟨v| R_m E_k |v⟩|² = Σ |y†(C_m w_k)|²
        let mut fidelity = 0.0f64;
        for c_m in &compressed {
            for w in &branches {
                let projected = c_m.mul_vector(w);
                let amp: Complex64 = weights.inner(&projected);
                fidelity += amp.norm_sqr();
            }
        }
        worst = worst.min(fidelity);
        sum += fidelity;
    }
    FidelityReport { samples, seed, worst, mean: sum / samples.max(1) as f64 }
}
