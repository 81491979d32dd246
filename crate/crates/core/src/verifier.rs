//! Masking and error-correction verification.
//!
//! Two complementary checks, and the bridge between them:
//!
//! - **Masking**: do all images of a state set share the same marginal on
//!   every subsystem? [`marginal_report`] samples a given set;
//!   [`universal_masking_check`] decides the all-pure-states case with a
//!   finite criterion: `tr_ĵ[S|i⟩⟨k|S†] = δ_{ik} ρ̄_j` over all basis
//!   pairs, which is equivalent to the pure-state quantifier by
//!   sesquilinear expansion (the same polarization argument behind the
//!   cross-term check).
//! - **Error correction**: is a subspace a code for every one-erasure
//!   channel on subsystem `j`? [`kl_check`] tests the Knill–Laflamme
//!   projector identity `P E P = λ_E P` over the `d_j²` matrix-unit
//!   erasure operators, whose span is all of them.
//!
//! [`equivalence_report`] runs both on a masker and requires the verdicts
//! to agree; for isometries the two properties hold or fail together.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::erasure::ErasureOperator;
use crate::masker::{Masker, MaskerError};
use crate::tensor::{
    cross_marginal, permute_to_front, pure_marginal, schmidt_decompose, subsystem_index,
    ComplexMatrix, MultipartiteDims, StateVector, TensorError,
};

/// Default verification tolerance; two orders above worst observed
/// rounding at the ambient dimensions this crate targets.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error("state set is empty")]
    EmptyStateSet,
    #[error("state {index} is not normalized (norm {norm})")]
    UnnormalizedState { index: usize, norm: f64 },
    #[error("states are not orthogonal (|overlap| = {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },
    #[error("basis is not orthonormal: {0}")]
    NonOrthonormalBasis(String),
    #[error("Schmidt coefficients differ across the set ({0}); the input was not masked")]
    CoefficientMismatch(String),
    #[error(
        "masking and error-correction verdicts disagree at tolerance {tolerance}: \
         masking {masking}, Knill-Laflamme {knill_laflamme}"
    )]
    DisagreementAtTolerance { tolerance: f64, masking: bool, knill_laflamme: bool },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Masker(#[from] MaskerError),
}

pub type VerifierResult<T> = Result<T, VerifierError>;

/// A finite set of normalized states of the masker input space.
#[derive(Debug, Clone)]
pub struct StateSet {
    states: Vec<StateVector>,
    label: Option<String>,
}

impl StateSet {
    pub fn new(states: Vec<StateVector>, label: Option<String>) -> VerifierResult<Self> {
        for (index, s) in states.iter().enumerate() {
            let norm = s.norm();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(VerifierError::UnnormalizedState { index, norm });
            }
        }
        Ok(Self { states, label })
    }

    pub fn computational_basis(dim: usize) -> Self {
        Self {
            states: (0..dim).map(|i| StateVector::basis(dim, i)).collect(),
            label: Some(format!("computational basis of dimension {dim}")),
        }
    }

    /// `count` Haar-random states, deterministic per seed.
    pub fn random(dim: usize, count: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        Self {
            states: (0..count).map(|_| crate::tensor::sample_pure_state(dim, &mut rng)).collect(),
            label: Some(format!("{count} random states, seed {seed}")),
        }
    }

    /// The four-state set `{ψ₁, ψ₂, (ψ₁+ψ₂)/√2, (ψ₁−iψ₂)/√2}` for an
    /// orthonormal pair: masking it forces the cross term
    /// `tr_ĵ[S|ψ₁⟩⟨ψ₂|S†]` to vanish.
    pub fn polarization_quartet(psi1: &StateVector, psi2: &StateVector) -> VerifierResult<Self> {
        let overlap = psi1.inner(psi2).norm();
        if overlap > 1e-10 {
            return Err(VerifierError::NotOrthogonal { overlap });
        }
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = psi1.add(psi2).scale(inv_sqrt2);
        let minus_i = psi1.sub(&psi2.scale(Complex64::new(0.0, 1.0))).scale(inv_sqrt2);
        Self::new(
            vec![psi1.clone(), psi2.clone(), plus, minus_i],
            Some("polarization quartet".into()),
        )
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// How a masking verdict was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// Finite deterministic criterion over all basis pairs.
    Deterministic,
    /// Sampled over an explicit state set.
    Sampled { states: usize },
}

/// Per-subsystem masking diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SubsystemReport {
    pub subsystem: usize,
    /// Candidate common marginal for this subsystem.
    pub marginal: ComplexMatrix,
    /// Worst deviation from the candidate marginal over the checked set
    /// (or over all basis pairs for the deterministic criterion).
    pub worst_deviation: f64,
    /// Worst pairwise marginal distance across set members; diagnostic
    /// only, not part of the verdict.
    pub worst_pairwise: f64,
}

/// Verdict and deviations for a masking check.
#[derive(Debug, Clone, Serialize)]
pub struct MaskingReport {
    pub tolerance: f64,
    pub verdict: bool,
    pub subsystems: Vec<SubsystemReport>,
    pub evidence: Evidence,
}

impl MaskingReport {
    pub fn worst_deviation(&self) -> f64 {
        self.subsystems.iter().map(|s| s.worst_deviation).fold(0.0, f64::max)
    }
}

/// Check whether `s` masks the finite set `q`: the candidate marginal
/// `ρ_j` is the first state's, and every other member's marginal must
/// match it within `tol` in Frobenius norm.
pub fn marginal_report(s: &Masker, q: &StateSet, tol: f64) -> VerifierResult<MaskingReport> {
    if q.is_empty() {
        return Err(VerifierError::EmptyStateSet);
    }
    let images: Vec<StateVector> =
        q.states().iter().map(|psi| s.apply(psi)).collect::<Result<_, _>>()?;
    let mut subsystems = Vec::with_capacity(s.dims().n());
    for j in 0..s.dims().n() {
        let marginals: Vec<ComplexMatrix> =
            images.iter().map(|im| pure_marginal(im, s.dims(), j)).collect::<Result<_, _>>()?;
        let reference = marginals[0].clone();
        let worst_deviation =
            marginals.iter().map(|m| m.sub(&reference).frobenius_norm()).fold(0.0, f64::max);
        let mut worst_pairwise = 0.0f64;
        for a in 0..marginals.len() {
            for b in a + 1..marginals.len() {
                worst_pairwise =
                    worst_pairwise.max(marginals[a].sub(&marginals[b]).frobenius_norm());
            }
        }
        subsystems.push(SubsystemReport {
            subsystem: j,
            marginal: reference,
            worst_deviation,
            worst_pairwise,
        });
    }
    let verdict = subsystems.iter().all(|s| s.worst_deviation <= tol);
    Ok(MaskingReport {
        tolerance: tol,
        verdict,
        subsystems,
        evidence: Evidence::Sampled { states: q.len() },
    })
}

/// Decide whether `s` masks *all* pure states, via the finite criterion
/// `tr_ĵ[S|i⟩⟨k|S†] = δ_{ik} ρ̄_j` for every subsystem `j` and all basis
/// pairs `(i, k)`, where `ρ̄_j` is the mean diagonal marginal.
pub fn universal_masking_check(s: &Masker, tol: f64) -> VerifierResult<MaskingReport> {
    let k_dim = s.input_dim();
    let columns: Vec<StateVector> = (0..k_dim).map(|i| s.basis_image(i)).collect();
    let mut subsystems = Vec::with_capacity(s.dims().n());
    for j in 0..s.dims().n() {
        let d_j = s.dims().dim_of(j);
        let mut mean = ComplexMatrix::zeros(d_j, d_j);
        let mut diagonals = Vec::with_capacity(k_dim);
        for col in &columns {
            let m = pure_marginal(col, s.dims(), j)?;
            mean = mean.add(&m);
            diagonals.push(m);
        }
        let mean = mean.scale(Complex64::new(1.0 / k_dim as f64, 0.0));
        let mut worst = 0.0f64;
        let mut worst_pairwise = 0.0f64;
        for (i, diag) in diagonals.iter().enumerate() {
            worst = worst.max(diag.sub(&mean).frobenius_norm());
            for other in diagonals.iter().skip(i + 1) {
                worst_pairwise = worst_pairwise.max(diag.sub(other).frobenius_norm());
            }
        }
        for i in 0..k_dim {
            for k in 0..k_dim {
                if i == k {
                    continue;
                }
                let cross = cross_marginal(&columns[i], &columns[k], s.dims(), j)?;
                worst = worst.max(cross.frobenius_norm());
            }
        }
        subsystems.push(SubsystemReport {
            subsystem: j,
            marginal: mean,
            worst_deviation: worst,
            worst_pairwise,
        });
    }
    let verdict = subsystems.iter().all(|s| s.worst_deviation <= tol);
    Ok(MaskingReport { tolerance: tol, verdict, subsystems, evidence: Evidence::Deterministic })
}

/// The cross operator `tr_ĵ[S|ψ₁⟩⟨ψ₂|S†]` on subsystem `j`. Vanishes for
/// every orthonormal pair when `s` is a universal masker; with `ψ₂ = ψ₁`
/// it degenerates to the marginal.
pub fn cross_term(
    s: &Masker,
    psi1: &StateVector,
    psi2: &StateVector,
    j: usize,
) -> VerifierResult<ComplexMatrix> {
    let im1 = s.apply(psi1)?;
    let im2 = s.apply(psi2)?;
    Ok(cross_marginal(&im1, &im2, s.dims(), j)?)
}

/// The common Schmidt structure of masked images across the `j | rest` cut.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub subsystem: usize,
    /// Schmidt coefficients shared by every member of the set,
    /// non-increasing; squares sum to one.
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Candidate marginal `ρ_j` (from the first state).
    pub marginal: ComplexMatrix,
    /// Eigenvalues of `ρ_j`, non-increasing; the squared coefficients.
    pub marginal_eigenvalues: Vec<f64>,
    /// Eigenvector columns of `ρ_j`.
    pub marginal_basis: ComplexMatrix,
    /// Per-state orthonormal right factors, one frame per set member.
    pub right_factors: Vec<Vec<StateVector>>,
}

/// Schmidt-decompose every image `T_j S|ψ⟩` across the `d_j | rest` cut
/// and check that the coefficient multisets agree within `tol` and match
/// the eigenvalue square roots of `ρ_j`.
///
/// Callers must have established masking first ([`marginal_report`]):
/// coefficient agreement alone is weaker (rank-one encoders share the
/// trivial multiset without masking anything).
pub fn schmidt_form(s: &Masker, q: &StateSet, j: usize, tol: f64) -> VerifierResult<SchmidtForm> {
    if q.is_empty() {
        return Err(VerifierError::EmptyStateSet);
    }
    let dims = s.dims();
    let d_j = dims.dim_of(j);
    let rest: usize = dims.total_dim() / d_j;
    let mut reference: Option<Vec<f64>> = None;
    let mut right_factors = Vec::with_capacity(q.len());
    for (index, psi) in q.states().iter().enumerate() {
        let moved = permute_to_front(&s.apply(psi)?, dims, j)?;
        let schmidt = schmidt_decompose(&moved, d_j, rest, tol)?;
        match &reference {
            None => reference = Some(schmidt.coefficients.clone()),
            Some(reference) => {
                let max_diff = reference
                    .iter()
                    .zip(&schmidt.coefficients)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if max_diff > tol {
                    return Err(VerifierError::CoefficientMismatch(format!(
                        "state {index} deviates by {max_diff:.3e}"
                    )));
                }
            }
        }
        right_factors.push(schmidt.right_vectors);
    }
    let coefficients = reference.expect("nonempty set");
    let marginal = pure_marginal(&s.apply(&q.states()[0])?, dims, j)?;
    let (marginal_eigenvalues, marginal_basis) = marginal.hermitian_eigen();
    // The coefficient list has min(d_j, rest) entries; pad with zeros to
    // compare against the d_j marginal eigenvalues.
    let max_diff = (0..d_j)
        .map(|i| {
            let c = coefficients.get(i).copied().unwrap_or(0.0);
            let e = marginal_eigenvalues[i].max(0.0).sqrt();
            (c - e).abs()
        })
        .fold(0.0, f64::max);
    if max_diff > tol {
        return Err(VerifierError::CoefficientMismatch(format!(
            "coefficients deviate from the marginal spectrum by {max_diff:.3e}"
        )));
    }
    let rank = coefficients.iter().filter(|&&c| c > tol).count();
    Ok(SchmidtForm {
        subsystem: j,
        coefficients,
        rank,
        marginal,
        marginal_eigenvalues,
        marginal_basis,
        right_factors,
    })
}

/// A subspace of a multipartite space given by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct CodeSubspace {
    dims: MultipartiteDims,
    basis: Vec<StateVector>,
}

impl CodeSubspace {
    pub fn new(dims: MultipartiteDims, basis: Vec<StateVector>) -> VerifierResult<Self> {
        if basis.is_empty() {
            return Err(VerifierError::NonOrthonormalBasis("empty basis".into()));
        }
        let total = dims.total_dim();
        for (i, v) in basis.iter().enumerate() {
            if v.dim() != total {
                return Err(VerifierError::DimensionMismatch(format!(
                    "basis vector {i} has dimension {}, ambient space {total}",
                    v.dim()
                )));
            }
            for (k, w) in basis.iter().enumerate().take(i + 1) {
                let overlap = v.inner(w);
                let expected = if i == k { 1.0 } else { 0.0 };
                if (overlap - Complex64::new(expected, 0.0)).norm() > 1e-10 {
                    return Err(VerifierError::NonOrthonormalBasis(format!(
                        "inner product of vectors {i} and {k} is {overlap}"
                    )));
                }
            }
        }
        Ok(Self { dims, basis })
    }

    /// The range of a masker, spanned by its basis images.
    pub fn from_masker(s: &Masker) -> Self {
        let basis = (0..s.input_dim()).map(|i| s.basis_image(i)).collect();
        Self { dims: s.dims().clone(), basis }
    }

    pub fn dims(&self) -> &MultipartiteDims {
        &self.dims
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dense projector `P = Σ |v⟩⟨v|` onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        let total = self.dims.total_dim();
        let mut p = ComplexMatrix::zeros(total, total);
        for v in &self.basis {
            p = p.add(&v.outer(v));
        }
        p
    }

    /// A Haar-random state of the subspace drawn from `rng`.
    pub fn sample_state(&self, rng: &mut impl rand::Rng) -> StateVector {
        let weights = crate::tensor::sample_pure_state(self.dim(), rng);
        let mut out = StateVector::zeros(self.dims.total_dim());
        for (i, b) in self.basis.iter().enumerate() {
            out = out.add(&b.scale(weights.amplitudes()[i]));
        }
        out
    }
}

/// The `d_j²` matrix-unit erasure operators
/// `E_{i,k} = T_j†((|i⟩⟨k|) ⊗ I_rest)T_j`; every `j`-erasure operator is a
/// linear combination of them.
pub fn erasure_operator_basis(
    dims: &MultipartiteDims,
    j: usize,
) -> VerifierResult<Vec<ErasureOperator>> {
    if j >= dims.n() {
        return Err(VerifierError::Tensor(TensorError::SubsystemOutOfRange { j, n: dims.n() }));
    }
    let d_j = dims.dim_of(j);
    let mut ops = Vec::with_capacity(d_j * d_j);
    for i in 0..d_j {
        for k in 0..d_j {
            let local = StateVector::basis(d_j, i).outer(&StateVector::basis(d_j, k));
            ops.push(ErasureOperator::new(dims.clone(), j, local).map_err(|e| {
                VerifierError::DimensionMismatch(format!("erasure operator ({i},{k}): {e}"))
            })?);
        }
    }
    Ok(ops)
}

/// One matrix-unit erasure operator's row in a [`KlReport`].
#[derive(Debug, Clone, Serialize)]
pub struct KlEntry {
    pub i: usize,
    pub k: usize,
    /// `λ_{ik} = tr(P E_{i,k} P) / dim(V)`.
    pub lambda: Complex64,
    /// `‖P E_{i,k} P − λ_{ik} P‖_F`.
    pub deviation: f64,
}

/// Knill–Laflamme verdict for one subsystem.
#[derive(Debug, Clone, Serialize)]
pub struct KlReport {
    pub subsystem: usize,
    pub tolerance: f64,
    pub entries: Vec<KlEntry>,
    pub worst_deviation: f64,
    pub verdict: bool,
}

/// Check the Knill–Laflamme conditions for every `j`-erasure operator on
/// a code subspace: `P E P = λ_E P` over the matrix-unit basis, which is
/// equivalent to the expectation and orthogonality conditions by
/// linearity.
///
/// Deviations are computed in the code basis: with orthonormal columns
/// `B`, `‖P E P − λP‖_F = ‖B†EB − λI‖_F` exactly, so nothing larger than
/// the code dimension squared is ever formed per operator.
pub fn kl_check(code: &CodeSubspace, j: usize, tol: f64) -> VerifierResult<KlReport> {
    let dims = code.dims();
    let idx = subsystem_index(dims, j)?;
    let code_dim = code.dim();
    // Permuted reshapes: X_p[a][r] = (T_j b_p)[a·R + r].
    let reshaped: Vec<ComplexMatrix> = code
        .basis()
        .iter()
        .map(|b| permute_to_front(b, dims, j)?.reshape(idx.dim, idx.rest_dim))
        .collect::<Result<_, _>>()?;
    let mut entries = Vec::with_capacity(idx.dim * idx.dim);
    let mut worst = 0.0f64;
    for i in 0..idx.dim {
        for k in 0..idx.dim {
            // Compressed operator: C[p][q] = ⟨row_i(X_p), row_k(X_q)⟩.
            let mut compressed = ComplexMatrix::zeros(code_dim, code_dim);
            for p in 0..code_dim {
                for q in 0..code_dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..idx.rest_dim {
                        acc += reshaped[p].get(i, r).conj() * reshaped[q].get(k, r);
                    }
                    compressed.set(p, q, acc);
                }
            }
            let lambda = compressed.trace() / code_dim as f64;
            let deviation =
                compressed.sub(&ComplexMatrix::identity(code_dim).scale(lambda)).frobenius_norm();
            worst = worst.max(deviation);
            entries.push(KlEntry { i, k, lambda, deviation });
        }
    }
    Ok(KlReport {
        subsystem: j,
        tolerance: tol,
        entries,
        worst_deviation: worst,
        verdict: worst <= tol,
    })
}

/// Combined masking and error-correction verdicts for a masker's range.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub masking: MaskingReport,
    pub knill_laflamme: Vec<KlReport>,
    pub kl_verdict: bool,
    /// Always true in a returned report; a disagreement is an error.
    pub agree: bool,
}

/// Run [`universal_masking_check`] and [`kl_check`] on `ran(S)` for every
/// subsystem and require the verdicts to agree. A disagreement signals
/// numerical trouble near the tolerance, not a counterexample.
pub fn equivalence_report(s: &Masker, tol: f64) -> VerifierResult<EquivalenceReport> {
    let masking = universal_masking_check(s, tol)?;
    let code = CodeSubspace::from_masker(s);
    let knill_laflamme: Vec<KlReport> =
        (0..s.dims().n()).map(|j| kl_check(&code, j, tol)).collect::<Result<_, _>>()?;
    let kl_verdict = knill_laflamme.iter().all(|r| r.verdict);
    if masking.verdict != kl_verdict {
        return Err(VerifierError::DisagreementAtTolerance {
            tolerance: tol,
            masking: masking.verdict,
            knill_laflamme: kl_verdict,
        });
    }
    Ok(EquivalenceReport { masking, knill_laflamme, kl_verdict, agree: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masker::{latin_masker_default, tilde_masker, Masker, Provenance};
    use crate::tensor::{random_pure_state, sample_pure_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `|i⟩ ↦ |i⟩|0⟩…|0⟩`: a valid isometry that masks nothing.
    pub(crate) fn product_encoder(k: usize, dims: &MultipartiteDims) -> Masker {
        let mut matrix = ComplexMatrix::zeros(dims.total_dim(), k);
        for i in 0..k {
            let mut v = StateVector::basis(dims.dim_of(0), i);
            for &d in &dims.dims()[1..] {
                v = v.tensor(&StateVector::basis(d, 0));
            }
            for r in 0..dims.total_dim() {
                matrix.set(r, i, v.amplitudes()[r]);
            }
        }
        Masker::new(k, dims.clone(), matrix, Provenance::User).unwrap()
    }

    fn orthonormal_pair(dim: usize, rng: &mut impl rand::Rng) -> (StateVector, StateVector) {
        let a = sample_pure_state(dim, rng);
        let mut b = sample_pure_state(dim, rng);
        let overlap = a.inner(&b);
        b = b.sub(&a.scale(overlap));
        (a, b.normalized())
    }

    #[test]
    fn basis_set_is_masked_by_latin_masker() {
        let s = latin_masker_default(3).unwrap();
        let q = StateSet::computational_basis(3);
        let report = marginal_report(&s, &q, DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        let mixed = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
        for sub in &report.subsystems {
            assert!(sub.marginal.sub(&mixed).frobenius_norm() < 1e-12);
            assert!(sub.worst_deviation < 1e-12);
        }
    }

    #[test]
    fn product_encoder_fails_with_sqrt_two_deviation() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = product_encoder(2, &dims);
        let q = StateSet::computational_basis(2);
        let report = marginal_report(&s, &q, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
        // ‖|0⟩⟨0| − |1⟩⟨1|‖_F = √2 on the first subsystem
        assert!((report.subsystems[0].worst_deviation - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singleton_sets_always_mask() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = product_encoder(2, &dims);
        let q = StateSet::new(vec![random_pure_state(2, 5)], None).unwrap();
        let report = marginal_report(&s, &q, DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert!(matches!(report.evidence, Evidence::Sampled { states: 1 }));
    }

    #[test]
    fn empty_sets_are_rejected() {
        let s = latin_masker_default(3).unwrap();
        let q = StateSet::new(vec![], None).unwrap();
        assert!(matches!(marginal_report(&s, &q, DEFAULT_TOL), Err(VerifierError::EmptyStateSet)));
    }

    #[test]
    fn universal_check_accepts_constructed_maskers() {
        let report =
            universal_masking_check(&latin_masker_default(3).unwrap(), DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert!(matches!(report.evidence, Evidence::Deterministic));

        let report = universal_masking_check(&tilde_masker(2).unwrap(), DEFAULT_TOL).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn universal_check_rejects_product_encoder() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = product_encoder(2, &dims);
        let report = universal_masking_check(&s, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
    }

    #[test]
    fn universal_verdict_implies_random_sets_mask() {
        let s = latin_masker_default(3).unwrap();
        assert!(universal_masking_check(&s, DEFAULT_TOL).unwrap().verdict);
        let q = StateSet::random(3, 200, 31);
        assert!(marginal_report(&s, &q, DEFAULT_TOL).unwrap().verdict);
    }

    #[test]
    fn cross_terms_vanish_for_maskers() {
        let s = latin_masker_default(3).unwrap();
        let psi1 = StateVector::basis(3, 0);
        let psi2 = StateVector::basis(3, 1);
        for j in 0..3 {
            let m = cross_term(&s, &psi1, &psi2, j).unwrap();
            assert!(m.frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_cross_term_is_the_marginal() {
        let s = latin_masker_default(3).unwrap();
        let psi = random_pure_state(3, 17);
        let m = cross_term(&s, &psi, &psi, 1).unwrap();
        assert!((m.trace() - c(1.0, 0.0)).norm() < 1e-12);
        let image = s.apply(&psi).unwrap();
        let marginal = pure_marginal(&image, s.dims(), 1).unwrap();
        assert!(m.sub(&marginal).frobenius_norm() < 1e-13);
    }

    #[test]
    fn cross_term_of_product_encoder_is_a_matrix_unit() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = product_encoder(2, &dims);
        let m = cross_term(&s, &StateVector::basis(2, 0), &StateVector::basis(2, 1), 0).unwrap();
        let expected = StateVector::basis(2, 0).outer(&StateVector::basis(2, 1));
        assert!(m.sub(&expected).frobenius_norm() < 1e-14);
        assert!((m.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_terms_vanish_on_random_orthonormal_pairs() {
        let maskers = [
            latin_masker_default(3).unwrap(),
            latin_masker_default(4).unwrap(),
            tilde_masker(2).unwrap(),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        for s in &maskers {
            for _ in 0..100 {
                let (a, b) = orthonormal_pair(s.input_dim(), &mut rng);
                for j in 0..s.dims().n() {
                    assert!(cross_term(s, &a, &b, j).unwrap().frobenius_norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn masked_quartet_forces_vanishing_cross_term() {
        let s = latin_masker_default(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(103);
        for _ in 0..20 {
            let (a, b) = orthonormal_pair(3, &mut rng);
            let quartet = StateSet::polarization_quartet(&a, &b).unwrap();
            assert_eq!(quartet.len(), 4);
            assert!(marginal_report(&s, &quartet, DEFAULT_TOL).unwrap().verdict);
            for j in 0..3 {
                assert!(cross_term(&s, &a, &b, j).unwrap().frobenius_norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn quartet_requires_orthogonality() {
        let a = StateVector::basis(3, 0);
        assert!(matches!(
            StateSet::polarization_quartet(&a, &a),
            Err(VerifierError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn schmidt_form_of_latin_masker_is_flat() {
        let s = latin_masker_default(3).unwrap();
        let q = StateSet::computational_basis(3);
        let form = schmidt_form(&s, &q, 0, DEFAULT_TOL).unwrap();
        let expected = 1.0 / 3f64.sqrt();
        assert_eq!(form.rank, 3);
        for coeff in &form.coefficients {
            assert!((coeff - expected).abs() < 1e-10);
        }
        let sum_sq: f64 = form.coefficients.iter().map(|c| c * c).sum();
        assert!((sum_sq - 1.0).abs() < 1e-10);
        for (coeff, e) in form.coefficients.iter().zip(&form.marginal_eigenvalues) {
            assert!((coeff * coeff - e).abs() < 1e-9);
        }
        // right frames are orthonormal per state
        for frame in &form.right_factors {
            for i in 0..form.rank {
                for k in 0..form.rank {
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((frame[i].inner(&frame[k]) - c(expected, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn schmidt_form_flags_mismatched_spectra() {
        // |0⟩ ↦ |000⟩ (product image), |1⟩ ↦ (|100⟩+|011⟩)/√2 (entangled
        // across the first cut): the coefficient multisets {1} and
        // {1/√2, 1/√2} differ, so the set cannot have been masked.
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut matrix = ComplexMatrix::zeros(8, 2);
        matrix.set(0b000, 0, c(1.0, 0.0));
        matrix.set(0b100, 1, c(s, 0.0));
        matrix.set(0b011, 1, c(s, 0.0));
        let encoder = Masker::new(2, dims, matrix, Provenance::User).unwrap();
        let basis = StateSet::computational_basis(2);
        assert!(matches!(
            schmidt_form(&encoder, &basis, 0, DEFAULT_TOL),
            Err(VerifierError::CoefficientMismatch(_))
        ));
    }

    #[test]
    fn schmidt_form_accepts_singletons_and_rank_one_encoders() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let s = product_encoder(2, &dims);
        let singleton = StateSet::new(vec![random_pure_state(2, 3)], None).unwrap();
        assert!(schmidt_form(&s, &singleton, 0, DEFAULT_TOL).is_ok());
        // All basis images are product states: the coefficient multisets
        // agree ({1}), so no mismatch is raised even though the encoder
        // masks nothing. Masking must be gated separately.
        let basis = StateSet::computational_basis(2);
        assert!(schmidt_form(&s, &basis, 0, DEFAULT_TOL).is_ok());
        assert!(!marginal_report(&s, &basis, DEFAULT_TOL).unwrap().verdict);
    }

    #[test]
    fn erasure_basis_resolves_identity() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let ops = erasure_operator_basis(&dims, 0).unwrap();
        assert_eq!(ops.len(), 4);
        let sum_diag = ops
            .iter()
            .filter(|op| {
                let local = op.local();
                (0..2).any(|i| (local.get(i, i) - c(1.0, 0.0)).norm() < 1e-15)
            })
            .fold(ComplexMatrix::zeros(8, 8), |acc, op| acc.add(op.global()));
        assert!(sum_diag.sub(&ComplexMatrix::identity(8)).frobenius_norm() < 1e-14);

        for op in &ops {
            // ‖E_{i,k}‖_F = √(product of the other dimensions)
            assert!((op.global().frobenius_norm() - 4f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn erasure_basis_adjoint_symmetry() {
        let dims = MultipartiteDims::new(vec![3, 3, 3]).unwrap();
        let ops = erasure_operator_basis(&dims, 1).unwrap();
        assert_eq!(ops.len(), 9);
        for i in 0..3 {
            for k in 0..3 {
                let e_ik = &ops[i * 3 + k];
                let e_ki = &ops[k * 3 + i];
                assert!(e_ik.global().adjoint().sub(e_ki.global()).frobenius_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn code_subspace_validates_orthonormality() {
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let good =
            CodeSubspace::new(dims.clone(), vec![StateVector::basis(8, 0), StateVector::basis(8, 7)])
                .unwrap();
        let p = good.projector();
        assert!(p.sub(&p.mul(&p)).frobenius_norm() < 1e-12);
        assert!(p.sub(&p.adjoint()).frobenius_norm() < 1e-12);

        let bad =
            CodeSubspace::new(dims, vec![StateVector::basis(8, 0), StateVector::basis(8, 0)]);
        assert!(matches!(bad, Err(VerifierError::NonOrthonormalBasis(_))));
    }

    #[test]
    fn masker_ranges_pass_the_kl_check() {
        let s = latin_masker_default(3).unwrap();
        let code = CodeSubspace::from_masker(&s);
        for j in 0..3 {
            let report = kl_check(&code, j, DEFAULT_TOL).unwrap();
            assert!(report.verdict, "j={j}");
            assert!(report.worst_deviation <= 1e-10);
            assert_eq!(report.entries.len(), 9);
        }
    }

    #[test]
    fn repetition_like_code_fails_the_kl_check() {
        // span{|000⟩, |111⟩} in (ℂ²)⊗³: E_{0,0} distinguishes the two
        // basis words, so the check fails with deviation √½ (the 2×2
        // restriction is diag(1, 0), λ = ½).
        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let code =
            CodeSubspace::new(dims, vec![StateVector::basis(8, 0), StateVector::basis(8, 7)])
                .unwrap();
        let report = kl_check(&code, 0, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
        let e00 = report.entries.iter().find(|e| e.i == 0 && e.k == 0).unwrap();
        assert!((e00.lambda - c(0.5, 0.0)).norm() < 1e-14);
        assert!((e00.deviation - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_lambdas_sum_to_one() {
        let s = latin_masker_default(4).unwrap();
        let code = CodeSubspace::from_masker(&s);
        for j in 0..3 {
            let report = kl_check(&code, j, DEFAULT_TOL).unwrap();
            let sum: Complex64 =
                report.entries.iter().filter(|e| e.i == e.k).map(|e| e.lambda).sum();
            assert!((sum - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn compressed_kl_matches_dense_projector_oracle() {
        let s = tilde_masker(2).unwrap();
        let code = CodeSubspace::from_masker(&s);
        let p = code.projector();
        let dim_v = code.dim() as f64;
        let ops = erasure_operator_basis(code.dims(), 1).unwrap();
        let report = kl_check(&code, 1, DEFAULT_TOL).unwrap();
        for (entry, op) in report.entries.iter().zip(&ops) {
            let pep = p.mul(op.global()).mul(&p);
            let lambda = pep.trace() / dim_v;
            let deviation = pep.sub(&p.scale(lambda)).frobenius_norm();
            assert!((entry.lambda - lambda).norm() < 1e-12);
            assert!((entry.deviation - deviation).abs() < 1e-10);
        }
    }

    #[test]
    fn equivalence_holds_for_maskers_and_fails_together_for_encoders() {
        for d in [3usize, 4, 5, 7] {
            let s = latin_masker_default(d).unwrap();
            let report = equivalence_report(&s, DEFAULT_TOL).unwrap();
            assert!(report.masking.verdict && report.kl_verdict, "d={d}");
        }
        let s = tilde_masker(5).unwrap();
        let report = equivalence_report(&s, DEFAULT_TOL).unwrap();
        assert!(report.masking.verdict && report.kl_verdict);

        let dims = MultipartiteDims::new(vec![2, 2, 2]).unwrap();
        let enc = product_encoder(2, &dims);
        let report = equivalence_report(&enc, DEFAULT_TOL).unwrap();
        assert!(!report.masking.verdict && !report.kl_verdict);
        assert!(report.agree);
    }
}
