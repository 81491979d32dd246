//! Masker constructions.
//!
//! The central object is the Latin-square masker: for an orthogonal pair
//! `(V, W)` of order `d`, the isometry `ℂ^d → (ℂ^d)⊗³` sending
//!
//! ```text
//! |j⟩ ↦ (1/√d) Σ_k |k⟩ |V[j][k]⟩ |W[j][k]⟩
//! ```
//!
//! masks every pure (and hence mixed) state of `ℂ^d` with marginal `I_d/d`
//! on each of the three subsystems. On top of it sit the canonical
//! embedding `|x⟩ ↦ |x⟩ ⊕ 0`, dimension and participant extensions, the
//! shifted maskers `ℂ^d → (ℂ^{d+1})⊗³`, a seeded unitary dilation, and
//! mixed-state masking.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mols::{mols_pair, verify_mols, MolsError, MolsPair, MolsViolation};
use crate::tensor::{
    complete_orthonormal_basis, kron, ComplexMatrix, MultipartiteDims, StateVector, TensorError,
};

#[derive(Debug, Error)]
pub enum MaskerError {
    #[error("invalid MOLS pair: {0}")]
    InvalidMols(#[from] MolsViolation),
    #[error(transparent)]
    Mols(#[from] MolsError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("matrix is not an isometry: ||S'S - I|| = {defect:.3e}")]
    NotIsometry { defect: f64 },
    #[error("factor {index} is not an isometry: ||V'V - I|| = {defect:.3e}")]
    NotIsometricFactor { index: usize, defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ancilla {index} is not normalized (norm {norm})")]
    UnnormalizedAncilla { index: usize, norm: f64 },
    #[error("input dimension {input} exceeds the first factor dimension {first}")]
    InputExceedsFirstFactor { input: usize, first: usize },
    #[error("ancillary state is not normalized (norm {norm})")]
    UnnormalizedAncillaryState { norm: f64 },
    #[error("input is not a density operator: {0}")]
    NotDensityOperator(String),
}

pub type MaskerResult<T> = Result<T, MaskerError>;

/// How a masker was built; carried through files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Latin,
    Embedded,
    Extended,
    DilationRestricted,
    User,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::Latin => "latin",
            Provenance::Embedded => "embedded",
            Provenance::Extended => "extended",
            Provenance::DilationRestricted => "dilation-restricted",
            Provenance::User => "user",
        };
        f.write_str(s)
    }
}

/// An isometry from `ℂ^K` into a multipartite space, with construction
/// metadata. The matrix is `product(dims) × K` and satisfies
/// `‖S†S − I_K‖_F ≤ 1e−10` by construction or by load-time validation.
#[derive(Debug, Clone)]
pub struct Masker {
    input_dim: usize,
    dims: MultipartiteDims,
    matrix: ComplexMatrix,
    provenance: Provenance,
}

/// Isometry tolerance enforced on every [`Masker`].
pub const ISOMETRY_TOL: f64 = 1e-10;

impl Masker {
    pub fn new(
        input_dim: usize,
        dims: MultipartiteDims,
        matrix: ComplexMatrix,
        provenance: Provenance,
    ) -> MaskerResult<Self> {
        if matrix.rows() != dims.total_dim() || matrix.cols() != input_dim {
            return Err(MaskerError::DimensionMismatch(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                dims.total_dim(),
                input_dim
            )));
        }
        let defect = matrix.isometry_defect();
        if defect > ISOMETRY_TOL {
            return Err(MaskerError::NotIsometry { defect });
        }
        Ok(Self { input_dim, dims, matrix, provenance })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn dims(&self) -> &MultipartiteDims {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Image `S|ψ⟩` of an input state.
    pub fn apply(&self, psi: &StateVector) -> MaskerResult<StateVector> {
        if psi.dim() != self.input_dim {
            return Err(MaskerError::DimensionMismatch(format!(
                "state dimension {} vs input dimension {}",
                psi.dim(),
                self.input_dim
            )));
        }
        Ok(self.matrix.mul_vector(psi))
    }

    /// Column `i`, the image of the `i`-th basis vector.
    pub fn basis_image(&self, i: usize) -> StateVector {
        self.matrix.column(i)
    }
}

/// Per-subsystem marginal states `ρ_0..ρ_{n−1}` of a masker's images.
#[derive(Debug, Clone)]
pub struct MarginalSet {
    pub marginals: Vec<ComplexMatrix>,
}

impl MarginalSet {
    /// Validate that every member is Hermitian, positive semidefinite and
    /// unit-trace within the stated tolerances.
    pub fn validate(&self) -> MaskerResult<()> {
        for (j, rho) in self.marginals.iter().enumerate() {
            if !rho.is_hermitian(1e-10) {
                return Err(MaskerError::NotDensityOperator(format!(
                    "marginal {j} is not Hermitian"
                )));
            }
            let min = rho.min_hermitian_eigenvalue();
            if min < -1e-10 {
                return Err(MaskerError::NotDensityOperator(format!(
                    "marginal {j} has eigenvalue {min:.3e}"
                )));
            }
            if (rho.trace().re - 1.0).abs() > 1e-10 {
                return Err(MaskerError::NotDensityOperator(format!(
                    "marginal {j} has trace {}",
                    rho.trace().re
                )));
            }
        }
        Ok(())
    }

    /// Marginals of the first basis image of a masker.
    pub fn of_masker(s: &Masker) -> MaskerResult<Self> {
        let image = s.basis_image(0);
        let marginals = (0..s.dims().n())
            .map(|j| crate::tensor::pure_marginal(&image, s.dims(), j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { marginals })
    }
}

/// The Latin-square masker of order `d` for a verified orthogonal pair.
pub fn latin_masker(d: usize, pair: &MolsPair) -> MaskerResult<Masker> {
    if pair.order() != d {
        return Err(MaskerError::DimensionMismatch(format!(
            "pair order {} vs requested dimension {}",
            pair.order(),
            d
        )));
    }
    verify_mols(pair)?;
    let dims = MultipartiteDims::uniform_tripartite(d);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut matrix = ComplexMatrix::zeros(d * d * d, d);
    for j in 0..d {
        for k in 0..d {
            let row = (k * d + pair.first.get(j, k)) * d + pair.second.get(j, k);
            matrix.set(row, j, amp);
        }
    }
    Masker::new(d, dims, matrix, Provenance::Latin)
}

/// Convenience form of [`latin_masker`] using the built-in pair of order `d`.
pub fn latin_masker_default(d: usize) -> MaskerResult<Masker> {
    latin_masker(d, &mols_pair(d)?)
}

/// Canonical embedding `J: ℂ^k → ℂ^m`, `|x⟩ ↦ |x⟩ ⊕ 0`; an `m × k`
/// identity-over-zero block matrix.
pub fn embed_iso(k: usize, m: usize) -> MaskerResult<ComplexMatrix> {
    if k > m {
        return Err(MaskerError::DimensionMismatch(format!(
            "cannot embed dimension {k} into smaller dimension {m}"
        )));
    }
    Ok(ComplexMatrix::from_fn(m, k, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Masker of `ℂ^d` into `(ℂ^{d+1})⊗³`: the order-`d+1` Latin masker
/// restricted to the embedded input space, except at `d = 5` (no order-6
/// pair exists) where the order-5 masker is pushed forward through
/// `J ⊗ J ⊗ J`. Marginals are `I_{d+1}/(d+1)` in the first case and
/// `I_5/5 ⊕ 0` in the second.
pub fn tilde_masker(d: usize) -> MaskerResult<Masker> {
    if d < 2 {
        return Err(MaskerError::DimensionMismatch(format!(
            "shifted masker needs input dimension >= 2, got {d}"
        )));
    }
    if d == 5 {
        let base = latin_masker_default(5)?;
        let j = embed_iso(5, 6)?;
        let jjj = kron(&kron(&j, &j), &j);
        let matrix = jjj.mul(base.matrix());
        return Masker::new(
            5,
            MultipartiteDims::uniform_tripartite(6),
            matrix,
            Provenance::Embedded,
        );
    }
    let base = latin_masker_default(d + 1)?;
    let j = embed_iso(d, d + 1)?;
    let matrix = base.matrix().mul(&j);
    Masker::new(d, MultipartiteDims::uniform_tripartite(d + 1), matrix, Provenance::Embedded)
}

/// Compose `(V₀ ⊗ V₁ ⊗ V₂) · S · U`: an input-basis rotation `U` and
/// per-subsystem isometries `V_k` into larger factors. Marginals map to
/// `V_k ρ_k V_k†`. Omitted factors default to canonical embeddings and an
/// omitted `u` to the identity.
pub fn dimension_extension(
    base: &Masker,
    targets: &MultipartiteDims,
    u: Option<&ComplexMatrix>,
    factors: [Option<&ComplexMatrix>; 3],
) -> MaskerResult<Masker> {
    if base.dims().n() != 3 || targets.n() != 3 {
        return Err(MaskerError::DimensionMismatch(
            "dimension extension applies to tripartite maskers".into(),
        ));
    }
    let k_dim = base.input_dim();
    let u_mat = match u {
        Some(m) => {
            if m.rows() != k_dim || m.cols() != k_dim {
                return Err(MaskerError::DimensionMismatch(format!(
                    "input rotation is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    k_dim,
                    k_dim
                )));
            }
            if !m.is_unitary(ISOMETRY_TOL) {
                return Err(MaskerError::NotIsometricFactor {
                    index: 0,
                    defect: m.isometry_defect(),
                });
            }
            m.clone()
        }
        None => ComplexMatrix::identity(k_dim),
    };
    let mut vs = Vec::with_capacity(3);
    for (k, factor) in factors.into_iter().enumerate() {
        let source = base.dims().dim_of(k);
        let target = targets.dim_of(k);
        let v = match factor {
            Some(m) => {
                if m.rows() != target || m.cols() != source {
                    return Err(MaskerError::DimensionMismatch(format!(
                        "factor {k} is {}x{}, expected {target}x{source}",
                        m.rows(),
                        m.cols()
                    )));
                }
                let defect = m.isometry_defect();
                if defect > ISOMETRY_TOL {
                    return Err(MaskerError::NotIsometricFactor { index: k, defect });
                }
                m.clone()
            }
            None => embed_iso(source, target)?,
        };
        vs.push(v);
    }
    let local = kron(&kron(&vs[0], &vs[1]), &vs[2]);
    let matrix = local.mul(base.matrix()).mul(&u_mat);
    Masker::new(k_dim, targets.clone(), matrix, Provenance::Extended)
}

/// Append fixed ancilla states as extra participants:
/// `S' |ψ⟩ = S|ψ⟩ ⊗ |e₁⟩ ⊗ … ⊗ |e_m⟩`. The new marginals are the ancilla
/// projectors.
pub fn participant_extension(base: &Masker, ancillas: &[StateVector]) -> MaskerResult<Masker> {
    if ancillas.is_empty() {
        return Ok(base.clone());
    }
    let mut matrix = base.matrix().clone();
    let mut dims = base.dims().dims().to_vec();
    for (index, e) in ancillas.iter().enumerate() {
        let norm = e.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(MaskerError::UnnormalizedAncilla { index, norm });
        }
        matrix = kron(&matrix, &e.as_column());
        dims.push(e.dim());
    }
    Masker::new(base.input_dim(), MultipartiteDims::new(dims)?, matrix, Provenance::Extended)
}

/// Unitary on the full multipartite space that acts as the masker on the
/// embedded input sector: `U (J|ψ⟩ ⊗ |b⟩) = S|ψ⟩`.
///
/// `j_embed` is an isometry `ℂ^K → H₀` and `b` a normalized state of the
/// remaining factors. The action on the orthogonal complement is not
/// pinned down by that equation; it is fixed by matching seeded
/// orthonormal completions of the domain and range complements, so equal
/// seeds give identical unitaries.
pub fn unitary_dilation(
    s: &Masker,
    j_embed: &ComplexMatrix,
    b: &StateVector,
    seed: u64,
) -> MaskerResult<ComplexMatrix> {
    let k_dim = s.input_dim();
    let first = s.dims().dim_of(0);
    if k_dim > first {
        return Err(MaskerError::InputExceedsFirstFactor { input: k_dim, first });
    }
    if j_embed.rows() != first || j_embed.cols() != k_dim {
        return Err(MaskerError::DimensionMismatch(format!(
            "embedding is {}x{}, expected {first}x{k_dim}",
            j_embed.rows(),
            j_embed.cols()
        )));
    }
    if j_embed.isometry_defect() > ISOMETRY_TOL {
        return Err(MaskerError::NotIsometricFactor {
            index: 0,
            defect: j_embed.isometry_defect(),
        });
    }
    let rest_dim: usize = s.dims().dims()[1..].iter().product();
    if b.dim() != rest_dim {
        return Err(MaskerError::DimensionMismatch(format!(
            "ancillary state dimension {} vs remaining factors {}",
            b.dim(),
            rest_dim
        )));
    }
    let norm = b.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(MaskerError::UnnormalizedAncillaryState { norm });
    }

    let total = s.dims().total_dim();
    let domain: Vec<StateVector> = (0..k_dim).map(|i| j_embed.column(i).tensor(b)).collect();
    let range: Vec<StateVector> = (0..k_dim).map(|i| s.basis_image(i)).collect();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let domain_complement = complete_orthonormal_basis(&domain, total, &mut rng);
    let range_complement = complete_orthonormal_basis(&range, total, &mut rng);

    // U = Σ |range_i⟩⟨domain_i| over the matched sector and complement pairs.
    let mut u = ComplexMatrix::zeros(total, total);
    let pairs = domain.iter().zip(&range).chain(domain_complement.iter().zip(&range_complement));
    for (d_vec, r_vec) in pairs {
        u = u.add(&r_vec.outer(d_vec));
    }
    Ok(u)
}

/// Push a mixed state through the masker: `σ ↦ S σ S†`. The input must be
/// a density operator (Hermitian, positive, unit trace) within `1e−8`.
pub fn mask_density(s: &Masker, sigma: &ComplexMatrix) -> MaskerResult<ComplexMatrix> {
    let k_dim = s.input_dim();
    if sigma.rows() != k_dim || sigma.cols() != k_dim {
        return Err(MaskerError::DimensionMismatch(format!(
            "state is {}x{}, expected {k_dim}x{k_dim}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    if !sigma.is_hermitian(1e-8) {
        return Err(MaskerError::NotDensityOperator("not Hermitian".into()));
    }
    if (sigma.trace().re - 1.0).abs() > 1e-8 {
        return Err(MaskerError::NotDensityOperator(format!(
            "trace is {}, expected 1",
            sigma.trace().re
        )));
    }
    let min = sigma.min_hermitian_eigenvalue();
    if min < -1e-8 {
        return Err(MaskerError::NotDensityOperator(format!(
            "minimum eigenvalue {min:.3e} is negative"
        )));
    }
    Ok(s.matrix().mul(sigma).mul(&s.matrix().adjoint()))
}
