//! Quantum multipartite masking toolkit.
//!
//! A masker is a linear operator `S` from an input space `ℂ^K` into a
//! multipartite tensor space `H₁ ⊗ … ⊗ Hₙ` such that every image state
//! `S|ψ⟩` has the same reduced density operator on each subsystem: the
//! information in `|ψ⟩` is present globally but invisible locally. This
//! crate constructs such operators from pairs of mutually orthogonal Latin
//! squares, decides numerically whether a candidate operator masks a state
//! set, checks the one-erasure Knill–Laflamme conditions on its range,
//! simulates erasure-and-recovery round trips, and searches the isometry
//! manifold for maskers in regimes where none are known (or known not to
//! exist).
//!
//! Module map:
//!
//! - [`tensor`] — dense complex linear algebra over multipartite spaces:
//!   Kronecker products, partial traces, subsystem permutations, Schmidt
//!   decomposition, seeded random states.
//! - [`mols`] — mutually orthogonal Latin squares via finite fields and the
//!   MacNeish product.
//! - [`masker`] — the Latin-square masker `S_d`, its dimension/participant
//!   extensions, the shifted maskers into `(ℂ^{d+1})⊗³`, unitary dilation,
//!   and mixed-state masking.
//! - [`verifier`] — masking reports, cross-term checks, the common Schmidt
//!   form of masked images, and the Knill–Laflamme one-erasure check.
//! - [`erasure`] — one-erasure Kraus channels, recovery synthesis, and
//!   round-trip fidelity measurement.
//! - [`nogo`] — a masking-defect functional that vanishes exactly on
//!   universal maskers, and a seeded multi-restart descent over the
//!   isometry manifold.
//! - [`files`] — schema-validated JSON persistence for every artifact.
//!
//! All subsystem and basis indices are zero-based. Complex scalars are
//! `f64`-based throughout; there is no symbolic or arbitrary-precision mode.

pub mod erasure;
pub mod files;
pub mod masker;
pub mod mols;
pub mod nogo;
pub mod tensor;
pub mod verifier;

pub use tensor::{ComplexMatrix, MultipartiteDims, StateVector};
