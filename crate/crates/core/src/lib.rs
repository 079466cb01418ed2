//! Ky-Fan k-norms on square real and complex matrices, parallelism of matrix
//! pairs, and the analysis of linear maps that preserve parallel pairs.
//!
//! Two matrices `A`, `B` are *parallel* for a norm when
//! `‖A + μB‖ = ‖A‖ + ‖B‖` for some scalar `μ` of modulus one. For the Ky-Fan
//! k-norm `‖A‖_(k) = s_1(A) + … + s_k(A)` with `k > 1`, the bijective linear
//! maps preserving parallel pairs are exactly the positive multiples of
//! isometries: `X ↦ γUXV` or `X ↦ γUXᵗV`, plus a family built from the
//! involution [`isometry::l_map`] on real 4×4 matrices with `k = 2`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: the field-tagged dense [`Mat`], SVD, Hermitian
//!   eigendecomposition, psd tests, random matrices and the tolerance policy.
//! * [`kyfan`]: norms, certified parallelism decisions, triangle equality and
//!   constructive sampling of parallel pairs.
//! * [`span`]: bases and empirical dimensions of `Span P(A)`.
//! * [`cone`]: the block cone `𝒞`, its boundary strata, `Pert` sets, the
//!   special sets `𝒮₁`, `𝒮_U`, `𝒮₊`, `𝒮₋` and the trace-norm cone witness.
//! * [`isometry`]: isometry forms, including the exceptional real (4, 2) maps.
//! * [`analyzer`]: preservation tests and decomposition of linear maps given
//!   as `n² × n²` matrices on column-major vectorizations.
//! * [`trunc_euclid`]: the truncated Euclidean norm on ℝ², where preservation
//!   in one direction does not imply the other.

pub mod analyzer;
pub mod cone;
mod error;
pub mod isometry;
pub mod kyfan;
pub mod numerics;
pub mod span;
pub mod trunc_euclid;

pub use error::{Error, Result};
pub use numerics::{Field, Mat, SvdTriple, Tolerances, C64};
