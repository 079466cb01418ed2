use serde::Serialize;

use crate::numerics::{phase, svd, unit_multiple_of_psd, Mat, Tolerances, C64};
use crate::{Error, Result};

use super::kyfan;

/// The SVD-frame test for pairs where `A` has a spectral gap at `k`.
///
/// With `C = U*BV` in `A`'s frame, `A ∥ B` iff `C = C₁₁ ⊕ C₂₂` with `μ̄C₁₁`
/// psd and `|Tr C₁₁| = ‖B‖_(k)`. The decision itself is read off
/// `‖A + μB‖_(k)` at `μ = conj(phase(Tr C₁₁))`, which is the only candidate
/// unit once the gap is present; the block diagnostics are reported alongside.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructuralReport {
    pub parallel: bool,
    pub mu: C64,
    pub achieved: f64,
    pub gap: f64,
    /// `‖B‖_(k) − |Tr C₁₁|`; zero exactly for parallel pairs.
    pub trace_defect: f64,
    /// Max entry of the off-diagonal blocks of `C`.
    pub off_block: f64,
    /// Whether `C₁₁` is a unit multiple of a psd matrix.
    pub psd_block: bool,
}

/// True when `s_k > s_{k+1} + 10·τ_rank` (with `s_{n+1} = 0`).
pub fn has_structural_gap(s: &[f64], k: usize, tol: &Tolerances) -> bool {
    let next = s.get(k).copied().unwrap_or(0.0);
    s[k - 1] > next + 10.0 * tol.tau_rank
}

pub fn structural_test(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> Result<StructuralReport> {
    super::check_pair(a, b, k)?;
    let dec = svd(a)?;
    if !has_structural_gap(&dec.s, k, tol) {
        return Err(Error::DegenerateGap { k });
    }
    let n = a.n();
    let c = &(&dec.u.adjoint() * b) * &dec.v;
    let c11 = c.principal_block(0, k);
    let tr = c11.trace();
    let mu = phase(tr).conj();

    let na: f64 = dec.s[..k].iter().sum();
    let nb = kyfan(b, k)?;
    let bound = na + nb;
    let achieved = kyfan(&(a + &b.scale(mu)), k)?;
    let gap = bound - achieved;

    let off_block = if k < n {
        let upper = c.block(0, k, k, n - k).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lower = c.block(k, 0, n - k, k).iter().map(|z| z.norm()).fold(0.0, f64::max);
        upper.max(lower)
    } else {
        0.0
    };
    Ok(StructuralReport {
        parallel: gap <= tol.tau_par * (1.0 + bound),
        mu,
        achieved,
        gap,
        trace_defect: nb - tr.norm(),
        off_block,
        psd_block: unit_multiple_of_psd(&c11, tol)?.is_some(),
    })
}
