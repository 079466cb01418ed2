//! The block cone `𝒞 = {X₁ ⊕ X₂ : X₁ psd, s_k(X₁) ≥ s₁(X₂)}` in
//! `𝕄_k ⊕ 𝕄_{n−k}`, its boundary, and the sets built on it.

mod pert;
mod sets;
mod trace;

use rand::Rng;
use serde::Serialize;

use crate::kyfan::check_k;
use crate::numerics::{is_psd, psd_margin, random, singular_values, Field, Mat, Tolerances};
use crate::{Error, Result};

pub use pert::{canonical_frame, pert_classify, pert_empirical_dim, CanonicalFrame, PertClass, PertKind};
pub use sets::{
    s_set_analytic_dim, s_set_membership, s_set_sample, s_set_span_dim, SSet,
};
pub use trace::{trace_cone_witness, TraceConeWitness};

/// `X₁ ⊕ X₂` with `X₁` of side `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPair {
    pub x1: Mat,
    pub x2: Mat,
}

impl BlockPair {
    pub fn new(x1: Mat, x2: Mat) -> Result<Self> {
        if x1.n() == 0 {
            return Err(Error::ShapeError("first block must be nonempty".into()));
        }
        if x1.field() != x2.field() {
            return Err(Error::FieldError("blocks are over different fields".into()));
        }
        Ok(Self { x1, x2 })
    }

    pub fn k(&self) -> usize {
        self.x1.n()
    }

    pub fn n(&self) -> usize {
        self.x1.n() + self.x2.n()
    }

    pub fn to_mat(&self) -> Mat {
        Mat::direct_sum(&self.x1, &self.x2)
    }

    /// Splits `X` into diagonal blocks, returning the largest off-block entry.
    pub fn split(x: &Mat, k: usize) -> (Self, f64) {
        let n = x.n();
        let off = if k < n {
            let up = x.block(0, k, k, n - k).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lo = x.block(k, 0, n - k, k).iter().map(|z| z.norm()).fold(0.0, f64::max);
            up.max(lo)
        } else {
            0.0
        };
        (
            Self {
                x1: x.principal_block(0, k),
                x2: x.principal_block(k, n - k),
            },
            off,
        )
    }

    /// `s_k(X₁) − s₁(X₂)`, with `s₁` of an empty block taken as 0.
    pub fn slack(&self) -> Result<f64> {
        let sk = singular_values(&self.x1)?[self.k() - 1];
        let s1 = if self.x2.n() == 0 {
            0.0
        } else {
            singular_values(&self.x2)?[0]
        };
        Ok(sk - s1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConeStatus {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeClass {
    pub status: ConeStatus,
    pub slack: f64,
    pub psd_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl ConeClass {
    pub fn in_cone(&self) -> bool {
        self.status != ConeStatus::Outside
    }
}

fn check_shape(x: &Mat, n: usize, k: usize) -> Result<()> {
    if x.n() != n {
        return Err(Error::ShapeError(format!("expected {n}x{n}, got {}x{}", x.n(), x.n())));
    }
    check_k(n, k)
}

/// Interior when `X₁` is positive definite and the slack is positive,
/// boundary when either degenerates to zero, outside otherwise.
///
/// Slack is compared against `τ_rank·(1 + ‖X‖_max)` and eigenvalues against
/// `τ_psd·(1 + ‖X‖_max)`.
pub fn cone_classify(x: &Mat, n: usize, k: usize, tol: &Tolerances) -> Result<ConeClass> {
    check_shape(x, n, k)?;
    x.check_finite()?;
    let scale = 1.0 + x.max_abs();
    let (bp, off) = BlockPair::split(x, k);
    let slack = bp.slack()?;
    let margin = psd_margin(&bp.x1)?;
    let outside = |why: String| ConeClass {
        status: ConeStatus::Outside,
        slack,
        psd_margin: margin,
        diagnostic: Some(why),
    };
    if off > tol.tau_psd * scale {
        return Ok(outside(format!("off-diagonal blocks have entry of size {off:e}")));
    }
    if !is_psd(&bp.x1, tol)? {
        return Ok(outside(format!("first block is not psd (min eigenvalue {margin:e})")));
    }
    let eps = tol.tau_rank * scale;
    if slack < -eps {
        return Ok(outside(format!("s_k(X1) < s_1(X2) by {:e}", -slack)));
    }
    let status = if slack > eps && margin > tol.tau_psd * scale {
        ConeStatus::Interior
    } else {
        ConeStatus::Boundary
    };
    Ok(ConeClass {
        status,
        slack,
        psd_margin: margin,
        diagnostic: None,
    })
}

pub fn in_cone(x: &Mat, n: usize, k: usize, tol: &Tolerances) -> Result<bool> {
    Ok(cone_classify(x, n, k, tol)?.in_cone())
}

/// `W diag(d) W* ⊕ G` with `d` descending in `[1, 3]`, Haar `W` and `G`
/// scaled so that `s₁(G) = ratio·d_k`.
fn structured_point<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, k: usize, ratio: f64) -> Mat {
    let d = random::descending(rng, k, 1.0, 3.0);
    let x1 = random::psd_with_eigs(rng, field, &d);
    let m = n - k;
    if m == 0 {
        return x1;
    }
    let g = random::gaussian(rng, field, m);
    let s1 = singular_values(&g).expect("finite")[0];
    Mat::direct_sum(&x1, &g.scale_real(ratio * d[k - 1] / s1))
}

/// Random interior point of `𝒞`.
pub fn sample_interior<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, k: usize) -> Mat {
    let ratio = rng.random_range(0.0..0.9);
    structured_point(rng, field, n, k, ratio)
}

/// Random boundary point with `s_k(X₁) = s₁(X₂)` tied by construction.
///
/// For `k = n` the tie is impossible, so the first block is made singular.
pub fn sample_boundary<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, k: usize) -> Mat {
    if k == n {
        let mut d = random::descending(rng, n, 1.0, 3.0);
        d[n - 1] = 0.0;
        return random::psd_with_eigs(rng, field, &d);
    }
    structured_point(rng, field, n, k, 1.0)
}

/// Random point of `𝒞`: interior or boundary with equal odds.
pub fn sample_cone_point<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, k: usize) -> Mat {
    if rng.random_bool(0.5) {
        sample_interior(rng, field, n, k)
    } else {
        sample_boundary(rng, field, n, k)
    }
}

/// ℝ-dimension of the affine hull of `𝒞`: `ℍ_k ⊕ 𝕄_{n−k}(ℂ)` or
/// `𝕊_k ⊕ 𝕄_{n−k}(ℝ)`.
pub fn cone_span_dim(field: Field, n: usize, k: usize) -> usize {
    let m = n - k;
    match field {
        Field::Complex => k * k + 2 * m * m,
        Field::Real => k * (k + 1) / 2 + m * m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn classify_examples() {
        let x = Mat::direct_sum(&Mat::identity(Field::Real, 2), &Mat::zeros(Field::Real, 2));
        assert_eq!(cone_classify(&x, 4, 2, &tol()).unwrap().status, ConeStatus::Interior);
        let e = Mat::unit(Field::Real, 4, 0, 0);
        assert_eq!(cone_classify(&e, 4, 2, &tol()).unwrap().status, ConeStatus::Boundary);
        let x = Mat::diag(Field::Real, &[2.0, 1.0, 1.0, 0.5]);
        let c = cone_classify(&x, 4, 2, &tol()).unwrap();
        assert_eq!(c.status, ConeStatus::Boundary);
        assert!(c.slack.abs() < 1e-14 && c.psd_margin > 0.9);
        let x = Mat::diag(Field::Real, &[2.0, 1.0, 1.5, 0.5]);
        assert_eq!(cone_classify(&x, 4, 2, &tol()).unwrap().status, ConeStatus::Outside);
    }

    #[test]
    fn off_block_entries_are_outside() {
        let mut x = Mat::identity(Field::Complex, 3).into_data();
        x[(0, 2)] = C64::new(0.1, 0.0);
        let x = Mat::new(Field::Complex, x).unwrap();
        let c = cone_classify(&x, 3, 2, &tol()).unwrap();
        assert_eq!(c.status, ConeStatus::Outside);
        assert!(c.diagnostic.is_some());
        assert!(matches!(cone_classify(&x, 4, 2, &tol()), Err(Error::ShapeError(_))));
    }

    #[test]
    fn samplers_land_where_expected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for field in [Field::Real, Field::Complex] {
            for (n, k) in [(3, 1), (4, 2), (5, 2), (3, 3)] {
                for _ in 0..10 {
                    let x = sample_interior(&mut rng, field, n, k);
                    assert_eq!(cone_classify(&x, n, k, &tol()).unwrap().status, ConeStatus::Interior);
                    let x = sample_boundary(&mut rng, field, n, k);
                    assert_eq!(cone_classify(&x, n, k, &tol()).unwrap().status, ConeStatus::Boundary);
                }
            }
        }
    }
}
