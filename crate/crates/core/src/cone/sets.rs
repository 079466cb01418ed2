use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kyfan::check_k;
use crate::numerics::{is_psd, random, singular_values, Field, Mat, Tolerances};
use crate::span::real_span_rank;
use crate::{Error, Result};

use super::BlockPair;

/// The distinguished boundary strata.
///
/// `S1` is `{aR ⊕ 0 : a > 0, R rank-one psd}`. `SU` is `{a(I_k ⊕ P)}` with
/// `P` unitary; over ℝ it splits into `SPlus` (`det P = 1`) and `SMinus`
/// (`det P = −1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SSet {
    S1,
    SU,
    SPlus,
    SMinus,
    None,
}

pub fn s_set_membership(x: &Mat, n: usize, k: usize, tol: &Tolerances) -> Result<SSet> {
    super::check_shape(x, n, k)?;
    x.check_finite()?;
    let s = singular_values(x)?;
    if s[0] == 0.0 {
        return Ok(SSet::None);
    }
    let eps = tol.tau_rank * (1.0 + s[0]);
    let (bp, off) = BlockPair::split(x, k);
    if off > eps {
        return Ok(SSet::None);
    }

    let x2_zero = bp.x2.max_abs() <= eps;
    let s1_rank = singular_values(&bp.x1)?.iter().filter(|&&v| v > eps).count();
    if x2_zero && s1_rank == 1 && is_psd(&bp.x1, tol)? {
        return Ok(SSet::S1);
    }

    let a = bp.x1.trace().re / k as f64;
    if a <= eps {
        return Ok(SSet::None);
    }
    let m = n - k;
    let first_ok = bp.x1.dist_max(&Mat::identity(x.field(), k).scale_real(a)) <= tol.tau_rank * (1.0 + a);
    let p = bp.x2.scale_real(1.0 / a);
    let unitary = (&p.adjoint() * &p).dist_max(&Mat::identity(x.field(), m)) <= tol.tau_rank * (1.0 + a);
    if !(first_ok && unitary) {
        return Ok(SSet::None);
    }
    Ok(match x.field() {
        Field::Complex => SSet::SU,
        Field::Real => {
            let det = if m == 0 { 1.0 } else { p.determinant().re };
            if det > 0.0 {
                SSet::SPlus
            } else {
                SSet::SMinus
            }
        }
    })
}

fn check_set_field(which: SSet, field: Field) -> Result<()> {
    match (which, field) {
        (SSet::None, _) => Err(Error::Config("`None` is not a set to sample".into())),
        (SSet::SPlus | SSet::SMinus, Field::Complex) => Err(Error::Config(
            "the determinant split applies only over the reals".into(),
        )),
        _ => Ok(()),
    }
}

/// One random member of the set.
pub fn s_set_sample<R: Rng + ?Sized>(
    rng: &mut R,
    which: SSet,
    n: usize,
    k: usize,
    field: Field,
) -> Result<Mat> {
    check_k(n, k)?;
    check_set_field(which, field)?;
    let m = n - k;
    let a = random::log_uniform(rng, 0.5, 2.0);
    let tail = |rng: &mut R, sign: f64| -> Mat {
        if m == 0 {
            Mat::zeros(field, 0)
        } else {
            random::orthogonal_with_det(rng, m, sign)
        }
    };
    let p = match which {
        SSet::S1 => {
            let x = random::unit_vector(rng, field, k);
            let r = random::outer(field, &x, &x);
            return Ok(Mat::direct_sum(&r.scale_real(a), &Mat::zeros(field, m)));
        }
        SSet::SPlus => tail(rng, 1.0),
        SSet::SMinus => tail(rng, -1.0),
        SSet::SU => match field {
            Field::Complex => random::haar(rng, field, m),
            Field::Real => {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                tail(rng, sign)
            }
        },
        SSet::None => unreachable!("rejected above"),
    };
    Ok(Mat::direct_sum(&Mat::identity(field, k), &p).scale_real(a))
}

/// ℝ-span rank of sampled members.
pub fn s_set_span_dim<R: Rng + ?Sized>(
    which: SSet,
    n: usize,
    k: usize,
    field: Field,
    rng: &mut R,
    samples: usize,
) -> Result<usize> {
    let members = (0..samples)
        .map(|_| s_set_sample(rng, which, n, k, field))
        .collect::<Result<Vec<_>>>()?;
    Ok(real_span_rank(&members, Tolerances::default().tau_rank))
}

/// ℝ-dimension of the span of each set.
///
/// Over ℝ: `k(k+1)/2` for `S1`; for `SPlus` and `SMinus`, `1 + (n−k)²` when
/// `n−k ≥ 3`, `3` when `n−k = 2` and `1` when `n−k = 1`; their union `SU`
/// spans `1 + (n−k)²` for `n−k ≥ 2` and `2` for `n−k = 1`. Over ℂ: `k²` for
/// `S1` and `1 + 2(n−k)²` for `SU`.
pub fn s_set_analytic_dim(which: SSet, n: usize, k: usize, field: Field) -> Result<usize> {
    check_k(n, k)?;
    check_set_field(which, field)?;
    let m = n - k;
    Ok(match (which, field) {
        (SSet::S1, Field::Real) => k * (k + 1) / 2,
        (SSet::S1, Field::Complex) => k * k,
        (SSet::SU, Field::Complex) => 1 + 2 * m * m,
        (SSet::SPlus | SSet::SMinus, Field::Real) => match m {
            0 | 1 => 1,
            2 => 3,
            _ => 1 + m * m,
        },
        (SSet::SU, Field::Real) => match m {
            0 => 1,
            1 => 2,
            _ => 1 + m * m,
        },
        _ => unreachable!("rejected by check_set_field"),
    })
}
