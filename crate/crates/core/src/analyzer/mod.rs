//! Empirical analysis of linear maps on `𝕄_n`: parallelism preservation in
//! both directions, rank-one preservation, and recovery of an isometry form.

mod map;
mod recover;

pub use map::MatrixLinearMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::isometry::{l_bold, l_econj, l_map, IsometryForm};
use crate::kyfan::{check_k, kyfan, parallel, sample_parallel_pair, sample_triangle_pair};
use crate::numerics::{random, singular_values, Field, Mat, Tolerances};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `A ∥ B ⇒ T(A) ∥ T(B)`.
    Forward,
    /// `T(A) ∥ T(B) ⇒ A ∥ B`, tested through `T⁻¹`.
    Backward,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Witness {
    pub a: Mat,
    pub b: Mat,
    /// Gap of the mapped pair relative to `1 + bound`.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PreservationReport {
    pub pass: bool,
    pub samples: usize,
    /// Largest gap seen, relative to `1 + bound`.
    pub worst_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankOneReport {
    pub pass: bool,
    pub samples: usize,
    /// Largest `s₂/s₁` over the images.
    pub worst_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Mat>,
}

fn relative_gap(gap: f64, bound: f64) -> f64 {
    (gap / (1.0 + bound)).max(0.0)
}

fn check_map_k(t: &MatrixLinearMap, k: usize) -> Result<()> {
    check_k(t.n(), k)
}

/// Samples parallel pairs and checks their images (forward) or preimages
/// (backward). Stops at the first violation.
pub fn test_preservation<R: Rng + ?Sized>(
    t: &MatrixLinearMap,
    k: usize,
    rng: &mut R,
    samples: usize,
    direction: Direction,
    tol: &Tolerances,
) -> Result<PreservationReport> {
    check_map_k(t, k)?;
    let inv;
    let m = match direction {
        Direction::Forward => t,
        Direction::Backward => {
            inv = t.inverse(tol)?;
            &inv
        }
    };
    let mut worst = 0.0f64;
    for i in 0..samples {
        let pair = sample_parallel_pair(rng, t.n(), k, t.field())?;
        let (ta, tb) = (m.apply(&pair.a)?, m.apply(&pair.b)?);
        let cert = parallel(&ta, &tb, k, tol)?;
        let g = relative_gap(cert.gap, cert.bound);
        worst = worst.max(g);
        if !cert.parallel {
            return Ok(PreservationReport {
                pass: false,
                samples: i + 1,
                worst_gap: worst,
                witness: Some(Witness { a: pair.a, b: pair.b, gap: g }),
            });
        }
    }
    Ok(PreservationReport {
        pass: true,
        samples,
        worst_gap: worst,
        witness: None,
    })
}

/// Pairs with `‖A + B‖ = ‖A‖ + ‖B‖` must keep the equality under `T`.
pub fn test_triangle_mode<R: Rng + ?Sized>(
    t: &MatrixLinearMap,
    k: usize,
    rng: &mut R,
    samples: usize,
    tol: &Tolerances,
) -> Result<PreservationReport> {
    check_map_k(t, k)?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let pair = sample_triangle_pair(rng, t.n(), k, t.field())?;
        let (ta, tb) = (t.apply(&pair.a)?, t.apply(&pair.b)?);
        let bound = kyfan(&ta, k)? + kyfan(&tb, k)?;
        let achieved = kyfan(&(&ta + &tb), k)?;
        let g = relative_gap(bound - achieved, bound);
        worst = worst.max(g);
        if g > tol.tau_par {
            return Ok(PreservationReport {
                pass: false,
                samples: i + 1,
                worst_gap: worst,
                witness: Some(Witness { a: pair.a, b: pair.b, gap: g }),
            });
        }
    }
    Ok(PreservationReport {
        pass: true,
        samples,
        worst_gap: worst,
        witness: None,
    })
}

fn rank_one_ratio(y: &Mat) -> Result<f64> {
    let s = singular_values(y)?;
    if s[0] == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.get(1).copied().unwrap_or(0.0) / s[0])
}

/// Images of the matrix units and of random `xy*` must have rank one.
pub fn test_rank_one<R: Rng + ?Sized>(
    t: &MatrixLinearMap,
    rng: &mut R,
    samples: usize,
    tol: &Tolerances,
) -> Result<RankOneReport> {
    let (field, n) = (t.field(), t.n());
    let units = (0..n * n).map(|c| Mat::unit(field, n, c % n, c / n));
    let randoms: Vec<Mat> = (0..samples)
        .map(|_| {
            let x = random::gaussian_vector(rng, field, n);
            let y = random::gaussian_vector(rng, field, n);
            random::outer(field, &x, &y)
        })
        .collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for x in units.chain(randoms) {
        count += 1;
        let r = rank_one_ratio(&t.apply(&x)?)?;
        worst = worst.max(r);
        if r > tol.tau_rank {
            return Ok(RankOneReport {
                pass: false,
                samples: count,
                worst_ratio: worst,
                witness: Some(x),
            });
        }
    }
    Ok(RankOneReport {
        pass: true,
        samples: count,
        worst_ratio: worst,
        witness: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Standard,
    ExceptionalL,
    NotPreserver,
    Inconclusive,
}

/// Left factor `Φ` tried before recovering `M` and `N` from `Φ ∘ T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Branch {
    Identity,
    L,
    LBold,
    /// `Y ↦ E𝕃(EY)`.
    LConj,
}

impl Branch {
    fn map(self, field: Field, n: usize) -> Result<Option<MatrixLinearMap>> {
        let f: fn(&Mat) -> Result<Mat> = match self {
            Branch::Identity => return Ok(None),
            Branch::L => l_map,
            Branch::LBold => l_bold,
            Branch::LConj => |y| Ok(-&l_econj(y)?),
        };
        Ok(Some(MatrixLinearMap::from_fn(field, n, f)?))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchAttempt {
    pub branch: Branch,
    pub rank_one: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transpose: Option<bool>,
    /// Max-entry distance between `T` and the recovered form, when a form
    /// was assembled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub classification: Classification,
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub forward: PreservationReport,
    pub backward: PreservationReport,
    pub triangle: PreservationReport,
    pub rank_one: RankOneReport,
    pub attempts: Vec<BranchAttempt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovered: Option<IsometryForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl AnalysisReport {
    pub fn is_preserver(&self) -> bool {
        matches!(self.classification, Classification::Standard | Classification::ExceptionalL)
    }
}

/// Tests `T` in both directions, then looks for `Φ` among the identity (and
/// the exceptional maps at ℝ, n = 4, k = 2) such that `Φ ∘ T` is
/// `X ↦ MX⁺N` with `M`, `N` multiples of unitaries. The inverse of `Φ` is
/// folded into the returned form.
pub fn decompose<R: Rng + ?Sized>(
    t: &MatrixLinearMap,
    k: usize,
    rng: &mut R,
    samples: usize,
    tol: &Tolerances,
) -> Result<AnalysisReport> {
    check_map_k(t, k)?;
    if !t.is_invertible(tol)? {
        return Err(Error::SingularMap);
    }
    let (field, n) = (t.field(), t.n());
    let forward = test_preservation(t, k, rng, samples, Direction::Forward, tol)?;
    let backward = test_preservation(t, k, rng, samples, Direction::Backward, tol)?;
    let triangle = test_triangle_mode(t, k, rng, samples, tol)?;
    let rank_one = test_rank_one(t, rng, samples, tol)?;

    let mut report = AnalysisReport {
        classification: Classification::NotPreserver,
        field,
        n,
        k,
        forward,
        backward,
        triangle,
        rank_one,
        attempts: Vec::new(),
        branch: None,
        recovered: None,
        residual: None,
    };
    if !report.forward.pass {
        return Ok(report);
    }

    let branches: &[Branch] = if field == Field::Real && n == 4 && k == 2 {
        &[Branch::Identity, Branch::L, Branch::LBold, Branch::LConj]
    } else {
        &[Branch::Identity]
    };
    let scale = t.matrix().max_abs();
    for &branch in branches {
        let s = match branch.map(field, n)? {
            None => t.clone(),
            Some(phi) => phi.compose(t)?,
        };
        let r1 = test_rank_one(&s, rng, 4 * n, tol)?;
        let mut attempt = BranchAttempt {
            branch,
            rank_one: r1.pass,
            transpose: None,
            residual: None,
        };
        if r1.pass {
            if let Some(found) = recover::recover_form(&s, k, tol) {
                let form = recover::undo_branch(found.form, branch);
                let residual = MatrixLinearMap::from_form(&form)?.matrix().dist_max(t.matrix());
                attempt.transpose = Some(form.transpose);
                attempt.residual = Some(residual);
                if residual <= tol.tau_rank * (1.0 + scale) {
                    report.attempts.push(attempt);
                    report.classification = match branch {
                        Branch::Identity => Classification::Standard,
                        _ => Classification::ExceptionalL,
                    };
                    report.branch = Some(branch);
                    report.recovered = Some(form);
                    report.residual = Some(residual);
                    return Ok(report);
                }
            }
        }
        report.attempts.push(attempt);
    }
    report.classification = Classification::Inconclusive;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{random_isometry, Exceptional};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn transpose_map_is_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = MatrixLinearMap::from_fn(Field::Complex, 3, |x| Ok(x.transpose())).unwrap();
        let r = decompose(&t, 2, &mut rng, 20, &tol()).unwrap();
        assert_eq!(r.classification, Classification::Standard);
        assert!(r.forward.pass && r.backward.pass && r.triangle.pass);
        assert!(r.recovered.unwrap().transpose);
    }

    #[test]
    fn row_scaling_is_not_a_preserver() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = Mat::diag(Field::Complex, &[1.0, 2.0, 1.0]);
        let t = MatrixLinearMap::from_fn(Field::Complex, 3, |x| Ok(&d * x)).unwrap();
        let r = decompose(&t, 2, &mut rng, 20, &tol()).unwrap();
        assert_eq!(r.classification, Classification::NotPreserver);
        let w = r.forward.witness.unwrap();
        let cert = parallel(&t.apply(&w.a).unwrap(), &t.apply(&w.b).unwrap(), 2, &tol()).unwrap();
        assert!(!cert.parallel);
        assert!(parallel(&w.a, &w.b, 2, &tol()).unwrap().parallel);
    }

    #[test]
    fn random_forms_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, k, field) in [(3, 2, Field::Complex), (3, 1, Field::Real), (4, 2, Field::Real)] {
            for _ in 0..6 {
                let form = random_isometry(&mut rng, n, k, field, true).unwrap();
                let t = MatrixLinearMap::from_form(&form).unwrap();
                let r = decompose(&t, k, &mut rng, 8, &tol()).unwrap();
                let expect = match form.exceptional {
                    Exceptional::NoL => Classification::Standard,
                    _ => Classification::ExceptionalL,
                };
                assert_eq!(r.classification, expect, "{:?}", form.exceptional);
                assert!(r.residual.unwrap() <= 1e-8);
                r.recovered.unwrap().validate(&tol()).unwrap();
            }
        }
    }

    #[test]
    fn singular_map_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = MatrixLinearMap::from_fn(Field::Real, 2, |x| Ok(x.scale_real(0.0))).unwrap();
        assert_eq!(decompose(&t, 1, &mut rng, 5, &tol()).unwrap_err(), Error::SingularMap);
    }
}
