use rand::Rng;
use serde::Serialize;

use crate::kyfan::parallel;
use crate::numerics::{random, svd, Mat, Tolerances};
use crate::Result;

const CONE_SAMPLES: usize = 50;
const CANDIDATES: usize = 50;

/// Trace-norm cone test for `A`.
///
/// A singular `A = U diag(s) V*` gets `B = U E_nn V*`, and every sampled
/// `t₁A + t₂B + t₃(−B)` with `tᵢ ≥ 0` is checked to be parallel to `A`. For
/// invertible `A` no witness is returned, and random candidates `B` are shown
/// to fail: some sampled member of their cone is not parallel to `A`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceConeWitness {
    pub singular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Mat>,
    pub cone_samples: usize,
    /// Every cone sample certified parallel to `A` (singular case).
    pub all_parallel: bool,
    pub worst_gap: f64,
    pub candidates: usize,
    /// Candidates whose cone contained a sample not parallel to `A`.
    pub candidates_failed: usize,
}

impl TraceConeWitness {
    pub fn witness(&self) -> Option<&Mat> {
        self.b.as_ref()
    }

    /// The construction succeeded (singular) or every candidate failed
    /// (invertible).
    pub fn consistent(&self) -> bool {
        if self.singular {
            self.all_parallel
        } else {
            self.candidates_failed == self.candidates
        }
    }
}

fn combo<R: Rng + ?Sized>(rng: &mut R, a: &Mat, b: &Mat) -> Mat {
    let t: [f64; 3] = [rng.random_range(0.0..1.0), rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)];
    &(&a.scale_real(t[0]) + &b.scale_real(t[1])) - &b.scale_real(t[2])
}

pub fn trace_cone_witness<R: Rng + ?Sized>(a: &Mat, rng: &mut R, tol: &Tolerances) -> Result<TraceConeWitness> {
    let n = a.n();
    let dec = svd(a)?;
    let singular = dec.s[n - 1] <= tol.tau_rank * (1.0 + dec.s[0]);
    if singular {
        let field = a.field();
        let b = &(&dec.u * &Mat::unit(field, n, n - 1, n - 1)) * &dec.v.adjoint();
        let mut worst = f64::NEG_INFINITY;
        let mut all = true;
        for i in 0..CONE_SAMPLES {
            let x = match i {
                0 => b.clone(),
                1 => b.scale_real(-1.0),
                _ => combo(rng, a, &b),
            };
            let c = parallel(a, &x, n, tol)?;
            worst = worst.max(c.gap);
            all &= c.parallel;
        }
        return Ok(TraceConeWitness {
            singular,
            b: Some(b),
            cone_samples: CONE_SAMPLES,
            all_parallel: all,
            worst_gap: worst,
            candidates: 0,
            candidates_failed: 0,
        });
    }

    let mut failed = 0;
    for _ in 0..CANDIDATES {
        let b = random::gaussian(rng, a.field(), n);
        let mut found = false;
        for i in 0..CONE_SAMPLES {
            let x = match i {
                0 => b.clone(),
                1 => b.scale_real(-1.0),
                _ => combo(rng, a, &b),
            };
            if !parallel(a, &x, n, tol)?.parallel {
                found = true;
                break;
            }
        }
        if found {
            failed += 1;
        }
    }
    Ok(TraceConeWitness {
        singular,
        b: None,
        cone_samples: CONE_SAMPLES,
        all_parallel: false,
        worst_gap: f64::NAN,
        candidates: CANDIDATES,
        candidates_failed: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kyfan::kyfan;
    use crate::numerics::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singular_diagonal_gets_witness() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Mat::diag(Field::Real, &[1.0, 0.0]);
        let w = trace_cone_witness(&a, &mut rng, &tol).unwrap();
        assert!(w.consistent());
        assert!(w.witness().unwrap().dist_max(&Mat::unit(Field::Real, 2, 1, 1)) < 1e-15);

        let a = Mat::diag(Field::Complex, &[5.0, 3.0, 0.0]);
        let w = trace_cone_witness(&a, &mut rng, &tol).unwrap();
        let b = w.witness().unwrap();
        assert!(b.dist_max(&Mat::unit(Field::Complex, 3, 2, 2)) < 1e-15);
        for sign in [1.0, -1.0] {
            let v = kyfan(&(&a + &b.scale_real(sign)), 3).unwrap();
            assert!((v - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invertible_has_no_witness() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = trace_cone_witness(&Mat::identity(Field::Complex, 2), &mut rng, &tol).unwrap();
        assert!(w.witness().is_none());
        assert!(w.consistent());
    }
}
