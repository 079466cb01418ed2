//! Ky-Fan k-norms and the parallelism relation they induce.

mod search;
mod structural;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{random, singular_values, Field, Mat, Tolerances, C64};
use crate::{Error, Result};

pub use structural::{has_structural_gap, structural_test, StructuralReport};

/// `s_1(A) + … + s_k(A)`.
pub fn kyfan(a: &Mat, k: usize) -> Result<f64> {
    check_k(a.n(), k)?;
    Ok(singular_values(a)?[..k].iter().sum())
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::BadIndex { k, n })
    } else {
        Ok(())
    }
}

pub(crate) fn check_pair(a: &Mat, b: &Mat, k: usize) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "operands are {}x{} and {}x{}",
            a.n(),
            a.n(),
            b.n(),
            b.n()
        )));
    }
    if a.field() != b.field() {
        return Err(Error::FieldError(format!(
            "operands are over {} and {}",
            a.field(),
            b.field()
        )));
    }
    check_k(a.n(), k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Structural,
    CircleSearch,
    RealPair,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Search, cross-checked by the structural test whenever `A` has a gap.
    #[default]
    Auto,
    Search,
    Structural,
}

/// Witness for a parallelism decision.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParallelCertificate {
    pub parallel: bool,
    /// Maximizing unit (meaningful when `parallel`).
    pub mu: C64,
    /// Best value of `‖A + μB‖_(k)` found.
    pub achieved: f64,
    /// `‖A‖_(k) + ‖B‖_(k)`.
    pub bound: f64,
    /// `bound − achieved`.
    pub gap: f64,
    pub method: Method,
    /// Certified upper bound on `max_μ ‖A + μB‖_(k)`.
    pub upper: f64,
    pub evaluations: usize,
    /// False when the search budget ran out before the decision was separated
    /// from the threshold.
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural: Option<StructuralReport>,
}

impl ParallelCertificate {
    pub fn threshold(&self, tol: &Tolerances) -> f64 {
        tol.tau_par * (1.0 + self.bound)
    }
}

pub fn parallel(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> Result<ParallelCertificate> {
    parallel_with_mode(a, b, k, tol, Mode::Auto)
}

pub fn parallel_with_mode(
    a: &Mat,
    b: &Mat,
    k: usize,
    tol: &Tolerances,
    mode: Mode,
) -> Result<ParallelCertificate> {
    check_pair(a, b, k)?;
    a.check_finite()?;
    b.check_finite()?;
    let one = C64::new(1.0, 0.0);
    let na = kyfan(a, k)?;
    let nb = kyfan(b, k)?;
    let bound = na + nb;
    let slack = tol.tau_par * (1.0 + bound);

    if a.is_zero() || b.is_zero() {
        let achieved = kyfan(&(a + b), k)?;
        return Ok(ParallelCertificate {
            parallel: true,
            mu: one,
            achieved,
            bound,
            gap: bound - achieved,
            method: match (mode, a.field()) {
                (Mode::Structural, _) => Method::Structural,
                (_, Field::Real) => Method::RealPair,
                (_, Field::Complex) => Method::CircleSearch,
            },
            upper: bound,
            evaluations: 1,
            certified: true,
            structural: None,
        });
    }

    if mode == Mode::Structural {
        let s = structural_test(a, b, k, tol)?;
        return Ok(ParallelCertificate {
            parallel: s.parallel,
            mu: s.mu,
            achieved: s.achieved,
            bound,
            gap: s.gap,
            method: Method::Structural,
            upper: bound,
            evaluations: 1,
            certified: true,
            structural: Some(s),
        });
    }

    let mut cert = match a.field() {
        Field::Real => {
            let plus = kyfan(&(a + b), k)?;
            let minus = kyfan(&(a - b), k)?;
            let (mu, achieved) = if plus >= minus { (one, plus) } else { (-one, minus) };
            ParallelCertificate {
                parallel: bound - achieved <= slack,
                mu,
                achieved,
                bound,
                gap: bound - achieved,
                method: Method::RealPair,
                upper: achieved,
                evaluations: 2,
                certified: true,
                structural: None,
            }
        }
        Field::Complex => {
            let out = search::circle_search(a, b, k, nb, bound - slack)?;
            ParallelCertificate {
                parallel: bound - out.best <= slack,
                mu: C64::from_polar(1.0, out.theta),
                achieved: out.best,
                bound,
                gap: bound - out.best,
                method: Method::CircleSearch,
                upper: out.upper.min(bound),
                evaluations: out.evaluations,
                certified: out.certified,
                structural: None,
            }
        }
    };

    if mode == Mode::Auto {
        let s = singular_values(a)?;
        if has_structural_gap(&s, k, tol) {
            let st = structural_test(a, b, k, tol)?;
            if st.parallel != cert.parallel && (st.gap - cert.gap).abs() > 10.0 * slack {
                return Err(Error::MethodDisagreement(format!(
                    "structural gap {:e} vs search gap {:e} (bound {:e})",
                    st.gap, cert.gap, bound
                )));
            }
            cert.structural = Some(st);
        }
    }
    Ok(cert)
}

/// `‖A + B‖_(k) = ‖A‖_(k) + ‖B‖_(k)` within `τ_par·(1 + bound)`.
pub fn triangle_equality(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> Result<bool> {
    check_pair(a, b, k)?;
    let bound = kyfan(a, k)? + kyfan(b, k)?;
    Ok(kyfan(&(a + b), k)? >= bound - tol.tau_par * (1.0 + bound))
}

/// A constructed parallel pair together with the unit that realizes it.
#[derive(Clone, Debug)]
pub struct SampledPair {
    pub a: Mat,
    pub b: Mat,
    /// `‖A + witness·B‖_(k) = ‖A‖_(k) + ‖B‖_(k)`.
    pub witness: C64,
}

/// `A = U(D ⊕ A₂)V*`, `B = U(μB₁ ⊕ B₂)V*` with `D` descending positive,
/// `s_k − s_{k+1} ≥ 0.1`, `B₁` psd, `s₁(B₂) ≤ λ_min(B₁)` and Haar `U, V`.
pub fn sample_parallel_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    field: Field,
) -> Result<SampledPair> {
    let mu = random::unit_scalar(rng, field);
    sample_with_unit(rng, n, k, field, mu)
}

/// Same construction with `μ = 1`, so the pair satisfies the triangle
/// equality.
pub fn sample_triangle_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    field: Field,
) -> Result<SampledPair> {
    sample_with_unit(rng, n, k, field, C64::new(1.0, 0.0))
}

fn block_with_top<R: Rng + ?Sized>(rng: &mut R, field: Field, m: usize, top: f64) -> Mat {
    if m == 0 {
        return Mat::zeros(field, 0);
    }
    let g = random::gaussian(rng, field, m);
    let s1 = singular_values(&g).expect("gaussian is finite")[0];
    if s1 == 0.0 {
        g
    } else {
        g.scale_real(top / s1)
    }
}

fn sample_with_unit<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    field: Field,
    mu: C64,
) -> Result<SampledPair> {
    check_k(n, k)?;
    let m = n - k;
    let d = random::descending(rng, k, 1.0, 3.0);
    let sk = d[k - 1];
    let top_a = rng.random_range(0.0..=1.0) * (sk - 0.1);
    let a2 = block_with_top(rng, field, m, top_a);

    let eigs = random::descending(rng, k, 0.5, 2.0);
    let b1 = random::psd_with_eigs(rng, field, &eigs);
    let top_b = rng.random_range(0.0..=1.0) * eigs[k - 1];
    let b2 = block_with_top(rng, field, m, top_b);

    let u = random::haar(rng, field, n);
    let v = random::haar(rng, field, n);
    let a_inner = Mat::direct_sum(&Mat::diag(field, &d), &a2);
    let b_inner = Mat::direct_sum(&b1.scale(mu), &b2);
    let a = &(&u * &a_inner) * &v.adjoint();
    let b = &(&u * &b_inner) * &v.adjoint();

    let witness = mu.conj();
    let tol = Tolerances::default();
    let bound = kyfan(&a, k)? + kyfan(&b, k)?;
    let achieved = kyfan(&(&a + &b.scale(witness)), k)?;
    assert!(
        achieved >= bound - tol.tau_par * (1.0 + bound),
        "constructed pair is not parallel: {achieved} < {bound}"
    );
    Ok(SampledPair { a, b, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn norm_examples() {
        for n in 1..5 {
            for k in 1..=n {
                let v = kyfan(&Mat::identity(Field::Complex, n), k).unwrap();
                assert!((v - k as f64).abs() < 1e-14);
            }
        }
        let d = Mat::diag(Field::Real, &[3.0, 2.0, 1.0]);
        assert!((kyfan(&d, 2).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(kyfan(&d, 0), Err(Error::BadIndex { k: 0, n: 3 }));
        assert_eq!(kyfan(&d, 4), Err(Error::BadIndex { k: 4, n: 3 }));
    }

    #[test]
    fn aligned_diagonal_pair() {
        let a = Mat::diag(Field::Complex, &[3.0, 2.0, 1.0]);
        let b = Mat::diag(Field::Complex, &[1.0, 1.0, 0.0]);
        let c = parallel(&a, &b, 2, &tol()).unwrap();
        assert!(c.parallel);
        assert!((c.mu - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((c.achieved - 7.0).abs() < 1e-12);
        assert!(c.structural.unwrap().parallel);
    }

    #[test]
    fn k_dependence() {
        for field in [Field::Real, Field::Complex] {
            let a = Mat::unit(field, 2, 0, 0);
            let b = Mat::unit(field, 2, 1, 1);
            let c1 = parallel(&a, &b, 1, &tol()).unwrap();
            assert!(!c1.parallel);
            assert!((c1.achieved - 1.0).abs() < 1e-12);
            let c2 = parallel(&a, &b, 2, &tol()).unwrap();
            assert!(c2.parallel);
            assert!((c2.achieved - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_alignment_of_rank_ones() {
        let a = Mat::unit(Field::Complex, 2, 0, 0);
        let b = a.scale(C64::new(0.0, 2.0));
        let c = parallel(&a, &b, 1, &tol()).unwrap();
        assert!(c.parallel);
        assert!((c.mu - C64::new(0.0, -1.0)).norm() < 1e-6);
        assert!((c.achieved - 3.0).abs() < 1e-9);
        assert!(!triangle_equality(&a, &a.scale(C64::new(0.0, 1.0)), 1, &tol()).unwrap());
    }

    #[test]
    fn triangle_examples() {
        let p = Mat::diag(Field::Real, &[2.0, 1.0, 0.0]);
        let q = Mat::diag(Field::Real, &[1.0, 1.0, 0.0]);
        assert!(triangle_equality(&p, &q, 2, &tol()).unwrap());
        let e = Mat::unit(Field::Real, 2, 0, 0);
        assert!(!triangle_equality(&e, &e.scale_real(-1.0), 1, &tol()).unwrap());
    }

    #[test]
    fn zero_operand_is_parallel() {
        let a = Mat::diag(Field::Complex, &[1.0, 2.0]);
        let z = Mat::zeros(Field::Complex, 2);
        let c = parallel(&a, &z, 1, &tol()).unwrap();
        assert!(c.parallel && c.mu == C64::new(1.0, 0.0));
    }

    #[test]
    fn mismatches_are_errors() {
        let a = Mat::identity(Field::Complex, 2);
        let b = Mat::identity(Field::Complex, 3);
        assert!(matches!(parallel(&a, &b, 1, &tol()), Err(Error::DimensionMismatch(_))));
        let r = Mat::identity(Field::Real, 2);
        assert!(matches!(parallel(&a, &r, 1, &tol()), Err(Error::FieldError(_))));
    }

    #[test]
    fn structural_mode_needs_a_gap() {
        let a = Mat::identity(Field::Complex, 3);
        let b = Mat::diag(Field::Complex, &[1.0, 0.0, 0.0]);
        assert_eq!(
            parallel_with_mode(&a, &b, 2, &tol(), Mode::Structural).unwrap_err(),
            Error::DegenerateGap { k: 2 }
        );
    }

    #[test]
    fn sampled_pairs_are_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_parallel_pair(&mut rng, 3, 2, Field::Complex).unwrap();
        let c = parallel(&p.a, &p.b, 2, &tol()).unwrap();
        assert!(c.parallel && c.gap <= 1e-8 * (1.0 + c.bound));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = sample_parallel_pair(&mut rng, 4, 2, Field::Real).unwrap();
        assert!(p.witness == C64::new(1.0, 0.0) || p.witness == C64::new(-1.0, 0.0));
        assert!(parallel(&p.a, &p.b, 2, &tol()).unwrap().parallel);

        let p = sample_parallel_pair(&mut rng, 2, 2, Field::Complex).unwrap();
        assert!(parallel(&p.a, &p.b, 2, &tol()).unwrap().parallel);
    }

    #[test]
    fn triangle_pairs_satisfy_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = sample_triangle_pair(&mut rng, 4, 2, Field::Complex).unwrap();
            assert!(triangle_equality(&p.a, &p.b, 2, &tol()).unwrap());
        }
    }
}
