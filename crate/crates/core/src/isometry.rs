//! Isometry forms `X ↦ γUXV`, `X ↦ γUXᵗV` and the exceptional real 4×4,
//! k = 2 maps built from the involution [`l_map`].

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{random, Field, Mat, Tolerances, C64};
use crate::{Error, Result};

/// The six fixed orthogonal matrices defining `𝕃`.
#[derive(Debug)]
pub struct LGenerators {
    pub b: [Mat; 3],
    pub c: [Mat; 3],
}

fn kron2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Mat {
    Mat::from_fn(Field::Real, 4, |i, j| {
        C64::new(a[i / 2][j / 2] * b[i % 2][j % 2], 0.0)
    })
}

/// The generators, built once and checked to be orthogonal and to square to
/// `±I`.
pub fn l_generators() -> &'static LGenerators {
    static GEN: OnceLock<LGenerators> = OnceLock::new();
    GEN.get_or_init(|| {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let j = [[0.0, -1.0], [1.0, 0.0]];
        let neg_j = [[0.0, 1.0], [-1.0, 0.0]];
        let z = [[1.0, 0.0], [0.0, -1.0]];
        let neg_z = [[-1.0, 0.0], [0.0, 1.0]];
        let swap = [[0.0, 1.0], [1.0, 0.0]];
        let g = LGenerators {
            b: [kron2(id, j), kron2(neg_j, neg_z), kron2(j, swap)],
            c: [kron2(z, neg_j), kron2(neg_j, id), kron2(swap, neg_j)],
        };
        let i4 = Mat::identity(Field::Real, 4);
        for m in g.b.iter().chain(&g.c) {
            assert_eq!(&m.transpose() * m, i4, "generator is not orthogonal");
            let sq = m * m;
            assert!(sq == i4 || sq == -&i4, "generator does not square to ±I");
        }
        g
    })
}

fn check_real4(x: &Mat) -> Result<()> {
    if x.n() != 4 {
        return Err(Error::ShapeError(format!("expected 4x4, got {}x{}", x.n(), x.n())));
    }
    if x.field() != Field::Real {
        return Err(Error::FieldError("the exceptional maps act on real matrices".into()));
    }
    Ok(())
}

/// `𝕃(X) = ½(X + B₁XC₁ + B₂XC₂ + B₃XC₃)`.
pub fn l_map(x: &Mat) -> Result<Mat> {
    check_real4(x)?;
    let g = l_generators();
    let mut acc = x.clone();
    for (b, c) in g.b.iter().zip(&g.c) {
        acc = &acc + &(&(b * x) * c);
    }
    Ok(acc.scale_real(0.5))
}

pub fn flip_last() -> Mat {
    Mat::diag(Field::Real, &[1.0, 1.0, 1.0, -1.0])
}

pub fn flip_tail() -> Mat {
    Mat::diag(Field::Real, &[1.0, -1.0, -1.0, -1.0])
}

/// `𝐋(X) = diag(1, 1, 1, −1)·𝕃(X)`.
pub fn l_bold(x: &Mat) -> Result<Mat> {
    Ok(&flip_last() * &l_map(x)?)
}

/// `X ↦ −E𝕃(EX)` with `E = diag(1, −1, −1, −1)`.
pub fn l_econj(x: &Mat) -> Result<Mat> {
    let e = flip_tail();
    Ok(-&(&e * &l_map(&(&e * x))?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exceptional {
    NoL,
    /// `X ↦ P𝕃(Y)`.
    L,
    /// `X ↦ P𝐋(Y)`.
    LPrime,
    /// `X ↦ −PE𝕃(EY)`.
    EConj,
}

/// `X ↦ γ·Φ(U X⁺ V)` where `X⁺` is `X` or `Xᵗ`, and `Φ` is the identity or
/// one of the exceptional maps followed by `P`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryForm {
    pub gamma: f64,
    #[serde(rename = "U")]
    pub u: Mat,
    #[serde(rename = "V")]
    pub v: Mat,
    pub transpose: bool,
    pub exceptional: Exceptional,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Mat>,
    pub field: Field,
    pub n: usize,
    pub k: usize,
}

fn unitary_residual(m: &Mat) -> f64 {
    (&m.adjoint() * m).dist_max(&Mat::identity(m.field(), m.n()))
}

impl IsometryForm {
    pub fn standard(gamma: f64, u: Mat, v: Mat, transpose: bool, k: usize) -> Result<Self> {
        let (field, n) = (u.field(), u.n());
        let f = Self {
            gamma,
            u,
            v,
            transpose,
            exceptional: Exceptional::NoL,
            p: None,
            field,
            n,
            k,
        };
        f.validate(&Tolerances::default())?;
        Ok(f)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        crate::kyfan::check_k(self.n, self.k)?;
        for m in [Some(&self.u), Some(&self.v), self.p.as_ref()].into_iter().flatten() {
            if m.n() != self.n {
                return Err(Error::ShapeError(format!("factor is {}x{}, form has n={}", m.n(), m.n(), self.n)));
            }
            if m.field() != self.field {
                return Err(Error::FieldError("factor field differs from the form".into()));
            }
            if unitary_residual(m) > tol.tau_orth {
                return Err(Error::Config("factor is not unitary".into()));
            }
        }
        if self.exceptional != Exceptional::NoL && !(self.field == Field::Real && self.n == 4 && self.k == 2) {
            return Err(Error::FieldError("exceptional forms exist only for real 4x4 matrices with k=2".into()));
        }
        Ok(())
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        apply_form(self, x)
    }

    /// `n² × n²` matrix acting on column-major `vec(X)`.
    pub fn matrix(&self) -> Result<Mat> {
        let n = self.n;
        let mut t = DMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let img = self.apply(&Mat::unit(self.field, n, i, j))?;
                t.set_column(i + j * n, &img.vec_col_major());
            }
        }
        Mat::new(self.field, t)
    }
}

pub fn apply_form(f: &IsometryForm, x: &Mat) -> Result<Mat> {
    if x.n() != f.n {
        return Err(Error::ShapeError(format!("expected {}x{}, got {}x{}", f.n, f.n, x.n(), x.n())));
    }
    if x.field() != f.field {
        return Err(Error::FieldError(format!("form acts on {} matrices, got {}", f.field, x.field())));
    }
    let xt = if f.transpose { x.transpose() } else { x.clone() };
    let y = &(&f.u * &xt) * &f.v;
    let z = match f.exceptional {
        Exceptional::NoL => y,
        Exceptional::L => l_map(&y)?,
        Exceptional::LPrime => l_bold(&y)?,
        Exceptional::EConj => l_econj(&y)?,
    };
    let z = match &f.p {
        Some(p) if f.exceptional != Exceptional::NoL => p * &z,
        _ => z,
    };
    Ok(z.scale_real(f.gamma))
}

/// Random form: fair transpose flag, Haar `U`, `V`, log-uniform `γ ∈ [0.1, 10]`.
/// With `allow_exceptional` at (ℝ, 4, 2) the tag is uniform over all four
/// and `P` is Haar orthogonal.
pub fn random_isometry<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    field: Field,
    allow_exceptional: bool,
) -> Result<IsometryForm> {
    crate::kyfan::check_k(n, k)?;
    let transpose = rng.random_bool(0.5);
    let u = random::haar(rng, field, n);
    let v = random::haar(rng, field, n);
    let gamma = random::log_uniform(rng, 0.1, 10.0);
    let exceptional = if allow_exceptional && field == Field::Real && n == 4 && k == 2 {
        [Exceptional::NoL, Exceptional::L, Exceptional::LPrime, Exceptional::EConj][rng.random_range(0..4)]
    } else {
        Exceptional::NoL
    };
    let p = (exceptional != Exceptional::NoL).then(|| random::haar(rng, field, n));
    Ok(IsometryForm {
        gamma,
        u,
        v,
        transpose,
        exceptional,
        p,
        field,
        n,
        k,
    })
}

/// `Some((c, M/c))` when `M*M = c²I` within `τ_rank·(1 + c²)`, with `c²` the
/// mean diagonal of `M*M`.
pub fn is_multiple_of_unitary(m: &Mat, tol: &Tolerances) -> Option<(f64, Mat)> {
    let n = m.n();
    if n == 0 || !m.is_finite() {
        return None;
    }
    let g = &m.adjoint() * m;
    let c2 = g.trace().re / n as f64;
    if c2 <= 0.0 {
        return None;
    }
    let dev = g.dist_max(&Mat::identity(m.field(), n).scale_real(c2));
    if dev > tol.tau_rank * (1.0 + c2) {
        return None;
    }
    let c = c2.sqrt();
    Some((c, m.scale_real(1.0 / c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kyfan::kyfan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_load() {
        let g = l_generators();
        assert_eq!(g.b.len(), 3);
    }

    #[test]
    fn l_is_an_involution_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = random::gaussian(&mut rng, Field::Real, 4);
            let lx = l_map(&x).unwrap();
            assert!(l_map(&lx).unwrap().dist_max(&x) < 1e-12);
            assert!((kyfan(&lx, 2).unwrap() - kyfan(&x, 2).unwrap()).abs() < 1e-10);
            let bx = l_bold(&x).unwrap();
            assert!((kyfan(&bx, 2).unwrap() - kyfan(&x, 2).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn l_of_two_e11_is_identity() {
        let x = Mat::unit(Field::Real, 4, 0, 0).scale_real(2.0);
        assert!(l_map(&x).unwrap().dist_max(&Mat::identity(Field::Real, 4)) < 1e-15);
    }

    #[test]
    fn l_rejects_wrong_shapes() {
        assert!(matches!(l_map(&Mat::identity(Field::Real, 3)), Err(Error::ShapeError(_))));
        assert!(matches!(l_map(&Mat::identity(Field::Complex, 4)), Err(Error::FieldError(_))));
    }

    #[test]
    fn identity_form_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = IsometryForm::standard(1.0, Mat::identity(Field::Complex, 3), Mat::identity(Field::Complex, 3), false, 2).unwrap();
        let x = random::gaussian(&mut rng, Field::Complex, 3);
        assert_eq!(f.apply(&x).unwrap(), x);

        let u = random::haar(&mut rng, Field::Real, 4);
        let v = random::haar(&mut rng, Field::Real, 4);
        let f = IsometryForm::standard(2.0, u, v, false, 2).unwrap();
        let x = random::gaussian(&mut rng, Field::Real, 4);
        let lhs = kyfan(&f.apply(&x).unwrap(), 2).unwrap();
        assert!((lhs - 2.0 * kyfan(&x, 2).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn exceptional_tag_needs_real_4_2() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = random_isometry(&mut rng, 3, 2, Field::Complex, true).unwrap();
        assert_eq!(f.exceptional, Exceptional::NoL);
        f.exceptional = Exceptional::L;
        assert!(matches!(f.validate(&Tolerances::default()), Err(Error::FieldError(_))));
    }

    #[test]
    fn form_matrix_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..8 {
            let f = random_isometry(&mut rng, 4, 2, Field::Real, true).unwrap();
            assert!(f.gamma > 0.0);
            let t = f.matrix().unwrap();
            let x = random::gaussian(&mut rng, Field::Real, 4);
            let via = Mat::from_vec_col_major(Field::Real, 4, &(t.data() * x.vec_col_major()));
            assert!(via.dist_max(&f.apply(&x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn unitary_multiples() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random::haar(&mut rng, Field::Complex, 3);
        let (c, back) = is_multiple_of_unitary(&q.scale_real(3.0), &tol).unwrap();
        assert!((c - 3.0).abs() < 1e-12 && back.dist_max(&q) < 1e-12);
        assert!(is_multiple_of_unitary(&Mat::diag(Field::Real, &[1.0, 2.0]), &tol).is_none());
        let mut m = Mat::identity(Field::Real, 2).scale_real(2.0).into_data();
        m[(0, 1)].re += 1e-12;
        let (c, q) = is_multiple_of_unitary(&Mat::new(Field::Real, m).unwrap(), &tol).unwrap();
        assert!((c - 2.0).abs() < 1e-10 && q.dist_max(&Mat::identity(Field::Real, 2)) < 1e-10);
    }
}
