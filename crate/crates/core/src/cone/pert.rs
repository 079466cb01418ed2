use rand::Rng;
use serde::Serialize;

use crate::numerics::{hermitian_eigen, is_psd, singular_values, svd, Field, Mat, Tolerances, C64};
use crate::span::real_span_rank;
use crate::{Error, Result};

use super::{cone_classify, in_cone, sample_boundary, BlockPair, ConeStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PertKind {
    RankOnePsd,
    ScaledUnitaryTail,
    Generic,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PertClass {
    pub kind: PertKind,
    /// Scale `a` of `a(I_k ⊕ P)` for the unitary-tail kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Empirical span dimension of `Pert(X)`, when it was estimated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_estimate: Option<usize>,
}

fn require_boundary(x: &Mat, n: usize, k: usize, tol: &Tolerances) -> Result<()> {
    if cone_classify(x, n, k, tol)?.status == ConeStatus::Boundary {
        Ok(())
    } else {
        Err(Error::NotBoundary)
    }
}

/// Classifies a boundary point by the two analytic forms whose `Pert` set
/// is one-dimensional: rank-one psd, and `a(I_k ⊕ P)` with `P` unitary.
pub fn pert_classify(x: &Mat, n: usize, k: usize, tol: &Tolerances) -> Result<PertClass> {
    require_boundary(x, n, k, tol)?;
    let s = singular_values(x)?;
    let eps = tol.tau_rank * (1.0 + s[0]);
    if s.iter().filter(|&&v| v > eps).count() == 1 && is_psd(x, tol)? {
        return Ok(PertClass {
            kind: PertKind::RankOnePsd,
            scale: None,
            dim_estimate: None,
        });
    }

    let (bp, _) = BlockPair::split(x, k);
    let a = bp.x1.trace().re / k as f64;
    if a > eps {
        let scalar = Mat::identity(x.field(), k).scale_real(a);
        let first_ok = bp.x1.dist_max(&scalar) <= tol.tau_rank * (1.0 + a);
        let m = n - k;
        let gram = &bp.x2.adjoint() * &bp.x2;
        let second_ok = gram.dist_max(&Mat::identity(x.field(), m).scale_real(a * a))
            <= tol.tau_rank * (1.0 + a * a);
        if first_ok && second_ok {
            return Ok(PertClass {
                kind: PertKind::ScaledUnitaryTail,
                scale: Some(a),
                dim_estimate: None,
            });
        }
    }
    Ok(PertClass {
        kind: PertKind::Generic,
        scale: None,
        dim_estimate: None,
    })
}

/// `X = φ(D)` with `D` diagonal and `φ(Y) = (W₁ ⊕ U₂) Y (W₁ ⊕ V₂)*`, where
/// `X₁ = W₁ D₁ W₁*` and `X₂ = U₂ Σ V₂*`. The map `φ` carries `𝒞` onto itself.
#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    pub left: Mat,
    pub right: Mat,
    /// Eigenvalues of `X₁` (descending) followed by singular values of `X₂`.
    pub d: Vec<f64>,
}

impl CanonicalFrame {
    pub fn apply(&self, y: &Mat) -> Mat {
        &(&self.left * y) * &self.right.adjoint()
    }
}

pub fn canonical_frame(x: &Mat, k: usize) -> Result<CanonicalFrame> {
    let (bp, _) = BlockPair::split(x, k);
    let eig = hermitian_eigen(&bp.x1)?;
    let mut d = eig.values.clone();
    let (left, right) = if bp.x2.n() == 0 {
        (eig.vectors.clone(), eig.vectors)
    } else {
        let t = svd(&bp.x2)?;
        d.extend_from_slice(&t.s);
        (Mat::direct_sum(&eig.vectors, &t.u), Mat::direct_sum(&eig.vectors, &t.v))
    };
    Ok(CanonicalFrame { left, right, d })
}

const STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Structured and random candidate directions in canonical coordinates.
fn candidates<R: Rng + ?Sized>(
    rng: &mut R,
    field: Field,
    k: usize,
    d: &[f64],
    samples: usize,
) -> Vec<Mat> {
    let n = d.len();
    let s1 = d.iter().copied().fold(0.0, f64::max);
    let sk = d[k - 1];
    let dm = Mat::diag(field, d);
    let unit = |i, j| Mat::unit(field, n, i, j);
    let i_unit = C64::new(0.0, 1.0);

    let global = [(s1 - sk) / 2.0, 0.5 * s1, 0.1 * s1];
    let usable = |delta: f64| delta.abs() >= 1e-2 * s1;

    let mut dirs: Vec<(Mat, Vec<f64>)> = Vec::new();
    for (i, &di) in d.iter().enumerate().take(n) {
        let own = if i < k { (di - sk) / 2.0 } else { (sk - di) / 2.0 };
        let mut deltas = global.to_vec();
        deltas.push(own);
        dirs.push((unit(i, i), deltas));
    }
    for i in 0..k {
        for j in i + 1..k {
            let sym = &unit(i, j) + &unit(j, i);
            dirs.push((sym, global.to_vec()));
            if field == Field::Complex {
                let skew = (&unit(i, j) - &unit(j, i)).scale(i_unit);
                dirs.push((skew, global.to_vec()));
            }
        }
    }
    for i in k..n {
        for j in k..n {
            if i != j {
                dirs.push((unit(i, j), global.to_vec()));
                if field == Field::Complex {
                    dirs.push((unit(i, j).scale(i_unit), global.to_vec()));
                }
            }
        }
    }

    let mut out = vec![dm.clone()];
    for (s, deltas) in dirs {
        for delta in deltas {
            for sign in [1.0, -1.0] {
                if usable(delta) {
                    out.push(&dm + &s.scale_real(sign * delta));
                }
            }
        }
        out.push(s);
    }
    let dn = dm.frobenius();
    for _ in 0..samples {
        let y = sample_boundary(rng, field, n, k);
        let step = 0.1 * dn / y.frobenius();
        out.push(&dm + &y.scale_real(step));
        out.push(y);
    }
    out
}

/// ℝ-span rank of the accepted directions `Z ∈ ∂𝒞` with `X ± tZ ∈ 𝒞` for
/// every `t` in `{10⁻², 10⁻³, 10⁻⁴}`.
pub fn pert_empirical_dim<R: Rng + ?Sized>(
    x: &Mat,
    n: usize,
    k: usize,
    rng: &mut R,
    samples: usize,
    tol: &Tolerances,
) -> Result<usize> {
    require_boundary(x, n, k, tol)?;
    let frame = canonical_frame(x, k)?;
    let xn = x.frobenius();
    let mut accepted = Vec::new();
    for zc in candidates(rng, x.field(), k, &frame.d, samples) {
        let zn = zc.frobenius();
        if zn == 0.0 {
            continue;
        }
        let z = frame.apply(&zc).scale_real(xn / zn);
        if cone_classify(&z, n, k, tol)?.status != ConeStatus::Boundary {
            continue;
        }
        let mut ok = true;
        'steps: for t in STEPS {
            for sign in [1.0, -1.0] {
                if !in_cone(&(x + &z.scale_real(sign * t)), n, k, tol)? {
                    ok = false;
                    break 'steps;
                }
            }
        }
        if ok {
            accepted.push(z);
        }
    }
    Ok(real_span_rank(&accepted, tol.tau_rank))
}
