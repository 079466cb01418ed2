use nalgebra::{DMatrix, DVector};

use crate::isometry::{flip_last, is_multiple_of_unitary, Exceptional, IsometryForm};
use crate::numerics::{svd, Field, Mat, Tolerances, C64};

use super::{Branch, MatrixLinearMap};

pub(super) struct Found {
    pub form: IsometryForm,
}

/// Nearest unitary to `m` (polar factor).
fn polish(m: &Mat) -> Option<Mat> {
    let t = svd(m).ok()?;
    Some(&t.u * &t.v.adjoint())
}

/// `(M, N)` with `S(E_ij) = g(i, j)` equal to `m_i n_jᵀ`, gauge `‖m₁‖ = 1`.
fn factor(field: Field, n: usize, g: impl Fn(usize, usize) -> Mat) -> Option<(Mat, Mat)> {
    let t = svd(&g(0, 0)).ok()?;
    let sigma = t.s[0];
    if sigma <= f64::EPSILON * n as f64 {
        return None;
    }
    let m1: DVector<C64> = t.u.data().column(0).into_owned();
    let n1: DVector<C64> = t.v.data().column(0).map(|z| z.conj()) * C64::new(sigma, 0.0);
    let n1_conj = n1.map(|z| z.conj());
    let norm2 = n1.norm_squared();

    let mut mm = DMatrix::zeros(n, n);
    let mut nn = DMatrix::zeros(n, n);
    for i in 0..n {
        let col = g(i, 0).data() * &n1_conj / C64::new(norm2, 0.0);
        mm.set_column(i, &col);
    }
    let m1_adj = m1.adjoint();
    for j in 0..n {
        let row = &m1_adj * g(0, j).data();
        nn.set_row(j, &row);
    }
    Some((Mat::new(field, mm).ok()?, Mat::new(field, nn).ok()?))
}

/// Recovers `S = γU X⁺ V` for a map `S` that preserves rank one.
pub(super) fn recover_form(s: &MatrixLinearMap, k: usize, tol: &Tolerances) -> Option<Found> {
    let (field, n) = (s.field(), s.n());
    let img = |i: usize, j: usize| -> Mat {
        let v = s.matrix().data().column(i + j * n).into_owned();
        Mat::from_vec_col_major(field, n, &v)
    };
    let scale = s.matrix().max_abs();
    let mut best: Option<(f64, IsometryForm)> = None;
    for transpose in [false, true] {
        let pair = if transpose { factor(field, n, |i, j| img(j, i)) } else { factor(field, n, img) };
        let Some((m, nmat)) = pair else { continue };
        let (Some((cm, um)), Some((cn, vn))) = (is_multiple_of_unitary(&m, tol), is_multiple_of_unitary(&nmat, tol))
        else {
            continue;
        };
        let (Some(u), Some(v)) = (polish(&um), polish(&vn)) else { continue };
        let form = IsometryForm {
            gamma: cm * cn,
            u,
            v,
            transpose,
            exceptional: Exceptional::NoL,
            p: None,
            field,
            n,
            k,
        };
        let Ok(fm) = form.matrix() else { continue };
        let r = fm.dist_max(s.matrix());
        if r <= tol.tau_rank * (1.0 + scale) && best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, form));
        }
    }
    best.map(|(_, form)| Found { form })
}

/// Given `Φ ∘ T = S`, rewrites the form of `S` as a form of `T`.
pub(super) fn undo_branch(mut form: IsometryForm, branch: Branch) -> IsometryForm {
    match branch {
        Branch::Identity => {}
        Branch::L => form.exceptional = Exceptional::L,
        // 𝐋⁻¹(Y) = 𝕃(DY)
        Branch::LBold => {
            form.exceptional = Exceptional::L;
            form.u = &flip_last() * &form.u;
        }
        // E𝕃(E·) is its own inverse and equals −l_econj
        Branch::LConj => {
            form.exceptional = Exceptional::EConj;
            form.u = -&form.u;
        }
    }
    form
}
