//! `Span P(A)`, the linear span of all matrices parallel to `A`.

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::kyfan::check_k;
use crate::numerics::{numerical_rank, random, svd, Field, Mat, SvdTriple, Tolerances, C64};
use crate::{Error, Result};

/// Tie structure of the singular values around `s_k`.
///
/// `p` counts singular values strictly above the tie group of `s_k` and `q`
/// counts those at or above it, so the group occupies indices `p+1..=q`
/// (one-based). Ties are decided within `τ_rank·(1 + s₁)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralProfile {
    pub s: Vec<f64>,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub gap_at_k: bool,
}

impl SpectralProfile {
    pub fn new(s: Vec<f64>, k: usize, tol: &Tolerances) -> Result<Self> {
        check_k(s.len(), k)?;
        let eps = tol.tau_rank * (1.0 + s[0]);
        let sk = s[k - 1];
        let p = s.iter().filter(|&&x| x - sk > eps).count();
        let q = s.iter().filter(|&&x| x >= sk - eps).count();
        Ok(Self {
            gap_at_k: q == k,
            s,
            k,
            p,
            q,
        })
    }

    pub fn of(a: &Mat, k: usize, tol: &Tolerances) -> Result<Self> {
        Self::new(crate::numerics::singular_values(a)?, k, tol)
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// `s_n ≤ τ_rank·(1 + s₁)`.
    pub fn singular(&self, tol: &Tolerances) -> bool {
        self.s[self.n() - 1] <= tol.tau_rank * (1.0 + self.s[0])
    }
}

/// `dim Span P(A)` when `A` has a gap at `k`: `k² + (n−k)²` over ℂ and
/// `k(k+1)/2 + (n−k)²` over ℝ.
pub fn analytic_dim(field: Field, n: usize, k: usize) -> usize {
    let m = n - k;
    match field {
        Field::Complex => k * k + m * m,
        Field::Real => k * (k + 1) / 2 + m * m,
    }
}

/// Lower bound on `dim Span P(A)` with a tie group ending at `q`:
/// `k² + 2k(q−k) + (n−k)²` over ℂ, `k(k+1)/2 + k(q−k) + (n−k)²` over ℝ.
pub fn lower_bound_dim(field: Field, n: usize, k: usize, q: usize) -> usize {
    let m = n - k;
    match field {
        Field::Complex => k * k + 2 * k * (q - k) + m * m,
        Field::Real => k * (k + 1) / 2 + k * (q - k) + m * m,
    }
}

#[derive(Clone, Debug)]
pub struct SpanBasis {
    pub elements: Vec<Mat>,
    pub frame: SvdTriple,
}

/// Basis of `U(𝕄_k ⊕ 𝕄_{n−k})V*` (ℂ) or `U(𝕊_k ⊕ 𝕄_{n−k})V*` (ℝ).
pub fn span_basis(a: &Mat, k: usize, tol: &Tolerances) -> Result<SpanBasis> {
    let frame = svd(a)?;
    let profile = SpectralProfile::new(frame.s.clone(), k, tol)?;
    if !profile.gap_at_k {
        return Err(Error::DegenerateGap { k });
    }
    let (n, field) = (a.n(), a.field());
    let vh = frame.v.adjoint();
    let wrap = |inner: Mat| &(&frame.u * &inner) * &vh;
    let mut elements = Vec::with_capacity(analytic_dim(field, n, k));
    for i in 0..k {
        for j in 0..k {
            let inner = match field {
                Field::Complex => Mat::unit(field, n, i, j),
                Field::Real if i == j => Mat::unit(field, n, i, i),
                Field::Real if i < j => &Mat::unit(field, n, i, j) + &Mat::unit(field, n, j, i),
                Field::Real => continue,
            };
            elements.push(wrap(inner));
        }
    }
    for i in k..n {
        for j in k..n {
            elements.push(wrap(Mat::unit(field, n, i, j)));
        }
    }
    Ok(SpanBasis { elements, frame })
}

/// Which constructive recipe produced a member of `P(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Recipe {
    Block,
    Conjugated,
    TwoSided,
}

fn embed(field: Field, n: usize, offset: usize, inner: &Mat) -> Mat {
    let lead = Mat::identity(field, offset);
    let tail = Mat::identity(field, n - offset - inner.n());
    Mat::direct_sum(&Mat::direct_sum(&lead, inner), &tail)
}

/// `μB₁ ⊕ B₂` with `B₁` psd and `s₁(B₂) ≤ λ_min(B₁)`.
fn random_core<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, k: usize) -> Mat {
    let eigs = random::descending(rng, k, 0.2, 2.0);
    let b1 = random::psd_with_eigs(rng, field, &eigs).scale(random::unit_scalar(rng, field));
    let m = n - k;
    if m == 0 {
        return b1;
    }
    let g = random::gaussian(rng, field, m);
    let s1 = crate::numerics::singular_values(&g).expect("finite")[0];
    let top = rng.random_range(0.0..=1.0) * eigs[k - 1];
    Mat::direct_sum(&b1, &g.scale_real(top / s1.max(f64::MIN_POSITIVE)))
}

/// One random member of `P(A)` built in `A`'s SVD frame.
///
/// The recipe is drawn uniformly among those valid for the profile: the
/// block form always, the tie-group conjugation when the group is
/// nontrivial, and the two-sided form when the group reaches `s_n = 0`.
pub fn sample_member<R: Rng + ?Sized>(
    rng: &mut R,
    frame: &SvdTriple,
    profile: &SpectralProfile,
    tol: &Tolerances,
) -> (Mat, Recipe) {
    let field = frame.u.field();
    let (n, k, p, q) = (profile.n(), profile.k, profile.p, profile.q);
    let mut recipes = vec![Recipe::Block];
    if !profile.gap_at_k {
        recipes.push(Recipe::Conjugated);
        if q == n && profile.singular(tol) {
            recipes.push(Recipe::TwoSided);
        }
    }
    let recipe = recipes[rng.random_range(0..recipes.len())];
    let core = random_core(rng, field, n, k);
    let inner = match recipe {
        Recipe::Block => core,
        Recipe::Conjugated => {
            let w = embed(field, n, p, &random::haar(rng, field, q - p));
            &(&w * &core) * &w.adjoint()
        }
        Recipe::TwoSided => {
            let w2 = embed(field, n, p, &random::haar(rng, field, n - p));
            let w3 = embed(field, n, p, &random::haar(rng, field, n - p));
            &(&w2 * &core) * &w3
        }
    };
    (&(&frame.u * &inner) * &frame.v.adjoint(), recipe)
}

/// Numerical rank of sampled members of `P(A)`, over the field of `A`.
pub fn empirical_span_dim<R: Rng + ?Sized>(
    a: &Mat,
    k: usize,
    rng: &mut R,
    samples: usize,
    tol: &Tolerances,
) -> Result<usize> {
    let n = a.n();
    check_k(n, k)?;
    if samples < 3 * n * n {
        return Err(Error::Config(format!(
            "need at least 3n² = {} samples, got {samples}",
            3 * n * n
        )));
    }
    let frame = svd(a)?;
    let profile = SpectralProfile::new(frame.s.clone(), k, tol)?;
    let members: Vec<Mat> = (0..samples)
        .map(|_| sample_member(rng, &frame, &profile, tol).0)
        .collect();
    Ok(field_rank(a.field(), &members, tol.tau_rank))
}

/// Rank of a family of matrices as vectors over their own field.
pub fn field_rank(field: Field, mats: &[Mat], rel_tol: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let len = mats[0].n() * mats[0].n();
    match field {
        Field::Complex => {
            let m = DMatrix::from_fn(mats.len(), len, |r, c| mats[r].data()[c]);
            numerical_rank(&m, rel_tol)
        }
        Field::Real => {
            let m = DMatrix::from_fn(mats.len(), len, |r, c| mats[r].data()[c].re);
            numerical_rank(&m, rel_tol)
        }
    }
}

/// Rank of a family over ℝ, using interleaved real coordinates for complex
/// entries.
pub fn real_span_rank(mats: &[Mat], rel_tol: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<f64>> = mats.iter().map(Mat::real_coords).collect();
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    numerical_rank(&m, rel_tol)
}

/// Least-squares residual of `v` against the column span of `cols`.
fn residual<T>(cols: &DMatrix<T>, v: &DVector<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    let dec = cols.clone().svd(true, true);
    let x = dec.solve(v, 1e-12).expect("U and V were computed");
    (cols * x - v).norm()
}

fn max_residual(field: Field, basis: &[Mat], probes: &[Mat]) -> f64 {
    let len = basis[0].n() * basis[0].n();
    match field {
        Field::Complex => {
            let cols = DMatrix::from_fn(len, basis.len(), |r, c| basis[c].data()[r]);
            probes
                .iter()
                .map(|p| residual(&cols, &p.vec_col_major()) / p.frobenius().max(1e-300))
                .fold(0.0, f64::max)
        }
        Field::Real => {
            let cols = DMatrix::from_fn(len, basis.len(), |r, c| basis[c].data()[r].re);
            probes
                .iter()
                .map(|p| {
                    let v = p.vec_col_major().map(|z| z.re);
                    residual(&cols, &v) / p.frobenius().max(1e-300)
                })
                .fold(0.0, f64::max)
        }
    }
}

/// Result of comparing two spans.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpanComparison {
    pub equal: bool,
    /// Worst relative residual of one basis against the other span.
    pub residual: f64,
}

/// `Span P(A) = Span P(B)`, decided by mutual least-squares membership of
/// the two bases. Both matrices need a gap at `k`.
pub fn spans_equal(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> Result<SpanComparison> {
    crate::kyfan::check_pair(a, b, k)?;
    let ba = span_basis(a, k, tol)?;
    let bb = span_basis(b, k, tol)?;
    if ba.elements.len() != bb.elements.len() {
        return Ok(SpanComparison {
            equal: false,
            residual: f64::INFINITY,
        });
    }
    let field = a.field();
    let r = max_residual(field, &bb.elements, &ba.elements)
        .max(max_residual(field, &ba.elements, &bb.elements));
    Ok(SpanComparison {
        equal: r <= tol.tau_rank,
        residual: r,
    })
}

/// Block swap `[[0, I_k], [I_k, 0]]` on `𝕄_{2k}`.
pub fn block_swap(field: Field, k: usize) -> Mat {
    Mat::from_fn(field, 2 * k, |i, j| {
        if j == (i + k) % (2 * k) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
