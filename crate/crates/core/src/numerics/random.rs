//! Random matrices for sampling and tests. Every function takes the caller's
//! generator; nothing here owns state.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{phase, Field, Mat, C64};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Standard Gaussian scalar: `N(0,1)` over ℝ, `(N + iN)/√2` over ℂ.
pub fn gaussian_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(normal(rng), 0.0),
        Field::Complex => C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2,
    }
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Mat {
    Mat::from_fn(field, n, |_, _| gaussian_scalar(rng, field))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian_scalar(rng, field)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Vec<C64> {
    loop {
        let v = gaussian_vector(rng, field, n);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `e^{iθ}` with uniform θ over ℂ, a fair sign over ℝ.
pub fn unit_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => {
            if rng.random_bool(0.5) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-1.0, 0.0)
            }
        }
        Field::Complex => C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
    }
}

/// Haar-distributed unitary (complex) or orthogonal (real) matrix.
pub fn haar<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Mat {
    if n == 0 {
        return Mat::zeros(field, 0);
    }
    let g = gaussian(rng, field, n);
    let qr = g.into_data().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let ph = phase(r[(j, j)]);
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    Mat::from_parts(field, q)
}

/// Haar orthogonal matrix conditioned on `det = sign`.
pub fn orthogonal_with_det<R: Rng + ?Sized>(rng: &mut R, n: usize, sign: f64) -> Mat {
    let q = haar(rng, Field::Real, n);
    if q.determinant().re * sign > 0.0 {
        q
    } else {
        let mut d = q.into_data();
        d.column_mut(0).neg_mut();
        Mat::from_parts(Field::Real, d)
    }
}

/// `W diag(eigs) W*` with Haar `W`.
pub fn psd_with_eigs<R: Rng + ?Sized>(rng: &mut R, field: Field, eigs: &[f64]) -> Mat {
    let w = haar(rng, field, eigs.len());
    &(&w * &Mat::diag(field, eigs)) * &w.adjoint()
}

/// Wishart-type psd matrix `G G* / n`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Mat {
    let g = gaussian(rng, field, n);
    (&g * &g.adjoint()).scale_real(1.0 / n.max(1) as f64)
}

/// `x x*` for a Gaussian vector `x`.
pub fn rank_one_psd<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Mat {
    let x = gaussian_vector(rng, field, n);
    outer(field, &x, &x)
}

/// `x y*` for Gaussian `x, y`.
pub fn rank_one<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> Mat {
    let x = gaussian_vector(rng, field, n);
    let y = gaussian_vector(rng, field, n);
    outer(field, &x, &y)
}

/// `x y*`.
pub fn outer(field: Field, x: &[C64], y: &[C64]) -> Mat {
    let n = x.len();
    Mat::from_parts(field, DMatrix::from_fn(n, n, |i, j| x[i] * y[j].conj()))
}

/// Descending positive values in `[lo, hi]`.
pub fn descending<R: Rng + ?Sized>(rng: &mut R, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(lo..=hi)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}
