use nalgebra::{ComplexField, DMatrix, DVector};
use serde::Serialize;

use super::{phase, Field, Mat, C64};
use crate::Result;

/// `A = U · diag(s) · V*` with `s` descending.
///
/// Phases are fixed column by column: the entry of largest modulus in each
/// column of `U` is real and nonnegative (lowest row index on ties), and the
/// compensating phase is carried by the matching column of `V`. Columns
/// belonging to numerically zero singular values have `V` fixed by the same
/// rule independently.
#[derive(Clone, Debug, Serialize)]
pub struct SvdTriple {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

impl SvdTriple {
    pub fn reconstruct(&self) -> Mat {
        let d = Mat::diag(self.u.field(), &self.s);
        &(&self.u * &d) * &self.v.adjoint()
    }

    /// Max-entry deviation of `U*U` and `V*V` from the identity.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.s.len();
        let id = Mat::identity(self.u.field(), n);
        let ru = (&self.u.adjoint() * &self.u).dist_max(&id);
        let rv = (&self.v.adjoint() * &self.v).dist_max(&id);
        ru.max(rv)
    }
}

type RawSvd = (DMatrix<C64>, Vec<f64>, DMatrix<C64>);

fn nalgebra_svd(a: &Mat) -> RawSvd {
    match a.field() {
        Field::Real => {
            let dec = a.real_part().svd(true, true);
            let u = dec.u.expect("requested U").map(|x| C64::new(x, 0.0));
            let v = dec
                .v_t
                .expect("requested V^T")
                .transpose()
                .map(|x| C64::new(x, 0.0));
            (u, dec.singular_values.iter().copied().collect(), v)
        }
        Field::Complex => {
            let dec = a.data().clone().svd(true, true);
            let u = dec.u.expect("requested U");
            let v = dec.v_t.expect("requested V^*").adjoint();
            (u, dec.singular_values.iter().copied().collect(), v)
        }
    }
}

/// Reconstruction and orthogonality within a small multiple of `ε·n·s₁`.
fn accurate(a: &DMatrix<C64>, (u, s, v): &RawSvd) -> bool {
    let n = a.nrows();
    let top = s.iter().copied().fold(0.0, f64::max).max(a.iter().map(|z| z.norm()).fold(0.0, f64::max));
    let mut us = u.clone();
    for (j, &sj) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(sj);
    }
    let rec = (&us * v.adjoint() - a).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let id = DMatrix::<C64>::identity(n, n);
    let orth = (u.adjoint() * u - &id)
        .iter()
        .chain((v.adjoint() * v - &id).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let eps = 64.0 * f64::EPSILON * (n.max(1) as f64);
    rec <= eps * top && orth <= eps
}

/// One-sided (Hestenes) Jacobi SVD.
fn jacobi_svd(a: &DMatrix<C64>) -> RawSvd {
    let n = a.nrows();
    let mut w = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // rephase column q so the inner product is real and positive
                let ph = gamma.conj() / g;
                w.column_mut(q).iter_mut().for_each(|z| *z *= ph);
                v.column_mut(q).iter_mut().for_each(|z| *z *= ph);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for r in 0..n {
                        let (x, y) = (m[(r, p)], m[(r, q)]);
                        m[(r, p)] = x * c - y * s;
                        m[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let top = s.iter().copied().fold(0.0, f64::max);
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut filled = vec![false; n];
    for j in 0..n {
        if s[j] > f64::EPSILON * top && s[j] > 0.0 {
            u.set_column(j, &(w.column(j) / C64::new(s[j], 0.0)));
            filled[j] = true;
        }
    }
    // complete U over the null columns by Gram-Schmidt on the standard basis
    let mut e = 0;
    for j in 0..n {
        if filled[j] {
            continue;
        }
        while e < n {
            let mut c = DVector::<C64>::zeros(n);
            c[e] = C64::new(1.0, 0.0);
            e += 1;
            for _ in 0..2 {
                for i in (0..n).filter(|&i| filled[i]) {
                    let proj = u.column(i).dotc(&c);
                    c -= u.column(i) * proj;
                }
            }
            let nc = c.norm();
            if nc > 1e-8 {
                u.set_column(j, &(c / C64::new(nc, 0.0)));
                filled[j] = true;
                break;
            }
        }
    }
    (u, s, v)
}

pub fn svd(a: &Mat) -> Result<SvdTriple> {
    a.check_finite()?;
    let n = a.n();
    let mut raw = nalgebra_svd(a);
    if !accurate(a.data(), &raw) {
        raw = jacobi_svd(a.data());
    }
    let (u, s, v) = raw;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let top = s.iter().copied().fold(0.0, f64::max);
    let null_cut = f64::EPSILON * n as f64 * top;
    let mut u_sorted = DMatrix::zeros(n, n);
    let mut v_sorted = DMatrix::zeros(n, n);
    let mut s_sorted = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut uc = u.column(src).into_owned();
        let mut vc = v.column(src).into_owned();
        let best = largest_entry(&uc);
        let c = phase(uc[best]).conj();
        uc *= c;
        vc *= c;
        if s[src] <= null_cut {
            // Numerically null direction: the pairing of u and v is free, so
            // fix v by the same rule.
            let vb = largest_entry(&vc);
            vc *= phase(vc[vb]).conj();
        }
        u_sorted.set_column(dst, &uc);
        v_sorted.set_column(dst, &vc);
        s_sorted.push(s[src].max(0.0));
    }
    Ok(SvdTriple {
        u: Mat::from_parts(a.field(), u_sorted),
        s: s_sorted,
        v: Mat::from_parts(a.field(), v_sorted),
    })
}

/// Row of the largest-modulus entry, lowest row on (near) ties.
fn largest_entry(col: &DVector<C64>) -> usize {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (r, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_abs * (1.0 + 1e-12) {
            best = r;
            best_abs = m;
        }
    }
    best
}

/// Singular values in descending order, from the checked [`svd`].
pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank<T>(m: &DMatrix<T>, rel_tol: f64) -> usize
where
    T: ComplexField<RealField = f64>,
{
    if m.is_empty() {
        return 0;
    }
    let s = m.singular_values();
    let top = s.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: Mat,
}

/// Eigendecomposition of the Hermitian part `½(H + H*)` by cyclic Jacobi
/// rotations.
pub fn hermitian_eigen(h: &Mat) -> Result<HermitianEigen> {
    h.check_finite()?;
    let n = h.n();
    let mut a = (h.data() + h.data().adjoint()) * C64::new(0.5, 0.0);
    let mut v: DMatrix<C64> = DMatrix::identity(n, n);
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= f64::EPSILON * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let e_conj = (apq / abs).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = e_conj * (-s);
                let g_qq = e_conj * c;

                for r in 0..n {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = x * g_pp + y * g_qp;
                    a[(r, q)] = x * g_pq + y * g_qq;
                    let (x, y) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = x * g_pp + y * g_qp;
                    v[(r, q)] = x * g_pq + y * g_qq;
                }
                for r in 0..n {
                    let (x, y) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = g_pp.conj() * x + g_qp.conj() * y;
                    a[(q, r)] = g_pq.conj() * x + g_qq.conj() * y;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        values,
        vectors: Mat::from_parts(h.field(), vectors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random;
    use rand::{Rng, SeedableRng};
    use rand::rngs::StdRng;

    #[test]
    fn diagonal_svd_is_identity_framed() {
        let a = Mat::diag(Field::Real, &[3.0, 2.0, 1.0]);
        let d = svd(&a).unwrap();
        assert_eq!(d.s, vec![3.0, 2.0, 1.0]);
        let id = Mat::identity(Field::Real, 3);
        assert!(d.u.dist_max(&id) < 1e-15);
        assert!(d.v.dist_max(&id) < 1e-15);
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let d = svd(&Mat::zeros(Field::Complex, 3)).unwrap();
        assert_eq!(d.s, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn svd_invariants_on_random_complex() {
        let mut rng = StdRng::seed_from_u64(11);
        let tol = crate::Tolerances::default();
        for n in 1..=6 {
            let a = random::gaussian(&mut rng, Field::Complex, n);
            let d = svd(&a).unwrap();
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(d.orthogonality_residual() <= tol.tau_orth);
            assert!(d.reconstruct().dist_max(&a) <= tol.tau_recon * (1.0 + d.s[0]));
            for j in 0..n {
                let col = d.u.data().column(j);
                let (best, _) = col
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
                assert!(col[best].im.abs() < 1e-14 && col[best].re >= 0.0);
            }
        }
    }

    #[test]
    fn real_svd_stays_real() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random::gaussian(&mut rng, Field::Real, 4);
        let d = svd(&a).unwrap();
        assert_eq!(d.u.field(), Field::Real);
        assert!(d.reconstruct().dist_max(&a) < 1e-12);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut d = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        d[(0, 1)] = C64::new(f64::INFINITY, 0.0);
        let m = Mat::from_parts(Field::Complex, d);
        assert_eq!(svd(&m).unwrap_err(), crate::Error::NonFinite);
    }

    #[test]
    fn jacobi_matches_nalgebra_symmetric_eigen() {
        let mut rng = StdRng::seed_from_u64(99);
        for n in 1..=7 {
            let g = random::gaussian(&mut rng, Field::Complex, n);
            let h = &g + &g.adjoint();
            let mine = hermitian_eigen(&h).unwrap();
            let mut theirs: Vec<f64> = h.data().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in mine.values.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-11 * (1.0 + y.abs()), "{x} vs {y}");
            }
            // H V = V Λ
            let lam = Mat::diag(Field::Complex, &mine.values);
            let lhs = &h * &mine.vectors;
            let rhs = &mine.vectors * &lam;
            assert!(lhs.dist_max(&rhs) < 1e-11);
        }
    }

    #[test]
    fn rank_deficient_svd_reconstructs() {
        let mut rng = StdRng::seed_from_u64(21);
        for field in [Field::Real, Field::Complex] {
            for _ in 0..300 {
                let n = 2 + rng.random_range(0..5);
                let a = random::rank_one(&mut rng, field, n);
                let d = svd(&a).unwrap();
                assert!(d.reconstruct().dist_max(&a) <= 1e-13 * (1.0 + d.s[0]));
                assert!(d.orthogonality_residual() <= 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_svd_is_accurate() {
        let mut rng = StdRng::seed_from_u64(22);
        for field in [Field::Real, Field::Complex] {
            for n in 1..=7 {
                let mut a = random::gaussian(&mut rng, field, n);
                if n > 2 {
                    a = &a * &Mat::diag(field, &[&vec![1.0; n - 2][..], &[0.0, 0.0]].concat());
                }
                let raw = jacobi_svd(a.data());
                assert!(accurate(a.data(), &raw), "n={n}");
                let (_, s, _) = raw;
                let mut s = s;
                s.sort_by(|x, y| y.total_cmp(x));
                let want = svd(&a).unwrap().s;
                for (x, y) in s.iter().zip(&want) {
                    assert!((x - y).abs() < 1e-12 * (1.0 + want[0]));
                }
            }
        }
    }

    #[test]
    fn numerical_rank_counts() {
        let m = DMatrix::<f64>::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1e-3, 0.0, 0.0, 0.0, 1e-12]);
        assert_eq!(numerical_rank(&m, 1e-8), 2);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(2, 2), 1e-8), 0);
    }
}
