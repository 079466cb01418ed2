use super::{hermitian_eigen, phase, Field, Mat, Tolerances, C64};
use crate::Result;

/// Smallest eigenvalue of the Hermitian part `½(H + H*)`.
pub fn psd_margin(h: &Mat) -> Result<f64> {
    if h.n() == 0 {
        return Ok(0.0);
    }
    let eig = hermitian_eigen(h)?;
    Ok(*eig.values.last().expect("n > 0"))
}

/// Positive semidefiniteness up to `τ_psd·(1 + ‖H‖_max)`, including the
/// Hermitian-symmetry check.
pub fn is_psd(h: &Mat, tol: &Tolerances) -> Result<bool> {
    h.check_finite()?;
    let scale = 1.0 + h.max_abs();
    if h.dist_max(&h.adjoint()) > tol.tau_psd * scale {
        return Ok(false);
    }
    Ok(psd_margin(h)? >= -tol.tau_psd * scale)
}

/// A unit `μ` with `conj(μ)·B` psd, if one exists.
///
/// For a nonzero multiple of a psd matrix the trace is nonzero and points in
/// the direction of `μ`, so the trace phase is tried first. A grid over the
/// circle covers the remaining (numerically traceless) inputs.
pub fn unit_multiple_of_psd(b: &Mat, tol: &Tolerances) -> Result<Option<C64>> {
    b.check_finite()?;
    let one = C64::new(1.0, 0.0);
    if b.is_zero() {
        return Ok(Some(one));
    }
    if b.field() == Field::Real {
        for mu in [one, -one] {
            if is_psd(&b.scale(mu), tol)? {
                return Ok(Some(mu));
            }
        }
        return Ok(None);
    }

    let tr = b.trace();
    if tr.norm() > tol.tau_psd * (1.0 + b.max_abs()) {
        let mu = phase(tr);
        return Ok(is_psd(&b.scale(mu.conj()), tol)?.then_some(mu));
    }

    let margin_at = |theta: f64| -> Result<f64> {
        psd_margin(&b.scale(C64::from_polar(1.0, -theta)))
    };
    const GRID: usize = 4096;
    let h = std::f64::consts::TAU / GRID as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..GRID {
        let th = i as f64 * h;
        let m = margin_at(th)?;
        if m > best.1 {
            best = (th, m);
        }
    }
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    while hi - lo > tol.tau_psd {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if margin_at(x1)? >= margin_at(x2)? {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let mu = C64::from_polar(1.0, 0.5 * (lo + hi));
    Ok(is_psd(&b.scale(mu.conj()), tol)?.then_some(mu))
}
