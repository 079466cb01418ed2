//! The truncated Euclidean norm on ℝ²: Euclidean where `|b| > |a|`, and
//! `√2|a|` otherwise. Two vectors are parallel iff they are dependent or both
//! lie in `σ ∪ (−σ)` with `σ = {(a, b) : a ≥ |b|}`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub a: f64,
    pub b: f64,
}

impl Vec2 {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    fn euclid(self) -> f64 {
        self.a.hypot(self.b)
    }

    fn scale(self, c: f64) -> Self {
        Self::new(c * self.a, c * self.b)
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

/// Row-major 2×2 real matrix.
pub type Mat2 = [[f64; 2]; 2];

pub fn apply(t: &Mat2, x: Vec2) -> Vec2 {
    Vec2::new(t[0][0] * x.a + t[0][1] * x.b, t[1][0] * x.a + t[1][1] * x.b)
}

pub fn inverse(t: &Mat2) -> Result<Mat2> {
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    if det.abs() <= f64::EPSILON * (t[0][0].abs() + t[1][1].abs() + t[0][1].abs() + t[1][0].abs()).powi(2) {
        return Err(Error::SingularMap);
    }
    Ok([[t[1][1] / det, -t[0][1] / det], [-t[1][0] / det, t[0][0] / det]])
}

pub fn norm_tre(x: Vec2) -> f64 {
    if x.b.abs() > x.a.abs() {
        x.euclid()
    } else {
        SQRT_2 * x.a.abs()
    }
}

/// `x ∈ σ ∪ (−σ)`, closed, with a relative slack `τ‖x‖₂`.
pub fn in_double_cone(x: Vec2, tol: f64) -> bool {
    x.b.abs() <= x.a.abs() + tol * x.euclid()
}

/// Cone characterization of parallelism.
pub fn parallel_tre(x: Vec2, y: Vec2, tol: f64) -> bool {
    let det = x.a * y.b - x.b * y.a;
    if det.abs() <= tol * x.euclid() * y.euclid() {
        return true;
    }
    in_double_cone(x, tol) && in_double_cone(y, tol)
}

/// Direct definition: `‖x ± y‖ = ‖x‖ + ‖y‖` for one sign, within
/// `τ(1 + ‖x‖ + ‖y‖)`.
pub fn parallel_tre_direct(x: Vec2, y: Vec2, tol: f64) -> bool {
    let bound = norm_tre(x) + norm_tre(y);
    let best = norm_tre(x.add(y)).max(norm_tre(x.add(y.scale(-1.0))));
    bound - best <= tol * (1.0 + bound)
}

/// `T₁` maps `σ` strictly into itself; `T₂` maps `σ` onto itself.
pub fn demo_maps() -> (Mat2, Mat2) {
    (
        [[1.0, 0.0], [1.0 / 12.0, 5.0 / 12.0]],
        [[1.5, 0.5], [0.5, 1.5]],
    )
}

/// A parallel pair: with equal odds a dependent pair, or two vectors of
/// `σ ∪ (−σ)` with independent signs.
pub fn sample_parallel_pair<R: Rng + ?Sized>(rng: &mut R) -> (Vec2, Vec2) {
    let cone_vec = |rng: &mut R| {
        let th = rng.random_range(-PI / 4.0..=PI / 4.0);
        let r = rng.random_range(0.1..10.0);
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        Vec2::new(s * r * th.cos(), s * r * th.sin())
    };
    if rng.random_bool(0.5) {
        let th = rng.random_range(0.0..2.0 * PI);
        let x = Vec2::new(th.cos(), th.sin()).scale(rng.random_range(0.1..10.0));
        let c = rng.random_range(-5.0..5.0);
        (x, x.scale(c))
    } else {
        let x = cone_vec(rng);
        (x, cone_vec(rng))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionCheck {
    pub pass: bool,
    pub samples: usize,
    /// First pair whose mapped pair is not parallel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec2, Vec2)>,
}

/// Forward test on `T`: sampled parallel pairs must map to parallel pairs.
pub fn check_forward<R: Rng + ?Sized>(t: &Mat2, rng: &mut R, samples: usize, tol: f64) -> DirectionCheck {
    for i in 0..samples {
        let (x, y) = sample_parallel_pair(rng);
        if !parallel_tre(apply(t, x), apply(t, y), tol) {
            return DirectionCheck {
                pass: false,
                samples: i + 1,
                witness: Some((x, y)),
            };
        }
    }
    DirectionCheck {
        pass: true,
        samples,
        witness: None,
    }
}

/// Backward test: sampled parallel pairs `(u, v)` are pulled back to
/// `(T⁻¹u, T⁻¹v)`, which must be parallel. A failure gives `x, y` with
/// `Tx ∥ Ty` and `x ∦ y`.
pub fn check_backward<R: Rng + ?Sized>(t: &Mat2, rng: &mut R, samples: usize, tol: f64) -> Result<DirectionCheck> {
    let inv = inverse(t)?;
    for i in 0..samples {
        let (u, v) = sample_parallel_pair(rng);
        let (x, y) = (apply(&inv, u), apply(&inv, v));
        if !parallel_tre(x, y, tol) {
            return Ok(DirectionCheck {
                pass: false,
                samples: i + 1,
                witness: Some((x, y)),
            });
        }
    }
    Ok(DirectionCheck {
        pass: true,
        samples,
        witness: None,
    })
}

/// Regression pair for `T₁`: `T₁x = (1, 17/24)` and `T₁y = (1, −13/24)`
/// both lie in `σ`, while `x` does not.
pub const T1_BACKWARD_WITNESS: (Vec2, Vec2) = (Vec2::new(1.0, 1.5), Vec2::new(1.0, -1.5));

pub fn is_backward_witness(t: &Mat2, x: Vec2, y: Vec2, tol: f64) -> bool {
    parallel_tre(apply(t, x), apply(t, y), tol) && !parallel_tre(x, y, tol)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioSweep {
    pub points: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `‖T(1,1)‖ / ‖(1,1)‖`.
    pub ratio_diagonal: f64,
    /// `‖T(1,−1)‖ / ‖(1,−1)‖`.
    pub ratio_antidiagonal: f64,
    pub multiple_of_isometry: bool,
}

fn ratio(t: &Mat2, x: Vec2) -> f64 {
    norm_tre(apply(t, x)) / norm_tre(x)
}

/// `T` is a multiple of an isometry iff `‖Tx‖/‖x‖` is constant; checked on
/// `points` unit vectors evenly spaced in angle.
pub fn isometry_ratio_sweep(t: &Mat2, points: usize, tol: f64) -> RatioSweep {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..points {
        let th = 2.0 * PI * i as f64 / points as f64;
        let r = ratio(t, Vec2::new(th.cos(), th.sin()));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let d = ratio(t, Vec2::new(1.0, 1.0));
    let ad = ratio(t, Vec2::new(1.0, -1.0));
    lo = lo.min(d).min(ad);
    hi = hi.max(d).max(ad);
    RatioSweep {
        points,
        min_ratio: lo,
        max_ratio: hi,
        ratio_diagonal: d,
        ratio_antidiagonal: ad,
        multiple_of_isometry: hi - lo <= tol * (1.0 + hi),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GridCheck {
    pub pairs: usize,
    pub disagreements: usize,
    pub parallel_pairs: usize,
}

/// Cone characterization against the direct definition on all pairs from a
/// `side`-point set of vectors (varying angle and length).
pub fn grid_cross_validation(side: usize, tol: f64) -> GridCheck {
    let vecs: Vec<Vec2> = (0..side)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / side as f64;
            let r = 0.5 + (i % 7) as f64 * 0.5;
            Vec2::new(r * th.cos(), r * th.sin())
        })
        .collect();
    let mut bad = 0;
    let mut par = 0;
    for &x in &vecs {
        for &y in &vecs {
            let c = parallel_tre(x, y, tol);
            if c != parallel_tre_direct(x, y, tol) {
                bad += 1;
            }
            par += c as usize;
        }
    }
    GridCheck {
        pairs: side * side,
        disagreements: bad,
        parallel_pairs: par,
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrEReport {
    pub t1: Mat2,
    pub t2: Mat2,
    pub t1_forward: DirectionCheck,
    pub t1_backward: DirectionCheck,
    pub t1_pinned_witness: (Vec2, Vec2),
    pub t1_pinned_witness_holds: bool,
    pub t2_forward: DirectionCheck,
    pub t2_backward: DirectionCheck,
    pub t2_isometry: RatioSweep,
    pub grid: GridCheck,
    pub pass: bool,
}

/// Runs every check of the counterexample.
pub fn demo_report<R: Rng + ?Sized>(rng: &mut R, samples: usize, tol: f64) -> Result<TrEReport> {
    let (t1, t2) = demo_maps();
    let t1_forward = check_forward(&t1, rng, samples, tol);
    let t1_backward = check_backward(&t1, rng, samples, tol)?;
    let (wx, wy) = T1_BACKWARD_WITNESS;
    let pinned = is_backward_witness(&t1, wx, wy, tol);
    let t2_forward = check_forward(&t2, rng, samples, tol);
    let t2_backward = check_backward(&t2, rng, samples, tol)?;
    let t2_isometry = isometry_ratio_sweep(&t2, 360, tol);
    let grid = grid_cross_validation(200, tol);
    let found = t1_backward
        .witness
        .is_some_and(|(x, y)| is_backward_witness(&t1, x, y, tol));
    let pass = t1_forward.pass
        && found
        && pinned
        && t2_forward.pass
        && t2_backward.pass
        && !t2_isometry.multiple_of_isometry
        && grid.disagreements == 0;
    Ok(TrEReport {
        t1,
        t2,
        t1_forward,
        t1_backward,
        t1_pinned_witness: T1_BACKWARD_WITNESS,
        t1_pinned_witness_holds: pinned,
        t2_forward,
        t2_backward,
        t2_isometry,
        grid,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-8;

    #[test]
    fn norm_cases() {
        assert_eq!(norm_tre(Vec2::new(1.0, 0.0)), SQRT_2);
        assert_eq!(norm_tre(Vec2::new(0.0, 1.0)), 1.0);
        assert_eq!(norm_tre(Vec2::new(1.0, 1.0)), SQRT_2);
        assert_eq!(norm_tre(Vec2::new(-2.0, 1.0)), 2.0 * SQRT_2);
    }

    #[test]
    fn parallel_examples() {
        assert!(parallel_tre(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.5), TOL));
        assert!(!parallel_tre(Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0), TOL));
        assert!(!parallel_tre_direct(Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0), TOL));
        assert!(parallel_tre(Vec2::new(2.0, 1.0), Vec2::new(-4.0, -2.0), TOL));
    }

    #[test]
    fn demo_map_images() {
        let (t1, t2) = demo_maps();
        let v = apply(&t1, Vec2::new(1.0, 1.0));
        assert_eq!(v.a, 1.0);
        assert!((v.b - 0.5).abs() < 1e-15);
        let v = apply(&t1, Vec2::new(1.0, -1.0));
        assert!((v.b + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(apply(&t2, Vec2::new(1.0, -1.0)), Vec2::new(1.0, -1.0));
        assert_eq!(apply(&t2, Vec2::new(1.0, 1.0)), Vec2::new(2.0, 2.0));
    }

    #[test]
    fn ratios_of_t2() {
        let (_, t2) = demo_maps();
        let s = isometry_ratio_sweep(&t2, 360, TOL);
        assert!((s.ratio_diagonal - 2.0).abs() < 1e-15);
        assert!((s.ratio_antidiagonal - 1.0).abs() < 1e-15);
        assert!(!s.multiple_of_isometry);
        let id = [[3.0, 0.0], [0.0, 3.0]];
        assert!(isometry_ratio_sweep(&id, 360, TOL).multiple_of_isometry);
    }

    #[test]
    fn pinned_witness() {
        let (t1, _) = demo_maps();
        let (x, y) = T1_BACKWARD_WITNESS;
        assert!(is_backward_witness(&t1, x, y, TOL));
    }

    #[test]
    fn full_demo_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = demo_report(&mut rng, 1000, TOL).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.grid.pairs, 40_000);
    }
}
