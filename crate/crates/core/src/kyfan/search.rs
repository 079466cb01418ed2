use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use crate::numerics::{Mat, C64};
use crate::Result;

use super::kyfan;

pub(crate) const GRID: usize = 1024;
const GOLDEN_BRACKETS: usize = 3;
const MAX_EVALS: usize = 200_000;

/// Outcome of maximizing `θ ↦ ‖A + e^{iθ}B‖_(k)` over the circle.
#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub theta: f64,
    pub best: f64,
    /// Certified upper bound on the maximum when the search stopped.
    pub upper: f64,
    pub evaluations: usize,
    /// False only when the evaluation budget ran out before the decision
    /// threshold was separated from the bracket `[best, upper]`.
    pub certified: bool,
}

struct Interval {
    lo: f64,
    hi: f64,
    g_lo: f64,
    g_hi: f64,
    ub: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.ub.total_cmp(&other.ub) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// Maximizes `g(θ)` until `g* ≥ threshold` is witnessed or the Lipschitz
/// upper bound drops below `threshold`.
///
/// Grid, then golden-section on the best grid brackets, then a
/// Piyavskii-style branch and bound on the grid intervals. On `[a, b]`,
/// `g ≤ (g(a) + g(b))/2 + lip·(b − a)/2`.
pub(crate) fn circle_search(
    a: &Mat,
    b: &Mat,
    k: usize,
    lip: f64,
    threshold: f64,
) -> Result<SearchOutcome> {
    let bc = b.to_complex();
    let ac = a.to_complex();
    let evals = Cell::new(0usize);
    let g = |theta: f64| -> Result<f64> {
        evals.set(evals.get() + 1);
        kyfan(&(&ac + &bc.scale(C64::from_polar(1.0, theta))), k)
    };

    let h = TAU / GRID as f64;
    let mut vals = Vec::with_capacity(GRID + 1);
    for i in 0..GRID {
        vals.push(g(i as f64 * h)?);
    }
    vals.push(vals[0]);

    let mut best = (0.0, vals[0]);
    for (i, &v) in vals.iter().enumerate().take(GRID) {
        if v > best.1 {
            best = (i as f64 * h, v);
        }
    }

    if best.1 < threshold {
        let mut order: Vec<usize> = (0..GRID).collect();
        order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for &i in order.iter().take(GOLDEN_BRACKETS) {
            let c = i as f64 * h;
            let (mut lo, mut hi) = (c - h, c + h);
            let mut x1 = hi - ratio * (hi - lo);
            let mut x2 = lo + ratio * (hi - lo);
            let mut f1 = g(x1)?;
            let mut f2 = g(x2)?;
            while hi - lo > 1e-10 {
                if f1 >= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - ratio * (hi - lo);
                    f1 = g(x1)?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + ratio * (hi - lo);
                    f2 = g(x2)?;
                }
            }
            for (x, f) in [(x1, f1), (x2, f2)] {
                if f > best.1 {
                    best = (x, f);
                }
            }
            if best.1 >= threshold {
                break;
            }
        }
    }

    let mut heap = BinaryHeap::with_capacity(GRID);
    for i in 0..GRID {
        let (lo, hi) = (i as f64 * h, (i + 1) as f64 * h);
        let (g_lo, g_hi) = (vals[i], vals[i + 1]);
        heap.push(Interval {
            lo,
            hi,
            g_lo,
            g_hi,
            ub: 0.5 * (g_lo + g_hi) + 0.5 * lip * (hi - lo),
        });
    }

    let mut certified = true;
    loop {
        let upper = heap.peek().map_or(best.1, |iv| iv.ub.max(best.1));
        if best.1 >= threshold || upper < threshold {
            break;
        }
        if evals.get() >= MAX_EVALS {
            certified = false;
            break;
        }
        let iv = heap.pop().expect("heap is nonempty while upper >= threshold");
        let mid = 0.5 * (iv.lo + iv.hi);
        let gm = g(mid)?;
        if gm > best.1 {
            best = (mid, gm);
        }
        for (lo, hi, g_lo, g_hi) in [(iv.lo, mid, iv.g_lo, gm), (mid, iv.hi, gm, iv.g_hi)] {
            heap.push(Interval {
                lo,
                hi,
                g_lo,
                g_hi,
                ub: 0.5 * (g_lo + g_hi) + 0.5 * lip * (hi - lo),
            });
        }
    }
    let upper = heap.peek().map_or(best.1, |iv| iv.ub.max(best.1));
    Ok(SearchOutcome {
        theta: best.0.rem_euclid(TAU),
        best: best.1,
        upper,
        evaluations: evals.get(),
        certified,
    })
}
