//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::thread;

use kyfan_core::analyzer::{decompose, test_preservation, Classification, Direction, MatrixLinearMap};
use kyfan_core::cone::{pert_classify, pert_empirical_dim, s_set_sample, sample_boundary, trace_cone_witness, PertKind, SSet};
use kyfan_core::isometry::{l_map, random_isometry, Exceptional};
use kyfan_core::kyfan::{
    has_structural_gap, kyfan, parallel, parallel_with_mode, sample_parallel_pair, structural_test, Mode,
};
use kyfan_core::numerics::{hermitian_eigen, random, singular_values};
use kyfan_core::span::{analytic_dim, empirical_span_dim, lower_bound_dim, SpectralProfile};
use kyfan_core::trunc_euclid::demo_report;
use kyfan_core::{Field, Mat, Tolerances, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

const FIELDS: [Field; 2] = [Field::Real, Field::Complex];

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6b79_6661_6e00 ^ tag)
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Singular values as the positive eigenvalues of `[[0, A], [A*, 0]]`.
fn dilation_singular_values(a: &Mat) -> Vec<f64> {
    let n = a.n();
    let adj = a.adjoint();
    let h = Mat::from_fn(a.field(), 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a.get(i, j - n),
        (false, true) => adj.get(i - n, j),
        _ => C64::new(0.0, 0.0),
    });
    let e = hermitian_eigen(&h).expect("finite");
    e.values[..n].iter().map(|v| v.max(0.0)).collect()
}

fn c1_norm_oracle() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut count = 0;
    for field in FIELDS {
        for _ in 0..500 {
            let n = r.random_range(1..=6);
            let a = random::gaussian(&mut r, field, n).scale_real(random::log_uniform(&mut r, 0.01, 100.0));
            let oracle = dilation_singular_values(&a);
            for k in 1..=n {
                let want: f64 = oracle[..k].iter().sum();
                let got = kyfan(&a, k).unwrap();
                worst = worst.max((got - want).abs() / want.max(f64::MIN_POSITIVE));
                count += 1;
            }
        }
    }
    (worst <= 1e-10, format!("{count} norms, worst relative error {worst:.2e}"))
}

/// Decision from a 16384-point grid; parallel when the grid maximum comes
/// within the slack plus the Lipschitz margin `‖B‖·h`.
fn brute_parallel(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> bool {
    const POINTS: usize = 16384;
    let bound = kyfan(a, k).unwrap() + kyfan(b, k).unwrap();
    let lip = kyfan(b, k).unwrap();
    let h = PI / POINTS as f64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..POINTS {
        let mu = C64::from_polar(1.0, 2.0 * PI * i as f64 / POINTS as f64);
        best = best.max(kyfan(&(a + &b.scale(mu)), k).unwrap());
    }
    bound - best <= tol.tau_par * (1.0 + bound) + lip * h
}

fn c2_parallel_decision() -> Outcome {
    let mut r = rng(2);
    let t = tol();
    let sizes = [(3, 2), (4, 2), (3, 1), (4, 3), (2, 1)];
    let mut disagree = 0;
    let mut structural_checked = 0;
    let mut structural_disagree = 0;
    for i in 0..400 {
        let (n, k) = sizes[i % sizes.len()];
        let (a, b) = if i < 200 {
            let p = sample_parallel_pair(&mut r, n, k, Field::Complex).unwrap();
            (p.a, p.b)
        } else {
            (random::gaussian(&mut r, Field::Complex, n), random::gaussian(&mut r, Field::Complex, n))
        };
        let search = parallel_with_mode(&a, &b, k, &t, Mode::Search).unwrap();
        if search.parallel != brute_parallel(&a, &b, k, &t) || search.parallel != (i < 200) {
            disagree += 1;
        }
        if has_structural_gap(&singular_values(&a).unwrap(), k, &t) {
            structural_checked += 1;
            if structural_test(&a, &b, k, &t).unwrap().parallel != search.parallel {
                structural_disagree += 1;
            }
        }
    }
    (
        disagree == 0 && structural_disagree == 0 && structural_checked > 0,
        format!(
            "400 pairs, {disagree} search/grid disagreements; structural agreed on {}/{structural_checked} gap instances",
            structural_checked - structural_disagree
        ),
    )
}

fn tied(r: &mut ChaCha8Rng, field: Field, s: &[f64]) -> Mat {
    let u = random::haar(r, field, s.len());
    let v = random::haar(r, field, s.len());
    &(&u * &Mat::diag(field, s)) * &v.adjoint()
}

fn c3_span_dimension() -> Outcome {
    let mut r = rng(3);
    let t = tol();
    let mut exact = 0;
    let mut total = 0;
    let mut notes = Vec::new();
    for field in FIELDS {
        for (n, k) in [(3, 2), (4, 2), (4, 3), (5, 2)] {
            for _ in 0..20 {
                let a = random::gaussian(&mut r, field, n);
                assert!(SpectralProfile::of(&a, k, &t).unwrap().gap_at_k);
                let d = empirical_span_dim(&a, k, &mut r, 3 * n * n + 10, &t).unwrap();
                total += 1;
                if d == analytic_dim(field, n, k) {
                    exact += 1;
                } else if notes.len() < 3 {
                    notes.push(format!("{field} ({n},{k}) got {d}"));
                }
            }
        }
    }
    let ties: [(Field, usize, Vec<f64>); 5] = [
        (Field::Complex, 2, vec![3.0, 2.0, 2.0, 1.0]),
        (Field::Real, 2, vec![3.0, 2.0, 2.0, 1.0]),
        (Field::Complex, 2, vec![2.0, 1.0, 1.0]),
        (Field::Real, 2, vec![4.0, 1.0, 1.0, 1.0, 0.5]),
        (Field::Complex, 2, vec![1.0, 0.0, 0.0]),
    ];
    let mut ties_ok = 0;
    for i in 0..10 {
        let (field, k, s) = &ties[i % ties.len()];
        let a = tied(&mut r, *field, s);
        let prof = SpectralProfile::of(&a, *k, &t).unwrap();
        let n = s.len();
        let d = empirical_span_dim(&a, *k, &mut r, 3 * n * n + 10, &t).unwrap();
        if !prof.gap_at_k && d >= lower_bound_dim(*field, n, *k, prof.q) {
            ties_ok += 1;
        } else if notes.len() < 6 {
            notes.push(format!("tie {s:?} got {d}"));
        }
    }
    (
        exact == total && ties_ok == 10,
        format!("{exact}/{total} exact, {ties_ok}/10 ties above bound {}", notes.join("; ")),
    )
}

fn c4_pert() -> Outcome {
    let mut r = rng(4);
    let t = tol();
    let mut agree = 0;
    let mut total = 0;
    let mut notes = Vec::new();
    for field in FIELDS {
        for (n, k) in [(4, 2), (5, 2)] {
            for class in 0..3 {
                for _ in 0..100 {
                    let x = match class {
                        0 => s_set_sample(&mut r, SSet::S1, n, k, field).unwrap(),
                        1 => s_set_sample(&mut r, SSet::SU, n, k, field).unwrap(),
                        _ => sample_boundary(&mut r, field, n, k),
                    };
                    let kind = pert_classify(&x, n, k, &t).unwrap().kind;
                    let dim = pert_empirical_dim(&x, n, k, &mut r, 6, &t).unwrap();
                    total += 1;
                    if (kind != PertKind::Generic) == (dim == 1) {
                        agree += 1;
                    } else if notes.len() < 3 {
                        notes.push(format!("{field} ({n},{k}) {kind:?} dim {dim}"));
                    }
                }
            }
        }
    }
    (agree == total, format!("{agree}/{total} boundary points agree {}", notes.join("; ")))
}

fn c5_l_suite() -> Outcome {
    let mut r = rng(5);
    let (mut inv, mut iso) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let x = random::gaussian(&mut r, Field::Real, 4);
        let lx = l_map(&x).unwrap();
        inv = inv.max(l_map(&lx).unwrap().dist_max(&x));
        iso = iso.max((kyfan(&lx, 2).unwrap() - kyfan(&x, 2).unwrap()).abs());
    }
    let i4 = Mat::identity(Field::Real, 4);
    let (mut orth, mut point) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let q = random::orthogonal_with_det(&mut r, 4, -1.0);
        let lq = l_map(&q).unwrap();
        let o = (&lq.transpose() * &lq).dist_max(&i4);
        let d = (lq.determinant().re + 1.0).abs();
        orth = orth.max(o.max(d));
        point = point.max(lq.dist_max(&q));
    }
    let mut so2 = 0.0f64;
    for _ in 0..100 {
        let x = random::unit_vector(&mut r, Field::Real, 2);
        let s = random::outer(Field::Real, &x, &x).scale_real(2.0);
        let y = l_map(&Mat::direct_sum(&s, &Mat::zeros(Field::Real, 2))).unwrap();
        let tail = y.principal_block(2, 2);
        let shape = Mat::direct_sum(&Mat::identity(Field::Real, 2), &tail).dist_max(&y);
        let rot = (&tail.transpose() * &tail).dist_max(&Mat::identity(Field::Real, 2));
        let det = (tail.determinant().re - 1.0).abs();
        so2 = so2.max(shape).max(rot).max(det);
    }
    (
        inv <= 1e-12 && iso <= 1e-10 && orth <= 1e-12 && so2 <= 1e-10,
        format!(
            "involution {inv:.1e}, isometry {iso:.1e}, det -1 set invariance {orth:.1e} (pointwise distance {point:.2}), I2+SO(2) {so2:.1e}"
        ),
    )
}

fn c6_round_trip() -> Outcome {
    let mut r = rng(6);
    let t = tol();
    let mut ok = 0;
    let mut total = 0;
    let mut worst = 0.0f64;
    let mut tags = [0usize; 4];
    for (field, n, k) in [(Field::Complex, 3, 2), (Field::Complex, 4, 2), (Field::Real, 4, 2), (Field::Real, 5, 2)] {
        for _ in 0..50 {
            let form = random_isometry(&mut r, n, k, field, true).unwrap();
            let map = MatrixLinearMap::from_form(&form).unwrap();
            let rep = decompose(&map, k, &mut r, 6, &t).unwrap();
            let expect = match form.exceptional {
                Exceptional::NoL => Classification::Standard,
                _ => Classification::ExceptionalL,
            };
            total += 1;
            let res = rep.residual.unwrap_or(f64::INFINITY);
            worst = worst.max(res);
            if rep.classification == expect && res <= 1e-8 {
                ok += 1;
                if field == Field::Real && n == 4 {
                    tags[form.exceptional as usize] += 1;
                }
            }
        }
    }
    let all_tags = tags[1..].iter().all(|&c| c > 0);
    (
        ok == total && all_tags,
        format!("{ok}/{total} recovered, worst residual {worst:.1e}, exceptional tags at (R,4,2): L {} LPrime {} EConj {}", tags[1], tags[2], tags[3]),
    )
}

fn c7_non_preserver() -> Outcome {
    let t = tol();
    let mut lines = Vec::new();
    let mut all = true;
    for (field, n, k, d) in [
        (Field::Complex, 3, 2, vec![1.0, 2.0, 1.0]),
        (Field::Real, 4, 2, vec![1.0, 1.0, 3.0, 1.0]),
    ] {
        let dm = Mat::diag(field, &d);
        let map = MatrixLinearMap::from_fn(field, n, |x| Ok(&dm * x)).unwrap();
        let mut hit = None;
        for seed in 0..3 {
            let mut r = rng(70 + seed);
            let rep = test_preservation(&map, k, &mut r, 500, Direction::Forward, &t).unwrap();
            if let Some(w) = &rep.witness {
                let img = parallel(&map.apply(&w.a).unwrap(), &map.apply(&w.b).unwrap(), k, &t).unwrap();
                let pre = parallel(&w.a, &w.b, k, &t).unwrap();
                if !img.parallel && pre.parallel {
                    let cls = decompose(&map, k, &mut r, 500, &t).unwrap().classification;
                    hit = Some((seed, rep.samples, cls));
                    break;
                }
            }
        }
        match hit {
            Some((seed, s, Classification::NotPreserver)) => {
                lines.push(format!("{field} n={n}: witness after {s} samples (seed {seed})"))
            }
            other => {
                all = false;
                lines.push(format!("{field} n={n}: {other:?}"));
            }
        }
    }
    (all, lines.join("; "))
}

fn c8_trace_cone() -> Outcome {
    let mut r = rng(8);
    let t = tol();
    let (mut sing_ok, mut inv_ok) = (0, 0);
    for i in 0..20 {
        let field = FIELDS[i % 2];
        let n = 2 + i % 3;
        let mut s = random::descending(&mut r, n, 0.5, 3.0);
        s[n - 1] = 0.0;
        let a = tied(&mut r, field, &s);
        let w = trace_cone_witness(&a, &mut r, &t).unwrap();
        if w.singular && w.witness().is_some() && w.consistent() {
            sing_ok += 1;
        }
    }
    for i in 0..20 {
        let field = FIELDS[i % 2];
        let n = 2 + i % 3;
        let s = random::descending(&mut r, n, 0.5, 3.0);
        let a = tied(&mut r, field, &s);
        let w = trace_cone_witness(&a, &mut r, &t).unwrap();
        if !w.singular && w.witness().is_none() && w.consistent() {
            inv_ok += 1;
        }
    }
    (
        sing_ok == 20 && inv_ok == 20,
        format!("{sing_ok}/20 singular witnesses certified, {inv_ok}/20 invertible with every candidate failing"),
    )
}

fn c9_tre() -> Outcome {
    let mut r = rng(9);
    let rep = demo_report(&mut r, 1000, tol().tau_par).unwrap();
    (
        rep.pass,
        format!(
            "T1 forward {} backward witness {:?} pinned {}; T2 forward {} backward {}; ratios {} and {} (isometry multiple: {}); grid disagreements {}",
            rep.t1_forward.pass,
            rep.t1_backward.witness.is_some(),
            rep.t1_pinned_witness_holds,
            rep.t2_forward.pass,
            rep.t2_backward.pass,
            rep.t2_isometry.ratio_diagonal,
            rep.t2_isometry.ratio_antidiagonal,
            rep.t2_isometry.multiple_of_isometry,
            rep.grid.disagreements
        ),
    )
}

fn c10_k_dependence() -> Outcome {
    let t = tol();
    let mut ok = true;
    let mut parts = Vec::new();
    for field in FIELDS {
        let e11 = Mat::unit(field, 2, 0, 0);
        let e22 = Mat::unit(field, 2, 1, 1);
        for (k, expect) in [(1, false), (2, true)] {
            let c = parallel(&e11, &e22, k, &t).unwrap();
            // singular values of E11 + μE22 are (1, 1) for every unit μ
            let exact_sum: f64 = [1.0, 1.0][..k].iter().sum();
            let achieved_exact = (c.achieved - exact_sum).abs() <= 1e-14 && c.bound == 2.0;
            ok &= c.parallel == expect && achieved_exact;
            parts.push(format!("{field} k={k}: {} ({} of {})", c.parallel, c.achieved, c.bound));
        }
    }
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("norm oracle", c1_norm_oracle),
        ("parallel decision", c2_parallel_decision),
        ("span dimension", c3_span_dimension),
        ("pert classification", c4_pert),
        ("exceptional map", c5_l_suite),
        ("preserver round-trip", c6_round_trip),
        ("non-preserver detection", c7_non_preserver),
        ("trace-norm cone", c8_trace_cone),
        ("truncated Euclidean counterexample", c9_tre),
        ("k-dependence", c10_k_dependence),
    ];
    let results: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (false, "panicked".into())))
            .collect()
    });
    let mut all = true;
    for (i, ((name, _), (pass, detail))) in criteria.iter().zip(&results).enumerate() {
        all &= pass;
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if *pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}", if all { "PASS" } else { "FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
