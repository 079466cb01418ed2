//! The `verify` harness: every property suite over a list of sizes, with a
//! per-suite generator derived from the run seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use kyfan_core::analyzer::{decompose, test_preservation, Classification, Direction, MatrixLinearMap};
use kyfan_core::cone::{
    cone_classify, cone_span_dim, pert_classify, pert_empirical_dim, s_set_analytic_dim, s_set_membership,
    s_set_sample, s_set_span_dim, sample_boundary, sample_cone_point, sample_interior, trace_cone_witness,
    ConeStatus, PertKind, SSet,
};
use kyfan_core::isometry::{l_map, random_isometry, Exceptional};
use kyfan_core::kyfan::{
    has_structural_gap, kyfan, parallel, sample_parallel_pair, sample_triangle_pair, structural_test,
    triangle_equality,
};
use kyfan_core::numerics::{hermitian_eigen, random, singular_values};
use kyfan_core::span::{
    analytic_dim, block_swap, empirical_span_dim, lower_bound_dim, real_span_rank, spans_equal, SpectralProfile,
};
use kyfan_core::trunc_euclid::demo_report;
use kyfan_core::{Error, Field, Mat, Tolerances, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Wall-clock budget the harness is expected to meet on a laptop.
pub const RUNTIME_BUDGET_SECONDS: u64 = 300;

const MAX_WITNESSES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Size {
    pub field: Field,
    pub n: usize,
    pub k: usize,
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.field, self.n, self.k)
    }
}

impl FromStr for Size {
    type Err = String;

    /// `field:n:k`, with the field written `complex`, `real`, `c` or `r`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [f, n, k] = parts[..] else {
            return Err(format!("expected field:n:k, got {s:?}"));
        };
        let field = match f.to_ascii_lowercase().as_str() {
            "c" | "complex" => Field::Complex,
            "r" | "real" => Field::Real,
            other => return Err(format!("unknown field {other:?}")),
        };
        let n = n.parse().map_err(|_| format!("bad n in {s:?}"))?;
        let k = k.parse().map_err(|_| format!("bad k in {s:?}"))?;
        Ok(Size { field, n, k })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: Tolerances,
    /// Base sample count; each suite scales it to its own cost.
    pub samples: usize,
    pub sizes: Vec<Size>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tol: Tolerances::default(),
            samples: 20,
            sizes: default_sizes(),
        }
    }
}

pub fn default_sizes() -> Vec<Size> {
    [(Field::Complex, 3, 2), (Field::Complex, 4, 2), (Field::Real, 4, 2), (Field::Real, 5, 2)]
        .into_iter()
        .map(|(field, n, k)| Size { field, n, k })
        .collect()
}

impl RunConfig {
    pub fn validate(&self) -> kyfan_core::Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("at least one size is required".into()));
        }
        if let Some(s) = self.sizes.iter().find(|s| !(1 <= s.k && s.k <= s.n && s.n <= 8)) {
            return Err(Error::Config(format!("size {s} needs 1 <= k <= n <= 8")));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        self.tol.validate()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub samples: usize,
    pub worst_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub claim: &'static str,
    pub pass: bool,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Value>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub sizes: Vec<Size>,
    pub tolerances: Tolerances,
    pub suites: Vec<SuiteReport>,
    pub runtime_budget_seconds: u64,
    pub pass: bool,
}

/// Running tally of one suite.
#[derive(Default)]
struct Tally {
    samples: usize,
    worst: f64,
    failed: bool,
    witnesses: Vec<Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, residual: f64, witness: impl FnOnce() -> Value) {
        self.samples += 1;
        if residual.is_finite() {
            self.worst = self.worst.max(residual);
        }
        if !ok {
            self.failed = true;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }
}

type SuiteFn = fn(&RunConfig, &mut ChaCha8Rng, &mut Tally) -> kyfan_core::Result<()>;

struct Suite {
    name: &'static str,
    claim: &'static str,
    run: SuiteFn,
}

const SUITES: [Suite; 12] = [
    Suite {
        name: "norm-axioms",
        claim: "the Ky-Fan k-norm is a norm, increases with k and equals the sum of the top k dilation eigenvalues",
        run: norm_axioms,
    },
    Suite {
        name: "parallel-oracle",
        claim: "the parallelism decision agrees with a brute-force unit-circle grid and with the structural test",
        run: parallel_oracle,
    },
    Suite {
        name: "span-dimension",
        claim: "with a gap at k, Span P(A) has dimension k^2+(n-k)^2 over C and k(k+1)/2+(n-k)^2 over R",
        run: span_dimension,
    },
    Suite {
        name: "span-corollaries",
        claim: "Span P(A) depends only on the singular frame, is minimal exactly with a gap, and the block swap separates the fields",
        run: span_corollaries,
    },
    Suite {
        name: "cone",
        claim: "the block cone is convex, spans its stated hull and is contained in P(A) for interior A",
        run: cone_suite,
    },
    Suite {
        name: "pert",
        claim: "a boundary point has one-dimensional Pert exactly when it is rank-one psd or a(I_k + P)",
        run: pert_suite,
    },
    Suite {
        name: "s-sets",
        claim: "the special boundary sets span their stated dimensions and are invariant under block unitary maps",
        run: s_sets,
    },
    Suite {
        name: "trace-cone",
        claim: "A is singular exactly when a convex cone through A of parallel matrices exists for the trace norm",
        run: trace_cone,
    },
    Suite {
        name: "exceptional-map",
        claim: "the real 4x4 map L is a Ky-Fan 2 isometric involution that maps det -1 orthogonal matrices among themselves",
        run: exceptional_map,
    },
    Suite {
        name: "form-preservation",
        claim: "isometry forms scale the norm and map parallel pairs to parallel pairs",
        run: form_preservation,
    },
    Suite {
        name: "analyzer",
        claim: "random preservers decompose back into their forms and diagonal scalings are rejected with a witness",
        run: analyzer_suite,
    },
    Suite {
        name: "trunc-euclid",
        claim: "for the truncated Euclidean norm one-directional preservation does not force an isometry multiple",
        run: trunc_euclid,
    },
];

/// FNV-1a over the run seed and the suite name.
pub fn suite_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(name.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn verify(cfg: &RunConfig) -> kyfan_core::Result<VerifyReport> {
    cfg.validate()?;
    let suites: Vec<SuiteReport> = SUITES
        .par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(suite_seed(cfg.seed, s.name));
            let mut tally = Tally::default();
            if let Err(e) = (s.run)(cfg, &mut rng, &mut tally) {
                tally.failed = true;
                tally.witnesses.push(json!({ "error": e.to_string() }));
            }
            SuiteReport {
                name: s.name,
                claim: s.claim,
                pass: !tally.failed && tally.samples > 0,
                stats: Stats {
                    samples: tally.samples,
                    worst_residual: tally.worst,
                },
                witnesses: tally.witnesses,
            }
        })
        .collect();
    Ok(VerifyReport {
        seed: cfg.seed,
        samples: cfg.samples,
        sizes: cfg.sizes.clone(),
        tolerances: cfg.tol,
        pass: suites.iter().all(|s| s.pass),
        suites,
        runtime_budget_seconds: RUNTIME_BUDGET_SECONDS,
    })
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / (1.0 + want.abs())
}

fn with_singular_values(rng: &mut ChaCha8Rng, field: Field, s: &[f64]) -> Mat {
    let u = random::haar(rng, field, s.len());
    let v = random::haar(rng, field, s.len());
    &(&u * &Mat::diag(field, s)) * &v.adjoint()
}

/// Singular values as the positive eigenvalues of `[[0, A], [A*, 0]]`.
fn dilation_singular_values(a: &Mat) -> kyfan_core::Result<Vec<f64>> {
    let n = a.n();
    let adj = a.adjoint();
    let h = Mat::from_fn(a.field(), 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a.get(i, j - n),
        (false, true) => adj.get(i - n, j),
        _ => C64::new(0.0, 0.0),
    });
    Ok(hermitian_eigen(&h)?.values[..n].iter().map(|v| v.max(0.0)).collect())
}

fn norm_axioms(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        for _ in 0..cfg.samples {
            let a = random::gaussian(rng, field, n);
            let b = random::gaussian(rng, field, n);
            let c = rng.random_range(-5.0..5.0);
            let (na, nb) = (kyfan(&a, k)?, kyfan(&b, k)?);
            let oracle: f64 = dilation_singular_values(&a)?[..k].iter().sum();
            let err = rel(na, oracle);
            let sum = kyfan(&(&a + &b), k)?;
            let scaled = kyfan(&a.scale_real(c), k)?;
            let mono = k == n || kyfan(&a, k + 1)? >= na;
            let ok = err <= 1e-10
                && sum <= na + nb + 1e-12 * (1.0 + na + nb)
                && rel(scaled, c.abs() * na) <= 1e-12
                && mono;
            t.check(ok, err, || json!({"size": sz.to_string(), "norm": na, "oracle": oracle, "sum": sum, "bound": na + nb}));
        }
    }
    Ok(())
}

/// Grid decision with the Lipschitz margin `‖B‖·h`; over ℝ the only units
/// are ±1 and the evaluation is exact.
fn brute_parallel(a: &Mat, b: &Mat, k: usize, tol: &Tolerances) -> kyfan_core::Result<bool> {
    const POINTS: usize = 2048;
    let nb = kyfan(b, k)?;
    let bound = kyfan(a, k)? + nb;
    let (units, margin): (Vec<C64>, f64) = match a.field() {
        Field::Real => (vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)], 0.0),
        Field::Complex => (
            (0..POINTS)
                .map(|i| C64::from_polar(1.0, 2.0 * PI * i as f64 / POINTS as f64))
                .collect(),
            nb * PI / POINTS as f64,
        ),
    };
    let mut best = f64::NEG_INFINITY;
    for mu in units {
        best = best.max(kyfan(&(a + &b.scale(mu)), k)?);
    }
    Ok(bound - best <= tol.tau_par * (1.0 + bound) + margin)
}

fn parallel_oracle(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        for i in 0..cfg.samples {
            let constructed = i % 2 == 0;
            let (a, b) = if constructed {
                let p = sample_parallel_pair(rng, n, k, field)?;
                (p.a, p.b)
            } else {
                (random::gaussian(rng, field, n), random::gaussian(rng, field, n))
            };
            let cert = parallel(&a, &b, k, tol)?;
            let brute = brute_parallel(&a, &b, k, tol)?;
            let structural = if has_structural_gap(&singular_values(&a)?, k, tol) {
                Some(structural_test(&a, &b, k, tol)?.parallel)
            } else {
                None
            };
            let ok = cert.parallel == brute
                && (!constructed || cert.parallel)
                && structural.is_none_or(|s| s == cert.parallel);
            let residual = if cert.parallel { cert.gap.max(0.0) / (1.0 + cert.bound) } else { 0.0 };
            t.check(ok, residual, || {
                json!({"size": sz.to_string(), "constructed": constructed, "decision": cert.parallel, "grid": brute, "structural": structural, "gap": cert.gap})
            });
        }
    }
    Ok(())
}

fn span_samples(n: usize) -> usize {
    3 * n * n + 10
}

fn span_dimension(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let per_size = (cfg.samples / 4).max(2);
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        let want = analytic_dim(field, n, k);
        for _ in 0..per_size {
            let s = random::descending(rng, n, 0.5, 4.0);
            let a = with_singular_values(rng, field, &s);
            let gap = SpectralProfile::of(&a, k, &cfg.tol)?.gap_at_k;
            let got = empirical_span_dim(&a, k, rng, span_samples(n), &cfg.tol)?;
            t.check(gap && got == want, got.abs_diff(want) as f64, || {
                json!({"size": sz.to_string(), "empirical": got, "analytic": want})
            });
        }
    }
    Ok(())
}

fn span_corollaries(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        let u = random::haar(rng, field, n);
        let v = random::haar(rng, field, n);
        let frame = |s: &[f64]| &(&u * &Mat::diag(field, s)) * &v.adjoint();
        if k < n {
            // same frame, different singular values: equal spans
            let a = frame(&random::descending(rng, n, 0.5, 4.0));
            let b = frame(&random::descending(rng, n, 0.5, 4.0));
            let same = spans_equal(&a, &b, k, tol)?;
            t.check(same.equal, same.residual, || json!({"size": sz.to_string(), "case": "shared frame"}));

            // a random rotation of the left frame moves the span
            let w = random::haar(rng, field, n);
            let moved = spans_equal(&a, &(&w * &a), k, tol)?;
            t.check(!moved.equal, 0.0, || json!({"size": sz.to_string(), "case": "rotated frame"}));

            // a tie at k strictly enlarges the span
            let mut s = random::descending(rng, n, 0.5, 4.0);
            s[k] = s[k - 1];
            let tied = frame(&s);
            let q = SpectralProfile::of(&tied, k, tol)?.q;
            let got = empirical_span_dim(&tied, k, rng, span_samples(n), tol)?;
            let lower = lower_bound_dim(field, n, k, q);
            t.check(got >= lower && got > analytic_dim(field, n, k), 0.0, || {
                json!({"size": sz.to_string(), "case": "tie", "empirical": got, "lowerBound": lower})
            });
        }
        if n == 2 * k {
            let a = Mat::diag(field, &random::descending(rng, n, 0.5, 4.0));
            let j = block_swap(field, k);
            let swapped = spans_equal(&a, &(&(&j * &a) * &j), k, tol)?;
            let expect = field == Field::Complex;
            t.check(swapped.equal == expect, 0.0, || {
                json!({"size": sz.to_string(), "case": "block swap", "equal": swapped.equal, "expected": expect})
            });
        }
    }
    Ok(())
}

fn cone_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        let interior = sample_interior(rng, field, n, k);
        for _ in 0..cfg.samples {
            let x = sample_cone_point(rng, field, n, k);
            let y = sample_cone_point(rng, field, n, k);
            let s = rng.random_range(0.0..=1.0);
            let mix = &x.scale_real(s) + &y.scale_real(1.0 - s);
            let c = cone_classify(&mix, n, k, tol)?;
            t.check(c.in_cone(), (-c.slack).max(0.0), || {
                json!({"size": sz.to_string(), "case": "convexity", "slack": c.slack})
            });
            let p = parallel(&interior, &x, k, tol)?;
            t.check(p.parallel, p.gap.max(0.0) / (1.0 + p.bound), || {
                json!({"size": sz.to_string(), "case": "interior point parallel to the cone", "gap": p.gap})
            });
        }
        let want = cone_span_dim(field, n, k);
        let pts: Vec<Mat> = (0..2 * want + 10).map(|_| sample_cone_point(rng, field, n, k)).collect();
        let got = real_span_rank(&pts, tol.tau_rank);
        t.check(got == want, got.abs_diff(want) as f64, || {
            json!({"size": sz.to_string(), "case": "affine hull", "empirical": got, "analytic": want})
        });

        let examples = [
            (Mat::direct_sum(&Mat::identity(field, k), &Mat::zeros(field, n - k)), ConeStatus::Interior),
            (Mat::unit(field, n, 0, 0), if k >= 2 { ConeStatus::Boundary } else { ConeStatus::Interior }),
            (Mat::identity(field, n).scale_real(-1.0), ConeStatus::Outside),
        ];
        for (x, expect) in examples {
            let c = cone_classify(&x, n, k, tol)?;
            t.check(c.status == expect, 0.0, || {
                json!({"size": sz.to_string(), "case": "example", "status": c.status, "expected": expect})
            });
        }
    }
    Ok(())
}

fn pert_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    let per_class = (cfg.samples / 2).max(2);
    for &sz in cfg.sizes.iter().filter(|s| s.k < s.n && s.k >= 2) {
        let Size { field, n, k } = sz;
        for class in 0..3 {
            for _ in 0..per_class {
                let x = match class {
                    0 => s_set_sample(rng, SSet::S1, n, k, field)?,
                    1 => s_set_sample(rng, SSet::SU, n, k, field)?,
                    _ => sample_boundary(rng, field, n, k),
                };
                let kind = pert_classify(&x, n, k, tol)?.kind;
                let dim = pert_empirical_dim(&x, n, k, rng, 6, tol)?;
                let expected = [PertKind::RankOnePsd, PertKind::ScaledUnitaryTail, PertKind::Generic][class];
                let ok = (kind != PertKind::Generic) == (dim == 1) && kind == expected;
                t.check(ok, 0.0, || json!({"size": sz.to_string(), "kind": kind, "expected": expected, "dim": dim}));
            }
        }
    }
    Ok(())
}

fn sets_for(field: Field) -> &'static [SSet] {
    match field {
        Field::Complex => &[SSet::S1, SSet::SU],
        Field::Real => &[SSet::S1, SSet::SPlus, SSet::SMinus, SSet::SU],
    }
}

/// `c(U₁ ⊕ V₂) X (U₁* ⊕ W₂)` with Haar blocks; over ℝ the tail factors share
/// a determinant so the sign of `det P` is kept.
fn block_map(rng: &mut ChaCha8Rng, x: &Mat, k: usize) -> Mat {
    let (field, n) = (x.field(), x.n());
    let m = n - k;
    let u1 = random::haar(rng, field, k);
    let (v2, w2) = match field {
        Field::Complex => (random::haar(rng, field, m), random::haar(rng, field, m)),
        Field::Real => {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (random::orthogonal_with_det(rng, m, sign), random::orthogonal_with_det(rng, m, sign))
        }
    };
    let c = random::log_uniform(rng, 0.5, 2.0);
    let left = Mat::direct_sum(&u1, &v2);
    let right = Mat::direct_sum(&u1.adjoint(), &w2);
    (&(&left * x) * &right).scale_real(c)
}

fn s_sets(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in cfg.sizes.iter().filter(|s| s.k < s.n) {
        let Size { field, n, k } = sz;
        for &which in sets_for(field) {
            let want = s_set_analytic_dim(which, n, k, field)?;
            let got = s_set_span_dim(which, n, k, field, rng, 2 * n * n + 10)?;
            t.check(got == want, got.abs_diff(want) as f64, || {
                json!({"size": sz.to_string(), "set": which, "empirical": got, "analytic": want})
            });
            for _ in 0..cfg.samples.div_ceil(4) {
                let x = s_set_sample(rng, which, n, k, field)?;
                let before = s_set_membership(&x, n, k, tol)?;
                let after = s_set_membership(&block_map(rng, &x, k), n, k, tol)?;
                let in_set = match which {
                    SSet::SU => matches!(before, SSet::SU | SSet::SPlus | SSet::SMinus),
                    _ => before == which,
                };
                t.check(in_set && before == after, 0.0, || {
                    json!({"size": sz.to_string(), "set": which, "before": before, "after": after})
                });
            }
        }
    }
    Ok(())
}

fn trace_cone(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    let mut seen = Vec::new();
    for &sz in &cfg.sizes {
        if seen.contains(&(sz.field, sz.n)) {
            continue;
        }
        seen.push((sz.field, sz.n));
        let Size { field, n, .. } = sz;
        for singular in [true, false] {
            for _ in 0..cfg.samples.div_ceil(4) {
                let mut s = random::descending(rng, n, 0.5, 3.0);
                if singular {
                    s[n - 1] = 0.0;
                }
                let a = with_singular_values(rng, field, &s);
                let w = trace_cone_witness(&a, rng, tol)?;
                let ok = w.singular == singular && w.witness().is_some() == singular && w.consistent();
                let residual = if singular { w.worst_gap.max(0.0) } else { 0.0 };
                t.check(ok, residual, || {
                    json!({"field": field, "n": n, "singular": singular, "candidatesFailed": w.candidates_failed, "candidates": w.candidates})
                });
            }
        }
    }
    Ok(())
}

fn exceptional_map(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let i2 = Mat::identity(Field::Real, 2);
    let i4 = Mat::identity(Field::Real, 4);
    for _ in 0..cfg.samples * 5 {
        let x = random::gaussian(rng, Field::Real, 4);
        let lx = l_map(&x)?;
        let inv = l_map(&lx)?.dist_max(&x);
        let iso = rel(kyfan(&lx, 2)?, kyfan(&x, 2)?);
        t.check(inv <= 1e-12 && iso <= 1e-10, inv.max(iso), || json!({"case": "involutive isometry", "involution": inv, "isometry": iso}));
    }
    for _ in 0..cfg.samples {
        let q = random::orthogonal_with_det(rng, 4, -1.0);
        let lq = l_map(&q)?;
        let r = (&lq.transpose() * &lq).dist_max(&i4).max((lq.determinant().re + 1.0).abs());
        t.check(r <= 1e-12, r, || json!({"case": "det -1 orthogonal set", "residual": r}));

        let v = random::unit_vector(rng, Field::Real, 2);
        let s = random::outer(Field::Real, &v, &v).scale_real(2.0);
        let y = l_map(&Mat::direct_sum(&s, &Mat::zeros(Field::Real, 2)))?;
        let tail = y.principal_block(2, 2);
        let r = Mat::direct_sum(&i2, &tail)
            .dist_max(&y)
            .max((&tail.transpose() * &tail).dist_max(&i2))
            .max((tail.determinant().re - 1.0).abs());
        t.check(r <= 1e-10, r, || json!({"case": "rank one onto I2 + SO(2)", "residual": r}));
    }
    Ok(())
}

fn form_preservation(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        for _ in 0..cfg.samples {
            let form = random_isometry(rng, n, k, field, true)?;
            form.validate(tol)?;
            let x = random::gaussian(rng, field, n);
            let scale = rel(kyfan(&form.apply(&x)?, k)?, form.gamma * kyfan(&x, k)?);
            let p = sample_parallel_pair(rng, n, k, field)?;
            let img = parallel(&form.apply(&p.a)?, &form.apply(&p.b)?, k, tol)?;
            let tri = sample_triangle_pair(rng, n, k, field)?;
            let tri_ok = triangle_equality(&form.apply(&tri.a)?, &form.apply(&tri.b)?, k, tol)?;
            t.check(scale <= 1e-10 && img.parallel && tri_ok, scale, || {
                json!({"size": sz.to_string(), "exceptional": form.exceptional, "scale": scale, "imageParallel": img.parallel})
            });
        }
    }
    Ok(())
}

fn analyzer_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let tol = &cfg.tol;
    for &sz in &cfg.sizes {
        let Size { field, n, k } = sz;
        for _ in 0..cfg.samples.div_ceil(2) {
            let form = random_isometry(rng, n, k, field, true)?;
            let map = MatrixLinearMap::from_form(&form)?;
            let rep = decompose(&map, k, rng, 6, tol)?;
            let expect = match form.exceptional {
                Exceptional::NoL => Classification::Standard,
                _ => Classification::ExceptionalL,
            };
            let res = rep.residual.unwrap_or(f64::INFINITY);
            t.check(rep.classification == expect && res <= 1e-8, res, || {
                json!({"size": sz.to_string(), "expected": expect, "got": rep.classification, "residual": rep.residual})
            });
        }
        if k < n {
            let mut d = vec![1.0; n];
            d[1] = 2.0;
            let dm = Mat::diag(field, &d);
            let map = MatrixLinearMap::from_fn(field, n, |x| Ok(&dm * x))?;
            let mut caught = false;
            for _ in 0..3 {
                let rep = test_preservation(&map, k, rng, 500, Direction::Forward, tol)?;
                if let Some(w) = rep.witness {
                    let pre = parallel(&w.a, &w.b, k, tol)?.parallel;
                    let img = parallel(&map.apply(&w.a)?, &map.apply(&w.b)?, k, tol)?.parallel;
                    caught = pre && !img;
                    if caught {
                        break;
                    }
                }
            }
            t.check(caught, 0.0, || json!({"size": sz.to_string(), "case": "diagonal scaling not rejected"}));
        }
    }
    Ok(())
}

fn trunc_euclid(cfg: &RunConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> kyfan_core::Result<()> {
    let rep = demo_report(rng, (cfg.samples * 50).max(1000), cfg.tol.tau_par)?;
    let r = rep.t2_isometry.ratio_diagonal;
    t.check(rep.pass, 0.0, || json!({"t1ForwardPass": rep.t1_forward.pass, "pinned": rep.t1_pinned_witness_holds, "t2Ratio": r, "gridDisagreements": rep.grid.disagreements}));
    Ok(())
}
