//! One function per subcommand. Each returns the JSON report, whether it
//! counts as a pass for the exit code, and a one-line summary for stderr.

use std::path::Path;

use kyfan_core::analyzer::{decompose, test_triangle_mode};
use kyfan_core::cone::{cone_classify, pert_classify, pert_empirical_dim, s_set_membership};
use kyfan_core::kyfan::{kyfan, parallel_with_mode, Mode};
use kyfan_core::numerics::singular_values;
use kyfan_core::span::{analytic_dim, empirical_span_dim, lower_bound_dim, SpectralProfile};
use kyfan_core::trunc_euclid::demo_report;
use kyfan_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::{read_map, read_mat};
use crate::CliResult;

pub struct Outcome {
    pub value: Value,
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    fn ok(value: Value, summary: String) -> Self {
        Self {
            value,
            pass: true,
            summary,
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn norm(a: &Path, k: usize) -> CliResult<Outcome> {
    let m = read_mat(a)?;
    let v = kyfan(&m, k)?;
    let s = singular_values(&m)?;
    Ok(Outcome::ok(
        json!({"field": m.field(), "n": m.n(), "k": k, "norm": v, "singularValues": s}),
        format!("Ky-Fan {k}-norm = {v}"),
    ))
}

pub fn parallel(a: &Path, b: &Path, k: usize, mode: Mode, tol: &Tolerances) -> CliResult<Outcome> {
    let (ma, mb) = (read_mat(a)?, read_mat(b)?);
    let cert = parallel_with_mode(&ma, &mb, k, tol, mode)?;
    let summary = format!(
        "{} (gap {:e}, {:?}, {} evaluations)",
        if cert.parallel { "parallel" } else { "not parallel" },
        cert.gap,
        cert.method,
        cert.evaluations
    );
    Ok(Outcome::ok(to_value(&cert), summary))
}

pub fn span_dim(a: &Path, k: usize, empirical: Option<usize>, seed: u64, tol: &Tolerances) -> CliResult<Outcome> {
    let m = read_mat(a)?;
    let profile = SpectralProfile::of(&m, k, tol)?;
    let n = m.n();
    let analytic = profile.gap_at_k.then(|| analytic_dim(m.field(), n, k));
    let lower = lower_bound_dim(m.field(), n, k, profile.q);
    let emp = match empirical {
        Some(samples) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Some(empirical_span_dim(&m, k, &mut rng, samples, tol)?)
        }
        None => None,
    };
    let summary = match (analytic, emp) {
        (Some(d), Some(e)) => format!("dim Span P(A) = {d} (empirical {e})"),
        (Some(d), None) => format!("dim Span P(A) = {d}"),
        (None, Some(e)) => format!("no gap at k; dimension at least {lower} (empirical {e})"),
        (None, None) => format!("no gap at k; dimension at least {lower}"),
    };
    Ok(Outcome::ok(
        json!({
            "field": m.field(),
            "n": n,
            "k": k,
            "analytic": analytic,
            "lowerBound": lower,
            "empirical": emp,
            "profile": {"p": profile.p, "q": profile.q, "gapAtK": profile.gap_at_k, "s": profile.s},
        }),
        summary,
    ))
}

pub fn cone_classify_cmd(x: &Path, k: usize, tol: &Tolerances) -> CliResult<Outcome> {
    let m = read_mat(x)?;
    let c = cone_classify(&m, m.n(), k, tol)?;
    let summary = format!("{:?} (slack {:e})", c.status, c.slack);
    Ok(Outcome::ok(to_value(&c), summary))
}

pub fn pert(x: &Path, k: usize, samples: usize, seed: u64, tol: &Tolerances) -> CliResult<Outcome> {
    let m = read_mat(x)?;
    let n = m.n();
    let mut c = pert_classify(&m, n, k, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    c.dim_estimate = Some(pert_empirical_dim(&m, n, k, &mut rng, samples, tol)?);
    let summary = format!("{:?}, empirical Pert dimension {}", c.kind, c.dim_estimate.unwrap_or(0));
    Ok(Outcome::ok(to_value(&c), summary))
}

pub fn sset(x: &Path, k: usize, tol: &Tolerances) -> CliResult<Outcome> {
    let m = read_mat(x)?;
    let which = s_set_membership(&m, m.n(), k, tol)?;
    Ok(Outcome::ok(
        json!({"field": m.field(), "n": m.n(), "k": k, "membership": which}),
        format!("membership {which:?}"),
    ))
}

pub fn analyze_map(
    t: &Path,
    k: usize,
    samples: usize,
    seed: u64,
    triangle_only: bool,
    tol: &Tolerances,
) -> CliResult<Outcome> {
    let map = read_map(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if triangle_only {
        let r = test_triangle_mode(&map, k, &mut rng, samples, tol)?;
        let summary = format!(
            "triangle-equality pairs {} over {} samples",
            if r.pass { "preserved" } else { "not preserved" },
            r.samples
        );
        return Ok(Outcome {
            pass: r.pass,
            value: json!({"mode": "triangle", "triangle": r}),
            summary,
        });
    }
    let rep = decompose(&map, k, &mut rng, samples, tol)?;
    let summary = match rep.residual {
        Some(r) => format!("{:?} (residual {r:e})", rep.classification),
        None => format!("{:?}", rep.classification),
    };
    Ok(Outcome {
        pass: rep.is_preserver(),
        value: to_value(&rep),
        summary,
    })
}

pub fn tre_demo(seed: u64, samples: usize, tol: &Tolerances) -> CliResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = demo_report(&mut rng, samples, tol.tau_par)?;
    let summary = format!(
        "T1 one-directional: {}; T2 not an isometry multiple: {}",
        rep.t1_forward.pass && rep.t1_pinned_witness_holds,
        !rep.t2_isometry.multiple_of_isometry
    );
    Ok(Outcome {
        pass: rep.pass,
        value: to_value(&rep),
        summary,
    })
}
