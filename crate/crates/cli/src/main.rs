use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kyfan_cli::commands::{self, Outcome};
use kyfan_cli::io::{emit, render};
use kyfan_cli::verify::{default_sizes, verify, RunConfig, Size};
use kyfan_cli::{CliError, CliResult};
use kyfan_core::kyfan::Mode;
use kyfan_core::Tolerances;

/// Ky-Fan k-norms, parallel pairs and the maps that preserve them.
#[derive(Parser)]
#[command(name = "kyfan", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Parallelism threshold τ_par.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Compact JSON and no summary on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KArg {
    /// Ky-Fan index.
    #[arg(long, short)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Search,
    Structural,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Search => Mode::Search,
            ModeArg::Structural => Mode::Structural,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Ky-Fan k-norm and singular values of a matrix.
    Norm {
        #[command(flatten)]
        k: KArg,
        a: PathBuf,
    },
    /// Decide whether two matrices are parallel.
    Parallel {
        #[command(flatten)]
        k: KArg,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },
    /// Dimension of the span of matrices parallel to A.
    SpanDim {
        #[command(flatten)]
        k: KArg,
        a: PathBuf,
        /// Also estimate the dimension by sampling.
        #[arg(long)]
        empirical: bool,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Block cone queries.
    Cone {
        #[command(subcommand)]
        query: ConeQuery,
    },
    /// Same as `cone pert`.
    Pert(PertArgs),
    /// Same as `cone sset`.
    Sset {
        #[command(flatten)]
        k: KArg,
        x: PathBuf,
    },
    /// Test and decompose a linear map given as an n²×n² matrix.
    AnalyzeMap {
        #[command(flatten)]
        k: KArg,
        t: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Only test pairs with ‖A+B‖ = ‖A‖+‖B‖.
        #[arg(long)]
        triangle_mode: bool,
    },
    /// Built-in counterexamples.
    Counterexample {
        #[arg(value_enum)]
        which: Counterexample,
        /// Run the demonstration maps (the only mode).
        #[arg(long)]
        demo: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Run every property suite and report.
    Verify {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Size as field:n:k, repeatable; defaults to c:3:2 c:4:2 r:4:2 r:5:2.
        #[arg(long = "size", value_name = "FIELD:N:K")]
        sizes: Vec<Size>,
    },
}

#[derive(Subcommand)]
enum ConeQuery {
    /// Interior, boundary or outside.
    Classify {
        #[command(flatten)]
        k: KArg,
        x: PathBuf,
    },
    /// Pert classification of a boundary point with an empirical dimension.
    Pert(PertArgs),
    /// Membership in the special boundary sets.
    Sset {
        #[command(flatten)]
        k: KArg,
        x: PathBuf,
    },
}

#[derive(Args)]
struct PertArgs {
    #[command(flatten)]
    k: KArg,
    x: PathBuf,
    #[arg(long, default_value_t = 40)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Counterexample {
    #[value(name = "trE", alias = "tre")]
    TrE,
}

fn tolerances(cli: &Cli) -> CliResult<Tolerances> {
    let tol = match cli.tol {
        Some(t) => Tolerances::default().with_par(t),
        None => Tolerances::default(),
    };
    tol.validate()?;
    Ok(tol)
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let tol = tolerances(cli)?;
    let seed = cli.seed;
    match &cli.command {
        Command::Norm { k, a } => commands::norm(a, k.k),
        Command::Parallel { k, a, b, mode } => commands::parallel(a, b, k.k, (*mode).into(), &tol),
        Command::SpanDim { k, a, empirical, samples } => {
            let emp = match (empirical, samples) {
                (false, Some(_)) => return Err(CliError::Usage("--samples needs --empirical".into())),
                (false, None) => None,
                (true, s) => {
                    let n = kyfan_cli::io::read_mat(a)?.n();
                    Some(s.unwrap_or(3 * n * n + 10))
                }
            };
            commands::span_dim(a, k.k, emp, seed, &tol)
        }
        Command::Cone { query } => match query {
            ConeQuery::Classify { k, x } => commands::cone_classify_cmd(x, k.k, &tol),
            ConeQuery::Pert(p) => commands::pert(&p.x, p.k.k, p.samples, seed, &tol),
            ConeQuery::Sset { k, x } => commands::sset(x, k.k, &tol),
        },
        Command::Pert(p) => commands::pert(&p.x, p.k.k, p.samples, seed, &tol),
        Command::Sset { k, x } => commands::sset(x, k.k, &tol),
        Command::AnalyzeMap { k, t, samples, triangle_mode } => {
            commands::analyze_map(t, k.k, *samples, seed, *triangle_mode, &tol)
        }
        Command::Counterexample { which: Counterexample::TrE, samples, .. } => commands::tre_demo(seed, *samples, &tol),
        Command::Verify { samples, sizes } => {
            let cfg = RunConfig {
                seed,
                tol,
                samples: *samples,
                sizes: if sizes.is_empty() { default_sizes() } else { sizes.clone() },
            };
            let start = Instant::now();
            let report = verify(&cfg)?;
            if !cli.json {
                for s in &report.suites {
                    eprintln!("{:<18} {}  ({} checks)", s.name, if s.pass { "pass" } else { "FAIL" }, s.stats.samples);
                }
            }
            eprintln!("runtime {:.1}s (budget {}s)", start.elapsed().as_secs_f64(), report.runtime_budget_seconds);
            let failed = report.suites.iter().filter(|s| !s.pass).count();
            Ok(Outcome {
                pass: report.pass,
                summary: format!("{} of {} suites pass", report.suites.len() - failed, report.suites.len()),
                value: serde_json::to_value(&report).expect("reports serialize"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| {
        emit(&render(&o.value, cli.json), cli.out.as_ref())?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            if !cli.json {
                eprintln!("{}", o.summary);
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
