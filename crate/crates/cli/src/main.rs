//! Command-line front end: construct family members, compute certified
//! spectral radii, enumerate diameter classes and run verification sweeps.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or parameter error,
//! 3 input-data error. Stdout and report files are byte-identical across
//! reruns with the same flags (at any worker count); timings go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use disterex_core::enumerate::{all_trees, trees_with_diameter, EnumerateError, TreeCache};
use disterex_core::exec::Parallelism;
use disterex_core::families::{Family, FamilyError, FamilySpec};
use disterex_core::graph::{Graph, GraphError, GraphJson};
use disterex_core::spectral::{spectral_radius, SolverConfig};
use disterex_core::verify::{self, TheoremSweep, VerificationReport, VerifyError};

/// Seed used by the randomized sweeps unless `--seed` overrides it.
const DEFAULT_SEED: u64 = 1729;

#[derive(Parser)]
#[command(
    name = "disterex",
    version,
    about = "Distance spectral radius toolkit for trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Residual tolerance of the eigensolver.
    #[arg(long, global = true, env = "DISTEREX_TOL")]
    tol: Option<f64>,

    /// Iteration budget of the eigensolver.
    #[arg(long, global = true)]
    max_iterations: Option<usize>,

    /// Seed for the randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cache directory for enumerated diameter classes.
    #[arg(long, global = true, env = "DISTEREX_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads for the sweeps (default: all logical CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named family member and print it as JSON or DOT.
    Construct {
        /// t1, t2, path or star.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Half-diameter parameter; required for t1 and t2.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certified spectral radius of a graph JSON file.
    Rho { file: PathBuf },
    /// Run a verification check and write its report.
    Verify {
        /// lemma2.1, lemma2.2, lemma2.3, lemma2.4, lemma3.1 or theorem.
        target: String,
        #[arg(long)]
        n_max: Option<usize>,
        /// Single-instance order (lemma2.3 / lemma2.4).
        #[arg(long)]
        n: Option<usize>,
        /// Single-instance half-diameter (lemma2.3 / lemma2.4).
        #[arg(long)]
        k: Option<usize>,
        /// Instance count for the seeded sweeps.
        #[arg(long)]
        instances: Option<usize>,
        /// Write the report JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the per-class CSV summary here (theorem only).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List or count non-isomorphic trees.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Restrict to one diameter class.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

struct RunConfig {
    solver: SolverConfig,
    seed: u64,
    cache: Option<TreeCache>,
    parallelism: Parallelism,
}

/// Error already sorted into an exit class.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn param(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        CliError::param(e.to_string())
    }
}

impl From<EnumerateError> for CliError {
    fn from(e: EnumerateError) -> Self {
        match e {
            EnumerateError::Io(_) | EnumerateError::Format(_) => CliError::input(e.to_string()),
            _ => CliError::param(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::BadParameters(_)
            | VerifyError::MissingLabel { .. }
            | VerifyError::Family(_) => CliError::param(e.to_string()),
            VerifyError::Enumerate(inner) => inner.into(),
            VerifyError::Indistinguishable { .. } => CliError {
                code: 1,
                message: e.to_string(),
            },
            VerifyError::Graph(_) | VerifyError::Spectral(_) => CliError::input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = RunConfig {
        solver: SolverConfig {
            tolerance: cli.tol.unwrap_or(SolverConfig::default().tolerance),
            max_iterations: cli
                .max_iterations
                .unwrap_or(SolverConfig::default().max_iterations),
        },
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        cache: cli.cache_dir.map(TreeCache::new),
        parallelism: match cli.jobs {
            Some(k) => Parallelism::Threads(k.max(1)),
            None => Parallelism::available(),
        },
    };
    let outcome = match cli.command {
        Command::Construct {
            family,
            n,
            k,
            format,
            output,
        } => cmd_construct(&family, n, k, format, output.as_deref()),
        Command::Rho { file } => cmd_rho(&file, &run),
        Command::Verify {
            target,
            n_max,
            n,
            k,
            instances,
            report,
            csv,
        } => cmd_verify(
            &target,
            n_max,
            n,
            k,
            instances,
            report.as_deref(),
            csv.as_deref(),
            &run,
        ),
        Command::Enumerate { n, d, count_only } => cmd_enumerate(n, d, count_only, &run),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn cmd_construct(
    family: &str,
    n: usize,
    k: Option<usize>,
    format: GraphFormat,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    let family: Family = family.parse()?;
    let k = match family {
        Family::T1 | Family::T2 => {
            k.ok_or_else(|| CliError::param("--k is required for t1 and t2"))?
        }
        Family::Path | Family::Star => k.unwrap_or(0),
    };
    let g = FamilySpec { family, n, k }.build()?;
    let text = match format {
        GraphFormat::Json => {
            let mut s = serde_json::to_string(&g.to_json()).expect("graph serializes");
            s.push('\n');
            s
        }
        GraphFormat::Dot => g.to_dot(),
    };
    emit(output, &text)?;
    Ok(0)
}

fn cmd_rho(file: &Path, run: &RunConfig) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let json: GraphJson = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let g = Graph::from_json(&json).map_err(|e| CliError::input(e.to_string()))?;
    let matrix = g.distance_matrix().map_err(|e| match e {
        GraphError::NotConnected => CliError::input("not connected"),
        other => CliError::input(other.to_string()),
    })?;
    let r = spectral_radius(&matrix, &run.solver).map_err(|e| CliError::input(e.to_string()))?;
    println!("n: {}", g.order());
    println!("rho: {:.10}", r.rho);
    println!("bounds: [{:.12}, {:.12}]", r.lower, r.upper);
    let perron: Vec<String> = r.perron.iter().map(|v| format!("{v:.10}")).collect();
    println!("perron: [{}]", perron.join(", "));
    println!("residual: {:.3e}", r.residual);
    println!("iterations: {}", r.iterations);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    target: &str,
    n_max: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    instances: Option<usize>,
    report_path: Option<&Path>,
    csv_path: Option<&Path>,
    run: &RunConfig,
) -> Result<u8, CliError> {
    let cfg = &run.solver;
    let pll = run.parallelism;
    let cache = run.cache.as_ref();
    let started = std::time::Instant::now();
    let (report, cases): (VerificationReport, Option<Vec<verify::TheoremCase>>) = match target {
        "lemma2.1" => {
            let report = verify::check_lemma_2_1(
                run.seed,
                instances.unwrap_or(200),
                n_max.unwrap_or(9),
                cfg,
                pll,
            )?;
            (report, None)
        }
        "lemma2.2" => (verify::check_lemma_2_2(n_max.unwrap_or(9), cfg, pll)?, None),
        "lemma2.3" => match (n, k) {
            (Some(n), Some(k)) => (verify::check_lemma_2_3(n, k, cfg)?, None),
            (None, None) => (verify::lemma_2_3_sweep(cfg, pll)?, None),
            _ => {
                return Err(CliError::param(
                    "lemma2.3 needs both --n and --k, or neither for the full sweep",
                ))
            }
        },
        "lemma2.4" => match (n, k) {
            (Some(n), Some(k)) => (verify::check_lemma_2_4(n, k, cfg)?, None),
            (None, None) => (verify::lemma_2_4_sweep(cfg, pll)?, None),
            _ => {
                return Err(CliError::param(
                    "lemma2.4 needs both --n and --k, or neither for the full sweep",
                ))
            }
        },
        "lemma3.1" => {
            let report = verify::lemma_3_1_sweep(
                run.seed,
                instances.unwrap_or(100),
                n_max.unwrap_or(12),
                cfg,
                pll,
            )?;
            (report, None)
        }
        "theorem" => {
            let TheoremSweep { cases, report } =
                verify::theorem_sweep(n_max.unwrap_or(10), cache, cfg, pll)?;
            (report, Some(cases))
        }
        other => {
            return Err(CliError::param(format!(
                "unknown verify target {other:?} (expected lemma2.1, lemma2.2, lemma2.3, \
                 lemma2.4, lemma3.1 or theorem)"
            )))
        }
    };

    if let Some(cases) = &cases {
        print_theorem_table(cases);
        if let Some(path) = csv_path {
            std::fs::write(path, verify::theorem_csv(cases))
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        }
    } else if csv_path.is_some() {
        return Err(CliError::param(
            "--csv is only available for the theorem sweep",
        ));
    }
    print_report_summary(&report);
    if let Some(path) = report_path {
        std::fs::write(path, report.to_json_string())
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    eprintln!("completed in {} ms", started.elapsed().as_millis());
    Ok(if report.passed() { 0 } else { 1 })
}

fn print_theorem_table(cases: &[verify::TheoremCase]) {
    println!(
        "{:>3} {:>3} {:>6} {:>18} {:>13} {:>5}",
        "n", "d", "class", "min_rho", "gap", "ok"
    );
    for c in cases {
        println!(
            "{:>3} {:>3} {:>6} {:>18.10} {:>13} {:>5}",
            c.n,
            c.d,
            c.class_size,
            c.min_rho,
            c.gap
                .map(|g| format!("{g:.3e}"))
                .unwrap_or_else(|| "-".into()),
            if c.matches_expected { "yes" } else { "NO" }
        );
    }
}

fn print_report_summary(report: &VerificationReport) {
    println!("scope: {}", report.scope);
    println!("instances: {}", report.instances_checked);
    println!("failures: {}", report.failures.len());
    for f in &report.failures {
        println!("  - {}", f.detail);
    }
    match report.min_gap {
        Some(g) => println!("min_gap: {g:.6e}"),
        None => println!("min_gap: -"),
    }
    println!("result: {}", if report.passed() { "PASS" } else { "FAIL" });
}

fn cmd_enumerate(
    n: usize,
    d: Option<usize>,
    count_only: bool,
    run: &RunConfig,
) -> Result<u8, CliError> {
    let trees = match d {
        Some(d) => match &run.cache {
            Some(cache) => cache.class(n, d)?.members,
            None => trees_with_diameter(n, d)?.members,
        },
        None => all_trees(n)?,
    };
    if count_only {
        println!("{}", trees.len());
    } else {
        for g in &trees {
            println!(
                "{}",
                serde_json::to_string(&g.to_json()).expect("graph serializes")
            );
        }
    }
    Ok(0)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
