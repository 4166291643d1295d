use std::path::PathBuf;
use std::process::ExitCode;

use accel_jacobi::SolverConfig;
use accel_jacobi_bench::{
    run_benchmark, BenchSpec, InstanceSource, JKind, RhsSpec, SolverKind,
};
use anyhow::Context;
use clap::{ArgGroup, Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

/// Runs Jacobi-type solvers, CG and PCG on one linear system and writes
/// per-iteration CSV traces plus a JSON-lines summary.
#[derive(Debug, Parser)]
#[command(name = "accjacobi-bench", version)]
#[command(group(ArgGroup::new("input").required(true).args(["matrix", "graph", "gen"])))]
struct Cli {
    /// Matrix Market coordinate file (real, symmetric or general).
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,

    /// Edge list (`n m` header, 0-based `i j` lines); solves with its Laplacian.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,

    /// Generated instance, `sdd:<n>`.
    #[arg(long, value_name = "SPEC")]
    gen: Option<InstanceSource>,

    /// `ones` or `consistent:<seed>`.
    #[arg(long, value_name = "RHS")]
    rhs: Option<RhsSpec>,

    /// jacobi | wjacobi[:<omega>|:opt] | cg | pcg | accjacobi. Repeatable.
    #[arg(long = "solver", value_name = "SOLVER")]
    solvers: Vec<SolverKind>,

    /// Adaptive restart of the accelerated solver.
    #[arg(long, value_enum, default_value = "on")]
    restart: OnOff,

    /// Initial restart prohibition length.
    #[arg(long, default_value_t = 2)]
    k0: usize,

    /// Proximal matrix: `diag` or `block`.
    #[arg(long = "j", default_value = "diag")]
    j_kind: JKind,

    /// Row blocks for the accelerated update (and for block J).
    #[arg(long, default_value_t = 1)]
    partitions: usize,

    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    #[arg(long, default_value_t = 5000)]
    maxiter: usize,

    /// Output directory for traces and summary.jsonl.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,

    /// Seed of the consistent right-hand side when `--rhs` is not given.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Check that J − Q is positive semidefinite.
    #[arg(long)]
    verify_s: bool,

    /// Check accelerated traces against their convergence bound.
    #[arg(long)]
    verify_bounds: bool,
}

impl Cli {
    fn into_spec(self) -> BenchSpec {
        let source = match (self.matrix, self.graph, self.gen) {
            (Some(p), _, _) => InstanceSource::Matrix(p),
            (_, Some(p), _) => InstanceSource::Graph(p),
            (_, _, Some(g)) => g,
            _ => unreachable!("clap enforces one input"),
        };
        let solvers = if self.solvers.is_empty() {
            BenchSpec::default_solvers(&source)
        } else {
            self.solvers
        };
        let mut spec = BenchSpec::new(source, self.out);
        spec.rhs = self.rhs;
        spec.solvers = solvers;
        spec.config = SolverConfig::default()
            .with_tol(self.tol)
            .with_maxiter(self.maxiter);
        spec.j_kind = self.j_kind;
        spec.partitions = self.partitions;
        spec.restart = matches!(self.restart, OnOff::On);
        spec.k0 = self.k0;
        spec.seed = self.seed;
        spec.verify_s = self.verify_s;
        spec.verify_bounds = self.verify_bounds;
        spec
    }
}

fn main() -> anyhow::Result<ExitCode> {
    let spec = Cli::parse().into_spec();
    let outcome = run_benchmark(&spec).context("benchmark failed")?;

    let inst = &outcome.instance;
    println!(
        "instance {} (n = {}, nnz = {}, load imbalance {:.3} at s = {}, {:.3} at 64-way)",
        inst.label, inst.n, inst.nnz, inst.load_imbalance, inst.partitions, inst.load_imbalance_64
    );
    for w in &inst.warnings {
        eprintln!("warning: {w}");
    }
    for r in &outcome.solvers {
        match &r.error {
            Some(e) => println!("{:<22} Error: {e}", r.solver),
            None => println!(
                "{:<22} {:<15} iters {:>6}  residual {:.3e}  {:.3}s",
                r.solver,
                r.status,
                r.iterations.unwrap_or(0),
                r.final_residual.unwrap_or(f64::NAN),
                r.wall_time_s
            ),
        }
    }
    for v in &outcome.verifications {
        let what = match (&v.solver, &v.mode) {
            (Some(s), Some(m)) => format!("{} [{s}, {m}]", v.check),
            (Some(s), None) => format!("{} [{s}]", v.check),
            _ => v.check.to_string(),
        };
        let verdict = if v.passed { "pass" } else { "FAIL" };
        match (&v.error, v.value) {
            (Some(e), _) => println!("verify {what}: {verdict} ({e})"),
            (None, Some(val)) => println!(
                "verify {what}: {verdict} (value {val:.3e}, threshold {:.3e})",
                v.threshold.unwrap_or(f64::NAN)
            ),
            (None, None) => println!("verify {what}: {verdict}"),
        }
    }
    println!("summary written to {}", outcome.summary_path.display());

    Ok(if outcome.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
