//! `gyroproxy` command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commsim::{
    builtin_topology, plan_decomposition, predict_report, CommPlan, CommReport, MachineTopology,
    VolumeModel,
};
use crate::grid::{make_case, GridShape, Seed};
use crate::kernels::timing::{time_with_inputs, KernelInputs};
use crate::kernels::{KernelId, KernelVariant};
use crate::padding::{naive_plan, plan_padded_size, DealiasRule, PrimeSet};
use crate::report::{summarize, write_atomic, KernelReport, KernelRow, Metadata};
use crate::spectral::bench::{fft_bench, TransformEngine};
use crate::verify::run_verify;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_COVERAGE: i32 = 5;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  other failure (e.g. the state does not fit in memory)
  2  invalid arguments or configuration
  3  I/O failure
  4  verification failure
  5  report coverage mismatch in `compare`";

#[derive(Debug, Parser)]
#[command(name = "gyroproxy", version, about = "Gyrokinetic kernel proxy and performance toolkit", after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads for kernel parallelism (default: all cores).
    #[arg(long, global = true, env = "GYROPROXY_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print `n_logical,n_min,n_padded,factors,score` for one dimension.
    PlanPadding(PlanPaddingArgs),
    /// Time batched 1D transforms of the given sizes.
    FftBench(FftBenchArgs),
    /// Time kernel variants on a test case.
    Bench(BenchArgs),
    /// Run the equivalence and oracle suites.
    Verify(VerifyArgs),
    /// Predict per-step communication time for a rank grid.
    CommEstimate(CommArgs),
    /// Speedup table from two kernel reports.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct PlanPaddingArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value = "3/2")]
    pub rule: DealiasRule,
    #[arg(long, default_value = "2,3,5,7")]
    pub primes: PrimeSet,
    /// Use the round-up-to-even scheme instead of the smooth planner.
    #[arg(long)]
    pub naive: bool,
}

#[derive(Debug, Args)]
pub struct FftBenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "719,720")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 256)]
    pub batch: usize,
    #[arg(long, default_value_t = 9)]
    pub reps: usize,
    /// `fft` (mixed radix) or `oracle` (direct summation).
    #[arg(long, default_value = "fft")]
    pub transform: TransformEngine,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "sh03b-desk")]
    pub case: String,
    #[arg(long, value_delimiter = ',', default_value = "field,stream,shear,collision,nonlinear")]
    pub kernels: Vec<KernelId>,
    #[arg(long, value_delimiter = ',', default_value = "original,optimized")]
    pub variants: Vec<KernelVariant>,
    #[arg(long, default_value_t = 9)]
    pub reps: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print the table as Markdown.
    #[arg(long)]
    pub markdown: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "sh03b-desk")]
    pub case: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub markdown: bool,
}

#[derive(Debug, Args)]
pub struct CommArgs {
    #[arg(long, default_value = "sh03b")]
    pub case: String,
    /// Builtin topology name.
    #[arg(long, default_value = "perlmutter_like", conflicts_with = "topo_file")]
    pub topo: String,
    /// Topology file of `key=value` lines.
    #[arg(long)]
    pub topo_file: Option<PathBuf>,
    #[arg(long)]
    pub ranks: usize,
    #[arg(long)]
    pub nodes: usize,
    /// Fix the all-to-all group size instead of planning.
    #[arg(long, requires = "dim1_per_node")]
    pub n1: Option<usize>,
    /// All-to-all ranks per node when `--n1` is given.
    #[arg(long, requires = "n1")]
    pub dim1_per_node: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Report of the original runs.
    #[arg(long, requires = "after", conflicts_with = "report")]
    pub before: Option<PathBuf>,
    /// Report of the optimized runs.
    #[arg(long, requires = "before")]
    pub after: Option<PathBuf>,
    /// One report holding both variants.
    #[arg(long, required_unless_present = "before")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub markdown: bool,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Verification(_) => EXIT_VERIFY,
        Error::Coverage(_) => EXIT_COVERAGE,
        Error::Resource { .. } => EXIT_OTHER,
        Error::UnknownCase { .. }
        | Error::UnknownTopology { .. }
        | Error::Shape(_)
        | Error::Size(_)
        | Error::Domain(_)
        | Error::Parameter(_)
        | Error::Decomposition(_)
        | Error::Parse(_) => EXIT_USAGE,
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("gyroproxy: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Parameter("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::PlanPadding(a) => plan_padding(a),
        Command::FftBench(a) => fft_bench_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
        Command::CommEstimate(a) => comm_estimate(a),
        Command::Compare(a) => compare(a),
    }
}

/// Write to `out` atomically, or print to stdout.
fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn plan_padding(a: PlanPaddingArgs) -> Result<()> {
    if a.n == 0 {
        return Err(Error::Parameter("--n must be at least 1".into()));
    }
    let plan = if a.naive {
        naive_plan(a.n, a.rule)?
    } else {
        plan_padded_size(a.n, a.rule, &a.primes)?
    };
    println!("{}", plan.csv_row());
    Ok(())
}

fn fft_bench_cmd(a: FftBenchArgs) -> Result<()> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(Error::Parameter("--sizes must list positive sizes".into()));
    }
    if a.batch == 0 || a.reps == 0 {
        return Err(Error::Parameter("--batch and --reps must be positive".into()));
    }
    let rows = fft_bench(&a.sizes, a.batch, a.reps, a.transform)?;
    let mut csv = format!("{}\nsize,factors,median_seconds\n", Metadata::capture(None).line());
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    emit(a.out.as_deref(), &csv)?;
    if a.out.is_some() {
        for r in &rows {
            println!("{:>8}  {:<24} {:.4e} s", r.size, crate::padding::format_factors(&r.factors), r.median_seconds);
        }
    }
    Ok(())
}

fn case_shape(name: &str) -> Result<GridShape> {
    make_case(name)
}

fn bench(a: BenchArgs) -> Result<()> {
    let shape = case_shape(&a.case)?;
    if a.reps < 3 {
        return Err(Error::Parameter(format!("--reps must be at least 3, got {}", a.reps)));
    }
    if a.kernels.is_empty() || a.variants.is_empty() {
        return Err(Error::Parameter("--kernels and --variants must be nonempty".into()));
    }
    let inputs = KernelInputs::generate(shape, Seed(a.seed))?;
    let mut rows = Vec::new();
    for &k in &a.kernels {
        for &v in &a.variants {
            let t = time_with_inputs(k, v, &inputs, a.reps)?;
            rows.push(KernelRow::from_timing(&a.case, &t));
        }
    }
    let report = KernelReport {
        metadata: Metadata::capture(Some(a.seed)),
        rows,
    };
    emit(a.out.as_deref(), &report.to_csv())?;
    if a.markdown {
        print!("{}", report.to_markdown());
    } else if a.out.is_some() {
        for r in &report.rows {
            println!("{:<10} {:<10} median {:.4e} s  min {:.4e} s  {}", r.kernel, r.variant, r.median_s, r.min_s, r.checksum);
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let shape = case_shape(&a.case)?;
    let report = run_verify(&a.case, shape, a.seed)?;
    emit(a.out.as_deref(), &report.to_csv())?;
    if a.markdown || a.out.is_some() {
        print!("{}", report.to_markdown());
    }
    if !report.all_passed() {
        return Err(Error::Verification(format!("failed suites: {}", report.failures().join(", "))));
    }
    Ok(())
}

fn comm_estimate(a: CommArgs) -> Result<()> {
    let shape = case_shape(&a.case)?;
    let topo = match &a.topo_file {
        Some(p) => MachineTopology::from_file(p)?,
        None => builtin_topology(&a.topo)?,
    };
    if a.ranks == 0 || a.nodes == 0 {
        return Err(Error::Parameter("--ranks and --nodes must be positive".into()));
    }
    let vm = VolumeModel::from_shape(&shape);
    let plan = match (a.n1, a.dim1_per_node) {
        (Some(n1), Some(a1)) => {
            if n1 == 0 || a.ranks % n1 != 0 {
                return Err(Error::Decomposition(format!("--n1 {n1} does not divide {} ranks", a.ranks)));
            }
            CommPlan::new(n1, a.ranks / n1, a.nodes, a1)?
        }
        _ => plan_decomposition(&vm, a.ranks, a.nodes, &topo)?,
    };
    let report = predict_report(&vm, &topo, &plan)?;
    emit(a.out.as_deref(), &comm_csv(&report))?;
    if a.out.is_some() {
        println!("{} on {}: {}", a.case, topo.name, plan);
        for r in &report.rows {
            println!("  dim{} {:<9} group {:>4}  {:.4e} B  {:.4e} s", r.dimension, r.kind, r.group, r.bytes, r.seconds);
        }
        println!("  total {:.4e} s", report.total_seconds());
    }
    Ok(())
}

fn comm_csv(report: &CommReport) -> String {
    let mut s = format!("{}\n{}\n", Metadata::capture(None).line(), CommReport::csv_header());
    for row in report.csv_rows() {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

fn compare(a: CompareArgs) -> Result<()> {
    let (before, after) = match (&a.before, &a.after, &a.report) {
        (Some(b), Some(af), _) => (KernelReport::read(b)?, KernelReport::read(af)?),
        (_, _, Some(r)) => {
            let r = KernelReport::read(r)?;
            (r.only(KernelVariant::Original), r.only(KernelVariant::Optimized))
        }
        _ => return Err(Error::Parameter("give --before and --after, or --report".into())),
    };
    let table = summarize(&before, &after)?;
    let csv = format!("{}\n{}", Metadata::capture(before.metadata.seed).line(), table.to_csv());
    emit(a.out.as_deref(), &csv)?;
    if a.markdown {
        print!("{}", table.to_markdown());
    } else if a.out.is_some() {
        for r in &table.rows {
            println!("{:<12} {:<10} {:.3}x", r.case, r.kernel, r.ratio());
        }
        println!("overall {:.3}x", table.overall());
    }
    Ok(())
}
