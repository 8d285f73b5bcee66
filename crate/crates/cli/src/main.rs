use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathshop::bench::{run_bench, summarize, to_csv, BenchSpec, Family, Sweep};
use pathshop::generators::{GenSpec, RandomSpec};
use pathshop::solvers::{solve, verify_solution, VerifyError};
use pathshop::{exact_solver, Algorithm, Eps, Instance, OracleCaps, SolveReport};

/// Path selection plus flow shop scheduling: solve, generate, verify, benchmark.
#[derive(Parser)]
#[command(name = "pathshop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write the solution as JSON
    Solve(SolveArgs),
    /// Generate an instance file
    Gen(GenArgs),
    /// Check a solution file against its instance
    Verify {
        solution: PathBuf,
        instance: PathBuf,
    },
    /// Run solvers over generated instances and write CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct CapArgs {
    /// Maximum number of s-t paths the exact oracle enumerates
    #[arg(long, default_value_t = pathshop::shortest_path::DEFAULT_MAX_PATHS)]
    max_paths: usize,
    /// Maximum jobs per path the exact oracle permutes
    #[arg(long, default_value_t = pathshop::flowshop::DEFAULT_MAX_JOBS)]
    max_jobs: usize,
}

impl CapArgs {
    fn caps(&self) -> OracleCaps {
        OracleCaps { max_paths: self.max_paths, max_jobs: self.max_jobs }
    }
}

#[derive(Args)]
struct OracleFlag {
    /// Also run the exact oracle
    #[arg(long, overrides_with = "no_oracle")]
    oracle: bool,
    #[arg(long, overrides_with = "oracle")]
    no_oracle: bool,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Par)]
    algorithm: AlgorithmArg,
    /// Accuracy of the min-max path step, as `0.25` or `1/4`
    #[arg(long, default_value = "1/4")]
    eps: Eps,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleFlag,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Fd,
    Par,
    Exact,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Fd => Algorithm::Fd,
            AlgorithmArg::Par => Algorithm::Par,
            AlgorithmArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Partition,
    FdTight,
    ParTightM2,
    ParTightM3,
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Partition => Family::Partition,
            FamilyArg::FdTight => Family::FdTight,
            FamilyArg::ParTightM2 => Family::ParTightM2,
            FamilyArg::ParTightM3 => Family::ParTightM3,
            FamilyArg::Random => Family::Random,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Multiset for `partition`, e.g. `1,2,3`
    #[arg(long, value_delimiter = ',')]
    set: Vec<u64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    scale: Option<u64>,
    #[arg(long, env = "PATHSHOP_SEED", default_value_t = 0)]
    seed: u64,
    /// Vertex count for `random`
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    /// Extra-arc probability for `random`
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Largest processing time for `random`
    #[arg(long, default_value_t = 10)]
    max_p: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON bench specification; the sweep flags below are ignored when given
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Sizes to sweep: vertex count, multiset length, q or scale by family
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    /// Seeds as a list with inclusive ranges, e.g. `0-49,100`
    #[arg(long)]
    seeds: Option<String>,
    /// Single seed used when `--seeds` is absent
    #[arg(long, env = "PATHSHOP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    max_p: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgorithmArg::Fd, AlgorithmArg::Par])]
    algorithm: Vec<AlgorithmArg>,
    #[arg(long, value_delimiter = ',', default_value = "1/4")]
    eps: Vec<Eps>,
    #[command(flatten)]
    oracle: OracleFlag,
    #[command(flatten)]
    caps: CapArgs,
    /// Record wall times (output is then no longer byte-reproducible)
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(pathshop::Error),
    Verify(VerifyError),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) => e.exit_code() as u8,
            Failure::Verify(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) => f.write_str(s),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Verify(e) => write!(f, "verification failed: {e}"),
        }
    }
}

impl From<pathshop::Error> for Failure {
    fn from(e: pathshop::Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let inst = Instance::parse(&read(&args.instance)?)?;
    let caps = args.caps.caps();
    let report = solve(&inst, args.algorithm.into(), args.eps, caps)?;
    emit(args.out.as_ref(), &report.to_json())?;
    eprintln!("{} makespan {} on {} jobs", report.algorithm, report.makespan, report.path.len());
    if args.oracle.oracle && !args.oracle.no_oracle {
        let exact = exact_solver(&inst, caps)?;
        let ratio = if exact.makespan == 0 { 1.0 } else { report.makespan as f64 / exact.makespan as f64 };
        eprintln!("oracle makespan {} ratio {ratio:.6}", exact.makespan);
    }
    Ok(())
}

fn gen_spec(args: &GenArgs) -> Result<GenSpec, Failure> {
    let need = |v: Option<u64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")));
    Ok(match args.family {
        FamilyArg::Partition => {
            if args.set.is_empty() {
                return Err(Failure::Usage("--set is required for partition".into()));
            }
            GenSpec::Partition { set: args.set.clone() }
        }
        FamilyArg::FdTight => GenSpec::FdTight { m: args.m.unwrap_or(2), q: need(args.q, "q")?, r: args.r.unwrap_or(1) },
        FamilyArg::ParTightM2 => GenSpec::ParTightM2 { scale: need(args.scale, "scale")? },
        FamilyArg::ParTightM3 => GenSpec::ParTightM3 { scale: need(args.scale, "scale")? },
        FamilyArg::Random => GenSpec::Random(RandomSpec {
            vertices: args.vertices,
            density: args.density,
            m: args.m.unwrap_or(2),
            max_p: args.max_p,
            seed: args.seed,
        }),
    })
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = gen_spec(&args)?;
    let inst = spec.generate()?;
    emit(args.out.as_ref(), &inst.to_json())?;
    eprintln!(
        "{}: vertices={} arcs={} m={}",
        spec.instance_id(),
        inst.vertices().len(),
        inst.arcs().len(),
        inst.machines()
    );
    Ok(())
}

fn cmd_verify(solution: PathBuf, instance: PathBuf) -> Result<(), Failure> {
    let inst = Instance::parse(&read(&instance)?)?;
    let report = SolveReport::from_json(&read(&solution)?)?;
    verify_solution(&inst, &report).map_err(Failure::Verify)?;
    println!("ok: makespan {}", report.makespan);
    Ok(())
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("invalid seed list {text:?}"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(seeds)
}

fn bench_spec(args: &BenchArgs) -> Result<BenchSpec, Failure> {
    if let Some(path) = &args.spec {
        let text = read(path)?;
        return serde_json::from_str(&text).map_err(|e| Failure::Core(e.into()));
    }
    let mut spec = BenchSpec {
        algorithms: args.algorithm.iter().map(|&a| a.into()).collect(),
        eps: args.eps.clone(),
        oracle: !args.oracle.no_oracle,
        caps: args.caps.caps(),
        timings: args.timings,
        ..BenchSpec::default()
    };
    if let Some(family) = args.family {
        let seeds = match &args.seeds {
            Some(s) => parse_seeds(s)?,
            None => vec![args.seed],
        };
        spec.sweeps.push(Sweep {
            family: family.into(),
            sizes: args.sizes.clone(),
            seeds,
            m: args.m,
            density: args.density,
            max_p: args.max_p,
            r: args.r,
        });
    }
    Ok(spec)
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let spec = bench_spec(&args)?;
    let rows = run_bench(&spec);
    emit(args.out.as_ref(), &to_csv(&rows))?;
    eprint!("{}", summarize(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Verify { solution, instance } => cmd_verify(solution, instance),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
