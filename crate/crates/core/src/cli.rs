//! Command-line front end. [`run`] parses arguments, dispatches to a
//! subcommand and returns the process exit code: 0 on success, 1 on a
//! failed run or an invalid input, 2 on bad usage.
//!
//! Solutions refer to the instance with one dummy schedule per request
//! appended. `solve` writes that instance next to the solution; commands
//! that read a solution append missing dummies to the instance they are
//! given, so either file works.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{solve_dual, DualSchedule, TracePoint};
use crate::colgen::{insert_realtime, solve, CgParams, CgReport, Mode};
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorConfig};
use crate::model::{
    add_dummy_schedules, read_instance, read_solution, validate_instance, validate_solution, write_instance,
    write_solution, DummyConfig, Instance, LegId, Money, Request, RequestId, Solution,
};
use crate::oracle::{solve_exact, DEFAULT_CAP};
use crate::reduction::{reduce_all, unreduced_all, ReductionStats};
use crate::report::{build_report, to_csv, to_json, Report};

#[derive(Debug, Parser)]
#[command(name = "tpossp", version, about = "Trailer routing over scheduled tractor legs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Per-request sub-networks and pruning statistics.
    Reduce(ReduceArgs),
    /// Solve an instance with column generation, the exact oracle, or only
    /// bound it.
    Solve(SolveArgs),
    /// Lagrangian dual ascent; writes the bound trace.
    Bound(BoundArgs),
    /// Route new requests on top of an existing solution.
    Insert(InsertArgs),
    /// Check an instance, and optionally a solution against it.
    Validate(ValidateArgs),
    /// Gap, empty-mile and cost-breakdown tables for a solution.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Cg,
    Exact,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMode {
    Standard,
    Stabilized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// JSON generator configuration; flags given explicitly override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    hubs: Option<usize>,
    #[arg(long)]
    schedules: Option<usize>,
    #[arg(long)]
    legs_per_schedule: Option<usize>,
    #[arg(long)]
    requests: Option<usize>,
    /// Share of requests cut from existing leg chains.
    #[arg(long)]
    chain_share: Option<f64>,
    /// Window slack in minutes around chain requests.
    #[arg(long)]
    window_slack: Option<i64>,
    /// Minutes added to every request window.
    #[arg(long)]
    window_widen: Option<i64>,
    #[arg(long)]
    no_coordinates: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CgArgs {
    #[arg(long, value_enum, default_value = "standard")]
    mode: CliMode,
    /// Paths generated per request and iteration.
    #[arg(long, default_value_t = 50)]
    paths: usize,
    /// Pricing rounds.
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    /// Cost slack over the cheapest path, or `none`.
    #[arg(long, default_value = "0")]
    max_cost: String,
    /// Price on all usable legs instead of the reduced sub-networks.
    #[arg(long)]
    no_reduce: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    node_budget: usize,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Cap on the stabilisation weight.
    #[arg(long, default_value_t = 10)]
    max_weight: u32,
    /// Extra cheapest paths per request added before finishing.
    #[arg(long, default_value_t = 20)]
    pool_paths: usize,
}

impl CgArgs {
    fn params(&self) -> Result<CgParams> {
        let max_cost = match self.max_cost.as_str() {
            "none" => None,
            s => Some(s.parse::<Money>().map_err(|_| Error::Config(format!("bad --max-cost {s:?}")))?),
        };
        let params = CgParams {
            paths: self.paths,
            num_iterations: self.iterations,
            max_cost,
            mode: match self.mode {
                CliMode::Standard => Mode::Standard,
                CliMode::Stabilized => Mode::Stabilized,
            },
            max_weight: self.max_weight,
            reduce: !self.no_reduce,
            pool_paths: self.pool_paths,
            node_budget: self.node_budget,
            time_limit: self.time_limit,
            seed: self.seed,
            dummy: DummyConfig::default(),
        };
        params.check()?;
        Ok(params)
    }
}

#[derive(Debug, Args)]
struct DualArgs {
    /// Ascent iterations.
    #[arg(long = "bound-iterations", default_value_t = 1_000)]
    max_iterations: usize,
    /// Known feasible objective for the step rule.
    #[arg(long)]
    target: Option<Money>,
    #[arg(long, default_value_t = 50)]
    patience: usize,
    #[arg(long, default_value_t = 16)]
    block_size: usize,
}

impl DualArgs {
    fn schedule(&self, target: Option<Money>) -> DualSchedule {
        DualSchedule {
            max_iterations: self.max_iterations,
            patience: self.patience,
            target: self.target.or(target),
            block_size: self.block_size,
            ..DualSchedule::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "cg")]
    engine: Engine,
    #[command(flatten)]
    cg: CgArgs,
    #[command(flatten)]
    dual: DualArgs,
    /// Also run the Lagrangian ascent and report its bound (cg engine).
    #[arg(long)]
    lagrangian: bool,
    /// Node cap of the exact oracle.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    oracle_cap: usize,
    /// Output directory; the solution goes to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct BoundArgs {
    instance: PathBuf,
    #[command(flatten)]
    dual: DualArgs,
    #[arg(long)]
    no_reduce: bool,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InsertArgs {
    instance: PathBuf,
    /// Solution to keep fixed.
    #[arg(long)]
    base: PathBuf,
    /// New requests: a JSON array, or an object with a `requests` array.
    #[arg(long)]
    new: PathBuf,
    #[command(flatten)]
    cg: CgArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Honours `TPOSSP_THREADS` for the global pool.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("TPOSSP_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("TPOSSP_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("TPOSSP_THREADS must be a positive integer".into());
    }
    // fails only if the pool already exists, e.g. on a second call in-process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Insert(a) => cmd_insert(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn load_instance(path: &FsPath) -> Result<Instance> {
    read_instance(&fs::read(path)?)
}

/// The instance with dummies plus a solution that refers to it.
fn load_solved(instance: &FsPath, solution: &FsPath) -> Result<(Instance, Solution)> {
    let inst = add_dummy_schedules(&load_instance(instance)?, &DummyConfig::default());
    let sol = read_solution(&fs::read(solution)?, &inst)?;
    Ok((inst, sol))
}

fn emit(out: Option<&FsPath>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn write_report(dir: &FsPath, report: &Report, format: Format) -> Result<()> {
    match format {
        Format::Json => fs::write(dir.join("report.json"), to_json(report))?,
        Format::Csv => {
            fs::write(dir.join("report.csv"), to_csv(std::slice::from_ref(&report.summary))?)?;
            fs::write(dir.join("schedules.csv"), to_csv(&report.schedules)?)?;
        }
    }
    Ok(())
}

fn label_of(path: &FsPath) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn cmd_generate(a: GenerateArgs) -> Result<i32> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_slice::<GeneratorConfig>(&fs::read(p)?)
            .map_err(|e| Error::Parse { path: p.display().to_string(), message: e.to_string() })?,
        None => GeneratorConfig::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = a.$f { cfg.$f = v; })* };
    }
    set!(hubs, schedules, legs_per_schedule, requests, chain_share, window_slack, window_widen, seed);
    if a.no_coordinates {
        cfg.coordinates = false;
    }
    emit(a.out.as_deref(), &write_instance(&generate(&cfg)?))?;
    Ok(0)
}

#[derive(Serialize)]
struct ReducedRequest {
    request: RequestId,
    legs: Vec<LegId>,
}

#[derive(Serialize)]
struct ReduceOutput {
    stats: ReductionStats,
    subnetworks: Vec<ReducedRequest>,
}

fn cmd_reduce(a: ReduceArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let subs = reduce_all(&inst);
    let out = ReduceOutput {
        stats: ReductionStats::of(&inst, &subs),
        subnetworks: subs.into_iter().map(|s| ReducedRequest { request: s.request, legs: s.legs }).collect(),
    };
    emit(a.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

#[derive(Serialize)]
struct BoundOutput {
    best_bound: Money,
    schedule: DualSchedule,
    trace: Vec<TracePoint>,
}

fn run_bound(inst: &Instance, reduce: bool, schedule: &DualSchedule) -> Result<BoundOutput> {
    let subs = if reduce { reduce_all(inst) } else { unreduced_all(inst) };
    let res = solve_dual(inst, &subs, schedule)?;
    Ok(BoundOutput { best_bound: res.best_bound, schedule: *schedule, trace: res.trace })
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    let input = load_instance(&a.instance)?;
    let params = a.cg.params()?;
    let label = label_of(&a.instance);
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
    }
    let (inst, solution, cg): (Instance, Solution, Option<CgReport>) = match a.engine {
        Engine::Bound => {
            let inst = add_dummy_schedules(&input, &params.dummy);
            let out = run_bound(&inst, params.reduce, &a.dual.schedule(None))?;
            match &a.out {
                Some(dir) => fs::write(dir.join("bound.json"), to_json(&out))?,
                None => emit(None, &to_json(&out))?,
            }
            return Ok(0);
        }
        Engine::Exact => {
            let inst = add_dummy_schedules(&input, &params.dummy);
            let sol = solve_exact(&inst, a.oracle_cap)?;
            (inst, sol, None)
        }
        Engine::Cg => {
            let out = solve(&input, &params)?;
            let mut report = out.report;
            if a.lagrangian {
                let b = run_bound(&out.instance, params.reduce, &a.dual.schedule(Some(out.solution.objective())))?;
                report = report.with_lagrangian_bound(b.best_bound);
            }
            (out.instance, out.solution, Some(report))
        }
    };
    match &a.out {
        Some(dir) => {
            fs::write(dir.join("instance.json"), write_instance(&inst))?;
            fs::write(dir.join("solution.json"), write_solution(&solution))?;
            if let Some(cg) = &cg {
                fs::write(dir.join("cg.json"), to_json(cg))?;
            }
            let report = build_report(&label, &inst, &solution, cg.as_ref(), None)?;
            write_report(dir, &report, a.format)?;
        }
        None => emit(None, &write_solution(&solution))?,
    }
    Ok(0)
}

fn cmd_bound(a: BoundArgs) -> Result<i32> {
    let inst = add_dummy_schedules(&load_instance(&a.instance)?, &DummyConfig::default());
    let out = run_bound(&inst, !a.no_reduce, &a.dual.schedule(None))?;
    emit(a.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NewRequests {
    List(Vec<Request>),
    Wrapped { requests: Vec<Request> },
}

#[derive(Serialize)]
struct InsertSummary {
    marginal_cost: Money,
    objective: Money,
    new_requests: usize,
}

fn cmd_insert(a: InsertArgs) -> Result<i32> {
    let (inst, base) = load_solved(&a.instance, &a.base)?;
    let new = match serde_json::from_slice::<NewRequests>(&fs::read(&a.new)?)
        .map_err(|e| Error::Parse { path: a.new.display().to_string(), message: e.to_string() })?
    {
        NewRequests::List(v) | NewRequests::Wrapped { requests: v } => v,
    };
    let params = a.cg.params()?;
    let ins = insert_realtime(&inst, &base, &new, &params)?;
    let summary = InsertSummary {
        marginal_cost: ins.marginal_cost,
        objective: ins.solution.objective(),
        new_requests: new.len(),
    };
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("instance.json"), write_instance(&ins.instance))?;
            fs::write(dir.join("solution.json"), write_solution(&ins.solution))?;
            fs::write(dir.join("insert.json"), to_json(&summary))?;
            if let Some(cg) = &ins.report {
                fs::write(dir.join("cg.json"), to_json(cg))?;
            }
            let report = build_report(&label_of(&a.instance), &ins.instance, &ins.solution, None, None)?;
            write_report(dir, &report, a.format)?;
        }
        None => emit(None, &write_solution(&ins.solution))?,
    }
    Ok(0)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let inst = match load_instance(&a.instance) {
        Ok(i) => i,
        Err(Error::InvalidInstance(v)) => {
            for x in &v {
                println!("{x}");
            }
            eprintln!("instance invalid: {} violation(s)", v.len());
            return Ok(1);
        }
        Err(e) => return Err(e),
    };
    debug_assert!(validate_instance(&inst).is_empty());
    let Some(sol_path) = &a.solution else {
        println!("instance valid");
        return Ok(0);
    };
    let inst = add_dummy_schedules(&inst, &DummyConfig::default());
    let sol = read_solution(&fs::read(sol_path)?, &inst)?;
    let violations = validate_solution(&inst, &sol);
    if violations.is_empty() {
        println!("solution valid, objective {}", sol.objective());
        Ok(0)
    } else {
        for v in &violations {
            println!("{v}");
        }
        eprintln!("solution invalid: {} violation(s)", violations.len());
        Ok(1)
    }
}

fn cmd_report(a: ReportArgs) -> Result<i32> {
    let (inst, sol) = load_solved(&a.instance, &a.solution)?;
    let label = a.label.clone().unwrap_or_else(|| label_of(&a.instance));
    let report = build_report(&label, &inst, &sol, None, None)?;
    match (&a.out, a.format) {
        (Some(dir), f) => {
            fs::create_dir_all(dir)?;
            write_report(dir, &report, f)?;
        }
        (None, Format::Json) => emit(None, &to_json(&report))?,
        (None, Format::Csv) => emit(None, &to_csv(std::slice::from_ref(&report.summary))?)?,
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_flag_is_usage_error() {
        assert_eq!(run(["tpossp", "solve", "x.json", "--paths", "many"]), 2);
        assert_eq!(run(["tpossp", "frobnicate"]), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["tpossp", "--help"]), 0);
    }

    #[test]
    fn missing_file_is_runtime_error() {
        assert_eq!(run(["tpossp", "reduce", "/nonexistent/instance.json"]), 1);
    }

    #[test]
    fn max_cost_none() {
        let args = CgArgs {
            mode: CliMode::Stabilized,
            paths: 10,
            iterations: 5,
            max_cost: "none".into(),
            no_reduce: false,
            seed: 0,
            node_budget: 10,
            time_limit: None,
            max_weight: 10,
            pool_paths: 0,
        };
        let p = args.params().unwrap();
        assert_eq!(p.max_cost, None);
        assert_eq!(p.mode, Mode::Stabilized);
        assert!(CgArgs { max_cost: "lots".into(), ..args }.params().is_err());
    }
}
