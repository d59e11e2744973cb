//! Command-line driver. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure or inconsistent model |
//! | 2 | bad arguments, including an infeasible `-z` |
//! | 3 | malformed `.uai`, evidence or order file |
//! | 4 | memory budget or brute-force cap exceeded |
//! | 5 | search timed out; the best solution found is printed |

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::elimination::Eliminator;
use crate::error::{Error, Result};
use crate::lp::{fglp, jglp, StopRule, DEFAULT_EPS};
use crate::model::{brute_force_opt_capped, Assignment, GraphicalModel, BRUTE_FORCE_CAP};
use crate::ordering::{min_fill_restarts, EliminationOrder, DEFAULT_SEED};
use crate::search::{aobb_with, build_heuristic_with_budget, AobbOptions, Scheme};
use crate::trace::Trace;
use crate::uai::{
    condition, csv_err, fmt_value, parse_evidence_for, parse_uai, result_line, write_trace_csv,
    EvidenceSet, ResultKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;
pub const EXIT_TIMEOUT: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "costshift",
    version,
    about = "Bounds and exact MAP solutions for max-sum graphical models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound on the MAP value.
    Bound(BoundArgs),
    /// AND/OR branch and bound with a mini-bucket heuristic.
    Solve(SolveArgs),
    /// Exact value by bucket elimination or enumeration.
    Exact(ExactArgs),
    /// Bound table for every `.uai` file in a directory, as CSV.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Mbe,
    #[value(name = "mbe-mm")]
    MbeMm,
    Fglp,
    #[value(name = "fglp+mbe")]
    FglpMbe,
    Jglp,
}

impl Algorithm {
    const ALL: [Algorithm; 5] = [
        Algorithm::Mbe,
        Algorithm::MbeMm,
        Algorithm::Fglp,
        Algorithm::FglpMbe,
        Algorithm::Jglp,
    ];

    fn name(self) -> &'static str {
        match self {
            Algorithm::Mbe => "mbe",
            Algorithm::MbeMm => "mbe-mm",
            Algorithm::Fglp => "fglp",
            Algorithm::FglpMbe => "fglp+mbe",
            Algorithm::Jglp => "jglp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    Mbe,
    #[value(name = "mbe-mm")]
    MbeMm,
    #[value(name = "fglp+mbe")]
    FglpMbe,
    Jglp,
}

impl From<HeuristicArg> for Scheme {
    fn from(h: HeuristicArg) -> Scheme {
        match h {
            HeuristicArg::Mbe => Scheme::Mbe,
            HeuristicArg::MbeMm => Scheme::MbeMm,
            HeuristicArg::FglpMbe => Scheme::FglpMbe,
            HeuristicArg::Jglp => Scheme::Jglp,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model in UAI format.
    pub input: PathBuf,
    /// Evidence file: a count followed by `var value` pairs.
    #[arg(long)]
    pub evid: Option<PathBuf>,
    /// Elimination order file (original variable ids); min-fill otherwise.
    #[arg(long)]
    pub order: Option<PathBuf>,
    /// Seed for min-fill tie breaking.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Min-fill runs with consecutive seeds; the narrowest order wins.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Memory budget for elimination tables, e.g. `3G`, `512M` or bytes.
    #[arg(long, value_parser = parse_bytes, default_value = "3G")]
    pub memory: u64,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// Convergence threshold on the relative bound change per sweep.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Cap on the number of sweeps.
    #[arg(long)]
    pub max_sweeps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "mbe")]
    pub alg: Algorithm,
    #[arg(short = 'z', default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub z: u64,
    /// Seconds for the iterative schemes.
    #[arg(long, default_value_t = 30.0, value_parser = positive_seconds)]
    pub time_limit: f64,
    #[command(flatten)]
    pub lp: LpArgs,
    /// Write the anytime bound trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "mbe")]
    pub heur: HeuristicArg,
    #[arg(short = 'z', default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub z: u64,
    /// Seconds for the search; unlimited if omitted.
    #[arg(long, value_parser = positive_seconds)]
    pub time_limit: Option<f64>,
    /// Seconds for the iterative phase of `fglp+mbe` and `jglp`.
    #[arg(long, default_value_t = 30.0, value_parser = non_negative_seconds)]
    pub lp_time: f64,
    #[command(flatten)]
    pub lp: LpArgs,
    /// Seed the incumbent with a greedy descent down the heuristic.
    #[arg(long)]
    pub warm_start: bool,
    /// Write the anytime solution trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Enumerate all assignments instead of bucket elimination.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Directory holding `.uai` files.
    pub dir: PathBuf,
    /// z values, comma separated.
    #[arg(short = 'z', value_delimiter = ',', default_value = "1,2,3", value_parser = clap::value_parser!(u64).range(1..))]
    pub z: Vec<u64>,
    /// Seconds per iterative scheme and instance.
    #[arg(long, default_value_t = 30.0, value_parser = positive_seconds)]
    pub time_limit: f64,
    #[command(flatten)]
    pub lp: LpArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, value_parser = parse_bytes, default_value = "3G")]
    pub memory: u64,
}

fn positive_seconds(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number of seconds, got `{s}`")),
    }
}

fn non_negative_seconds(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!(
            "expected a non-negative number of seconds, got `{s}`"
        )),
    }
}

/// Bytes with an optional `K`, `M` or `G` suffix (powers of 1024).
pub fn parse_bytes(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let (digits, shift) = match t.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&t[..t.len() - 1], 10),
        Some('M') => (&t[..t.len() - 1], 20),
        Some('G') => (&t[..t.len() - 1], 30),
        _ => (t, 0),
    };
    let n: u64 = digits
        .parse()
        .map_err(|_| format!("expected a byte count like 512M, got `{s}`"))?;
    match n.checked_mul(1 << shift) {
        Some(b) if b > 0 => Ok(b),
        _ => Err(format!(
            "memory budget `{s}` must be positive and fit in 64 bits"
        )),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Usage(_) | Error::InfeasibleZ { .. } => EXIT_USAGE,
        Error::Inconsistent(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Exact(a) => cmd_exact(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Model after evidence plus the order to eliminate it in.
struct Loaded {
    model: GraphicalModel,
    order: EliminationOrder,
}

fn load(a: &ModelArgs) -> Result<Loaded> {
    let original = parse_uai(&read(&a.input)?)?;
    let evidence = match &a.evid {
        Some(p) => parse_evidence_for(&read(p)?, &original)?,
        None => EvidenceSet::new(),
    };
    let model = condition(&original, &evidence)?;
    let order = match &a.order {
        Some(p) => {
            let full = EliminationOrder::parse(&original, &read(p)?)?;
            let kept = evidence.kept_variables(original.num_vars());
            let mut new_id = vec![usize::MAX; original.num_vars()];
            for (i, &v) in kept.iter().enumerate() {
                new_id[v] = i;
            }
            let order = full
                .as_slice()
                .iter()
                .filter(|&&v| evidence.get(v).is_none())
                .map(|&v| new_id[v])
                .collect();
            EliminationOrder::new(&model, order)?
        }
        None => min_fill_restarts(&model, a.seed, a.restarts),
    };
    Ok(Loaded { model, order })
}

fn write_trace(path: &Path, column: &str, trace: &Trace) -> Result<()> {
    let file = fs::File::create(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    write_trace_csv(io::BufWriter::new(file), column, trace.pairs())
}

fn stop_rule(seconds: f64, lp: &LpArgs) -> StopRule {
    StopRule {
        max_sweeps: lp.max_sweeps,
        time_limit: Some(Duration::from_secs_f64(seconds)),
        eps: lp.eps,
    }
}

/// Bound of one algorithm plus its anytime trace.
fn compute_bound(
    m: &GraphicalModel,
    o: &EliminationOrder,
    alg: Algorithm,
    z: usize,
    stop: &StopRule,
    budget: u64,
) -> Result<(f64, Trace)> {
    let start = Instant::now();
    let elim = |model| Eliminator::new(model, o).with_budget(budget);
    let single = |b: f64| {
        let mut t = Trace::new();
        t.record(start.elapsed().as_secs_f64(), b);
        (b, t)
    };
    Ok(match alg {
        Algorithm::Mbe => single(elim(m).mini_bucket(z)?.bound),
        Algorithm::MbeMm => single(elim(m).mbe_mm(z)?.bound),
        Algorithm::Fglp => {
            let r = fglp(m, stop)?;
            (r.bound(), r.run.trace)
        }
        Algorithm::FglpMbe => {
            let r = fglp(m, stop)?;
            let b = elim(&r.model).mini_bucket(z)?.bound;
            let mut t = r.run.trace;
            t.record(start.elapsed().as_secs_f64(), b);
            (b, t)
        }
        Algorithm::Jglp => {
            let r = jglp(elim(m).join_graph(z)?, stop)?;
            (r.bound(), r.run.trace)
        }
    })
}

pub fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> Result<i32> {
    let Loaded { model, order } = load(&a.model)?;
    let stop = stop_rule(a.time_limit, &a.lp);
    stop.validate()?;
    let (bound, trace) = compute_bound(&model, &order, a.alg, a.z as usize, &stop, a.model.memory)?;
    writeln!(out, "{}", result_line(ResultKind::Bound, bound))?;
    if let Some(p) = &a.trace {
        write_trace(p, "bound_ln", &trace)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let Loaded { model, order } = load(&a.model)?;
    let stop = stop_rule(a.lp_time, &a.lp);
    stop.validate()?;
    let start = Instant::now();
    let h = build_heuristic_with_budget(
        &model,
        &order,
        a.z as usize,
        a.heur.into(),
        &stop,
        a.model.memory,
    )?;
    let opts = AobbOptions {
        time_limit: a.time_limit.map(Duration::from_secs_f64),
        warm_start: a.warm_start,
        ..AobbOptions::new()
    };
    let r = aobb_with(&model, &h, &opts)?;
    let elapsed = start.elapsed().as_secs_f64();
    let status = if r.is_exact() { "SOLVED" } else { "TIMEOUT" };
    writeln!(
        out,
        "{status} {elapsed:.3} {} {}",
        r.stats.nodes,
        fmt_value(r.value)
    )?;
    writeln!(out, "{}", r.assignment)?;
    if let Some(p) = &a.trace {
        write_trace(p, "best_value_ln", &r.stats.trace)?;
    }
    Ok(if r.is_exact() { EXIT_OK } else { EXIT_TIMEOUT })
}

pub fn cmd_exact(a: &ExactArgs, out: &mut dyn Write) -> Result<i32> {
    let Loaded { model, order } = load(&a.model)?;
    let (value, assignment): (f64, Assignment) = if a.brute {
        brute_force_opt_capped(&model, BRUTE_FORCE_CAP)?
    } else {
        let sol = Eliminator::new(&model, &order)
            .with_budget(a.model.memory)
            .exact()?;
        (sol.value, sol.assignment)
    };
    writeln!(out, "{}", result_line(ResultKind::Exact, value))?;
    writeln!(out, "{assignment}")?;
    Ok(EXIT_OK)
}

fn failure_cell(e: &Error) -> String {
    match e {
        Error::Capacity(_) => "OOM".into(),
        _ => "ERROR".into(),
    }
}

/// Header of the compare CSV; each algorithm has a bound and a seconds column.
pub fn compare_header() -> Vec<String> {
    let mut h: Vec<String> = ["instance", "n", "k", "w", "z", "exact"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for alg in Algorithm::ALL {
        h.push(alg.name().to_string());
        h.push(format!("{}_seconds", alg.name()));
    }
    h
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let mut files: Vec<PathBuf> = fs::read_dir(&a.dir)
        .map_err(|e| {
            Error::Io(io::Error::new(
                e.kind(),
                format!("{}: {e}", a.dir.display()),
            ))
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "uai"))
        .collect();
    files.sort();
    let stop = stop_rule(a.time_limit, &a.lp);
    stop.validate()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(compare_header()).map_err(csv_err)?;
    for path in &files {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let model = parse_uai(&read(path)?)?;
        let order = min_fill_restarts(&model, a.seed, a.restarts);
        let exact = match Eliminator::new(&model, &order)
            .with_budget(a.memory)
            .exact()
        {
            Ok(sol) => fmt_value(sol.value),
            Err(e) => failure_cell(&e),
        };
        for &z in &a.z {
            let mut row = vec![
                name.clone(),
                model.num_vars().to_string(),
                model.max_card().to_string(),
                order.width().to_string(),
                z.to_string(),
                exact.clone(),
            ];
            for alg in Algorithm::ALL {
                let start = Instant::now();
                match compute_bound(&model, &order, alg, z as usize, &stop, a.memory) {
                    Ok((b, _)) => {
                        row.push(fmt_value(b));
                        row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
                    }
                    Err(e) => {
                        row.push(failure_cell(&e));
                        row.push(String::new());
                    }
                }
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}
