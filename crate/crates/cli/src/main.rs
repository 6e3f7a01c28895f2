//! `tccbf`: run, compare and sweep barrier NMPC simulations and draw
//! barrier level sets.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 unknown
//! scenario, 4 file system error, 5 solver numerical failure, 6 goal not
//! reached before the time limit.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use tccbf::barrier::{level_set_grid, BarrierConfig, BarrierKind, GridSpec, Obstacle};
use tccbf::config::{load_scenario_file, write_text, Overrides};
use tccbf::metrics::{compare, compute_metrics, summary_text};
use tccbf::plot::{levelset_svg, run_figure_svg};
use tccbf::sim::{builtin_scenario, run_parameter_sweep, run_scenario, Outcome, Scenario, SweepGrid, TrajectoryLog, BUILTIN_NAMES};
use tccbf::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_UNKNOWN_SCENARIO: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_SOLVER: u8 = 5;
const EXIT_TIMEOUT: u8 = 6;

#[derive(Parser)]
#[command(name = "tccbf", version, about = "Barrier-constrained NMPC obstacle-avoidance simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario with one barrier.
    Run(RunArgs),
    /// Run one scenario under several barriers and tabulate the metrics.
    Compare(CompareArgs),
    /// Sweep alpha and the decay rate of the scenario's barrier.
    Sweep(SweepArgs),
    /// Evaluate ED and TC barriers over a grid of vehicle positions.
    Levelset(LevelsetArgs),
    /// List the builtin scenarios.
    List,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Builtin scenario name (see `tccbf list`).
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario JSON file; may name a builtin in a "base" key.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_e: Option<f64>,
    #[arg(long)]
    alpha_t: Option<f64>,
    /// Maximum turn rate of the turning circles (also the unicycle's turn-rate bound).
    #[arg(long)]
    rmax: Option<f64>,
    /// Smooth-max sharpness.
    #[arg(long)]
    k: Option<f64>,
    /// Vehicle safety radius.
    #[arg(long)]
    rs: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    ts: Option<f64>,
    #[arg(long)]
    max_time: Option<f64>,
}

impl Tuning {
    fn overrides(&self, barrier: Option<BarrierKind>) -> Overrides {
        Overrides {
            barrier,
            alpha: self.alpha,
            alpha_e: self.alpha_e,
            alpha_t: self.alpha_t,
            r_max: self.rmax,
            k: self.k,
            r_s: self.rs,
            horizon: self.horizon,
            ts: self.ts,
            max_time: self.max_time,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Output directory.
    #[arg(long, env = "TCCBF_OUTPUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Also write SVG figures.
    #[arg(long)]
    plot: bool,
    /// Also write per-step wall-clock solve times (not reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Barrier kind: dc, ed or tc. Defaults to the scenario's.
    #[arg(long)]
    barrier: Option<BarrierKind>,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated barrier kinds.
    #[arg(long, value_delimiter = ',', default_value = "ed,tc")]
    barriers: Vec<BarrierKind>,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Barrier kind; the decay values go to alpha_t for tc and alpha_e otherwise.
    #[arg(long, default_value = "ed")]
    barrier: BarrierKind,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.0")]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.03,0.05,0.07")]
    decays: Vec<f64>,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LevelsetArgs {
    #[arg(long, default_value_t = 1.5)]
    speed: f64,
    /// Course angle [rad].
    #[arg(long, default_value_t = 0.0)]
    course: f64,
    #[arg(long, default_value_t = 0.3)]
    rmax: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    rs: f64,
    #[arg(long, default_value_t = 5.0)]
    k: f64,
    /// Obstacle radius; the obstacle sits at the origin.
    #[arg(long, default_value_t = 2.0)]
    obstacle_radius: f64,
    /// Half-width of the square grid.
    #[arg(long, default_value_t = 12.0)]
    extent: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    resolution: f64,
    #[command(flatten)]
    output: Output,
}

/// Error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnknownScenario(_) => EXIT_UNKNOWN_SCENARIO,
            Error::Io { .. } => EXIT_IO,
            Error::NumericalFailure { .. } | Error::QpInfeasible(_) => EXIT_SOLVER,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

fn load(source: &Source, overrides: &Overrides) -> Result<Scenario, Failure> {
    let mut s = match (&source.scenario, &source.config) {
        (Some(name), None) => builtin_scenario(name)?,
        (None, Some(path)) => load_scenario_file(path)?,
        _ => unreachable!("clap enforces exactly one scenario source"),
    };
    overrides.apply(&mut s)?;
    Ok(s)
}

fn stem(s: &Scenario) -> String {
    format!("{}-{}", s.name, s.barrier.kind)
}

fn diagnostics_csv(log: &TrajectoryLog) -> String {
    let mut out = String::from("t,solve_seconds\n");
    for (r, secs) in log.records.iter().zip(&log.solve_seconds) {
        let _ = writeln!(out, "{},{}", r.t, secs);
    }
    out
}

/// Writes the trajectory CSV, the scenario sidecar and the metrics summary
/// of one run, plus the solve timings if requested.
fn write_run(output: &Output, log: &TrajectoryLog) -> Result<(), Failure> {
    let dir = &output.out;
    let stem = stem(&log.scenario);
    write_text(&dir.join(format!("{stem}.csv")), &log.to_csv())?;
    write_text(&dir.join(format!("{stem}.json")), &log.sidecar_json())?;
    write_text(&dir.join(format!("{stem}-metrics.txt")), &summary_text(log))?;
    if output.timing {
        write_text(&dir.join(format!("{stem}-timing.csv")), &diagnostics_csv(log))?;
    }
    Ok(())
}

fn outcome_failure(log: &TrajectoryLog) -> Option<Failure> {
    match &log.outcome {
        Outcome::Reached => None,
        Outcome::Timeout => Some(Failure {
            code: EXIT_TIMEOUT,
            message: format!("goal not reached within {} s", log.scenario.max_time),
        }),
        Outcome::Failed(msg) => Some(Failure { code: EXIT_SOLVER, message: msg.clone() }),
    }
}

fn cmd_run(a: &RunArgs) -> Result<(), Failure> {
    let scenario = load(&a.source, &a.tuning.overrides(a.barrier))?;
    let log = run_scenario(&scenario)?;
    write_run(&a.output, &log)?;
    if a.output.plot {
        let svg = run_figure_svg(&[&log])?;
        write_text(&a.output.out.join(format!("{}.svg", stem(&scenario))), &svg)?;
    }
    print!("{}", summary_text(&log));
    match outcome_failure(&log) {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_compare(a: &CompareArgs) -> Result<(), Failure> {
    if a.barriers.is_empty() {
        return Err(Error::InvalidConfig("no barriers to compare".into()).into());
    }
    let base = load(&a.source, &a.tuning.overrides(None))?;
    let logs = a
        .barriers
        .par_iter()
        .map(|k| run_scenario(&base.with_barrier(*k)))
        .collect::<Result<Vec<_>, Error>>()?;
    for log in &logs {
        write_run(&a.output, log)?;
    }
    let table = compare(&logs)?;
    write_text(&a.output.out.join(format!("{}-compare.txt", base.name)), &table.to_text())?;
    write_text(&a.output.out.join(format!("{}-compare.csv", base.name)), &table.to_csv())?;
    if a.output.plot {
        let refs: Vec<&TrajectoryLog> = logs.iter().collect();
        write_text(&a.output.out.join(format!("{}-compare.svg", base.name)), &run_figure_svg(&refs)?)?;
    }
    print!("{}", table.to_text());
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let base = load(&a.source, &a.tuning.overrides(Some(a.barrier)))?;
    let grid = SweepGrid { alpha: a.alphas.clone(), decay: a.decays.clone() };
    let points = run_parameter_sweep(&base, &grid)?;
    let mut csv = String::from("alpha,decay,outcome,t_a,e_speed,e_cte,d_min,max_slack,error\n");
    for p in &points {
        match &p.run {
            Ok(log) => {
                write_text(&a.output.out.join(format!("{}-a{}-g{}.csv", stem(&base), p.alpha, p.decay)), &log.to_csv())?;
                let m = compute_metrics(log);
                let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},",
                    p.alpha,
                    p.decay,
                    m.outcome,
                    opt(m.t_a),
                    m.e_speed,
                    m.e_cte,
                    opt(m.d_min),
                    m.max_slack
                );
            }
            Err(e) => {
                let _ = writeln!(csv, "{},{},error,,,,,,\"{}\"", p.alpha, p.decay, e.replace('"', "'"));
            }
        }
    }
    write_text(&a.output.out.join(format!("{}-sweep.csv", stem(&base))), &csv)?;
    print!("{csv}");
    Ok(())
}

fn cmd_levelset(a: &LevelsetArgs) -> Result<(), Failure> {
    let cfg = BarrierConfig { alpha: a.alpha, r_max: a.rmax, r_s: a.rs, k: a.k, ..BarrierConfig::default() };
    cfg.validate()?;
    let obstacle = Obstacle::new(0.0, 0.0, a.obstacle_radius, 0.0, 0.0)?;
    let spec = GridSpec::centered(0.0, 0.0, a.extent, a.resolution);
    for kind in [BarrierKind::Ed, BarrierKind::Tc] {
        let grid = level_set_grid(kind, &BarrierConfig { kind, ..cfg }, &obstacle, a.course, a.speed, &spec)?;
        write_text(&a.output.out.join(format!("levelset-{kind}.csv")), &grid.to_csv())?;
        write_text(&a.output.out.join(format!("levelset-{kind}.svg")), &levelset_svg(&grid)?)?;
        let fmt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| format!("{v:.3}"));
        println!(
            "{kind}: perpendicular extent {} m, radial extent {} m",
            fmt(grid.perpendicular_extent()),
            fmt(grid.radial_extent())
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Levelset(a) => cmd_levelset(a),
        Command::List => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
