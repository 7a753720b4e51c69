use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use varbonus_core::analysis::EmpiricalSettings;
use varbonus_harness::bounds::{report, ReportSettings};
use varbonus_harness::config::{parse_file, Benchmark, ExperimentConfig};
use varbonus_harness::experiment::{default_grid, run_experiment, run_one, run_sweep, select_best};
use varbonus_harness::output::{summary, sweep_csv, sweep_gnuplot, write, write_experiment};
use varbonus_harness::trajectory::{parse_log, render, write_log, TrajectoryLog};
use varbonus_harness::HarnessError;

#[derive(Parser)]
#[command(name = "varbonus", version, about = "Variance-based reward bonus experiments on the Chain and Hunt the Wumpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulative reward over the Chain runs.
    Chain(RunArgs),
    /// Mean episode reward on Hunt the Wumpus.
    Wumpus(RunArgs),
    /// One experiment per value of the agent's coefficient.
    Sweep(SweepArgs),
    /// Deviation bounds and sample complexities of a prior.
    Bounds(BoundsArgs),
    /// Print a recorded trajectory log.
    Replay {
        log: PathBuf,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    agent: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "beta-r")]
    beta_r: Option<f64>,
    #[arg(long = "beta-p")]
    beta_p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Knownness threshold of the gated agent ("inf" for never).
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Any other config key, as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Write the trajectory of run `--trace-run` to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long = "trace-run", default_value_t = 0)]
    trace_run: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    benchmark: Option<String>,
    /// Comma-separated coefficient values; defaults to the benchmark's grid.
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long, default_value_t = ReportSettings::default().rho)]
    rho: f64,
    #[arg(long, default_value_t = ReportSettings::default().epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = ReportSettings::default().delta)]
    delta: f64,
    #[arg(long, default_value_t = ReportSettings::default().empirical.trials)]
    trials: usize,
    #[arg(long, default_value_t = ReportSettings::default().empirical.cap)]
    cap: u64,
    #[command(flatten)]
    common: Common,
}

fn file_pairs(path: &Path) -> Result<Vec<(String, String)>, HarnessError> {
    parse_file(&fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?)
}

/// Defaults for the benchmark, then the config file, then the flags.
fn build_config(fixed: Option<Benchmark>, flag_benchmark: Option<&str>, common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let pairs = match &common.config {
        Some(path) => file_pairs(path)?,
        None => Vec::new(),
    };
    let from_file = pairs.iter().rev().find(|(k, _)| k == "benchmark").map(|(_, v)| v.parse::<Benchmark>()).transpose()?;
    let from_flag = flag_benchmark.map(str::parse::<Benchmark>).transpose()?;
    let benchmark = match (fixed, from_flag.or(from_file)) {
        (Some(f), Some(other)) if f != other => {
            return Err(HarnessError::Config(format!("config file sets benchmark {other} for the {f} command")))
        }
        (Some(f), _) => f,
        (None, Some(b)) => b,
        (None, None) => return Err(HarnessError::Config("no benchmark given (--benchmark chain|wumpus)".into())),
    };
    let mut cfg = ExperimentConfig::for_benchmark(benchmark);
    for (k, v) in pairs.iter().filter(|(k, _)| k != "benchmark") {
        cfg.set(k, v)?;
    }
    for kv in &common.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| HarnessError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        if k.trim() == "benchmark" {
            return Err(HarnessError::Config("use --benchmark or the subcommand to pick the benchmark".into()));
        }
        cfg.set(k, v)?;
    }
    let flags: [(&str, Option<String>); 13] = [
        ("prior", common.prior.clone()),
        ("agent", common.agent.clone()),
        ("beta", common.beta.map(|v| v.to_string())),
        ("beta-r", common.beta_r.map(|v| v.to_string())),
        ("beta-p", common.beta_p.map(|v| v.to_string())),
        ("k", common.k.map(|v| v.to_string())),
        ("c", common.c.clone()),
        ("gamma", common.gamma.map(|v| v.to_string())),
        ("runs", common.runs.map(|v| v.to_string())),
        ("horizon", common.horizon.map(|v| v.to_string())),
        ("seed", common.seed.map(|v| v.to_string())),
        ("out", common.out.as_ref().map(|p| p.display().to_string())),
        ("jobs", common.jobs.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(benchmark: Benchmark, args: &RunArgs) -> Result<(), HarnessError> {
    let cfg = build_config(Some(benchmark), None, &args.common)?;
    let result = run_experiment(&cfg)?;
    print!("{}", summary(&result));
    if let Some(out) = &cfg.out {
        write_experiment(out, &result)?;
    }
    if let Some(path) = &args.trace {
        if args.trace_run >= cfg.runs {
            return Err(HarnessError::Config(format!("--trace-run {} exceeds runs {}", args.trace_run, cfg.runs)));
        }
        let record = run_one(&cfg, args.trace_run, true)?;
        let meta = vec![
            ("agent".to_string(), cfg.agent.to_string()),
            ("prior".to_string(), cfg.prior.to_string()),
            ("coefficient".to_string(), cfg.sweep_coefficient().to_string()),
            ("seed".to_string(), cfg.seed.to_string()),
            ("run".to_string(), args.trace_run.to_string()),
        ];
        write(path, &write_log(&TrajectoryLog::from_record(benchmark, meta, &record)))?;
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>, HarnessError> {
    text.split(',')
        .map(|v| v.trim().parse().map_err(|_| HarnessError::Config(format!("bad grid value '{v}'"))))
        .collect()
}

fn sweep(args: &SweepArgs) -> Result<(), HarnessError> {
    let cfg = build_config(None, args.benchmark.as_deref(), &args.common)?;
    let grid = match &args.grid {
        Some(text) => parse_grid(text)?,
        None => default_grid(&cfg),
    };
    let results = run_sweep(&cfg, &grid)?;
    let best = select_best(&results);
    let table = sweep_csv(&results, best);
    print!("{table}");
    if let Some(i) = best {
        println!("best coefficient={} mean={} std_error={}", results[i].config.sweep_coefficient(), results[i].mean, results[i].std_error);
    }
    if let Some(out) = &cfg.out {
        write(&out.with_extension("csv"), &table)?;
        write(&out.with_extension("dat"), &sweep_gnuplot(&results))?;
        if let Some(i) = best {
            let mut body = summary(&results[i]);
            body.push_str(&format!("selected_coefficient={}\n", results[i].config.sweep_coefficient()));
            write(&out.with_extension("summary"), &body)?;
        }
    }
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<(), HarnessError> {
    let fixed = if args.benchmark.is_none() && args.common.config.is_none() { Some(Benchmark::Chain) } else { None };
    let cfg = build_config(fixed, args.benchmark.as_deref(), &args.common)?;
    let settings = ReportSettings {
        rho: args.rho,
        epsilon: args.epsilon,
        delta: args.delta,
        empirical: EmpiricalSettings { trials: args.trials, cap: args.cap },
    };
    let text = report(&cfg, &settings)?;
    print!("{text}");
    if let Some(out) = &cfg.out {
        write(out, &text)?;
    }
    Ok(())
}

fn replay(path: &Path) -> Result<(), HarnessError> {
    let body = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    print!("{}", render(&parse_log(&body)?));
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Chain(args) => run(Benchmark::Chain, args),
        Command::Wumpus(args) => run(Benchmark::Wumpus, args),
        Command::Sweep(args) => sweep(args),
        Command::Bounds(args) => bounds(args),
        Command::Replay { log } => replay(log),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("varbonus: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
