use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsched::harness::{self, emit_reports, ExperimentConfig, Report};
use qsched::workload::{generate_synthetic, parse_trace, write_trace, SynthParams};
use qsched::{Error, Result};

/// Q-learning cluster scheduling simulator.
#[derive(Parser)]
#[command(name = "qsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic workload trace.
    GenWorkload {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        tasks: usize,
        /// Mean arrivals per tick.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        min_duration: u64,
        #[arg(long, default_value_t = 30)]
        max_duration: u64,
        #[arg(long, default_value_t = 4)]
        max_cpu: u32,
        #[arg(long, default_value_t = 8)]
        max_mem: u32,
    },
    /// Train the agent and write the reward curve and Q-table.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Train the agent, then evaluate it against the baselines.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Train and evaluate one agent per learning rate.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated learning rates.
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check a trace file and print its task count and checksum.
    ValidateTrace { path: PathBuf },
}

fn out_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> Result<PathBuf> {
    flag.or_else(|| config.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out-dir or set output_dir".into()))
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenWorkload { out, tasks, rate, seed, min_duration, max_duration, max_cpu, max_mem } => {
            let params = SynthParams {
                task_count: tasks,
                arrival_rate: rate,
                duration_range: (min_duration, max_duration),
                cpu_range: (1, max_cpu),
                mem_range: (1, max_mem),
                seed,
                ..SynthParams::default()
            };
            let workload = generate_synthetic(&params)?;
            write_trace(&workload, &out)?;
            println!("wrote {} tasks to {} (sha256 {})", workload.len(), out.display(), workload.checksum());
        }
        Command::Train { config, out_dir: dir } => {
            let config = load(&config)?;
            let dir = out_dir(dir, &config)?;
            let (workload, training) = harness::train_experiment(&config)?;
            let mut report = Report::new(&config, workload.checksum());
            report.reward_curve = Some(training.curve);
            print_written(&emit_reports(&mut report, Some(&training.table), &dir)?);
        }
        Command::Compare { config, out_dir: dir } => {
            let config = load(&config)?;
            let dir = out_dir(dir, &config)?;
            let comparison = harness::compare(&config)?;
            let mut report = Report::new(&config, &comparison.table.workload_checksum);
            for row in &comparison.table.rows {
                let m = &row.report.metrics;
                let mean = m.mean_completion_time.map_or("NA".to_string(), |v| format!("{v:.3}"));
                println!(
                    "{:<12} mean_completion_time {:>9} makespan {:>6} utilization {:>6.2}%{}",
                    row.report.policy.as_str(),
                    mean,
                    m.makespan,
                    m.resource_utilization,
                    if m.truncated { " (truncated)" } else { "" }
                );
            }
            report.comparison = Some(comparison.table);
            let table = comparison.training.map(|t| {
                report.reward_curve = Some(t.curve);
                t.table
            });
            print_written(&emit_reports(&mut report, table.as_ref(), &dir)?);
        }
        Command::Sweep { config, alphas, out_dir: dir } => {
            let config = load(&config)?;
            let dir = out_dir(dir, &config)?;
            let sweep = harness::sweep_alpha(&config, &alphas)?;
            let mut report = Report::new(&config, &sweep.workload_checksum);
            report.sweep = Some(sweep);
            print_written(&emit_reports(&mut report, None, &dir)?);
        }
        Command::ValidateTrace { path } => {
            let workload = parse_trace(&path)?;
            println!("ok: {} tasks, sha256 {}", workload.len(), workload.checksum());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
