use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nltrace_cli::{compare, config, run_config, Experiment};

#[derive(Parser)]
#[command(name = "nltrace", version, about = "Nonlocal trace, Hardy and obstacle experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (overrides the config).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare two results.csv files (or run directories).
    Compare {
        baseline: PathBuf,
        candidate: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        rel_tol: f64,
    },
    /// List experiment names.
    ListExperiments,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config: path, output, threads } => {
            let cfg = match config::load(&path) {
                Ok((cfg, _)) => cfg,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            match run_config(&cfg, output.as_deref(), threads) {
                Ok(run) => {
                    for r in &run.output.reports {
                        let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.6}"));
                        let status = if r.pass { "PASS" } else { "FAIL" };
                        println!("{status} {:<28} level {} ratio {ratio:<12} {}", r.theorem_id, r.level, r.family);
                    }
                    println!("wrote {} files to {}", run.files.len(), run.dir.display());
                    if run.output.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{}: {e:#}", path.display());
                    ExitCode::from(2)
                }
            }
        }
        Command::Compare { baseline, candidate, rel_tol } => match compare::compare(&baseline, &candidate) {
            Ok(rep) => {
                for d in &rep.diffs {
                    println!("{} {}: {} -> {} (rel {:e})", d.key, d.metric, d.baseline, d.candidate, d.rel_diff);
                }
                for m in &rep.missing {
                    println!("unmatched row {m}");
                }
                println!(
                    "{} rows, max relative difference {:e}, bitwise {}",
                    rep.rows,
                    rep.max_rel_diff,
                    if rep.bitwise_equal { "equal" } else { "different" }
                );
                if rep.within(rel_tol) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("{e:#}");
                ExitCode::from(2)
            }
        },
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<24} {}", e.name(), e.describe());
            }
            ExitCode::SUCCESS
        }
    }
}
