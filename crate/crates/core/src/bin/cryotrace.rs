use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cryotrace::config::RunConfig;

#[derive(Parser)]
#[command(version, about = "Trace seed molecules through a voxelized buffer-gas flow field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML config (or a run manifest) and write its artifacts.
    Run {
        config: PathBuf,
        /// Master seed, overriding tracer.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads. Results do not depend on this.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Output directory; falls back to output.dir in the config.
        #[arg(long, env = "CRYOTRACE_OUT")]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate {
        config: PathBuf,
        /// Print diagnostics as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { config, json } => match RunConfig::validate_path(&config) {
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
            Ok(diags) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&diags).expect("diagnostics serialize"));
                } else if diags.is_empty() {
                    println!("{}: ok", config.display());
                } else {
                    for d in &diags {
                        eprintln!("{}: {d}", config.display());
                    }
                }
                if diags.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
        },
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = cfg.validate() {
                eprintln!("error: {}: invalid config\n{e}", config.display());
                return ExitCode::from(2);
            }
            let out = out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("cryotrace-out"));
            match cryotrace::run::run(&cfg, &out, workers, seed) {
                Ok(runs) => {
                    for r in runs {
                        let s = &r.summary;
                        println!(
                            "{}: N_T={} N_E={} N_L={} source={} cap={} eta={} discarded={}",
                            r.dir.display(),
                            s.counts.total,
                            s.counts.exits,
                            s.counts.wall_losses,
                            s.counts.source_disc,
                            s.counts.collision_cap,
                            s.efficiency.map_or("undefined".into(), |e| format!("{e:.4}")),
                            s.ensemble.discarded
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
