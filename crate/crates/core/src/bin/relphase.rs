use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relphase::scenarios::{
    emit_config, list_scenarios, parse_config, run_file, OutputFormat, RunOptions, EXIT_CONFIG, EXIT_OK,
};

#[derive(Parser)]
#[command(name = "relphase", version, about = "Run coherence and phase-space scenarios")]
struct Cli {
    /// Root directory for scenario outputs.
    #[arg(long, global = true, env = "RELPHASE_OUTPUT_DIR", default_value = "relphase-out")]
    output_dir: PathBuf,
    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output format (json, csv, text).
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Multiply every assertion tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario configuration and write its outputs.
    Run { config: PathBuf },
    /// Parse and validate a configuration, printing the resolved form.
    Validate { config: PathBuf },
    /// List the available scenarios with their parameters.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    let code = match cli.command {
        Command::ListScenarios => {
            print!("{}", list_scenarios());
            EXIT_OK
        }
        Command::Validate { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            match parse_config(&text) {
                Ok(cfg) => {
                    print!("{}", emit_config(&cfg));
                    EXIT_OK
                }
                Err(err) => {
                    for i in &err.issues {
                        eprintln!("{}:{}:{}: {}", config.display(), i.line, i.column, i.message);
                    }
                    EXIT_CONFIG
                }
            }
        }
        Command::Run { config } => {
            let opts = RunOptions {
                output_dir: cli.output_dir,
                seed: cli.seed,
                format: cli.format,
                tolerance_scale: cli.tolerance_scale,
            };
            let outcome = run_file(&config, &opts);
            if outcome.exit_code == EXIT_CONFIG {
                eprintln!("{}", outcome.message);
            } else {
                print!("{}", outcome.message);
            }
            outcome.exit_code
        }
    };
    ExitCode::from(code as u8)
}
