// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oqs_core::models::MODEL_NAMES;
use oqs_lab::config::ModelConfig;
use oqs_lab::{exit, parse_config_in, run_experiment, validate_suite, Method, RunError};

/// Open-quantum-system experiment runner.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config. Without `output_path` the CSV
    /// goes to stdout.
    Run { config: PathBuf },
    /// Run the cross-method validation suite.
    Validate,
    /// List models with their observables and default horizon.
    ListModels,
    /// List solver methods.
    ListMethods,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("OQS_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("OQS_LAB_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn run(path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return code(exit::CONFIG_ERROR);
        }
    };
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let mut cfg = match parse_config_in(&text, &base) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return code(exit::CONFIG_ERROR);
        }
    };
    if let Some(out) = &cfg.output_path {
        if out.is_relative() {
            cfg.output_path = Some(base.join(out));
        }
    }
    match run_experiment(&cfg) {
        Ok(series) => {
            match &cfg.output_path {
                Some(p) => eprintln!("wrote {} records to {}", series.records.len(), p.display()),
                None => match series.to_csv() {
                    Ok(csv) => print!("{csv}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return code(exit::SOLVER_ERROR);
                    }
                },
            }
            code(exit::SUCCESS)
        }
        Err(e @ RunError::Solver { .. }) | Err(e @ RunError::Output(_)) => {
            eprintln!("error: {e}");
            code(exit::SOLVER_ERROR)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("config error: {e}");
        return code(exit::CONFIG_ERROR);
    }
    match cli.command {
        Command::Run { config } => run(&config),
        Command::Validate => {
            let report = validate_suite();
            println!("{report}");
            if report.all_passed() {
                code(exit::SUCCESS)
            } else {
                code(exit::VALIDATION_FAILURE)
            }
        }
        Command::ListModels => {
            for name in MODEL_NAMES {
                let spec = ModelConfig::default_for(name).and_then(|m| m.build(std::path::Path::new(".")));
                match spec {
                    Ok(s) => println!(
                        "{name}\tdim {}\thorizon {}\tobservables {}",
                        s.dim(),
                        s.default_horizon,
                        s.observable_names().join(",")
                    ),
                    Err(e) => println!("{name}\t({e})"),
                }
            }
            code(exit::SUCCESS)
        }
        Command::ListMethods => {
            for m in Method::ALL {
                println!("{m}\t{}", m.description());
            }
            code(exit::SUCCESS)
        }
    }
}
