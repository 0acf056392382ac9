use std::path::PathBuf;
use std::process::ExitCode;

use amlab::experiment::{run, validate, ExperimentConfig, Level};
use clap::{Parser, Subcommand};
use serde_json::json;

/// Special-flow and Aubry-Mather experiment runner.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write verdicts.json, manifest.json and CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check every precondition without computing anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn fail(err: &amlab::Error) -> ExitCode {
    let doc = json!({"error": {"kind": err.kind(), "message": err.to_string()}});
    eprintln!("{}", serde_json::to_string_pretty(&doc).expect("json value serializes"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out_dir, seed } => {
            let mut cfg = match ExperimentConfig::from_path(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("lab-out").join(cfg.experiment.name()));
            match run(&cfg, &dir) {
                Ok(outcome) => {
                    let doc = json!({
                        "experiment": cfg.experiment.name(),
                        "verdict": outcome.verdicts["verdict"],
                        "out_dir": outcome.out_dir,
                        "files": outcome.files,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json value serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => {
            let cfg = match ExperimentConfig::from_path(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let diags = validate(&cfg);
            println!("{}", serde_json::to_string_pretty(&diags).expect("diagnostics serialize"));
            if diags.iter().any(|d| d.level == Level::Error) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
