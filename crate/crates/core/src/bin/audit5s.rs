//! Command-line entry point for the 5S audit pipeline.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use audit5s::client::SystemClock;
use audit5s::config::{duration_from_secs, parse_backend, parse_formats, FileConfig, RunConfig};
use audit5s::pipeline::{
    run_audit, run_economics, run_render, run_validate, PipelineError, PipelineOutput,
};

#[derive(Parser)]
#[command(
    name = "audit5s",
    version,
    about = "Automated 5S workplace audits from images",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Config file (TOML); flags override file values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for reports and the history store
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Report formats, comma separated: json,csv,html
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    formats: Option<Vec<String>>,

    /// History store file (defaults to OUT/audit_history.jsonl)
    #[arg(long, value_name = "PATH")]
    history: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a directory of images and append results to the history
    Audit {
        #[command(flatten)]
        common: CommonArgs,

        /// Directory of PNG/JPEG images to audit
        #[arg(long, value_name = "DIR")]
        batch: Option<PathBuf>,

        /// Backend: mock or http
        #[arg(long, value_name = "NAME")]
        backend: Option<String>,

        /// Seed for the mock backend
        #[arg(long, value_name = "N")]
        seed: Option<u64>,

        /// Delay between consecutive requests, seconds
        #[arg(long, value_name = "SECONDS")]
        delay: Option<f64>,

        /// Automatic retries per image
        #[arg(long, value_name = "N")]
        retries: Option<u32>,

        /// Per-attempt timeout, seconds
        #[arg(long, value_name = "SECONDS")]
        timeout: Option<f64>,

        /// Audits in the Shitsuke consistency window
        #[arg(long, value_name = "N")]
        window: Option<usize>,
    },
    /// Compare stored audit results against human ground truth
    Validate {
        #[command(flatten)]
        common: CommonArgs,

        /// Ground-truth CSV (image_id,seiri,...,shitsuke[,class][,factor])
        #[arg(long = "ground-truth", value_name = "PATH")]
        ground_truth: Option<PathBuf>,
    },
    /// Evaluate the cost model for a scenario
    Economics {
        #[command(flatten)]
        common: CommonArgs,

        /// Scenario file (TOML); omit for the built-in default scenario
        #[arg(long, value_name = "PATH")]
        scenario: Option<PathBuf>,

        /// Projection horizon in years
        #[arg(long, value_name = "YEARS")]
        horizon: Option<u32>,
    },
    /// Re-render a stored JSON report into other formats
    Report {
        #[command(flatten)]
        common: CommonArgs,

        /// Source JSON report
        #[arg(long, value_name = "PATH")]
        from: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(output) => {
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            println!("{}", output.summary);
            for file in &output.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<PipelineOutput, PipelineError> {
    match cli.command {
        Command::Audit {
            common,
            batch,
            backend,
            seed,
            delay,
            retries,
            timeout,
            window,
        } => {
            let mut config = base_config(&common)?;
            if let Some(name) = &backend {
                config.backend = parse_backend(name, seed.unwrap_or(0)).map_err(config_err)?;
            } else if let Some(seed) = seed {
                config.backend = audit5s::config::BackendChoice::Mock { seed };
            }
            if let Some(dir) = batch {
                config.batch_dir = Some(dir);
            }
            if let Some(secs) = delay {
                config.client.inter_request_delay =
                    duration_from_secs(secs, "--delay").map_err(config_err)?;
            }
            if let Some(n) = retries {
                config.client.max_retries = n;
            }
            if let Some(secs) = timeout {
                config.client.request_timeout =
                    duration_from_secs(secs, "--timeout").map_err(config_err)?;
            }
            if let Some(n) = window {
                config.shitsuke_window = n;
            }
            run_audit(&config, Arc::new(SystemClock::new()))
        }
        Command::Validate {
            common,
            ground_truth,
        } => {
            let mut config = base_config(&common)?;
            if let Some(path) = ground_truth {
                config.ground_truth = Some(path);
            }
            run_validate(&config)
        }
        Command::Economics {
            common,
            scenario,
            horizon,
        } => {
            let mut config = base_config(&common)?;
            if let Some(path) = scenario {
                config.scenario_path = Some(path);
            }
            if let Some(years) = horizon {
                config.horizon_years = years;
            }
            run_economics(&config)
        }
        Command::Report { common, from } => {
            let config = base_config(&common)?;
            run_render(&from, &config.formats, &config.out_dir)
        }
    }
}

/// defaults, then config file, then the shared flags
fn base_config(common: &CommonArgs) -> Result<RunConfig, PipelineError> {
    let mut config = RunConfig::default();
    if let Some(path) = &common.config {
        let file = FileConfig::load(path).map_err(config_err)?;
        config.apply_file(&file).map_err(config_err)?;
    }
    if let Some(dir) = &common.out {
        config.out_dir = dir.clone();
    }
    if let Some(formats) = &common.formats {
        config.formats = parse_formats(formats).map_err(config_err)?;
    }
    if let Some(path) = &common.history {
        config.history_path = Some(path.clone());
    }
    Ok(config)
}

fn config_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(e.to_string())
}
