//! `bvw`: batch front end for the BV/BRST workbench.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or config errors.

mod commands;
mod config;
mod expr;

use std::path::PathBuf;
use std::process::ExitCode;

use bvw::linalg::Mode;
use clap::{Parser, Subcommand};

use commands::{cmd_check, cmd_cohomology, cmd_export, CliError, ExportWhat, SUITES};
use config::{Model, ModelConfig, Window};

#[derive(Debug, Parser)]
#[command(
    name = "bvw",
    version,
    about = "Exact BV/BRST workbench for U(n) gauge theories from finite spectral triples"
)]
struct Cli {
    /// Model configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated suites for `check`: lie,triple,cme,qme,hochschild,brst.
    #[arg(long, global = true, value_delimiter = ',')]
    check: Vec<String>,
    /// Truncation window kmin:kmax:D, overriding the config.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run verification suites and write check.json.
    Check,
    /// Truncated BV (and BRST) cohomology with the Hochschild cross-check.
    Cohomology,
    /// Write one of the JSON exports.
    Export {
        #[arg(value_enum)]
        what: ExportWhat,
    },
}

fn load(cli: &Cli) -> Result<Model, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    let mut config = ModelConfig::load(path)?;
    if let Some(w) = cli.window {
        config.window = Some(w);
    }
    if let Some(m) = cli.mode {
        config.mode = Some(m);
    }
    if let Some(o) = &cli.out {
        config.out = Some(o.clone());
    }
    let base_dir = path.parent().map(PathBuf::from).unwrap_or_default();
    Ok(Model::resolve(config, &base_dir)?)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let model = load(cli)?;
    match &cli.command {
        Command::Check => {
            let which: Vec<String> = if cli.check.is_empty() {
                SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                cli.check.clone()
            };
            let report = cmd_check(&model, &which)?;
            let path = report.write(&model, "check.json")?;
            for (name, body) in &report.suites {
                let ok = body.get("ok").and_then(|v| v.as_bool()).unwrap_or(false);
                println!("{} {name}", if ok { "ok  " } else { "FAIL" });
            }
            println!("report: {}", path.display());
            Ok(report.ok)
        }
        Command::Cohomology => {
            let report = cmd_cohomology(&model)?;
            let path = report.write(&model, "cohomology.json")?;
            if let Some(degrees) = report.suites["bv"]["report"]["degrees"].as_array() {
                for d in degrees {
                    println!("H^{} = {} (stable: {})", d["k"], d["dim"], d["stable"]);
                }
            }
            println!("report: {}", path.display());
            Ok(report.ok)
        }
        Command::Export { what } => {
            let path = cmd_export(&model, *what)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    bvw::exec::init_from_env();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
