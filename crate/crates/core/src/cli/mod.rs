//! Command-line front end: `weyl-arc-sim <command> [--config <path>]
//! [--out <dir>] [--threads N] [--override key=value ...]`.
//!
//! Every command is a preset reproducing one reference figure; each default
//! can be changed in the TOML configuration or with `--override`. Outputs go
//! to the run directory together with `manifest.csv`. Failures print a JSON
//! error record on stderr (and to `error.json` in the run directory) and
//! exit with 2 (configuration), 3 (numerical failure) or 4 (I/O).

pub mod commands;
pub mod config;
pub mod io;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

use crate::error::{Error, Result};

pub use config::{parse_config, parse_config_with, Command, RunConfig};
pub use io::{BinaryGrid, Columnar, ErrorRecord, GridData, OutputDir};

#[derive(Debug, Parser)]
#[command(name = "weyl-arc-sim", version, about = "Quantum emitters on a photonic Weyl-semimetal lattice")]
pub struct Args {
    /// Command to run (bands, phase-diagram, fermi-arcs, berry-surface,
    /// evolve, bloch-map, tof, farfield, chiral-channel, concurrence-scan,
    /// cavity, j12-scan, chern, weyl-points).
    pub command: String,

    /// TOML configuration; without it the command's reference preset runs.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory (default `out/<command>`).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads for grids and scans (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,

    /// `key=value` assignments applied on top of the configuration, with
    /// dotted keys such as `experiment.t_final_J=5`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Summary of a successful run.
#[derive(Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    pub files: Vec<io::OutputFile>,
}

/// Parse the configuration for `args` (the file, the command name and the
/// overrides) and return it together with its hash.
pub fn load(args: &Args) -> Result<(RunConfig, String)> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    load_text(args, &text)
}

/// [`load`] with the configuration given as text (`args.config` ignored).
pub fn load_text(args: &Args, text: &str) -> Result<(RunConfig, String)> {
    let command: Command = args.command.parse().map_err(|e: String| Error::Config(vec![e]))?;
    let mut root: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![format!("malformed TOML: {}", e.message())]))?;
    let named = root.get("experiment").and_then(|e| e.get("command")).and_then(toml::Value::as_str).map(str::to_string);
    match named {
        Some(n) if n != command.name() => {
            return Err(Error::Config(vec![format!("the configuration is for '{n}' but '{}' was requested", command.name())]));
        }
        Some(_) => {}
        None => {
            let exp = root.entry("experiment").or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if let toml::Value::Table(t) = exp {
                t.insert("command".into(), toml::Value::String(command.name().into()));
            }
        }
    }
    let effective = toml::to_string(&root).map_err(|e| Error::Format(e.to_string()))?;
    let config = parse_config_with(&effective, &args.overrides)?;
    let mut hashed = effective;
    for o in &args.overrides {
        hashed.push_str("\n# override ");
        hashed.push_str(o);
    }
    Ok((config, io::sha256_hex(hashed.as_bytes())))
}

fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialised; ignoring threads = {n}");
        }
    }
}

/// Run one command end to end.
pub fn execute(args: &Args) -> Result<RunReport> {
    let start = Instant::now();
    let (config, hash) = load(args)?;
    run_loaded(args, config, &hash, start)
}

/// [`execute`] with the configuration given as text.
pub fn execute_text(args: &Args, text: &str) -> Result<RunReport> {
    let start = Instant::now();
    let (config, hash) = load_text(args, text)?;
    run_loaded(args, config, &hash, start)
}

fn run_loaded(args: &Args, config: RunConfig, hash: &str, start: Instant) -> Result<RunReport> {
    configure_threads(args.threads.or(config.threads));
    let out_dir = args.out.clone().unwrap_or_else(|| Path::new("out").join(config.command.name()));
    let mut out = OutputDir::create(&out_dir)?;
    log::info!("running {} into {}", config.command, out_dir.display());
    commands::run(&config, &mut out)?;
    let manifest = out.manifest(config.command.name(), hash, start.elapsed().as_secs_f64())?;
    Ok(RunReport { out_dir, manifest, files: out.files })
}

/// Report a failure: JSON line on stderr and `error.json` in the output
/// directory when it can be written. Returns the exit code.
pub fn report_failure(args: &Args, error: &Error) -> i32 {
    let record = ErrorRecord::from_error(error);
    let json = record.to_json();
    eprintln!("{json}");
    let dir = args.out.clone().unwrap_or_else(|| Path::new("out").join(&args.command));
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = io::write_atomic(&dir.join("error.json"), json.as_bytes());
    }
    record.exit_code
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    match execute(&args) {
        Ok(report) => {
            println!("{}", report.manifest.display());
            0
        }
        Err(e) => report_failure(&args, &e),
    }
}
