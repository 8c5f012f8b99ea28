//! `fhd <subcommand> --config <path> [--out <dir>] [--set key=value ..]`
//!
//! Each run writes `<command>-<hash>.json` into the output directory, where
//! `<hash>` identifies the effective configuration, plus the command's CSV,
//! PGM or PPM artifacts under the same prefix. Exit status is 0 on success,
//! 2 when the computation fails or reaches a negative verdict, 1 on I/O
//! errors. `FHD_THREADS` caps the worker threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use clap::Parser;
use commands::{Command, Outcome};
use config::RunConfig;
use fhd::Error;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fhd", version, about = "Fibered holomorphic dynamics toolkit")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config override `key=value`, the value parsed as JSON when possible.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(cmd: Command, cfg: &RunConfig, outcome: Result<Outcome, Error>) -> Result<u8, Error> {
    let hash = cfg.hash();
    let prefix = format!("{}-{hash}", cmd.name());
    let (status, code, result, error, artifacts) = match outcome {
        Ok(o) => {
            let mut names = Vec::new();
            for (suffix, bytes) in &o.artifacts {
                let name = format!("{prefix}{suffix}");
                write_file(&cfg.out.join(&name), bytes)?;
                names.push(name);
            }
            let (status, code) = if o.failed { ("failed", 2) } else { ("ok", 0) };
            (status, code, o.result, serde_json::Value::Null, names)
        }
        Err(e) => {
            let code = if e.is_io() { 1 } else { 2 };
            let err = json!({"message": e.to_string(), "error": e});
            ("error", code, serde_json::Value::Null, err, Vec::new())
        }
    };
    let report = json!({
        "command": cmd.name(),
        "config_hash": hash,
        "status": status,
        "config": cfg,
        "result": result,
        "error": error,
        "artifacts": artifacts,
    });
    let text = fhd::io::to_json(&report)?;
    write_file(&cfg.out.join(format!("{prefix}.json")), text.as_bytes())?;
    println!("{}", cfg.out.join(format!("{prefix}.json")).display());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FHD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
    }
    let mut cfg = match RunConfig::load(cli.config.as_deref(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fhd: {e}");
            return ExitCode::from(if e.is_io() { 1 } else { 2 });
        }
    };
    cfg.command = Some(cli.command.name().to_string());
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    let outcome = commands::run(cli.command, &cfg);
    if let Err(e) = &outcome {
        eprintln!("fhd {}: {e}", cli.command.name());
    }
    match emit(cli.command, &cfg, outcome) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fhd: {e}");
            ExitCode::from(1)
        }
    }
}
