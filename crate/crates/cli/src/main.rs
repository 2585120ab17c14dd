#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod fmt;

use std::process::ExitCode;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use args::{Cli, Command, Merge, DEFAULT_SEED, SEED_ENV};
use commands::Failure;

/// Top-level settings read from the config file; the rest belongs to the subcommand.
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    rest: Map<String, Value>,
}

fn read_config(path: &std::path::Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))?;
    let mut map: Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))?;
    let take = |map: &mut Map<String, Value>, key: &str| -> Result<Option<u64>, Failure> {
        match map.remove(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Failure::Validation(format!("config: `{key}` must be a non-negative integer"))),
        }
    };
    let seed = take(&mut map, "seed")?;
    let threads = take(&mut map, "threads")?.map(|t| t as usize);
    Ok(FileConfig { seed, threads, rest: map })
}

fn with_file<T: Merge + DeserializeOwned + Default>(flags: T, file: &Option<FileConfig>) -> Result<T, Failure> {
    match file {
        None => Ok(flags),
        Some(cfg) => {
            let from_file: T = serde_json::from_value(Value::Object(cfg.rest.clone()))
                .map_err(|e| Failure::Validation(format!("config: {e}")))?;
            Ok(flags.merge(from_file))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = cli.config.as_deref().map(read_config).transpose()?;
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::Validation(format!("{SEED_ENV} must be a non-negative integer, got `{s}`")))?,
        ),
        Err(_) => None,
    };
    let seed = cli
        .seed
        .or(file.as_ref().and_then(|f| f.seed))
        .or(env_seed)
        .unwrap_or(DEFAULT_SEED);
    if let Some(t) = cli.threads.or(file.as_ref().and_then(|f| f.threads)) {
        if t == 0 {
            return Err(Failure::Validation("invalid threads: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    match cli.command {
        Command::Info(a) => commands::info(with_file(a, &file)?),
        Command::Rbeta(a) => commands::rbeta(with_file(a, &file)?),
        Command::DesignOpt(a) => commands::design_opt(with_file(a, &file)?, seed),
        Command::PiCurve(a) => commands::pi_curve_cmd(with_file(a, &file)?, seed),
        Command::Simulate(a) => commands::simulate(with_file(a, &file)?, seed),
        Command::Bound(a) => commands::bound(with_file(a, &file)?, seed),
        Command::EOptimal(a) => commands::e_optimal(with_file(a, &file)?, seed),
        Command::Fit(a) => commands::fit(with_file(a, &file)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
