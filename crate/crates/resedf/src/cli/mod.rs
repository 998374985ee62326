//! The `resedf` command-line surface.
//!
//! ```text
//! resedf estimate  --data <path> --config <path> --out <path>
//! resedf simulate  --config <path> --out <dir> [--seed <u64>] [--workers <count>]
//! resedf efficiency --config <path> --out <path>
//! ```
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! `RESEDF_WORKERS` overrides the simulate worker count (a `--workers` flag
//! wins over the environment, which wins over the config file).

mod commands;
mod config;
mod ingest;

pub use commands::{
    cmd_efficiency, cmd_estimate, cmd_simulate, EfficiencyArgs, EstimateArgs, SimulateArgs,
};
pub use ingest::ingest_dataset;

use crate::Result;
use std::path::PathBuf;

pub const WORKER_ENV_VAR: &str = "RESEDF_WORKERS";

const USAGE: &str = "\
usage:
  resedf estimate   --data <path> --config <path> --out <path>
  resedf simulate   --config <path> --out <dir> [--seed <u64>] [--workers <count>]
  resedf efficiency --config <path> --out <path>

exit codes: 0 ok, 1 usage, 2 data error, 3 numerical failure
";

/// Runs the CLI on `args` (without the program name) and returns the exit
/// code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    match dispatch(&args) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("resedf: {e}");
            commands::exit_code(&e)
        }
        Err(usage) => {
            eprintln!("resedf: {usage}");
            eprint!("{USAGE}");
            1
        }
    }
}

/// Outer error: usage problem (exit 1). Inner: execution result.
fn dispatch(args: &[String]) -> std::result::Result<Result<()>, String> {
    let subcommand = args.first().ok_or("missing subcommand")?;
    let flags = parse_flags(&args[1..])?;
    match subcommand.as_str() {
        "estimate" => {
            let args = EstimateArgs {
                data: flags.require("--data")?,
                config: flags.require("--config")?,
                out: flags.require("--out")?,
            };
            flags.reject_unused(&["--data", "--config", "--out"])?;
            Ok(cmd_estimate(&args))
        }
        "simulate" => {
            let seed_override = flags.parse_optional::<u64>("--seed")?;
            let workers_override = match flags.parse_optional::<usize>("--workers")? {
                Some(w) => Some(w),
                None => env_workers()?,
            };
            let args = SimulateArgs {
                config: flags.require("--config")?,
                out_dir: flags.require("--out")?,
                seed_override,
                workers_override,
            };
            flags.reject_unused(&["--config", "--out", "--seed", "--workers"])?;
            Ok(cmd_simulate(&args))
        }
        "efficiency" => {
            let args = EfficiencyArgs {
                config: flags.require("--config")?,
                out: flags.require("--out")?,
            };
            flags.reject_unused(&["--config", "--out"])?;
            Ok(cmd_efficiency(&args))
        }
        other => Err(format!("unknown subcommand `{other}`")),
    }
}

fn env_workers() -> std::result::Result<Option<usize>, String> {
    match std::env::var(WORKER_ENV_VAR) {
        Ok(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{WORKER_ENV_VAR}: `{v}` is not a worker count")),
        Err(_) => Ok(None),
    }
}

struct Flags {
    pairs: Vec<(String, String)>,
}

impl Flags {
    fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> std::result::Result<PathBuf, String> {
        self.get(name)
            .map(PathBuf::from)
            .ok_or_else(|| format!("missing required flag {name}"))
    }

    fn parse_optional<T: std::str::FromStr>(
        &self,
        name: &str,
    ) -> std::result::Result<Option<T>, String> {
        self.get(name)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| format!("{name}: `{v}` is not valid"))
            })
            .transpose()
    }

    fn reject_unused(&self, allowed: &[&str]) -> std::result::Result<(), String> {
        for (k, _) in &self.pairs {
            if !allowed.contains(&k.as_str()) {
                return Err(format!("unknown flag {k}"));
            }
        }
        Ok(())
    }
}

fn parse_flags(args: &[String]) -> std::result::Result<Flags, String> {
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let key = &args[i];
        if !key.starts_with("--") {
            return Err(format!("unexpected argument `{key}`"));
        }
        let value = args
            .get(i + 1)
            .ok_or_else(|| format!("flag {key} needs a value"))?;
        if pairs.iter().any(|(k, _): &(String, String)| k == key) {
            return Err(format!("flag {key} given twice"));
        }
        pairs.push((key.clone(), value.clone()));
        i += 2;
    }
    Ok(Flags { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn missing_subcommand_is_usage() {
        assert_eq!(run(strs(&[])), 1);
        assert_eq!(run(strs(&["frobnicate"])), 1);
    }

    #[test]
    fn missing_flags_are_usage() {
        assert_eq!(run(strs(&["estimate"])), 1);
        assert_eq!(run(strs(&["simulate", "--config", "x"])), 1);
        assert_eq!(run(strs(&["estimate", "--data"])), 1);
    }

    #[test]
    fn unknown_flag_is_usage() {
        assert_eq!(
            run(strs(&[
                "efficiency", "--config", "a", "--out", "b", "--seed", "3"
            ])),
            1
        );
    }

    #[test]
    fn missing_files_are_data_errors() {
        assert_eq!(
            run(strs(&[
                "efficiency",
                "--config",
                "/nonexistent/config",
                "--out",
                "/tmp/out.csv"
            ])),
            2
        );
    }
}
