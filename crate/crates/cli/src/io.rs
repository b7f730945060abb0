//! File access and configuration layering.

use std::fs;
use std::io::Write;
use std::path::Path;

use statdec::codec::DecodingProblem;
use statdec::experiment::ExperimentConfig;
use statdec::formats::{read_instance, read_pool};
use statdec::harvest::ParityPool;

use crate::error::{format, usage, CliError, CliResult};
use crate::GlobalArgs;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `out`, or to stdout when absent.
pub fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn load_instance(path: &Path) -> CliResult<DecodingProblem> {
    read_instance(&read_text(path)?).map_err(|e| format(format!("{}: {e}", path.display())))
}

pub fn load_pool(path: &Path, problem: Option<&DecodingProblem>) -> CliResult<ParityPool> {
    read_pool(&read_text(path)?, problem.map(|p| &p.code)).map_err(|e| format(format!("{}: {e}", path.display())))
}

/// The configuration file (or the defaults), with `--seed` and the given
/// flag values applied on top. Flag names equal configuration keys.
pub fn layered_config(g: &GlobalArgs, flags: &[(&str, Option<String>)]) -> CliResult<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::from_text(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(usage)?;
        }
    }
    Ok(cfg)
}
