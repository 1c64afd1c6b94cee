//! `--config FILE` support: `key = value` lines become flags placed ahead of
//! the command-line flags, so anything given on the command line wins.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("--config needs a file path")]
    MissingPath,
}

/// Translate config text into flags. `flag = true` becomes a bare switch and
/// `flag = false` is dropped.
pub fn config_flags(text: &str, path: &str) -> Result<Vec<String>, ConfigError> {
    let mut flags = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_owned(),
            line: n + 1,
        })?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                path: path.to_owned(),
                line: n + 1,
            });
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_owned());
            }
        }
    }
    Ok(flags)
}

/// Remove every `--config PATH` from `argv` and splice the file contents in
/// right after the subcommand token.
pub fn expand(argv: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, ConfigError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut injected = Vec::new();
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let path = if arg == "--config" {
            Some(it.next().ok_or(ConfigError::MissingPath)?)
        } else {
            arg.strip_prefix("--config=").map(str::to_owned)
        };
        match path {
            Some(p) => {
                let text =
                    std::fs::read_to_string(Path::new(&p)).map_err(|source| ConfigError::Io {
                        path: p.clone(),
                        source,
                    })?;
                injected.extend(config_flags(&text, &p)?);
            }
            None => rest.push(arg),
        }
    }
    if injected.is_empty() {
        return Ok(rest);
    }
    let at = rest
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
        .map_or(rest.len(), |i| i + 2);
    rest.splice(at..at, injected);
    Ok(rest)
}
