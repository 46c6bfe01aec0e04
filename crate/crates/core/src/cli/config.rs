//! Flat `key = value` config files merged underneath command-line flags.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Command};

use super::{RunArgs, UsageError};

/// Long flag names a config file may set.
pub fn known_keys() -> BTreeSet<String> {
    RunArgs::augment_args(Command::new("keys"))
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .filter(|k| k != "config")
        .collect()
}

/// Turn config text into `--key=value` arguments, in file order.
///
/// Blank lines and lines starting with `#` are ignored. Keys may use `-` or
/// `_`; they must name a flag of the command.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<OsString>, UsageError> {
    let keys = known_keys();
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| UsageError(format!("{origin}:{}: {msg}", lineno + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected `key = value`, got {line:?}")))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if !keys.contains(&key) {
            return Err(at(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(at(format!("missing value for `{key}`")));
        }
        out.push(OsString::from(format!("--{key}={value}")));
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Vec<OsString>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text, &path.display().to_string())
}
