use std::path::{Path, PathBuf};
use std::time::Duration;

use quadapn::Error;
use serde::Deserialize;

/// Optional defaults read from a TOML file; command-line flags take precedence.
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub budget: Option<String>,
    pub restarts: Option<usize>,
    pub jobs: Option<usize>,
    pub fix_ceiling: Option<usize>,
    pub catalog: Option<PathBuf>,
    pub det_ceiling: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Accepts `250ms`, `10s`, `5m`, `1h` or a bare number of seconds.
pub fn parse_duration(s: &str) -> Result<Duration, Error> {
    let s = s.trim();
    let split = s.find(|c: char| !c.is_ascii_digit() && c != '.').unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.parse().map_err(|_| Error::Parse(format!("bad duration {s:?}")))?;
    let secs = match unit {
        "" | "s" => value,
        "ms" => value / 1000.0,
        "m" => value * 60.0,
        "h" => value * 3600.0,
        _ => return Err(Error::Parse(format!("bad duration unit in {s:?}"))),
    };
    Ok(Duration::from_secs_f64(secs))
}
