//! Flat key/value parameter files and small list parsers shared by the
//! subcommands.

use std::fs;
use std::path::Path;

use fellerlab_core::{FellerParams, JumpingMeasure, P4Measure};

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "io error: {e}"),
            ConfigError::Parse(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError::Io(e)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse(msg.into())
}

/// Parses a flat key/value parameter file.
///
/// Recognized keys: `p1`, `p2`, `p3` (decimal or scientific notation),
/// `p4.kind` (`zero`, `atoms`, `power`), `p4.atoms` (comma-separated
/// `x:mass`), `p4.density` (`power(c, alpha, M)` for mass `c x^alpha` on
/// `(0, M]`). Lines may be empty or start with `#`.
pub fn parse_params_file(path: &Path) -> Result<FellerParams, ConfigError> {
    let text = fs::read_to_string(path)?;
    parse_params_text(&text)
}

pub fn parse_params_text(text: &str) -> Result<FellerParams, ConfigError> {
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    let mut p3 = 0.0;
    let mut kind: Option<String> = None;
    let mut atoms: Option<Vec<(f64, f64)>> = None;
    let mut density: Option<(f64, f64, f64)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "p1" => p1 = parse_f64(value)?,
            "p2" => p2 = parse_f64(value)?,
            "p3" => p3 = parse_f64(value)?,
            "p4.kind" => kind = Some(value.to_string()),
            "p4.atoms" => atoms = Some(parse_pair_list(value, ':')?),
            "p4.density" => density = Some(parse_power_density(value)?),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    let p4 = match kind.as_deref() {
        None | Some("zero") => {
            if atoms.is_some() || density.is_some() {
                return Err(bad("p4.kind must be set when atoms/density are given"));
            }
            P4Measure::Zero
        }
        Some("atoms") => {
            let atoms = atoms.ok_or_else(|| bad("p4.kind = atoms requires p4.atoms"))?;
            P4Measure::Atoms(atoms)
        }
        Some("power") => {
            let (c, alpha, upper) =
                density.ok_or_else(|| bad("p4.kind = power requires p4.density"))?;
            P4Measure::Power { c, alpha, upper }
        }
        Some(other) => return Err(bad(format!("unknown p4.kind `{other}`"))),
    };
    FellerParams::new(p1, p2, p3, p4).map_err(|e| bad(format!("{e}")))
}

pub fn parse_f64(s: &str) -> Result<f64, ConfigError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| bad(format!("invalid number `{s}`")))
}

/// Parses `a:b, c:d, ...` pairs.
pub fn parse_pair_list(s: &str, sep: char) -> Result<Vec<(f64, f64)>, ConfigError> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (a, b) = item
            .split_once(sep)
            .ok_or_else(|| bad(format!("expected `x{sep}mass`, got `{item}`")))?;
        out.push((parse_f64(a)?, parse_f64(b)?));
    }
    Ok(out)
}

fn parse_power_density(s: &str) -> Result<(f64, f64, f64), ConfigError> {
    let inner = s
        .trim()
        .strip_prefix("power(")
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(|| bad(format!("expected `power(c, alpha, M)`, got `{s}`")))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(bad("power density takes exactly three arguments"));
    }
    Ok((
        parse_f64(parts[0])?,
        parse_f64(parts[1])?,
        parse_f64(parts[2])?,
    ))
}

/// Parses a comma-separated list of numbers.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_f64)
        .collect()
}

/// Parses a comma-separated, strictly increasing list of integers.
pub fn parse_n_list(s: &str) -> Result<Vec<u32>, ConfigError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let n: u32 = item
            .parse()
            .map_err(|_| bad(format!("invalid integer `{item}`")))?;
        if let Some(&last) = out.last() {
            if n <= last {
                return Err(bad("n list must be strictly increasing"));
            }
        }
        out.push(n);
    }
    if out.is_empty() {
        return Err(bad("n list is empty"));
    }
    Ok(out)
}

/// Parses an explicit jumping measure from `index:prob` pairs; the killing
/// weight is the remaining mass.
pub fn parse_measure_spec(s: &str) -> Result<JumpingMeasure, ConfigError> {
    let pairs = parse_pair_list(s, ':')?;
    let max_idx = pairs
        .iter()
        .map(|&(j, _)| j as usize)
        .max()
        .ok_or_else(|| bad("measure spec is empty"))?;
    let mut probs = vec![0.0f64; max_idx + 1];
    for (j, p) in pairs {
        if j < 0.0 || j.fract() != 0.0 {
            return Err(bad("measure indices must be nonnegative integers"));
        }
        probs[j as usize] += p;
    }
    let total: f64 = probs.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(bad("measure probabilities exceed 1"));
    }
    let kill = (1.0 - total).max(0.0);
    JumpingMeasure::new(kill, probs).map_err(|e| bad(format!("{e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_round_trip() {
        let p = parse_params_text(
            "# demo\np1 = 1.5\np2 = 0\np3 = 2e0\np4.kind = atoms\np4.atoms = 2:1.0, 0.5:0.25\n",
        )
        .unwrap();
        assert_eq!(p.p1, 1.5);
        assert_eq!(p.p3, 2.0);
        assert_eq!(p.p4.total_mass(), 1.25);
    }

    #[test]
    fn power_density_file() {
        let p = parse_params_text("p3 = 1\np4.kind = power\np4.density = power(1.0, -0.5, 3.0)\n")
            .unwrap();
        match p.p4 {
            P4Measure::Power { c, alpha, upper } => {
                assert_eq!((c, alpha, upper), (1.0, -0.5, 3.0));
            }
            _ => panic!("expected power density"),
        }
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(parse_params_text("p5 = 1\n").is_err());
        assert!(parse_params_text("p1 1\n").is_err());
    }

    #[test]
    fn measure_spec_holding() {
        let m = parse_measure_spec("0:1").unwrap();
        assert_eq!(m.kill(), 0.0);
        assert_eq!(m.probs(), &[1.0]);
        let m = parse_measure_spec("1:0.5, 2:0.25").unwrap();
        assert!((m.kill() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn n_list_must_increase() {
        assert_eq!(parse_n_list("10,20,100").unwrap(), vec![10, 20, 100]);
        assert!(parse_n_list("10,10").is_err());
        assert!(parse_n_list("").is_err());
    }
}
