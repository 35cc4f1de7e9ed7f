//! Plain-text jumping-measure files: one `index,probability` line per state
//! with positive mass, plus a `kill,probability` line. Probabilities are
//! written in shortest-roundtrip decimal, so files re-read bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use fellerlab_core::JumpingMeasure;

use crate::config::ConfigError;

pub fn render_measure(measure: &JumpingMeasure) -> String {
    let mut out = String::new();
    for (j, &p) in measure.probs().iter().enumerate() {
        if p != 0.0 {
            let _ = writeln!(out, "{j},{p:?}");
        }
    }
    let _ = writeln!(out, "kill,{:?}", measure.kill());
    out
}

pub fn write_measure(measure: &JumpingMeasure, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_measure(measure))
}

pub fn parse_measure(text: &str) -> Result<JumpingMeasure, ConfigError> {
    let mut kill = None;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (idx, prob) = line.split_once(',').ok_or_else(|| {
            ConfigError::Parse(format!("line {}: expected `index,probability`", lineno + 1))
        })?;
        let p = crate::config::parse_f64(prob)?;
        if idx.trim() == "kill" {
            kill = Some(p);
        } else {
            let j: usize = idx
                .trim()
                .parse()
                .map_err(|_| ConfigError::Parse(format!("bad index `{idx}`")))?;
            entries.push((j, p));
        }
    }
    let kill = kill.ok_or_else(|| ConfigError::Parse("missing kill row".into()))?;
    let len = entries.iter().map(|&(j, _)| j + 1).max().unwrap_or(0);
    let mut probs = vec![0.0; len];
    for (j, p) in entries {
        probs[j] = p;
    }
    JumpingMeasure::new(kill, probs).map_err(|e| ConfigError::Parse(format!("{e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_measure_rendering() {
        let m = JumpingMeasure::point(1);
        assert_eq!(render_measure(&m), "1,1.0\nkill,0.0\n");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = JumpingMeasure::new(0.1 + 1e-17, vec![0.3, 0.0, 0.6 - 1e-17]).unwrap();
        let back = parse_measure(&render_measure(&m)).unwrap();
        assert_eq!(back.kill().to_bits(), m.kill().to_bits());
        assert_eq!(back.probs().len(), m.probs().len());
        for (a, b) in back.probs().iter().zip(m.probs()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
