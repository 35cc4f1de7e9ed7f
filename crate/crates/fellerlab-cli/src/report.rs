//! CSV report emission. Every report starts with a `# fellerlab-report v1`
//! line and, unless `--reproducible` is set, a timestamp comment; identical
//! configs and seeds then produce byte-identical files.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const FORMAT_LINE: &str = "# fellerlab-report v1";

pub struct Report {
    buffer: String,
}

impl Report {
    pub fn new(header: &str, reproducible: bool) -> Self {
        let mut buffer = String::new();
        buffer.push_str(FORMAT_LINE);
        buffer.push('\n');
        if !reproducible {
            let ts = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            buffer.push_str(&format!("# generated {ts}\n"));
        }
        buffer.push_str(header);
        buffer.push('\n');
        Report { buffer }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buffer
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(self, path: Option<&Path>) -> std::io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, self.buffer),
            None => std::io::stdout().write_all(self.buffer.as_bytes()),
        }
    }
}

/// Canonical float rendering for report cells (shortest roundtrip).
pub fn cell(v: f64) -> String {
    format!("{v:?}")
}
