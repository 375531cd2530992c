//! Report emission: versioned JSON envelopes, CSV with a reproducibility
//! header block, and atomic file writes (temp file + rename). Every artifact
//! records the tool version, the seed and the fully resolved configuration.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

pub const SCHEMA: &str = "thoma-report/1";

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// JSON envelope carrying the reproducibility header.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub tool: ToolInfo,
    pub seed: u64,
    pub config: serde_json::Value,
    pub kind: String,
    pub payload: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(kind: &str, seed: u64, config: serde_json::Value, payload: T) -> Self {
        Envelope {
            schema: SCHEMA,
            tool: ToolInfo {
                name: "thoma",
                version: tool_version(),
            },
            seed,
            config,
            kind: kind.to_string(),
            payload,
        }
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("serializable report");
        bytes.push(b'\n');
        bytes
    }
}

/// Write bytes atomically: the destination only ever holds complete content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("artifact")
        )),
        None => Path::new(&format!(
            ".{}.tmp",
            path.file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("artifact")
        ))
        .to_path_buf(),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// CSV artifact with a `#`-prefixed header block followed by a column row.
pub struct CsvBuilder {
    buf: String,
}

impl CsvBuilder {
    pub fn new(kind: &str, seed: u64, config: &serde_json::Value, columns: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&format!("# schema={} kind={}\n", SCHEMA, kind));
        buf.push_str(&format!("# tool=thoma version={}\n", tool_version()));
        buf.push_str(&format!("# seed={}\n", seed));
        buf.push_str(&format!("# config={}\n", compact_json(config)));
        buf.push_str(&columns.join(","));
        buf.push('\n');
        CsvBuilder { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

fn compact_json(v: &serde_json::Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| "{}".to_string())
}

/// Shortest round-trip decimal form of a float (deterministic).
pub fn fmt_f64(v: f64) -> String {
    format!("{}", v)
}
