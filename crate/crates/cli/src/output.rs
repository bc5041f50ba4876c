//! Report serialization: JSON with 17 significant digits, CSV, manifests.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::CliError;

/// Writes every float as `{:.16e}`, i.e. 17 significant digits.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut buf, FullPrecision))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(())
        }
    }
}

/// Provenance block embedded in every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub model_path: Option<String>,
    pub parameters: serde_json::Value,
    pub tool_version: &'static str,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &'static str, model_path: Option<&Path>, parameters: serde_json::Value) -> Self {
        Self {
            command,
            model_path: model_path.map(|p| p.display().to_string()),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}
