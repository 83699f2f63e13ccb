//! Result reporting: one JSON object per command on stdout, every float
//! carrying 17 significant digits, non-finite metrics turned into nulls with
//! a warning.

use std::io::Write;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::errors::CliResult;

/// Writes floats as `d.dddddddddddddddde[-]x` (17 significant digits), which
/// round-trips f64 exactly and stays valid JSON.
#[derive(Default)]
struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

/// The standard result envelope printed to stdout.
#[derive(Debug, Serialize)]
pub struct ResultJson {
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub metrics: Value,
    pub timings_ms: Value,
    pub warnings: Vec<String>,
}

impl ResultJson {
    pub fn new(command: &str, config: Value, seed: u64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            seed,
            metrics: Value::Null,
            timings_ms: serde_json::json!({}),
            warnings: Vec::new(),
        }
    }

    pub fn timing(&mut self, phase: &str, ms: f64) {
        self.timings_ms[phase] = serde_json::json!(ms);
    }

    /// Serializes and prints the result. Non-finite numbers have already
    /// become JSON nulls at `Value` construction; any null inside `metrics`
    /// earns a warning so consumers notice.
    pub fn print(mut self) -> CliResult<()> {
        if contains_null(&self.metrics) {
            self.warnings
                .push("some metrics are null (non-finite values)".to_string());
        }
        let mut buffer = Vec::new();
        let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, SigDigits17);
        serde::Serialize::serialize(&self, &mut serializer)?;
        buffer.push(b'\n');
        std::io::stdout().write_all(&buffer)?;
        Ok(())
    }
}

fn contains_null(value: &Value) -> bool {
    match value {
        Value::Null => true,
        Value::Array(items) => items.iter().any(contains_null),
        Value::Object(map) => map.values().any(contains_null),
        _ => false,
    }
}

/// serde_json conversion that maps NaN/inf to null instead of failing.
pub fn value_of<T: Serialize>(value: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_17_digits() {
        let mut buffer = Vec::new();
        let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, SigDigits17);
        serde::Serialize::serialize(
            &serde_json::json!({"x": 0.1, "y": 1.0 / 3.0}),
            &mut serializer,
        )
        .unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap(), 0.1);
        assert_eq!(parsed["y"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn non_finite_becomes_null() {
        let v = serde_json::to_value(f64::NAN).unwrap();
        assert!(v.is_null());
        assert!(contains_null(&serde_json::json!({"a": [1.0, v]})));
    }
}
