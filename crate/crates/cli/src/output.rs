use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Rounds to 12 significant digits so repeated runs print identical text.
pub fn round12(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// A JSON record under construction; keys keep insertion order.
#[derive(Debug, Default)]
pub struct Record(Map<String, Value>);

impl Record {
    pub fn new() -> Self {
        Record(Map::new())
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        self.0.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Copies every field of a serializable struct.
    pub fn merge(mut self, value: impl Serialize) -> Self {
        if let Ok(Value::Object(map)) = serde_json::to_value(value) {
            self.0.extend(map);
        }
        self
    }

    pub fn render(self) -> String {
        let mut v = Value::Object(self.0);
        round_value(&mut v);
        let mut text = serde_json::to_string_pretty(&v).unwrap_or_default();
        text.push('\n');
        text
    }
}

/// Writes to `path`, or standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io("standard output".into(), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(0.10455755881234567), 0.104557558812);
        assert_eq!(round12(-1.0 / 3.0), -0.333333333333);
        assert_eq!(round12(2.0), 2.0);
        assert!(round12(f64::NAN).is_nan());
    }

    #[test]
    fn field_order_is_kept() {
        let text = Record::new().field("z", 1).field("a", 0.5).render();
        assert!(text.find("\"z\"").unwrap() < text.find("\"a\"").unwrap());
    }
}
