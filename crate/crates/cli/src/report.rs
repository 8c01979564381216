use std::time::Instant;

use serde_json::{json, Map, Value};

/// A command's structured output. Keys serialize in sorted order, so the JSON form is
/// canonical: parsing and re-serializing it reproduces the same bytes.
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    /// Human-readable rendering of the results.
    pub text: String,
    /// `false` when some verdict in the results failed.
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_owned(),
            inputs: Map::new(),
            results: Value::Null,
            text: String::new(),
            passed: true,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.inputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn verdict(&mut self, ok: bool) {
        self.passed &= ok;
    }

    pub fn to_json(&self, started: Option<Instant>, exit_status: i32) -> String {
        let mut v = json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs.clone()),
            "results": self.results,
            "passed": self.passed,
            "exit_status": exit_status,
        });
        if let Some(s) = started {
            v["elapsed_ms"] = json!(s.elapsed().as_secs_f64() * 1e3);
        }
        let mut out = serde_json::to_string_pretty(&v).expect("values serialize");
        out.push('\n');
        out
    }
}
