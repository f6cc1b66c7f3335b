use std::time::Duration;

use folfriend::parser::structure_to_value;
use folfriend::FiniteStructure;
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

/// Keys shown first in human output.
const LEAD: [&str; 6] = [
    "verdict",
    "friendly",
    "equivalent",
    "implicitly_defined",
    "conclusive",
    "failed",
];

/// One command's result. The JSON and human renderings both come from
/// `payload`.
pub struct Report {
    pub command: String,
    pub payload: Map<String, Value>,
    pub caveats: Vec<String>,
    pub elapsed: Duration,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            payload: Map::new(),
            caveats: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    pub fn json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "result": Value::Object(self.payload.clone()),
            "caveats": self.caveats,
            "elapsed_ms": self.elapsed.as_millis() as u64,
        })
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        let (head, rest): (Vec<_>, Vec<_>) = self.payload.iter().partition(|(k, _)| LEAD.contains(&k.as_str()));
        let mut head = head;
        head.sort_by_key(|(k, _)| LEAD.iter().position(|l| l == k));
        for (key, value) in head.into_iter().chain(rest) {
            render(&mut out, key, value, 0);
        }
        for c in &self.caveats {
            out.push_str(&format!("caveat: {c}\n"));
        }
        out
    }
}

fn render(out: &mut String, key: &str, value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(m) if is_structure(m) || m.is_empty() => {
            out.push_str(&format!("{pad}{key}: {}\n", compact(value)));
        }
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in m {
                render(out, k, v, indent + 1);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, v) in items.iter().enumerate() {
                render(out, &format!("[{i}]"), v, indent + 1);
            }
        }
        Value::String(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
        other => out.push_str(&format!("{pad}{key}: {}\n", compact(other))),
    }
}

fn is_structure(m: &Map<String, Value>) -> bool {
    m.contains_key("domain_size") && m.contains_key("relations")
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("json value")
}

pub fn structure(s: &FiniteStructure) -> Value {
    structure_to_value(s)
}
