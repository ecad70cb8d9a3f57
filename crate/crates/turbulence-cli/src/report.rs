use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// The envelope every command emits on exit status 0 or 1.
pub struct Report {
    pub command: &'static str,
    pub input: String,
    pub digest: String,
    pub seed: u64,
    pub cap: usize,
    pub pass: bool,
    pub results: Value,
    pub timings: Option<Value>,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("input".into(), json!(self.input));
        m.insert("sha256".into(), json!(self.digest));
        m.insert("seed".into(), json!(self.seed));
        m.insert("cap".into(), json!(self.cap));
        m.insert("pass".into(), json!(self.pass));
        m.insert("results".into(), self.results.clone());
        if let Some(t) = &self.timings {
            m.insert("timings".into(), t.clone());
        }
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} ({})", self.command, self.input, if self.pass { "pass" } else { "FAIL" });
        let _ = writeln!(s, "sha256 {}", self.digest);
        let _ = writeln!(s, "seed {}, cap {}", self.seed, self.cap);
        flatten(&self.results, "", &mut s);
        if let Some(t) = &self.timings {
            flatten(t, "timings", &mut s);
        }
        s
    }
}

fn flatten(v: &Value, prefix: &str, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(x, &key(k), out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}: [{}]", items.join(", "));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => {
            let _ = writeln!(out, "{prefix}: {}", scalar(v));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
