//! Structured run reports. Exact fields (counts as decimal strings, ranks,
//! certificates) are invariant under the worker count; timing is not and
//! lives outside them.

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngInfo>,
    pub exact: Value,
    pub approx: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Value>,
    pub timing_ms: u128,
}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RngInfo {
    pub name: &'static str,
    pub seed: u64,
}

/// Fixed-width decimal view of a real value; 12 fractional digits.
pub fn approx12(x: f64) -> String {
    format!("{x:.12}")
}

impl Report {
    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![("command".into(), self.command.clone())];
        if let Some(input) = &self.input {
            rows.push(("input.path".into(), input.path.clone()));
            rows.push(("input.sha256".into(), input.sha256.clone()));
        }
        rows.push(("threads".into(), self.threads.to_string()));
        if let Some(rng) = &self.rng {
            rows.push(("rng.name".into(), rng.name.into()));
            rows.push(("rng.seed".into(), rng.seed.to_string()));
        }
        flatten("exact", &self.exact, &mut rows);
        flatten("approx", &self.approx, &mut rows);
        if let Some(c) = &self.certificates {
            flatten("certificates", c, &mut rows);
        }
        rows.push(("timing_ms".into(), self.timing_ms.to_string()));
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            let quoted = if v.contains(',') || v.contains('"') {
                format!("\"{}\"", v.replace('"', "\"\""))
            } else {
                v
            };
            out.push_str(&format!("{k},{quoted}\n"));
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, vv) in map {
                flatten(&format!("{prefix}.{k}"), vv, rows);
            }
        }
        Value::Array(items) => {
            for (i, vv) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), vv, rows);
            }
        }
        Value::Null => rows.push((prefix.into(), String::new())),
        Value::Bool(b) => rows.push((prefix.into(), b.to_string())),
        Value::Number(n) => rows.push((prefix.into(), n.to_string())),
        Value::String(s) => rows.push((prefix.into(), s.clone())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}
