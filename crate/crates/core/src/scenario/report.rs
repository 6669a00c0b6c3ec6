use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use super::schema::Kind;

/// One numeric datum: `quantity` of `section` at time `t` (if time-indexed).
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub section: String,
    pub t: Option<usize>,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveTolerances {
    pub tol: f64,
    pub horizon: usize,
    pub base_horizon: usize,
}

/// Result of one scenario; identical input, seed and flags give identical
/// serialisations unless timing is requested.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: EffectiveTolerances,
    pub scenario: Value,
    pub verdicts: Map<String, Value>,
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn verdict(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialise");
        self.verdicts.insert(key.to_string(), v);
    }

    pub fn record(&mut self, section: &str, t: Option<usize>, quantity: impl Into<String>, value: f64) {
        self.records.push(Record {
            section: section.to_string(),
            t,
            quantity: quantity.into(),
            value,
        });
    }

    /// Records `values[t]` for every `t`, one quantity per column.
    pub fn series(&mut self, section: &str, columns: &[String], rows: &[Vec<f64>], t0: usize) {
        for (k, row) in rows.iter().enumerate() {
            for (q, v) in columns.iter().zip(row) {
                self.record(section, Some(t0 + k), q.clone(), *v);
            }
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// `section,t,quantity,value` rows: the records, then every verdict leaf
    /// under section `verdict` with its dotted path as quantity, then warnings.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["section", "t", "quantity", "value"])?;
        for r in &self.records {
            let t = r.t.map(|t| t.to_string()).unwrap_or_default();
            w.write_record([r.section.as_str(), t.as_str(), r.quantity.as_str(), &r.value.to_string()])?;
        }
        let mut leaves = Vec::new();
        for (k, v) in &self.verdicts {
            flatten(k, v, &mut leaves);
        }
        for (k, v) in leaves {
            w.write_record(["verdict", "", k.as_str(), v.as_str()])?;
        }
        for (i, msg) in self.warnings.iter().enumerate() {
            w.write_record(["warning", "", &i.to_string(), msg.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
