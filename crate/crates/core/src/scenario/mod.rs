//! Declarative scenario files: parsing, schema validation, per-kind
//! pipelines and machine-readable reports.

mod pipeline;
mod report;
pub mod schema;

use std::path::Path;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::Error;

pub use report::{EffectiveTolerances, Record, Report};
pub use schema::{Kind, RawScenario};

/// Command-line overrides; each field replaces the scenario's own value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub horizon: Option<usize>,
    pub timing: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Module {
        path: String,
        #[source]
        source: Error,
    },
}

impl ScenarioError {
    /// 3 for numeric failures inside a module, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Module { source, .. } if source.is_numeric() => 3,
            _ => 2,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Deserialises `value` as `T`, reporting failures at `prefix.<field path>`.
pub(crate) fn decode<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T, ScenarioError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, ".") => "<root>".to_string(),
            (true, _) => inner,
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        ScenarioError::schema(path, e.into_inner().to_string())
    })
}

/// Parses and schema-checks the top level of a scenario document.
pub fn parse(text: &str) -> Result<(RawScenario, Value), ScenarioError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(k) => full[..k].to_string(),
            None => full,
        };
        ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    let raw: RawScenario = decode(&value, "")?;
    Ok((raw, value))
}

pub fn run_scenario_str(text: &str, overrides: &Overrides) -> Result<Report, ScenarioError> {
    let (raw, value) = parse(text)?;
    let started = Instant::now();
    let defaults = pipeline::defaults(raw.kind);
    let tol = overrides.tol.or(raw.tolerances.tol).unwrap_or(defaults.tol);
    let horizon = overrides
        .horizon
        .or(raw.tolerances.horizon)
        .unwrap_or(defaults.horizon);
    let base_horizon = raw.tolerances.base_horizon.unwrap_or(defaults.base_horizon);
    if !tol.is_finite() || tol <= 0.0 {
        return Err(ScenarioError::schema("tolerances.tol", format!("must be positive, got {tol}")));
    }
    if base_horizon < 8 {
        return Err(ScenarioError::schema(
            "tolerances.base_horizon",
            format!("must be at least 8, got {base_horizon}"),
        ));
    }
    let mut report = Report {
        kind: raw.kind,
        name: raw.name.clone(),
        seed: None,
        tolerances: EffectiveTolerances {
            tol,
            horizon,
            base_horizon,
        },
        scenario: value,
        verdicts: Map::new(),
        records: Vec::new(),
        warnings: Vec::new(),
        timing_ms: None,
    };
    let cx = pipeline::Context {
        seed: overrides.seed.or(raw.seed),
        tol,
        horizon,
        base_horizon,
    };
    let payload = match &raw.payload {
        Value::Null => Value::Object(Map::new()),
        other => other.clone(),
    };
    pipeline::run(raw.kind, &payload, &cx, &mut report)?;
    if overrides.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

pub fn run_scenario_file(path: &Path, overrides: &Overrides) -> Result<Report, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    run_scenario_str(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ScenarioError::Module;

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{\n  \"kind\": \"evolution\",\n  oops\n}").unwrap_err();
        match err {
            ScenarioError::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other}"),
        }
        assert_eq!(parse("[").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected_with_their_path() {
        let err = parse(r#"{"kind": "evolution", "tolerances": {"tolerance": 1}}"#).unwrap_err();
        match err {
            ScenarioError::Schema { path, .. } => assert_eq!(path, "tolerances.tolerance"),
            other => panic!("unexpected {other}"),
        }
        let err = run_scenario_str(
            r#"{"kind": "process", "payload": {"preset": "fair-coin", "extra": 1}}"#,
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::Schema { ref path, .. } if path == "payload.extra"), "{err}");
    }

    #[test]
    fn overrides_win_over_the_document() {
        let doc = r#"{"kind": "process", "tolerances": {"horizon": 2, "tol": 1e-6}, "payload": {"preset": "alternator"}}"#;
        let r = run_scenario_str(doc, &Overrides::default()).unwrap();
        assert_eq!((r.tolerances.horizon, r.tolerances.tol), (2, 1e-6));
        let o = Overrides {
            horizon: Some(5),
            tol: Some(1e-9),
            ..Overrides::default()
        };
        let r = run_scenario_str(doc, &o).unwrap();
        assert_eq!((r.tolerances.horizon, r.tolerances.tol), (5, 1e-9));
        assert_eq!(r.records.iter().filter(|x| x.quantity == "0").count(), 6);
        assert!(r.timing_ms.is_none());
    }

    #[test]
    fn module_errors_map_to_exit_codes() {
        let invalid = Module {
            path: "payload".into(),
            source: Error::NotStochastic { column: 0 },
        };
        let numeric = Module {
            path: "payload".into(),
            source: Error::TraceLeak { total: 0.5 },
        };
        assert_eq!(invalid.exit_code(), 2);
        assert_eq!(numeric.exit_code(), 3);
    }

    #[test]
    fn csv_flattens_verdicts() {
        let doc = r#"{"kind": "markov-chain", "tolerances": {"horizon": 1},
            "payload": {"transition": [[1, 0], [0, 1]], "start": [0, 1], "limit": false}}"#;
        let r = run_scenario_str(doc, &Overrides::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("section,t,quantity,value\n"));
        assert!(text.contains("distribution,1,2,1\n"));
        assert!(text.contains("verdict,,labels[1],2\n"));
        assert!(text.contains("verdict,,clamps.count,0\n"));
    }
}
