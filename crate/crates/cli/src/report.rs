//! JSON views of library results and their CSV / plain-table renderings.

use clap::ValueEnum;
use epistemic_qm::quantum::{born_probabilities, DensityOperator, Pvm};
use epistemic_qm::scenarios::{Assignment, ScenarioResult};
use serde_json::{json, Map, Value};

use crate::layout;
use crate::statefile::{dist_file, quantum_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub fn assignment_json(a: &Assignment) -> Value {
    match a {
        Assignment::Classical(d) => dist_file(d),
        Assignment::Quantum(s) => quantum_json(s),
    }
}

/// Bell-measurement probabilities of a two-qubit state, `null` otherwise.
pub fn bell_probabilities(state: &DensityOperator) -> Value {
    let pvm = Pvm::bell();
    if state.dim() != pvm.dim() {
        return Value::Null;
    }
    match born_probabilities(state, &pvm) {
        Ok(d) => json!(d.probs()),
        Err(_) => Value::Null,
    }
}

pub fn scenario_json(r: &ScenarioResult) -> Value {
    let mut out = json!({
        "scenario": r.config.variant().name(),
        "params": r.config.params(),
        "wigner_labels": r.wigner_dist.space().labels(),
        "wigner_dist": r.wigner_dist.probs(),
        "friend_labels": r.friend_dist.space().labels(),
        "friend_dist": r.friend_dist.probs(),
        "wigner_state": quantum_json(&r.wigner_state),
        "friend_state": quantum_json(&r.friend_state),
        "friend_register": quantum_json(&r.friend_register),
        "classical_compatible": r.classical_compatible,
        "quantum_compatible": r.quantum_compatible,
    });
    if let Some(t) = &r.three_party {
        out["three_party"] = json!({
            "pairs": ["wigner_left/friend", "friend/wigner_right", "wigner_left/wigner_right"],
            "wigner_right_dist": t.right_dist.probs(),
            "wigner_right_state": quantum_json(&t.right_state),
            "classical": t.classical,
            "quantum": t.quantum,
        });
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(x)) => layout::format_f64(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => unreachable!("only leaves are scalars"),
    }
}

/// Leaves of `value` as `(path, text)` pairs in document order. Object keys
/// join with `.`, array positions append `[i]`.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, child) in m {
                    let p = if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    };
                    walk(child, p, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(child, format!("{path}[{i}]"), out);
                }
            }
            leaf => out.push((path, scalar(leaf))),
        }
    }
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => layout::to_string(value),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in flatten(value) {
                w.write_record([k, v]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv emits UTF-8")
        }
        Format::Table => {
            let rows = flatten(value);
            let width = rows
                .iter()
                .map(|(k, _)| k.chars().count())
                .max()
                .unwrap_or(0);
            rows.iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
    }
}

/// A named list of rows, each `{id, params, output}`.
pub struct ReportTable {
    name: String,
    rows: Vec<Value>,
}

impl ReportTable {
    pub fn new(name: impl Into<String>) -> Self {
        ReportTable {
            name: name.into(),
            rows: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row(&mut self, id: &str, params: Value, output: Value) -> &mut Self {
        let params = if params.is_null() {
            Value::Object(Map::new())
        } else {
            params
        };
        self.rows
            .push(json!({"id": id, "params": params, "output": output}));
        self
    }

    pub fn to_json(&self) -> Value {
        json!({"table": self.name, "rows": self.rows})
    }
}
