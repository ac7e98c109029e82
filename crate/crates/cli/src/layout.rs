//! Deterministic JSON rendering.
//!
//! Objects are laid out one key per line, arrays of objects one element per
//! line, everything else compact. Keys are sorted (serde_json's default map)
//! and floats use the shortest string that parses back to the same value.

use std::fmt::Write;

use serde_json::Value;

/// Shortest round-trip decimal for `x`; integral values print without a
/// fractional part and `-0` prints as `0`.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let abs = x.abs();
    if (1e-5..1e16).contains(&abs) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn number(n: &serde_json::Number) -> String {
    if n.is_f64() {
        format_f64(n.as_f64().expect("f64 numbers convert"))
    } else {
        n.to_string()
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialise")
}

fn compact(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&string(s)),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                compact(item, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, item)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&string(k));
                out.push(':');
                compact(item, out);
            }
            out.push('}');
        }
    }
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn laid_out(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            out.push('{');
            for (i, (k, item)) in m.iter().enumerate() {
                out.push_str(if i > 0 { ",\n" } else { "\n" });
                pad(out, depth + 1);
                let _ = write!(out, "{}: ", string(k));
                laid_out(item, depth + 1, out);
            }
            out.push('\n');
            pad(out, depth);
            out.push('}');
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                out.push_str(if i > 0 { ",\n" } else { "\n" });
                pad(out, depth + 1);
                compact(item, out);
            }
            out.push('\n');
            pad(out, depth);
            out.push(']');
        }
        other => compact(other, out),
    }
}

/// Renders `value` with a trailing newline.
pub fn to_string(value: &Value) -> String {
    let mut out = String::new();
    laid_out(value, 0, &mut out);
    out.push('\n');
    out
}
