//! Deterministic JSON rendering for machine-readable output.
//!
//! Object keys are emitted in sorted order (the default `serde_json` map
//! is a BTree map) and every float is printed with 17 significant digits
//! in scientific notation, so rendering the same document twice gives
//! byte-identical text and parsing it back reproduces the exact values.

use serde_json::Value;

use crate::interval::Interval;

/// Panics on non-finite input: output documents only carry values from
/// successful computations.
pub fn number(x: f64) -> Value {
    assert!(x.is_finite(), "JSON output numbers must be finite, got {x}");
    Value::Number(serde_json::Number::from_f64(x).expect("finite f64"))
}

/// An interval as a two-element `[lo, hi]` array.
pub fn interval(iv: Interval) -> Value {
    Value::Array(vec![number(iv.lo()), number(iv.hi())])
}

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().expect("number is i64, u64, or f64");
                out.push_str(&format!("{x:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings serialize"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}
