//! Serialization with fixed precision so reports diff cleanly.

use serde::Serialize;
use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 6;

/// Rounds to six significant digits, ties to even. Scientific formatting
/// rounds the exact binary value, so only true ties are affected by the
/// tie rule.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// A float for a CSV cell, at the same precision as JSON.
pub fn cell(v: f64) -> String {
    format!("{}", round_sig(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_sig(11.96612345), 11.9661);
        assert_eq!(round_sig(63115.127), 63115.1);
        assert_eq!(round_sig(-0.000123456789), -0.000123457);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1234567.0), 1234570.0);
    }

    #[test]
    fn exact_ties_go_to_even() {
        // Both are exactly representable halfway cases.
        assert_eq!(round_sig(100000.5), 100000.0);
        assert_eq!(round_sig(100001.5), 100002.0);
        assert_eq!(round_sig(2.5e-7 * 4.0), 1e-6);
    }

    #[test]
    fn json_rounds_nested_floats_only() {
        #[derive(Serialize)]
        struct S {
            n: u32,
            xs: Vec<f64>,
        }
        let s = to_json(&S {
            n: 7,
            xs: vec![1.23456789, 2.0],
        })
        .unwrap();
        assert!(s.contains("\"n\": 7"));
        assert!(s.contains("1.23457"));
        assert!(s.contains("2.0"));
        assert!(s.ends_with('\n'));
    }
}
