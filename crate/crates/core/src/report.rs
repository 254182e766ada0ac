//! Fixed-precision number formatting shared by the CSV and JSON writers.

use serde_json::{Number, Value};

/// Seventeen significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // arbitrary_precision keeps the literal as written
    let n: Number = fmt_f64(x).parse().expect("formatted float is valid JSON");
    Value::Number(n)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Rewrites every non-integer number in `v` at 17 significant digits, so
/// values produced by `serde_json::to_value` print the same way as [`num`].
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                text.parse::<f64>().map_or(Value::Number(n), num)
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, canonical(x))).collect()),
        other => other,
    }
}

/// Serialises `x` and canonicalises its numbers.
pub fn to_canonical_value<T: serde::Serialize>(x: &T) -> Value {
    canonical(serde_json::to_value(x).expect("report types serialise"))
}

/// Pretty JSON with a trailing newline. Object keys are sorted, so equal
/// values always serialise to identical bytes.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value serialises");
    s.push('\n');
    s
}
