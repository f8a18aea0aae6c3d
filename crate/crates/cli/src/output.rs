//! Fixed-format numeric output: 17 significant digits, lowercase `inf`.

use std::str::FromStr;

use serde_json::{Number, Value};

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

/// A JSON number carrying exactly the [`fmt_f64`] digits, or the string form for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(v)).expect("valid JSON number"))
    } else {
        Value::String(fmt_f64(v))
    }
}
