//! JSON and CSV output with fixed float formatting.

use serde_json::{Number, Value};

/// A float as a JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // Print −0 as 0.
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.16e}");
    Value::Number(
        s.parse::<Number>()
            .expect("formatted float is a valid JSON number"),
    )
}

/// Rewrites every non-integer number in `v` with [`num`].
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn version() -> String {
    format!("band-vortex {}", env!("CARGO_PKG_VERSION"))
}

/// Single newline-terminated document.
pub fn render(command: &str, config: Value, result: Value) -> String {
    let doc = serde_json::json!({
        "command": command,
        "version": version(),
        "config": config,
        "result": result,
    });
    let mut out = serde_json::to_string_pretty(&normalize(doc)).expect("JSON values serialize");
    out.push('\n');
    out
}
