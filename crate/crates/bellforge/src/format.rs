//! Number formatting for CLI output and fixtures, and the curve CSV.

use serde::Serialize;
use serde_json::Value;

use bellforge_core::optimize::Threshold;

/// Significant digits printed by the CLI.
pub const CLI_DIGITS: usize = 10;
/// Significant digits stored in golden fixtures.
pub const FIXTURE_DIGITS: usize = 12;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Rounds every floating-point number inside `v`; integers are left alone.
pub fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap_or(0.0), digits);
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

/// Pretty JSON with numbers rounded to `digits` significant digits.
pub fn to_json<T: Serialize>(value: &T, digits: usize) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v, digits);
    serde_json::to_string_pretty(&v)
}

/// `c,p_threshold` rows, LF line endings.
pub fn curve_csv(points: &[Threshold], digits: usize) -> String {
    let mut out = String::from("c,p_threshold\n");
    for t in points {
        out.push_str(&format!("{},{}\n", round_sig(t.c, digits), round_sig(t.p, digits)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.07141989873456, 10), 1.071419899);
        assert_eq!(round_sig(-0.000123456789012345, 4), -0.0001235);
        assert_eq!(round_sig(0.0, 10), 0.0);
        assert!(round_sig(f64::NAN, 3).is_nan());
        let mut v = serde_json::json!({"a": [1.23456789, 3], "b": {"c": 2.0000000001}});
        round_value(&mut v, 3);
        assert_eq!(v, serde_json::json!({"a": [1.23, 3], "b": {"c": 2.0}}));
    }

    #[test]
    fn csv_layout() {
        let pts = [Threshold { c: 3.5, p: 0.001234567890123, bracketed: true }];
        assert_eq!(curve_csv(&pts, 10), "c,p_threshold\n3.5,0.00123456789\n");
    }
}
