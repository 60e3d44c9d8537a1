//! Canonical JSON serialization for analysis reports.
//!
//! Reports must be byte-identical across runs and platforms: keys are
//! emitted in sorted order (serde_json's default map is a BTreeMap),
//! floats are rounded to six significant digits, lines end with LF, and
//! non-finite numbers become null.

use serde_json::Value;

/// Formats a finite float with six significant digits, positional
/// notation where reasonable, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    // {:.5e} rounds to 6 significant digits: "d.dddddEexp"
    let sci = format!("{:.5e}", x);
    let (mantissa, exp_str) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp_str.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 6);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..=14).contains(&exp) {
        // positional rendering with the decimal point after 1 + exp digits
        if exp < 0 {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        } else {
            let point = exp as usize + 1;
            if point >= digits.len() {
                out.push_str(&digits);
                for _ in 0..(point - digits.len()) {
                    out.push('0');
                }
            } else {
                let (int_part, frac_part) = digits.split_at(point);
                out.push_str(int_part);
                let frac = frac_part.trim_end_matches('0');
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        }
    } else {
        let head = &digits[..1];
        let tail = digits[1..].trim_end_matches('0');
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    if out == "-0" {
        return "0".to_string();
    }
    out
}

fn write_value(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(f) = n.as_f64() {
                out.push_str(&format_float(f));
            } else {
                out.push_str("null");
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Renders a JSON value canonically: sorted keys, 2-space indent, floats
/// at six significant digits, trailing newline.
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(3.941011), "3.94101");
        assert_eq!(format_float(-0.280987), "-0.280987");
        assert_eq!(format_float(115.0), "115");
        assert_eq!(format_float(58.5), "58.5");
        assert_eq!(format_float(0.05), "0.05");
        assert_eq!(format_float(1.0 / 3.0), "0.333333");
        assert_eq!(format_float(1234567.0), "1234570");
        assert_eq!(format_float(1e-4), "0.0001");
        assert_eq!(format_float(2.5e-9), "2.5e-9");
        assert_eq!(format_float(1e20), "1e20");
        assert_eq!(format_float(-243.2661), "-243.266");
    }

    #[test]
    fn canonical_output_is_sorted_and_stable() {
        let value = json!({
            "zebra": 1,
            "alpha": { "y": [1.5, 2.0], "x": null },
            "mid": "text"
        });
        let a = to_canonical_json(&value);
        let b = to_canonical_json(&value);
        assert_eq!(a, b);
        let alpha_pos = a.find("\"alpha\"").unwrap();
        let mid_pos = a.find("\"mid\"").unwrap();
        let zebra_pos = a.find("\"zebra\"").unwrap();
        assert!(alpha_pos < mid_pos && mid_pos < zebra_pos);
        assert!(a.ends_with('\n'));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn non_finite_floats_become_null() {
        let value = serde_json::to_value(f64::INFINITY).unwrap();
        assert_eq!(to_canonical_json(&value), "null\n");
    }

    #[test]
    fn rounding_is_applied_inside_structures() {
        let value = json!({ "p": 0.26086956521739135 });
        assert!(to_canonical_json(&value).contains("0.26087"));
    }
}
