//! Fixed-precision number formatting for every exporter.
//!
//! Numbers are printed with 12 significant digits and trailing zeros
//! trimmed, so dyadic entropies print exactly and output is byte-stable.

pub const SIG_DIGITS: usize = 12;

/// Formats `x` with [`SIG_DIGITS`] significant digits in plain decimal notation.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let mag = r.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
    let mut s = format!("{r:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let v: f64 = s.parse().expect("formatted float parses");
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Recursively rounds every number in a JSON value to [`SIG_DIGITS`] digits.
pub fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let r = round_sig(f);
                    *v = if r.fract() == 0.0 && r.abs() < 9.0e15 {
                        serde_json::Value::from(r as i64)
                    } else {
                        serde_json::Number::from_f64(r).map_or(serde_json::Value::Null, Into::into)
                    };
                }
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_json),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}
