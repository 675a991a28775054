//! Text rendering of reals: 17 significant digits, shortest `%g`-style
//! layout.

/// Formats `v` like C's `%.17g`.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// JSON number carrying the same digits as [`fmt_real`]; non-finite values
/// become `null`.
pub fn json_real(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Value::Number(fmt_real(v).parse().expect("finite real is a JSON number"))
    } else {
        serde_json::Value::Null
    }
}
