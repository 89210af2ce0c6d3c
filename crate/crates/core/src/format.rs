/// Formats with 17 significant digits, `inf`/`-inf`/`nan` for non-finite values.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}
