//! Numeric formatting for CSV/JSON emission: 17 significant digits, which
//! round-trips f64 exactly and is byte-stable across platforms.

/// Format with 17 significant digits in scientific notation.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}
