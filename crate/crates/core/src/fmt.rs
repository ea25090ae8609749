//! Numeric formatting for CSV outputs.

/// Formats a float as decimal text with 12 significant digits.
///
/// All numeric CSV fields go through this so that files are byte-stable
/// across runs and platforms.
pub(crate) fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.11e}")
}
