use crate::error::{CoreError, Result};

pub const DEFAULT_MIN_PT: f64 = 8.0;
pub const DEFAULT_MAX_PT: f64 = 28.0;

/// Font size per term on a linear scale from the least to the most frequent
/// term. Equal frequencies all get `min_pt`.
pub fn label_font_sizes(frequencies: &[f64], min_pt: f64, max_pt: f64) -> Result<Vec<f64>> {
    if !(min_pt < max_pt) || !min_pt.is_finite() || !max_pt.is_finite() {
        return Err(CoreError::invalid("label_pt", format!("need min_pt < max_pt, got {min_pt} and {max_pt}")));
    }
    let lo = frequencies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = frequencies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(frequencies
        .iter()
        .map(|&f| {
            if hi > lo {
                (min_pt + (f - lo) * (max_pt - min_pt) / (hi - lo)).clamp(min_pt, max_pt)
            } else {
                min_pt
            }
        })
        .collect())
}
