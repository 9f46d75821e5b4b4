//! Stabilization detection for cumulative indicator series.

/// Earliest index `t` such that every later observed value stays within
/// `epsilon` of `values[t]`, with at least `hold_bins` later values to
/// confirm it. Returns `None` when the series never stabilizes or is too
/// short to confirm.
pub fn detect_convergence(values: &[f64], epsilon: f64, hold_bins: usize) -> Option<usize> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(hold_bins >= 1, "hold_bins must be at least 1");

    for t in 0..values.len() {
        let rest = &values[t + 1..];
        if rest.len() < hold_bins {
            return None;
        }
        if rest.iter().all(|v| (v - values[t]).abs() <= epsilon) {
            return Some(t);
        }
    }
    None
}
