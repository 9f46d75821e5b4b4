//! Moran's I spatial autocorrelation diagnostic.

use super::{SpatialError, WeightsMatrix};

/// `I = (n / sum_ij w_ij) * sum_ij w_ij (x_i - xbar)(x_j - xbar) / sum_i (x_i - xbar)^2`.
pub fn moran_i(x: &[f64], w: &WeightsMatrix) -> Result<f64, SpatialError> {
    let n = x.len();
    if w.n() != n {
        return Err(SpatialError::DimensionMismatch(format!(
            "weights order {} does not match n={n}",
            w.n()
        )));
    }
    let total_weight = w.total_weight();
    if total_weight == 0.0 {
        return Err(SpatialError::InvalidWeights("all weights are zero".into()));
    }

    let mean = x.iter().sum::<f64>() / n as f64;
    let variance_sum: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if variance_sum == 0.0 {
        return Err(SpatialError::ZeroVariance);
    }

    let mut cross = 0.0;
    for i in 0..n {
        for &(j, weight) in w.row(i) {
            cross += weight * (x[i] - mean) * (x[j] - mean);
        }
    }

    Ok((n as f64 / total_weight) * (cross / variance_sum))
}

#[cfg(test)]
mod tests {
    use super::super::weights::{build_weights, WeightsSpec};
    use super::*;

    fn edge(a: &str, b: &str) -> (String, String, Option<f64>) {
        (a.to_string(), b.to_string(), None)
    }

    #[test]
    fn two_opposed_units_give_minus_one() {
        let w = build_weights(&WeightsSpec::Adjacency(vec![edge("a", "b")]), true)
            .unwrap()
            .matrix;
        let i = moran_i(&[1.0, -1.0], &w).unwrap();
        assert!((i + 1.0).abs() < 1e-12);
    }

    #[test]
    fn alternating_signs_on_bipartite_graph_are_negative() {
        // 4-cycle with alternating values: every neighbor pair disagrees.
        let edges = vec![edge("a", "b"), edge("b", "c"), edge("c", "d"), edge("d", "a")];
        let w = build_weights(&WeightsSpec::Adjacency(edges), true)
            .unwrap()
            .matrix;
        let i = moran_i(&[1.0, -1.0, 1.0, -1.0], &w).unwrap();
        assert!(i < 0.0);
    }

    #[test]
    fn constant_input_is_zero_variance() {
        let w = build_weights(&WeightsSpec::Adjacency(vec![edge("a", "b")]), true)
            .unwrap()
            .matrix;
        assert!(matches!(
            moran_i(&[2.0, 2.0], &w),
            Err(SpatialError::ZeroVariance)
        ));
    }

    #[test]
    fn smooth_gradient_is_positively_autocorrelated() {
        let edges = super::super::weights::lattice_rook_edges(4, 4);
        let w = build_weights(&WeightsSpec::Adjacency(edges), true)
            .unwrap()
            .matrix;
        let x: Vec<f64> = (0..16).map(|i| (i / 4) as f64).collect();
        assert!(moran_i(&x, &w).unwrap() > 0.0);
    }
}
