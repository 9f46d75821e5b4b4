//! Ordinary least squares via QR decomposition with classical standard
//! errors.

use nalgebra::{DMatrix, DVector};

use super::SpatialError;

/// A successful least-squares fit.
///
/// `coefficients[0]` is the intercept when one was requested; the remaining
/// entries follow the order of the design columns. Standard errors are the
/// classical `sigma^2 (X'X)^-1` diagonal.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
    pub n_params: usize,
    pub intercept: bool,
}

/// Builds the design matrix `[1?, cols...]`.
fn design(y_len: usize, x_cols: &[Vec<f64>], intercept: bool) -> Result<DMatrix<f64>, SpatialError> {
    for (k, col) in x_cols.iter().enumerate() {
        if col.len() != y_len {
            return Err(SpatialError::DimensionMismatch(format!(
                "column {k} has length {}, expected {}",
                col.len(),
                y_len
            )));
        }
    }
    let p = x_cols.len() + usize::from(intercept);
    let mut x = DMatrix::zeros(y_len, p);
    let mut col_idx = 0;
    if intercept {
        x.column_mut(0).fill(1.0);
        col_idx = 1;
    }
    for col in x_cols {
        for (i, &v) in col.iter().enumerate() {
            x[(i, col_idx)] = v;
        }
        col_idx += 1;
    }
    Ok(x)
}

/// Fits `y = X beta + e` by QR. Requires `n > p` and a full-rank design;
/// a rank-deficient design is rejected naming the dependent column.
pub fn ols_fit(y: &[f64], x_cols: &[Vec<f64>], intercept: bool) -> Result<OlsFit, SpatialError> {
    let n = y.len();
    let p = x_cols.len() + usize::from(intercept);
    if n <= p {
        return Err(SpatialError::TooFewObservations { n, params: p });
    }
    let x = design(n, x_cols, intercept)?;
    let (beta, r_inv) = qr_solve(&x, y)?;

    let yv = DVector::from_column_slice(y);
    let fitted = &x * &beta;
    let residuals = &yv - &fitted;
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();

    // sigma^2 (X'X)^-1 diagonal, with (X'X)^-1 = R^-1 R^-T from the QR factor.
    let sigma2 = ssr / (n - p) as f64;
    let std_errors: Vec<f64> = (0..p)
        .map(|j| {
            let diag: f64 = (0..p).map(|k| r_inv[(j, k)] * r_inv[(j, k)]).sum();
            (sigma2 * diag).sqrt()
        })
        .collect();

    let r_squared = if intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        if sst == 0.0 {
            1.0
        } else {
            1.0 - ssr / sst
        }
    } else {
        let syy: f64 = y.iter().map(|v| v * v).sum();
        if syy == 0.0 {
            1.0
        } else {
            1.0 - ssr / syy
        }
    };

    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        residuals: residuals.iter().copied().collect(),
        r_squared,
        n,
        n_params: p,
        intercept,
    })
}

/// Solves the least-squares problem through the QR factorization and also
/// returns `R^-1`. A near-zero diagonal entry of `R` marks the first design
/// column that is linearly dependent on its predecessors.
fn qr_solve(x: &DMatrix<f64>, y: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>), SpatialError> {
    let (n, p) = (x.nrows(), x.ncols());
    let qr = x.clone().qr();
    let r = qr.r();

    let scale = r
        .diagonal()
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
        .max(f64::MIN_POSITIVE);
    for j in 0..p {
        if r[(j, j)].abs() <= 1e-10 * scale {
            return Err(SpatialError::RankDeficient { column: j });
        }
    }

    // First p entries of Q'y.
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = DVector::from_iterator(p, (0..p).map(|i| qty[i]));
    debug_assert!(n >= p);

    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or(SpatialError::RankDeficient { column: p - 1 })?;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(SpatialError::RankDeficient { column: p - 1 })?;

    Ok((beta, r_inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovers_coefficients() {
        // y = 2x + 1 exactly.
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = ols_fit(&y, &[x], true).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_regressor_gets_zero_slope() {
        // x sums to zero and y is constant, so the slope vanishes.
        let x = vec![-1.0, 0.0, 1.0, -2.0, 2.0];
        let y = vec![3.0, 1.0, 3.0, 2.0, 2.0];
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert_eq!(xy, 0.0);
        let fit = ols_fit(&y, &[x], true).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-12);
    }

    #[test]
    fn residuals_are_orthogonal_to_design() {
        let y = vec![1.2, 0.5, -0.3, 2.2, 1.9, 0.0, -1.1];
        let x1 = vec![0.1, 0.4, -0.2, 1.5, 1.0, -0.3, -0.9];
        let x2 = vec![1.0, -1.0, 0.5, 0.3, -0.2, 0.8, 0.1];
        let fit = ols_fit(&y, &[x1.clone(), x2.clone()], true).unwrap();
        let dot = |col: &[f64]| -> f64 {
            col.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum()
        };
        assert!(fit.residuals.iter().sum::<f64>().abs() < 1e-8);
        assert!(dot(&x1).abs() < 1e-8);
        assert!(dot(&x2).abs() < 1e-8);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }

    #[test]
    fn rank_deficiency_names_the_dependent_column() {
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x1 = vec![1.0, 0.0, 2.0, 1.0, 3.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let err = ols_fit(&y, &[x1, x2], true).unwrap_err();
        // Column 2 of [1, x1, x2] duplicates column 1.
        assert!(matches!(err, SpatialError::RankDeficient { column: 2 }));
    }

    #[test]
    fn too_few_observations_rejected() {
        let err = ols_fit(&[1.0, 2.0], &[vec![1.0, 2.0]], true).unwrap_err();
        assert!(matches!(err, SpatialError::TooFewObservations { .. }));
    }
}
