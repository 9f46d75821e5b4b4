//! Spatial Durbin Model `y = rho W y + X beta + W X theta + e` fitted by
//! concentrated maximum likelihood.
//!
//! For a candidate `rho` the regression coefficients have a closed form:
//! regressing both `y` and `Wy` on `Z = [1, X, WX]` gives residual vectors
//! `e0` and `e1`, and the concentrated residual is `e0 - rho e1`. The
//! log-likelihood adds the Jacobian term `ln|I - rho W|`, computed from the
//! eigenvalues of `W`. The search runs a 101-point grid over the admissible
//! interval `(1/lambda_min, 1/lambda_max)` followed by golden-section
//! refinement to 1e-6.

use nalgebra::{Complex, DMatrix};

use super::ols::ols_fit;
use super::{SpatialError, WeightsMatrix};

const GRID_POINTS: usize = 101;
const RHO_TOL: f64 = 1e-6;

/// Estimation options. `fixed_rho` skips the search (used to check nesting
/// against OLS); `durbin: false` drops the `WX theta` block.
#[derive(Debug, Clone, Copy)]
pub struct SdmOptions {
    pub fixed_rho: Option<f64>,
    pub durbin: bool,
}

impl Default for SdmOptions {
    fn default() -> Self {
        Self {
            fixed_rho: None,
            durbin: true,
        }
    }
}

/// Search diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SdmConvergence {
    pub grid_points: usize,
    pub golden_iterations: usize,
    pub final_interval_width: f64,
}

/// A fitted Spatial Durbin Model.
#[derive(Debug, Clone)]
pub struct SdmFit {
    /// Spatial dependence of the lagged response.
    pub rho: f64,
    /// Intercept followed by covariate effects.
    pub beta: Vec<f64>,
    /// Spillover effects of neighboring covariates (empty when `durbin` is
    /// off).
    pub theta: Vec<f64>,
    pub sigma2: f64,
    pub log_likelihood: f64,
    /// Admissible open interval for `rho` from the eigenvalue range.
    pub rho_interval: (f64, f64),
    pub convergence: SdmConvergence,
}

/// `ln|I - rho W|` from the eigenvalues of `W`. For real matrices the
/// complex eigenvalues come in conjugate pairs, so the sum of log-moduli is
/// the log of the (positive) determinant on the admissible interval.
pub fn log_det_i_minus_rho_w(w: &WeightsMatrix, rho: f64) -> f64 {
    let eigs = w.to_dense().complex_eigenvalues();
    log_det_from_eigs(eigs.as_slice(), rho)
}

fn log_det_from_eigs(eigs: &[Complex<f64>], rho: f64) -> f64 {
    eigs.iter()
        .map(|lambda| {
            let z = Complex::new(1.0 - rho * lambda.re, -rho * lambda.im);
            z.norm().ln()
        })
        .sum()
}

/// The admissible interval `(1/lambda_min, 1/lambda_max)` over the real
/// eigenvalues of `W`.
fn rho_interval(eigs: &[Complex<f64>]) -> Result<(f64, f64), SpatialError> {
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    for e in eigs {
        if e.im.abs() <= 1e-9 * e.re.abs().max(1.0) {
            lambda_min = lambda_min.min(e.re);
            lambda_max = lambda_max.max(e.re);
        }
    }
    if !(lambda_min < 0.0 && lambda_max > 0.0) {
        return Err(SpatialError::InvalidWeights(format!(
            "real eigenvalue range [{lambda_min}, {lambda_max}] does not bracket zero"
        )));
    }
    Ok((1.0 / lambda_min, 1.0 / lambda_max))
}

struct Concentrated {
    /// Residuals of `y` on `Z`.
    e0: Vec<f64>,
    /// Residuals of `Wy` on `Z`.
    e1: Vec<f64>,
    /// Coefficients of `y` on `Z`.
    delta0: Vec<f64>,
    /// Coefficients of `Wy` on `Z`.
    delta1: Vec<f64>,
    n: usize,
}

impl Concentrated {
    fn ssr(&self, rho: f64) -> f64 {
        self.e0
            .iter()
            .zip(&self.e1)
            .map(|(a, b)| {
                let e = a - rho * b;
                e * e
            })
            .sum()
    }

    fn log_likelihood(&self, rho: f64, eigs: &[Complex<f64>]) -> f64 {
        let n = self.n as f64;
        let sigma2 = self.ssr(rho) / n;
        -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + 1.0) - 0.5 * n * sigma2.ln()
            + log_det_from_eigs(eigs, rho)
    }

    fn coefficients(&self, rho: f64) -> Vec<f64> {
        self.delta0
            .iter()
            .zip(&self.delta1)
            .map(|(a, b)| a - rho * b)
            .collect()
    }
}

fn build_design_columns(
    x_cols: &[Vec<f64>],
    w: &WeightsMatrix,
    durbin: bool,
) -> Vec<Vec<f64>> {
    let mut z_cols: Vec<Vec<f64>> = x_cols.to_vec();
    if durbin {
        for col in x_cols {
            z_cols.push(w.lag(col));
        }
    }
    z_cols
}

fn concentrate(
    y: &[f64],
    x_cols: &[Vec<f64>],
    w: &WeightsMatrix,
    durbin: bool,
) -> Result<Concentrated, SpatialError> {
    let z_cols = build_design_columns(x_cols, w, durbin);
    let wy = w.lag(y);
    let fit0 = ols_fit(y, &z_cols, true)?;
    let fit1 = ols_fit(&wy, &z_cols, true)?;
    Ok(Concentrated {
        e0: fit0.residuals,
        e1: fit1.residuals,
        delta0: fit0.coefficients,
        delta1: fit1.coefficients,
        n: y.len(),
    })
}

/// Concentrated log-likelihood at a given `rho`, recomputed from scratch.
/// Exposed as a diagnostic and for optimizer soundness checks.
pub fn concentrated_log_likelihood(
    y: &[f64],
    x_cols: &[Vec<f64>],
    w: &WeightsMatrix,
    rho: f64,
) -> Result<f64, SpatialError> {
    validate_inputs(y, x_cols, w)?;
    let conc = concentrate(y, x_cols, w, true)?;
    let eigs = w.to_dense().complex_eigenvalues();
    Ok(conc.log_likelihood(rho, eigs.as_slice()))
}

fn validate_inputs(
    y: &[f64],
    x_cols: &[Vec<f64>],
    w: &WeightsMatrix,
) -> Result<(), SpatialError> {
    if !w.is_row_standardized() {
        return Err(SpatialError::NotRowStandardized);
    }
    let n = y.len();
    if w.n() != n {
        return Err(SpatialError::DimensionMismatch(format!(
            "weights order {} does not match n={n}",
            w.n()
        )));
    }
    let k = x_cols.len();
    if n <= 2 * k + 2 {
        return Err(SpatialError::TooFewObservations { n, params: 2 * k + 2 });
    }
    Ok(())
}

/// Fits the model. The grid stage evaluates 101 interior points of the
/// admissible interval; a best point at either end is reported as a boundary
/// solution rather than silently clamped.
pub fn sdm_fit(
    y: &[f64],
    x_cols: &[Vec<f64>],
    w: &WeightsMatrix,
    opts: &SdmOptions,
) -> Result<SdmFit, SpatialError> {
    validate_inputs(y, x_cols, w)?;
    let conc = concentrate(y, x_cols, w, opts.durbin)?;
    let eig_vec = w.to_dense().complex_eigenvalues();
    let eigs = eig_vec.as_slice();
    let (lo, hi) = rho_interval(eigs)?;

    let (rho, convergence) = match opts.fixed_rho {
        Some(rho) => {
            if rho != 0.0 && !(lo < rho && rho < hi) {
                return Err(SpatialError::InvalidWeights(format!(
                    "fixed rho {rho} outside admissible interval ({lo}, {hi})"
                )));
            }
            (
                rho,
                SdmConvergence {
                    grid_points: 0,
                    golden_iterations: 0,
                    final_interval_width: 0.0,
                },
            )
        }
        None => {
            let grid: Vec<f64> = (0..GRID_POINTS)
                .map(|i| lo + (i + 1) as f64 * (hi - lo) / (GRID_POINTS + 1) as f64)
                .collect();
            let lls: Vec<f64> = grid.iter().map(|&r| conc.log_likelihood(r, eigs)).collect();
            let best = lls
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .expect("grid nonempty");
            if best == 0 || best == GRID_POINTS - 1 {
                return Err(SpatialError::BoundarySolution);
            }

            // Golden-section refinement inside the bracketing grid cells.
            let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let mut fc = conc.log_likelihood(c, eigs);
            let mut fd = conc.log_likelihood(d, eigs);
            let mut iterations = 0;
            while b - a > RHO_TOL {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = conc.log_likelihood(c, eigs);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = conc.log_likelihood(d, eigs);
                }
                iterations += 1;
            }
            (
                0.5 * (a + b),
                SdmConvergence {
                    grid_points: GRID_POINTS,
                    golden_iterations: iterations,
                    final_interval_width: b - a,
                },
            )
        }
    };

    let delta = conc.coefficients(rho);
    let k = x_cols.len();
    let beta = delta[..k + 1].to_vec();
    let theta = if opts.durbin {
        delta[k + 1..].to_vec()
    } else {
        Vec::new()
    };
    let sigma2 = conc.ssr(rho) / y.len() as f64;
    let log_likelihood = conc.log_likelihood(rho, eigs);

    Ok(SdmFit {
        rho,
        beta,
        theta,
        sigma2,
        log_likelihood,
        rho_interval: (lo, hi),
        convergence,
    })
}

#[cfg(test)]
mod tests {
    use super::super::weights::{build_weights, lattice_rook_edges, WeightsSpec};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lattice(n: usize) -> WeightsMatrix {
        let edges = lattice_rook_edges(n, n);
        build_weights(&WeightsSpec::Adjacency(edges), true)
            .unwrap()
            .matrix
    }

    fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller from two uniforms.
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Draws y = (I - rho W)^-1 (X beta + WX theta + eps).
    fn simulate(
        w: &WeightsMatrix,
        rho: f64,
        beta: &[f64],
        theta: &[f64],
        seed: u64,
    ) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = w.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let wx = w.lag(&x);
        let rhs: Vec<f64> = (0..n)
            .map(|i| beta[0] + beta[1] * x[i] + theta[0] * wx[i] + standard_normal(&mut rng))
            .collect();
        let a = DMatrix::identity(n, n) - rho * w.to_dense();
        let y = a
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .expect("I - rho W invertible");
        (y.iter().copied().collect(), vec![x])
    }

    #[test]
    fn zero_rho_data_reduces_to_ols() {
        let w = lattice(5);
        let (y, x_cols) = simulate(&w, 0.0, &[1.0, 2.0], &[0.0], 7);
        let fit = sdm_fit(&y, &x_cols, &w, &SdmOptions::default()).unwrap();
        assert!(fit.rho.abs() < 0.05, "rho = {}", fit.rho);

        let wx = w.lag(&x_cols[0]);
        let ols = ols_fit(&y, &[x_cols[0].clone(), wx], true).unwrap();
        for (a, b) in fit.beta.iter().zip(&ols.coefficients[..2]) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn fixed_zero_rho_without_durbin_equals_ols_exactly() {
        let w = lattice(4);
        let (y, x_cols) = simulate(&w, 0.3, &[0.5, -1.0], &[0.2], 3);
        let opts = SdmOptions {
            fixed_rho: Some(0.0),
            durbin: false,
        };
        let fit = sdm_fit(&y, &x_cols, &w, &opts).unwrap();
        let ols = ols_fit(&y, &x_cols, true).unwrap();
        for (a, b) in fit.beta.iter().zip(&ols.coefficients) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(fit.theta.is_empty());
    }

    #[test]
    fn recovers_moderate_spatial_dependence() {
        let w = lattice(10);
        let (y, x_cols) = simulate(&w, 0.5, &[1.0, 2.0], &[0.5], 11);
        let fit = sdm_fit(&y, &x_cols, &w, &SdmOptions::default()).unwrap();
        assert!((fit.rho - 0.5).abs() < 0.15, "rho = {}", fit.rho);
        assert!((fit.beta[1] - 2.0).abs() < 0.3, "beta1 = {}", fit.beta[1]);
    }

    #[test]
    fn optimum_beats_every_grid_point() {
        let w = lattice(6);
        let (y, x_cols) = simulate(&w, 0.4, &[1.0, 1.5], &[0.3], 5);
        let fit = sdm_fit(&y, &x_cols, &w, &SdmOptions::default()).unwrap();
        let (lo, hi) = fit.rho_interval;
        for i in 0..GRID_POINTS {
            let rho = lo + (i + 1) as f64 * (hi - lo) / (GRID_POINTS + 1) as f64;
            let ll = concentrated_log_likelihood(&y, &x_cols, &w, rho).unwrap();
            assert!(
                fit.log_likelihood >= ll - 1e-9,
                "grid point {rho} beats optimum"
            );
        }
    }

    #[test]
    fn non_standardized_weights_rejected() {
        let edges = lattice_rook_edges(3, 3);
        let w = build_weights(&WeightsSpec::Adjacency(edges), false)
            .unwrap()
            .matrix;
        let y = vec![0.0; 9];
        let err = sdm_fit(&y, &[vec![0.0; 9]], &w, &SdmOptions::default());
        assert!(matches!(err, Err(SpatialError::NotRowStandardized)));
    }

    #[test]
    fn log_det_matches_at_zero() {
        let w = lattice(4);
        assert!(log_det_i_minus_rho_w(&w, 0.0).abs() < 1e-12);
    }
}
