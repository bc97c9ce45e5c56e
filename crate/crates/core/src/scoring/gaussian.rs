use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use super::pca::covariance;
use crate::data_io::Points;
use crate::error::{MsdeError, Result};

/// Gaussian with Tikhonov-regularized covariance `Σ + λI`. Distances are
/// computed through the Cholesky factor; the explicit precision matrix is
/// kept for inspection and export.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    pub mu: Vec<f64>,
    /// Regularized covariance, row-major.
    pub sigma: Vec<f64>,
    pub precision: Vec<f64>,
    pub lambda: f64,
    /// Lower Cholesky factor of `sigma`, row-major.
    chol_l: Vec<f64>,
}

/// Serializable parameters; the factorization is recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub lambda: f64,
}

impl GaussianModel {
    /// Mean and sample covariance (divisor n-1) of `z`, plus `λI`.
    pub fn fit(z: Points<'_>, lambda: f64) -> Result<Self> {
        let n = z.len();
        if n < 2 {
            return Err(MsdeError::Fit {
                what: "Gaussian",
                detail: format!("need at least 2 rows, got {n}"),
            });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MsdeError::Fit {
                what: "Gaussian",
                detail: format!("lambda must be positive, got {lambda}"),
            });
        }
        let d = z.dim();
        let (mu, mut sigma) = covariance(z);
        for i in 0..d {
            sigma[i * d + i] += lambda;
        }
        Self::from_parts(mu, sigma, lambda)
    }

    /// Factor an already regularized covariance.
    pub fn from_parts(mu: Vec<f64>, sigma: Vec<f64>, lambda: f64) -> Result<Self> {
        let d = mu.len();
        if sigma.len() != d * d {
            return Err(MsdeError::shape(
                "scoring",
                format!("mean has dim {d} but covariance has {} entries", sigma.len()),
            ));
        }
        let chol = Cholesky::new(DMatrix::from_row_slice(d, d, &sigma)).ok_or_else(|| {
            MsdeError::numeric("scoring", "covariance is not positive definite")
        })?;
        let l = chol.l();
        let inv = chol.inverse();
        let row_major = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        };
        Ok(GaussianModel {
            chol_l: row_major(&l),
            precision: row_major(&inv),
            mu,
            sigma,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn params(&self) -> GaussianParams {
        GaussianParams {
            mu: self.mu.clone(),
            sigma: self.sigma.clone(),
            lambda: self.lambda,
        }
    }

    pub fn from_params(p: GaussianParams) -> Result<Self> {
        Self::from_parts(p.mu, p.sigma, p.lambda)
    }

    /// `sqrt((z-μ)ᵀ Σ⁻¹ (z-μ))` via forward substitution with the Cholesky
    /// factor.
    pub fn mahalanobis(&self, z: &[f64]) -> Result<f64> {
        let d = self.dim();
        if z.len() != d {
            return Err(MsdeError::shape(
                "scoring",
                format!("model has dim {d}, vector has dim {}", z.len()),
            ));
        }
        let mut y = vec![0.0; d];
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.chol_l[i * d..i * d + i];
            let dot: f64 = row.iter().zip(&y).map(|(l, v)| l * v).sum();
            y[i] = ((z[i] - self.mu[i]) - dot) / self.chol_l[i * d + i];
            acc += y[i] * y[i];
        }
        Ok(acc.sqrt())
    }
}
