use serde::Serialize;

use crate::{Dataset, Error, PredictionPair, Result};

/// Means and centered second moments of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientStats {
    pub n: usize,
    pub xbar: f64,
    pub ybar: f64,
    /// `sum (x_i - xbar)^2`, i.e. `n * var(x)`.
    pub nvar: f64,
    /// `sum (x_i - xbar)(y_i - ybar)`.
    pub ncov: f64,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn sufficient_stats(d: &Dataset) -> SufficientStats {
    let n = d.len();
    let nf = n as f64;
    let xbar = compensated_sum(d.xs()) / nf;
    let ybar = compensated_sum(d.ys()) / nf;
    let nvar = compensated_sum(d.xs().map(|x| (x - xbar) * (x - xbar)));
    let ncov = compensated_sum(d.points().iter().map(|p| (p.x() - xbar) * (p.y() - ybar)));
    SufficientStats {
        n,
        xbar,
        ybar,
        nvar,
        ncov,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OlsFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// `||y - alpha_hat x - beta_hat||_2`.
    pub residual_norm: f64,
    pub n: usize,
}

impl OlsFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.alpha_hat * x + self.beta_hat
    }

    pub fn predictions(&self) -> PredictionPair {
        PredictionPair::from_line(self.alpha_hat, self.beta_hat)
    }
}

pub fn ols_fit(d: &Dataset) -> Result<OlsFit> {
    let stats = sufficient_stats(d);
    if stats.nvar <= 0.0 {
        return Err(Error::DegenerateX);
    }
    let alpha_hat = stats.ncov / stats.nvar;
    let beta_hat = stats.ybar - alpha_hat * stats.xbar;
    let rss = compensated_sum(d.points().iter().map(|p| {
        let r = p.y() - alpha_hat * p.x() - beta_hat;
        r * r
    }));
    Ok(OlsFit {
        alpha_hat,
        beta_hat,
        residual_norm: rss.sqrt(),
        n: d.len(),
    })
}

/// Standard error of the OLS prediction at `x_new` under Gaussian noise.
pub fn ols_standard_error(fit: &OlsFit, stats: &SufficientStats, x_new: f64) -> Result<f64> {
    if fit.n < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: fit.n,
        });
    }
    if stats.nvar <= 0.0 {
        return Err(Error::DegenerateX);
    }
    let n = fit.n as f64;
    let dx = x_new - stats.xbar;
    Ok(fit.residual_norm / (n - 2.0).sqrt() * (1.0 / n + dx * dx / stats.nvar).sqrt())
}
