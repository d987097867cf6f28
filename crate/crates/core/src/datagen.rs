//! Data generators and CSV interchange.
//!
//! [`gen_synthetic`] draws `x` uniformly with a given mean and variance and
//! `y` from a noisy line. [`gen_oi_tract`] and [`gen_oi_family`] simulate
//! parent/child income percentiles for census tracts: lognormal parent
//! incomes, a log-linear child income relationship, and percentile ranks
//! rounded up to two decimals.

use std::io::{Read, Write};

use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp_regression::TractFamily;
use crate::noise::{Exponential, Gaussian, UniformInterval};
use crate::{DataPoint, Dataset, Error, PredictionPair, RandomSeed, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Variance of the uniform `x` distribution.
    pub sigma_x2: f64,
    /// Variance of the Gaussian noise on `y`.
    pub sigma_e2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub xbar: f64,
    /// Where the sweep evaluates predictions.
    pub x_new: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            sigma_x2: 0.02,
            sigma_e2: 0.005,
            alpha: 0.5,
            beta: 0.2,
            xbar: 0.5,
            x_new: 0.25,
        }
    }
}

impl SyntheticSpec {
    pub fn half_width(&self) -> f64 {
        (3.0 * self.sigma_x2).sqrt()
    }

    /// The noiseless line at 0.25 and 0.75.
    pub fn truth(&self) -> PredictionPair {
        PredictionPair::from_line(self.alpha, self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < Dataset::MIN_POINTS {
            return Err(Error::TooFewPoints {
                needed: Dataset::MIN_POINTS,
                got: self.n,
            });
        }
        if !(self.sigma_x2 > 0.0 && self.sigma_x2.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_x2 must be > 0, got {}", self.sigma_x2)));
        }
        if !(self.sigma_e2 >= 0.0 && self.sigma_e2.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_e2 must be >= 0, got {}", self.sigma_e2)));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("xbar", self.xbar)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if !(0.0..=1.0).contains(&self.x_new) {
            return Err(Error::InvalidParameter(format!("x_new must be in [0, 1], got {}", self.x_new)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub truth: PredictionPair,
    /// Fraction of points with at least one coordinate clipped.
    pub clipped_fraction: f64,
    pub warnings: Vec<String>,
}

pub fn gen_synthetic<R: Rng + ?Sized>(spec: &SyntheticSpec, rng: &mut R) -> Result<SyntheticData> {
    spec.validate()?;
    let h = spec.half_width();
    let mut warnings = Vec::new();
    if spec.xbar - h < 0.0 || spec.xbar + h > 1.0 {
        warnings.push(format!(
            "x support [{:.4}, {:.4}] leaves the unit interval; points will be clipped",
            spec.xbar - h,
            spec.xbar + h
        ));
    }
    let xs = UniformInterval::new(spec.xbar - h, spec.xbar + h)?;
    let noise = Gaussian::new(0.0, spec.sigma_e2.sqrt())?;
    let mut clipped = 0usize;
    let mut points = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let x = xs.sample(rng);
        let y = spec.alpha * x + spec.beta + noise.sample(rng);
        let p = DataPoint::clipped(x, y)?;
        if p.x() != x || p.y() != y {
            clipped += 1;
        }
        points.push(p);
    }
    Ok(SyntheticData {
        dataset: Dataset::new(points)?,
        truth: spec.truth(),
        clipped_fraction: clipped as f64 / spec.n as f64,
        warnings,
    })
}

/// Public inputs for one simulated tract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TractSpec {
    /// Mean parent income.
    pub mu: f64,
    pub alpha_tm: f64,
    pub beta_tm: f64,
    /// Between-tract variance of `mu`; parent income variance is four times it.
    pub var_mu: f64,
}

impl TractSpec {
    /// Mean and variance of log parent income.
    pub fn log_income_moments(&self) -> (f64, f64) {
        let v = 4.0 * self.var_mu;
        let m2 = (v + self.mu * self.mu).ln();
        (2.0 * self.mu.ln() - 0.5 * m2, -2.0 * self.mu.ln() + m2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.var_mu > 0.0) {
            return Err(Error::InvalidParameter("mu and var_mu must be > 0".into()));
        }
        let (m, v) = self.log_income_moments();
        if !(m.is_finite() && v.is_finite() && v > 0.0) || !self.alpha_tm.is_finite() || !self.beta_tm.is_finite() {
            return Err(Error::InvalidParameter(format!("degenerate tract spec {self:?}")));
        }
        Ok(())
    }
}

/// Standard deviation of the log child income noise.
pub const CHILD_LOG_NOISE_SD: f64 = 0.2;

/// `floor(Exp(52) + 20)`.
pub fn tract_size<R: Rng + ?Sized>(rng: &mut R) -> usize {
    let e = Exponential::new(52.0).expect("valid scale").sample(rng);
    (e + 20.0).floor() as usize
}

/// Raw parent and child incomes for `n` families.
#[derive(Debug, Clone, PartialEq)]
pub struct TractIncomes {
    pub parent: Vec<f64>,
    pub child: Vec<f64>,
}

pub fn sample_log_parent_income<R: Rng + ?Sized>(spec: &TractSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let (m, v) = spec.log_income_moments();
    let g = Gaussian::new(m, v.sqrt())?;
    Ok((0..n).map(|_| g.sample(rng)).collect())
}

pub fn sample_tract_incomes<R: Rng + ?Sized>(spec: &TractSpec, n: usize, rng: &mut R) -> Result<TractIncomes> {
    let log_parent = sample_log_parent_income(spec, n, rng)?;
    let e = Gaussian::new(0.0, CHILD_LOG_NOISE_SD)?;
    let child = log_parent
        .iter()
        .map(|lp| (spec.alpha_tm + spec.beta_tm * lp + e.sample(rng)).exp())
        .collect();
    Ok(TractIncomes {
        parent: log_parent.into_iter().map(f64::exp).collect(),
        child,
    })
}

/// Percentile of each value within `values`, rounded up to two decimals.
pub fn percentile_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total = values.len() as f64;
    let mut ranks = vec![0.0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = round_up_hundredth((rank + 1) as f64 / total);
    }
    ranks
}

fn round_up_hundredth(v: f64) -> f64 {
    // The small slack keeps exact hundredths such as 0.29 from rounding to 0.30.
    ((v * 100.0 - 1e-9).ceil() / 100.0).clamp(0.0, 1.0)
}

/// One tract ranked against itself.
pub fn gen_oi_tract<R: Rng + ?Sized>(spec: &TractSpec, rng: &mut R) -> Result<Dataset> {
    let n = tract_size(rng);
    let incomes = sample_tract_incomes(spec, n, rng)?;
    Dataset::from_pairs(percentile_ranks(&incomes.parent).into_iter().zip(percentile_ranks(&incomes.child)))
}

/// How tract parameters are drawn for a simulated state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OiFamilySpec {
    pub state: String,
    pub tracts: usize,
    /// Tract mean incomes are uniform on this interval.
    pub mu_range: (f64, f64),
    /// Log-income elasticities are uniform on this interval.
    pub beta_range: (f64, f64),
    /// Reference income the child distribution is centred on.
    pub reference_income: f64,
    /// Half-width of the uniform tract shift in log child income.
    pub alpha_jitter: f64,
}

impl Default for OiFamilySpec {
    fn default() -> Self {
        Self {
            state: "synthetic".into(),
            tracts: 100,
            mu_range: (30_000.0, 120_000.0),
            beta_range: (0.3, 0.6),
            reference_income: 60_000.0,
            alpha_jitter: 0.25,
        }
    }
}

impl OiFamilySpec {
    fn validate(&self) -> Result<()> {
        if self.tracts == 0 {
            return Err(Error::EmptyFamily);
        }
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(self.mu_range) || self.mu_range.0 <= 0.0 || !ok(self.beta_range) {
            return Err(Error::InvalidParameter("mu_range and beta_range need lo < hi, mu > 0".into()));
        }
        if !(self.reference_income > 0.0) || !(self.alpha_jitter >= 0.0) {
            return Err(Error::InvalidParameter("reference_income > 0 and alpha_jitter >= 0 required".into()));
        }
        Ok(())
    }
}

/// Tract inputs drawn for a family: each `mu`, then the shared `var_mu` as the
/// sample variance of those means.
pub fn draw_tract_specs(spec: &OiFamilySpec, seed: RandomSeed) -> Result<Vec<TractSpec>> {
    spec.validate()?;
    let mut rng = seed.derive_str("tract-specs").rng();
    let mus = UniformInterval::new(spec.mu_range.0, spec.mu_range.1)?;
    let betas = UniformInterval::new(spec.beta_range.0, spec.beta_range.1)?;
    let draws: Vec<(f64, f64, f64)> = (0..spec.tracts)
        .map(|_| {
            let beta = betas.sample(&mut rng);
            let jitter = if spec.alpha_jitter > 0.0 {
                UniformInterval::new(-spec.alpha_jitter, spec.alpha_jitter)
                    .expect("positive width")
                    .sample(&mut rng)
            } else {
                0.0
            };
            (mus.sample(&mut rng), beta, jitter)
        })
        .collect();
    let mean_mu = draws.iter().map(|d| d.0).sum::<f64>() / draws.len() as f64;
    let var_mu = if draws.len() > 1 {
        draws.iter().map(|d| (d.0 - mean_mu).powi(2)).sum::<f64>() / (draws.len() - 1) as f64
    } else {
        // A lone tract has no between-tract spread; use the interval's variance.
        (spec.mu_range.1 - spec.mu_range.0).powi(2) / 12.0
    };
    Ok(draws
        .into_iter()
        .map(|(mu, beta, jitter)| TractSpec {
            mu,
            alpha_tm: (1.0 - beta) * spec.reference_income.ln() + jitter,
            beta_tm: beta,
            var_mu,
        })
        .collect())
}

/// A simulated state whose percentiles are ranked across all of its tracts.
pub fn gen_oi_family(spec: &OiFamilySpec, seed: RandomSeed) -> Result<TractFamily> {
    let specs = draw_tract_specs(spec, seed)?;
    let incomes: Vec<TractIncomes> = specs
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let mut rng = seed.derive_str("tract").derive(t as u64).rng();
            let n = tract_size(&mut rng);
            sample_tract_incomes(s, n, &mut rng)
        })
        .collect::<Result<_>>()?;
    let parent: Vec<f64> = incomes.iter().flat_map(|t| t.parent.iter().copied()).collect();
    let child: Vec<f64> = incomes.iter().flat_map(|t| t.child.iter().copied()).collect();
    let (parent_rank, child_rank) = (percentile_ranks(&parent), percentile_ranks(&child));
    let mut offset = 0;
    let mut tracts = Vec::with_capacity(incomes.len());
    for (t, inc) in incomes.iter().enumerate() {
        let n = inc.parent.len();
        let pairs = parent_rank[offset..offset + n].iter().copied().zip(child_rank[offset..offset + n].iter().copied());
        tracts.push((format!("tract-{t:04}"), Dataset::from_pairs(pairs)?));
        offset += n;
    }
    Ok(TractFamily::new(spec.state.clone(), tracts))
}

/// Reads a two-column `x,y` CSV with a header row.
///
/// Values outside `[0, 1]` are clipped, or rejected when `strict` is set.
/// Row numbers in errors count the header as row 1.
pub fn read_dataset_csv<R: Read>(reader: R, strict: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: format!("expected header `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut points = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 1,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                row,
                column: record.len().min(2) + 1,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let mut values = [0.0f64; 2];
        for (column, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: column + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: column + 1,
                    message: format!("`{field}` is not finite"),
                });
            }
            if strict && !(0.0..=1.0).contains(&v) {
                return Err(Error::Parse {
                    row,
                    column: column + 1,
                    message: format!("{v} is outside [0, 1]"),
                });
            }
            values[column] = v;
        }
        points.push(DataPoint::clipped(values[0], values[1])?);
    }
    Dataset::new(points)
}

pub fn write_dataset_csv<W: Write>(writer: W, d: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for p in d.points() {
        w.write_record([p.x().to_string(), p.y().to_string()])?;
    }
    w.flush()?;
    Ok(())
}
