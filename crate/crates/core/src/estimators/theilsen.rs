use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::{Dataset, Error, PredictionPair, Result};

/// A decomposition of the edges of `K_n` into matchings.
///
/// For even `n` this is a 1-factorization into `n - 1` perfect matchings; for
/// odd `n`, `n` near-perfect matchings that each leave one vertex out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingSchedule {
    n: usize,
    matchings: Vec<Vec<(usize, usize)>>,
}

impl MatchingSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matchings(&self) -> &[Vec<(usize, usize)>] {
        &self.matchings
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }
}

/// Round-robin (circle method) schedule for `n >= 2` vertices.
pub fn matching_schedule(n: usize) -> Result<MatchingSchedule> {
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    // Odd n gets a phantom vertex `n`; its partner sits out that round.
    let m = if n.is_multiple_of(2) { n } else { n + 1 };
    let fixed = m - 1;
    let matchings = (0..fixed)
        .map(|round| {
            let mut edges = Vec::with_capacity(m / 2);
            let mut push = |a: usize, b: usize| {
                if a < n && b < n {
                    edges.push((a.min(b), a.max(b)));
                }
            };
            push(round, fixed);
            for i in 1..m / 2 {
                push((round + i) % fixed, (round + fixed - i) % fixed);
            }
            edges
        })
        .collect();
    Ok(MatchingSchedule { n, matchings })
}

/// The multisets of pairwise point estimates at `x = 0.25` and `x = 0.75`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseEstimates {
    pub z25: Vec<f64>,
    pub z75: Vec<f64>,
    pub k: usize,
    pub n: usize,
}

impl PairwiseEstimates {
    pub fn len(&self) -> usize {
        self.z25.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z25.is_empty()
    }
}

/// Estimates induced by the line through points `j` and `l`, or `None` when
/// the two share an x coordinate.
pub fn edge_estimate(d: &Dataset, j: usize, l: usize) -> Option<(f64, f64)> {
    let (a, b) = (d.points()[j], d.points()[l]);
    let dx = b.x() - a.x();
    if dx == 0.0 {
        return None;
    }
    let slope = (b.y() - a.y()) / dx;
    let xm = (a.x() + b.x()) / 2.0;
    let ym = (a.y() + b.y()) / 2.0;
    Some((slope * (0.25 - xm) + ym, slope * (0.75 - xm) + ym))
}

/// Estimates from an explicit choice of matchings (indices into the schedule).
pub fn estimates_for_matchings(
    d: &Dataset,
    schedule: &MatchingSchedule,
    chosen: &[usize],
) -> Result<PairwiseEstimates> {
    if schedule.n != d.len() {
        return Err(Error::InvalidParameter(format!(
            "schedule is for {} points, dataset has {}",
            schedule.n,
            d.len()
        )));
    }
    let capacity = chosen.len() * (d.len() / 2);
    let mut z25 = Vec::with_capacity(capacity);
    let mut z75 = Vec::with_capacity(capacity);
    for &h in chosen {
        let matching = schedule.matchings.get(h).ok_or_else(|| {
            Error::InvalidParameter(format!("matching {h} out of {}", schedule.len()))
        })?;
        for &(j, l) in matching {
            if let Some((a, b)) = edge_estimate(d, j, l) {
                z25.push(a);
                z75.push(b);
            }
        }
    }
    Ok(PairwiseEstimates {
        z25,
        z75,
        k: chosen.len(),
        n: d.len(),
    })
}

/// Samples `k` matchings without replacement and collects their estimates.
pub fn pairwise_estimates<R: Rng + ?Sized>(
    d: &Dataset,
    schedule: &MatchingSchedule,
    k: usize,
    rng: &mut R,
) -> Result<PairwiseEstimates> {
    if k == 0 || k > schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..={}",
            schedule.len()
        )));
    }
    let chosen = if k == schedule.len() {
        (0..k).collect()
    } else {
        index::sample(rng, schedule.len(), k).into_vec()
    };
    estimates_for_matchings(d, schedule, &chosen)
}

/// Median of an already sorted slice; even lengths take the midpoint.
pub fn median_sorted(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    median_sorted(&sorted)
}

pub fn theilsen_fit(estimates: &PairwiseEstimates) -> Result<PredictionPair> {
    match (median(&estimates.z25), median(&estimates.z75)) {
        (Some(p25), Some(p75)) => Ok(PredictionPair::new(p25, p75)),
        _ => Err(Error::NoValidPairs),
    }
}
