use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Clamps a finite value into `[0, 1]`.
pub fn clip_unit(v: f64) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::InvalidValue("NaN cannot be clipped".into()));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// One `(x, y)` observation in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    x: f64,
    y: f64,
}

impl DataPoint {
    /// Builds a point, clipping both coordinates into `[0, 1]`.
    pub fn clipped(x: f64, y: f64) -> Result<Self> {
        Ok(Self {
            x: clip_unit(x)?,
            y: clip_unit(y)?,
        })
    }

    /// Builds a point, rejecting coordinates outside `[0, 1]`.
    pub fn strict(x: f64, y: f64) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidValue(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// An ordered collection of at least two points in the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<DataPoint>,
}

impl Dataset {
    pub const MIN_POINTS: usize = 2;

    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        if points.len() < Self::MIN_POINTS {
            return Err(Error::TooFewPoints {
                needed: Self::MIN_POINTS,
                got: points.len(),
            });
        }
        Ok(Self { points })
    }

    /// Builds a dataset from raw pairs, clipping into the unit square.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points = pairs
            .into_iter()
            .map(|(x, y)| DataPoint::clipped(x, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Builds a dataset from raw pairs, rejecting anything out of range.
    pub fn from_pairs_strict<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points = pairs
            .into_iter()
            .map(|(x, y)| DataPoint::strict(x, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.y)
    }

    /// Returns a copy with point `index` replaced.
    pub fn with_point(&self, index: usize, point: DataPoint) -> Self {
        let mut points = self.points.clone();
        points[index] = point;
        Self { points }
    }

    /// Returns a copy with one extra point appended.
    pub fn with_extra_point(&self, point: DataPoint) -> Self {
        let mut points = self.points.clone();
        points.push(point);
        Self { points }
    }
}

/// The released predictions at `x = 0.25` and `x = 0.75`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub p25: f64,
    pub p75: f64,
}

impl PredictionPair {
    pub fn new(p25: f64, p75: f64) -> Self {
        Self { p25, p75 }
    }

    /// Prediction pair of the line `slope * x + intercept`.
    pub fn from_line(slope: f64, intercept: f64) -> Self {
        Self {
            p25: 0.25 * slope + intercept,
            p75: 0.75 * slope + intercept,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p25.is_finite() && self.p75.is_finite()
    }

    /// Evaluates the line through `(0.25, p25)` and `(0.75, p75)` at `x`.
    pub fn predict_at(&self, x: f64) -> f64 {
        self.p25 + (self.p75 - self.p25) * (x - 0.25) * 2.0
    }

    pub fn slope(&self) -> f64 {
        (self.p75 - self.p25) * 2.0
    }
}

/// One trial of a mechanism that can fail, such as NoisyStats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrialOutcome {
    Released(PredictionPair),
    Failed,
}

impl TrialOutcome {
    pub fn prediction(&self) -> Option<PredictionPair> {
        match self {
            Self::Released(p) => Some(*p),
            Self::Failed => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Failed)
    }
}

impl From<PredictionPair> for TrialOutcome {
    fn from(p: PredictionPair) -> Self {
        Self::Released(p)
    }
}
