//! Sampled cumulative distribution functions and evaluation grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Monotone cdf sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    abscissae: Vec<f64>,
    values: Vec<f64>,
}

impl CdfCurve {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return invalid("cdf curve needs one value per abscissa");
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("cdf abscissae must be strictly increasing");
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return invalid("cdf values must lie in [0, 1]");
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return invalid("cdf values must be non-decreasing");
        }
        Ok(Self { abscissae, values })
    }

    /// Builds a curve from pointwise evaluations that are accurate to
    /// `slack`: a dip no deeper than `slack` is flattened to the running
    /// maximum. A deeper dip is reported with the abscissa where it occurs.
    pub fn from_evaluations(abscissae: Vec<f64>, mut values: Vec<f64>, slack: f64) -> std::result::Result<Self, (f64, Error)> {
        for i in 1..values.len().min(abscissae.len()) {
            if values[i] < values[i - 1] {
                if values[i - 1] - values[i] > slack {
                    return Err((abscissae[i], Error::InvalidParameter("cdf values must be non-decreasing".into())));
                }
                values[i] = values[i - 1];
            }
        }
        Self::new(abscissae, values).map_err(|e| (f64::NAN, e))
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.abscissae.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest absolute difference to `other` over their common grid.
    pub fn sup_distance(&self, other: &CdfCurve) -> Result<f64> {
        if self.abscissae != other.abscissae {
            return invalid("curves are sampled on different grids");
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Fraction of `samples` at or below each grid point. `+inf` and NaN count as
/// exceeding every abscissa.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<CdfCurve> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| !x.is_nan()).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let values = grid.iter().map(|&x| sorted.partition_point(|&s| s <= x) as f64 / n).collect();
    CdfCurve::new(grid.to_vec(), values)
}

/// Wilson score interval for a binomial proportion (`z = 1.96` gives 95%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// `points` abscissae from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            scale: GridScale::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return invalid("grid bounds must be finite");
        }
        if self.points == 0 {
            return invalid("grid needs at least one point");
        }
        if self.points > 1 && !(self.min < self.max) {
            return invalid(format!("grid needs min < max, got [{}, {}]", self.min, self.max));
        }
        if self.scale == GridScale::Log && self.min <= 0.0 {
            return invalid("log grid needs a positive minimum");
        }
        Ok(())
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    GridScale::Linear => self.min + t * (self.max - self.min),
                    GridScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect())
    }
}
