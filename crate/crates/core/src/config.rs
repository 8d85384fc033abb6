//! Full description of one experiment. SIR thresholds are given in dB here
//! and converted once on the way into the numerical code.

use serde::{Deserialize, Serialize};

use crate::access::{AccessProfile, PmfMethod, SchemeId, SdmaAccounting};
use crate::analytic::{db_to_linear, AnalyticModel, ChannelParams};
use crate::curve::GridSpec;
use crate::error::{invalid, Result};
use crate::load::{cell_load_pmf, suggested_k_max, LoadPmf, RANDOM_CELL_SHAPE, TAGGED_CELL_SHAPE};
use crate::sim::{AccessConfig, SimWindow};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// User to AP density ratio `λu / λa`.
    pub ratio: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    pub theta0_db: f64,
    /// Subchannels per cell.
    pub n: usize,
    /// Antennas per AP, the SDMA limit.
    pub m_max: usize,
    pub scheme: SchemeId,
    /// How time-shared Scheme 2 groups count towards `M` and `M̃`.
    pub sdma_accounting: SdmaAccounting,
    /// Load pmf truncation; picked from the ratio when absent.
    pub k_max: Option<usize>,
    pub window: SimWindow,
    pub mc_samples: usize,
    pub base_seed: u64,
    pub theta_grid_db: GridSpec,
    pub rate_grid: GridSpec,
    /// Target rates for the subchannel optimization.
    pub r0_grid: GridSpec,
    /// Largest subchannel count the optimization tries.
    pub n_max: usize,
    /// Every AP always serves `m_max` users on every subchannel.
    pub full_buffer: bool,
    pub pmf_method: PmfMethod,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            ratio: 10.0,
            alpha: 4.0,
            theta0_db: 0.0,
            n: 5,
            m_max: 1,
            scheme: SchemeId::Scheme1,
            sdma_accounting: SdmaAccounting::Pooled,
            k_max: None,
            window: SimWindow::default(),
            mc_samples: 10_000,
            base_seed: DEFAULT_SEED,
            theta_grid_db: GridSpec::linear(-10.0, 20.0, 61),
            rate_grid: GridSpec::linear(0.0, 0.5, 101),
            r0_grid: GridSpec::linear(0.1, 1.7, 17),
            n_max: 200,
            full_buffer: false,
            pmf_method: PmfMethod::Exact,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return invalid(format!("ratio must be positive, got {}", self.ratio));
        }
        ChannelParams::new(self.alpha, db_to_linear(self.theta0_db))?;
        if self.n == 0 || self.m_max == 0 || self.n_max == 0 {
            return invalid("n, m_max and n_max must be at least 1");
        }
        if self.k_max == Some(0) {
            return invalid("k_max must be at least 1");
        }
        self.window.validate()?;
        if self.mc_samples < 100 {
            return invalid(format!("mc_samples must be at least 100, got {}", self.mc_samples));
        }
        self.theta_grid_db.validate()?;
        self.rate_grid.validate()?;
        self.r0_grid.validate()?;
        if self.rate_grid.min < 0.0 {
            return invalid("rate grid must be non-negative");
        }
        if self.r0_grid.min <= 0.0 {
            return invalid("target rates must be positive");
        }
        if let PmfMethod::MonteCarlo { samples: 0, .. } = self.pmf_method {
            return invalid("Monte Carlo pmf needs at least one sample");
        }
        Ok(())
    }

    pub fn theta0(&self) -> f64 {
        db_to_linear(self.theta0_db)
    }

    pub fn channel_params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.alpha, self.theta0())
    }

    pub fn access(&self) -> AccessConfig {
        AccessConfig {
            scheme: self.scheme,
            n: self.n,
            m_max: self.m_max,
            accounting: self.sdma_accounting,
            full_buffer: self.full_buffer,
        }
    }

    /// Linear SIR thresholds of the θ grid.
    pub fn theta_grid(&self) -> Result<Vec<f64>> {
        Ok(self.theta_grid_db.values()?.into_iter().map(db_to_linear).collect())
    }

    pub fn resolved_k_max(&self) -> Result<usize> {
        match self.k_max {
            Some(k) => Ok(k),
            None => Ok(suggested_k_max(self.ratio, RANDOM_CELL_SHAPE)?.max(suggested_k_max(self.ratio, TAGGED_CELL_SHAPE)?)),
        }
    }

    /// Random-cell load and the typical cell's extra load.
    pub fn load_pmfs(&self) -> Result<(LoadPmf, LoadPmf)> {
        let k_max = self.resolved_k_max()?;
        Ok((
            cell_load_pmf(self.ratio, RANDOM_CELL_SHAPE, k_max)?,
            cell_load_pmf(self.ratio, TAGGED_CELL_SHAPE, k_max)?,
        ))
    }

    /// Access profile of this configuration with `n` subchannels.
    pub fn access_profile(&self, n: usize) -> Result<AccessProfile> {
        if self.full_buffer {
            return AccessProfile::full_buffer(self.scheme, n, self.m_max);
        }
        let (interferer, extra) = self.load_pmfs()?;
        AccessProfile::build(
            self.scheme,
            self.sdma_accounting,
            &interferer,
            &extra,
            n,
            self.m_max,
            self.pmf_method,
        )
    }

    pub fn analytic_model(&self) -> Result<AnalyticModel> {
        self.validate()?;
        AnalyticModel::new(self.channel_params()?, self.access_profile(self.n)?)
    }
}
