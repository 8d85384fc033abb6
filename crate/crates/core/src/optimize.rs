//! Choice of the subchannel count `N` that minimizes the rate outage
//! probability `F_R(r0)` for a target rate `r0`.
//!
//! The search is exhaustive over `1..=n_max`; outage need not be unimodal in
//! `N`. A frontier over several targets picks `N` separately for each one, so
//! it is not a cdf.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::access::{AccessProfile, PmfMethod, SchemeId, SdmaAccounting};
use crate::analytic::{AnalyticModel, ChannelParams};
use crate::config::SystemConfig;
use crate::error::{invalid, Result};
use crate::load::{cell_load_pmf, suggested_k_max, LoadPmf, RANDOM_CELL_SHAPE, TAGGED_CELL_SHAPE};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub r0: f64,
    /// Smallest minimizer.
    pub n_star: usize,
    pub outage: f64,
    /// `(N, F_R(r0))` for every candidate, by increasing `N`.
    pub evaluated: Vec<(usize, f64)>,
}

impl OptimizationResult {
    pub fn outage_at(&self, n: usize) -> Option<f64> {
        self.evaluated.iter().find(|(m, _)| *m == n).map(|(_, f)| *f)
    }
}

/// Exhaustive search over `N` at fixed scheme, `M_max` and density ratio.
/// Analytic models are built once per `N` and reused across targets.
#[derive(Debug)]
pub struct Optimizer {
    scheme: SchemeId,
    accounting: SdmaAccounting,
    m_max: usize,
    params: ChannelParams,
    n_max: usize,
    method: PmfMethod,
    loads: (LoadPmf, LoadPmf),
    models: Mutex<HashMap<usize, Arc<AnalyticModel>>>,
}

impl Optimizer {
    pub fn new(scheme: SchemeId, m_max: usize, n_max: usize, ratio: f64, params: ChannelParams) -> Result<Self> {
        let k_max = suggested_k_max(ratio, RANDOM_CELL_SHAPE)?.max(suggested_k_max(ratio, TAGGED_CELL_SHAPE)?);
        let loads = (
            cell_load_pmf(ratio, RANDOM_CELL_SHAPE, k_max)?,
            cell_load_pmf(ratio, TAGGED_CELL_SHAPE, k_max)?,
        );
        Self::with_loads(scheme, SdmaAccounting::default(), m_max, n_max, loads, params, PmfMethod::Exact)
    }

    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        config.validate()?;
        if config.full_buffer {
            return invalid("subchannel optimization needs the load model, not full buffer");
        }
        Self::with_loads(
            config.scheme,
            config.sdma_accounting,
            config.m_max,
            config.n_max,
            config.load_pmfs()?,
            config.channel_params()?,
            config.pmf_method,
        )
    }

    fn with_loads(
        scheme: SchemeId,
        accounting: SdmaAccounting,
        m_max: usize,
        n_max: usize,
        loads: (LoadPmf, LoadPmf),
        params: ChannelParams,
        method: PmfMethod,
    ) -> Result<Self> {
        if m_max == 0 || n_max == 0 {
            return invalid(format!("need m_max >= 1 and n_max >= 1, got {m_max} and {n_max}"));
        }
        Ok(Self {
            scheme,
            accounting,
            m_max,
            params,
            n_max,
            method,
            loads,
            models: Mutex::new(HashMap::new()),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn model(&self, n: usize) -> Result<Arc<AnalyticModel>> {
        if let Some(model) = self.models.lock().expect("model cache poisoned").get(&n) {
            return Ok(model.clone());
        }
        let profile = AccessProfile::build(
            self.scheme,
            self.accounting,
            &self.loads.0,
            &self.loads.1,
            n,
            self.m_max,
            self.method,
        )?;
        let model = Arc::new(AnalyticModel::new(self.params, profile)?);
        self.models.lock().expect("model cache poisoned").insert(n, model.clone());
        Ok(model)
    }

    pub fn optimize(&self, r0: f64) -> Result<OptimizationResult> {
        Ok(self.frontier(&[r0])?.remove(0))
    }

    /// One independent optimization per target rate.
    pub fn frontier(&self, r_grid: &[f64]) -> Result<Vec<OptimizationResult>> {
        if r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return invalid("target rates must be positive and finite");
        }
        let table = (1..=self.n_max)
            .into_par_iter()
            .map(|n| {
                let model = self.model(n)?;
                r_grid.iter().map(|&r| model.rate_cdf(r)).collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(r_grid
            .iter()
            .enumerate()
            .map(|(j, &r0)| {
                let evaluated: Vec<(usize, f64)> = table.iter().enumerate().map(|(i, row)| (i + 1, row[j])).collect();
                let (n_star, outage) = evaluated
                    .iter()
                    .copied()
                    .fold((0, f64::INFINITY), |best, (n, f)| if f < best.1 { (n, f) } else { best });
                OptimizationResult {
                    r0,
                    n_star,
                    outage,
                    evaluated,
                }
            })
            .collect())
    }
}

pub fn optimal_subchannels(
    r0: f64,
    m_max: usize,
    scheme: SchemeId,
    n_max: usize,
    ratio: f64,
    params: ChannelParams,
) -> Result<OptimizationResult> {
    Optimizer::new(scheme, m_max, n_max, ratio, params)?.optimize(r0)
}

pub fn outage_frontier(
    r_grid: &[f64],
    m_max: usize,
    scheme: SchemeId,
    n_max: usize,
    ratio: f64,
    params: ChannelParams,
) -> Result<Vec<OptimizationResult>> {
    Optimizer::new(scheme, m_max, n_max, ratio, params)?.frontier(r_grid)
}
