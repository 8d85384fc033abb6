//! Many independent realizations with deterministic per-sample seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::network::sample_network;
use super::typical::{draw_typical_link, typical_rate, TypicalOutcome};
use crate::config::SystemConfig;
use crate::curve::{empirical_cdf, CdfCurve};
use crate::error::{invalid, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index`: splitmix64 of `base_seed + index * 0x9e3779b97f4a7c15`.
pub fn sample_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// One realization's measurements of the typical UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub seed: u64,
    pub sir: f64,
    pub k0: usize,
    pub m: usize,
    pub rate: f64,
    /// Whether a uniformly chosen AP inside the guard disk (other than the
    /// serving one) transmits on the typical subchannel; `None` when there is no such AP.
    pub probe_active: Option<bool>,
    pub resampled: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub realizations: u64,
    /// Deployments redrawn for lacking APs or a serving AP beyond the guard radius.
    pub resampled: u64,
    pub infinite_sir: u64,
    pub activity_trials: u64,
    pub activity_hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub sir_curve: CdfCurve,
    pub rate_curve: CdfCurve,
    /// Fraction of probed interferers active on the typical subchannel.
    pub activity_estimate: f64,
    pub diagnostics: Diagnostics,
    pub samples: Vec<SampleRecord>,
}

fn run_sample(config: &SystemConfig, seed: u64) -> Result<SampleRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = sample_network(config.ratio, config.window, &mut rng)?;
    let link = draw_typical_link(&real, config.access(), rng.random())?;
    let sir = link.sir(&real, config.alpha);
    let guard2 = config.window.guard_radius().powi(2);
    let inner: Vec<usize> = (1..real.ap_positions().len())
        .filter(|&ap| {
            let p = real.ap_positions()[ap];
            p[0] * p[0] + p[1] * p[1] <= guard2
        })
        .collect();
    let probe_active = if inner.is_empty() {
        None
    } else {
        Some(link.marks[inner[rng.random_range(0..inner.len())]] > 0)
    };
    let outcome = TypicalOutcome {
        sir,
        k0: link.k0,
        m: link.m,
    };
    Ok(SampleRecord {
        seed,
        sir,
        k0: link.k0,
        m: link.m,
        rate: typical_rate(outcome, config.theta0(), config.n),
        probe_active,
        resampled: real.resampled(),
    })
}

/// Runs `n_samples` realizations of `config` and summarizes them on the
/// configuration's θ and rate grids. Samples run in parallel on the current
/// rayon pool; the result depends only on the inputs.
pub fn run_campaign(config: &SystemConfig, n_samples: usize, base_seed: u64) -> Result<CampaignResult> {
    config.validate()?;
    if n_samples < 100 {
        return invalid(format!("a campaign needs at least 100 samples, got {n_samples}"));
    }
    let samples = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| run_sample(config, sample_seed(base_seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut diagnostics = Diagnostics {
        realizations: n_samples as u64,
        ..Default::default()
    };
    for s in &samples {
        diagnostics.resampled += u64::from(s.resampled);
        diagnostics.infinite_sir += u64::from(s.sir.is_infinite());
        if let Some(active) = s.probe_active {
            diagnostics.activity_trials += 1;
            diagnostics.activity_hits += u64::from(active);
        }
    }
    let sirs: Vec<f64> = samples.iter().map(|s| s.sir).collect();
    let rates: Vec<f64> = samples.iter().map(|s| s.rate).collect();
    let activity_estimate = if diagnostics.activity_trials == 0 {
        f64::NAN
    } else {
        diagnostics.activity_hits as f64 / diagnostics.activity_trials as f64
    };
    Ok(CampaignResult {
        sir_curve: empirical_cdf(&sirs, &config.theta_grid()?)?,
        rate_curve: empirical_cdf(&rates, &config.rate_grid.values()?)?,
        activity_estimate,
        diagnostics,
        samples,
    })
}
