//! SIR and rate of the typical UE in one deployment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use super::network::NetworkRealization;
use crate::access::{allocate, SchemeId, SdmaAccounting};
use crate::analytic::{per_channel_rate, ChannelParams};
use crate::error::{invalid, Result};

/// How every cell shares its resources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessConfig {
    pub scheme: SchemeId,
    pub n: usize,
    pub m_max: usize,
    pub accounting: SdmaAccounting,
    /// Every AP serves `m_max` users on every subchannel regardless of its
    /// load, the typical one included (`K0 = M = m_max`).
    pub full_buffer: bool,
}

impl AccessConfig {
    pub fn new(scheme: SchemeId, n: usize, m_max: usize) -> Self {
        Self {
            scheme,
            n,
            m_max,
            accounting: SdmaAccounting::default(),
            full_buffer: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m_max == 0 {
            return invalid(format!("need n >= 1 and m_max >= 1, got n = {}, m_max = {}", self.n, self.m_max));
        }
        Ok(())
    }
}

/// Small-scale fading of the serving link and of the active interferers.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingDraw {
    /// Unit-mean exponential.
    pub g0: f64,
    /// Gamma with shape `M̃_i` and unit scale, aligned with [`TypicalLink::interferers`].
    pub gi: Vec<f64>,
}

/// Everything random about the typical UE's link once the deployment is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalLink {
    pub k0: usize,
    pub m: usize,
    pub subchannel: usize,
    /// Users each AP serves on the typical subchannel; entry 0 is the serving AP and is unused.
    pub marks: Vec<usize>,
    /// `(AP index, M̃)` of the APs transmitting on the typical subchannel.
    pub interferers: Vec<(usize, usize)>,
    pub fading: FadingDraw,
}

/// The typical UE's measurements in one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalOutcome {
    /// `+inf` when no AP interferes.
    pub sir: f64,
    pub k0: usize,
    pub m: usize,
}

/// Random stream owned by one AP: the allocation in its cell, the group it
/// serves on the observed subchannel and its fading all come from it, so
/// realizations sharing `salt` and AP keys share those draws.
fn ap_stream(salt: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(salt);
    rng.set_stream(key);
    rng
}

fn gamma_draw<R: Rng + ?Sized>(shape: usize, rng: &mut R) -> f64 {
    if shape == 1 {
        Exp1.sample(rng)
    } else {
        Gamma::new(shape as f64, 1.0).expect("positive shape").sample(rng)
    }
}

/// Runs the access scheme in every cell and draws the fading seen by the typical UE.
pub fn draw_typical_link(real: &NetworkRealization, access: AccessConfig, salt: u64) -> Result<TypicalLink> {
    access.validate()?;
    let keys = real.ap_keys();
    let counts = real.cell_counts();
    let mut serving = ap_stream(salt, keys[0]);
    let (k0, m, subchannel) = if access.full_buffer {
        (access.m_max, access.m_max, 0)
    } else {
        // the typical UE is user 0 of its cell
        let alloc = allocate(access.scheme, counts[0], access.n, access.m_max, &mut serving);
        let (k0, m) = alloc.user_share(0, access.accounting);
        (k0, m, alloc.assignments[0].subchannel)
    };
    let g0 = Exp1.sample(&mut serving);
    let mut marks = vec![0; counts.len()];
    let mut interferers = Vec::new();
    let mut gi = Vec::new();
    for ap in 1..counts.len() {
        let mut rng = ap_stream(salt, keys[ap]);
        let mark = if access.full_buffer {
            access.m_max
        } else if counts[ap] == 0 {
            0
        } else {
            let alloc = allocate(access.scheme, counts[ap], access.n, access.m_max, &mut rng);
            alloc.served_on(subchannel, access.accounting, &mut rng)
        };
        marks[ap] = mark;
        if mark > 0 {
            interferers.push((ap, mark));
            gi.push(gamma_draw(mark, &mut rng));
        }
    }
    Ok(TypicalLink {
        k0,
        m,
        subchannel,
        marks,
        interferers,
        fading: FadingDraw { g0, gi },
    })
}

impl TypicalLink {
    /// `(g0 / M) r0^(-α) / Σ (g_i / M̃_i) r_i^(-α)` over the active interferers.
    pub fn sir(&self, real: &NetworkRealization, alpha: f64) -> f64 {
        let aps = real.ap_positions();
        let gain = |ap: usize| {
            let p = aps[ap];
            (p[0] * p[0] + p[1] * p[1]).powf(-alpha / 2.0)
        };
        let interference: f64 = self
            .interferers
            .iter()
            .zip(&self.fading.gi)
            .map(|(&(ap, mark), g)| g / mark as f64 * gain(ap))
            .sum();
        if interference == 0.0 {
            return f64::INFINITY;
        }
        self.fading.g0 / self.m as f64 * gain(0) / interference
    }
}

pub fn sample_typical_sir<R: Rng + ?Sized>(
    real: &NetworkRealization,
    access: AccessConfig,
    alpha: f64,
    rng: &mut R,
) -> Result<TypicalOutcome> {
    let link = draw_typical_link(real, access, rng.random())?;
    Ok(TypicalOutcome {
        sir: link.sir(real, alpha),
        k0: link.k0,
        m: link.m,
    })
}

/// `1{SIR >= θ0} log2(1 + SIR) M / (N K0)`; infinite when the SIR is.
pub fn typical_rate(outcome: TypicalOutcome, theta0: f64, n: usize) -> f64 {
    if outcome.sir < theta0 {
        return 0.0;
    }
    if outcome.sir.is_infinite() {
        return f64::INFINITY;
    }
    per_channel_rate(outcome.sir, n) * outcome.m as f64 / outcome.k0 as f64
}

pub fn sample_typical_rate<R: Rng + ?Sized>(
    real: &NetworkRealization,
    access: AccessConfig,
    params: ChannelParams,
    rng: &mut R,
) -> Result<f64> {
    let outcome = sample_typical_sir(real, access, params.alpha, rng)?;
    Ok(typical_rate(outcome, params.theta0, access.n))
}
