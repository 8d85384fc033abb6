//! Distributions of the interferer mark `M̃` and of the typical user's
//! `(K0, M)` induced by a scheme and a per-cell load pmf.
//!
//! Three routes are available. `Exact` uses the round structure of the
//! allocation: with `K = qN + r` entities every subchannel receives `q` of
//! them in the full rounds and a uniformly random `r`-subset of subchannels
//! receives one more, and by exchangeability of the random orderings the
//! entities sitting on a given subchannel form a uniform random subset.
//! `Enumeration` runs the allocation code over every possible sequence of
//! random choices, weighting each path by its probability. `MonteCarlo`
//! samples the allocation code.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use super::{allocate_with, ChoiceSource, RngChoices, SchemeId, SdmaAccounting};
use crate::error::{invalid, Error, Result};
use crate::load::LoadPmf;
use crate::pmf::{Pmf, TypicalJoint};

/// Largest number of choice paths exact enumeration may visit.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfMethod {
    /// Closed-form evaluation from the round structure.
    Exact,
    /// Brute force over every random-choice path of the allocation code.
    Enumeration,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

fn check_dims(n: usize, m_max: usize) -> Result<()> {
    if n == 0 || m_max == 0 {
        return invalid(format!("need n >= 1 and m_max >= 1, got n = {n}, m_max = {m_max}"));
    }
    Ok(())
}

/// Number of entities the round procedure spreads: users for Scheme 1, SDMA groups for Scheme 2.
fn spread_entities(scheme: SchemeId, k: usize, m_max: usize) -> usize {
    match scheme {
        SchemeId::Scheme1 => k,
        SchemeId::Scheme2 => k.div_ceil(m_max),
    }
}

/// Probability that a random AP transmits on a fixed subchannel.
pub fn subchannel_activity_probability(scheme: SchemeId, load: &LoadPmf, n: usize, m_max: usize) -> f64 {
    load.support()
        .map(|(k, p)| p * spread_entities(scheme, k, m_max).min(n) as f64 / n as f64)
        .sum()
}

/// `M̃` given `k` users in the interfering cell.
fn mtilde_given_k(scheme: SchemeId, accounting: SdmaAccounting, k: usize, n: usize, m_max: usize, out: &mut [f64], weight: f64) {
    let entities = spread_entities(scheme, k, m_max);
    let (q, r) = (entities / n, entities % n);
    let extra = r as f64 / n as f64;
    match scheme {
        SchemeId::Scheme1 => {
            out[q.min(m_max)] += weight * (1.0 - extra);
            if r > 0 {
                out[(q + 1).min(m_max)] += weight * extra;
            }
        }
        SchemeId::Scheme2 => {
            let idle = if q == 0 { 1.0 - extra } else { 0.0 };
            out[0] += weight * idle;
            let active = 1.0 - idle;
            if active == 0.0 {
                return;
            }
            let last = k - (entities - 1) * m_max;
            if last < m_max && accounting == SdmaAccounting::Pooled {
                // fewer than m_max users only when the ragged group is alone
                let alone = match q {
                    0 => extra,
                    1 => 1.0 - extra,
                    _ => 0.0,
                };
                let p_last = alone / entities as f64;
                out[last] += weight * p_last;
                out[m_max] += weight * (active - p_last);
            } else if last < m_max {
                // the scheduled group is uniform over the groups on the
                // subchannel, which are a uniform subset of all groups
                let p_last = 1.0 / entities as f64;
                out[last] += weight * active * p_last;
                out[m_max] += weight * active * (1.0 - p_last);
            } else {
                out[m_max] += weight * active;
            }
        }
    }
}

/// `(K0, M)` of the typical user in a cell of `k >= 1` users, itself included.
fn typical_given_k(
    scheme: SchemeId,
    accounting: SdmaAccounting,
    k: usize,
    n: usize,
    m_max: usize,
    weight: f64,
    out: &mut Vec<(usize, usize, f64)>,
) {
    debug_assert!(k >= 1);
    let first = out.len();
    match scheme {
        SchemeId::Scheme1 => {
            let (q, r) = (k / n, k % n);
            // size-biased: the typical user sits on a (q+1)-subchannel w.p. r(q+1)/k
            let p_more = (r * (q + 1)) as f64 / k as f64;
            if p_more > 0.0 {
                out.push((q + 1, (q + 1).min(m_max), weight * p_more));
            }
            if p_more < 1.0 {
                out.push((q, q.min(m_max), weight * (1.0 - p_more)));
            }
        }
        SchemeId::Scheme2 => {
            let groups = k.div_ceil(m_max);
            let last = k - (groups - 1) * m_max;
            let ragged = last < m_max;
            let (q, r) = (groups / n, groups % n);
            let p_more = (r * (q + 1)) as f64 / groups as f64;
            let p_in_last = if ragged { last as f64 / k as f64 } else { 0.0 };
            for (g, pg) in [(q + 1, p_more), (q, 1.0 - p_more)] {
                if pg <= 0.0 || g == 0 {
                    continue;
                }
                if ragged {
                    out.push((last + (g - 1) * m_max, last, weight * pg * p_in_last));
                    let p_with_last = if groups > 1 { (g - 1) as f64 / (groups - 1) as f64 } else { 0.0 };
                    let full = weight * pg * (1.0 - p_in_last);
                    if p_with_last > 0.0 {
                        out.push(((g - 1) * m_max + last, m_max, full * p_with_last));
                    }
                    if p_with_last < 1.0 {
                        out.push((g * m_max, m_max, full * (1.0 - p_with_last)));
                    }
                } else {
                    out.push((g * m_max, m_max, weight * pg));
                }
            }
            if accounting == SdmaAccounting::Pooled {
                for t in &mut out[first..] {
                    t.1 = t.0.min(m_max);
                }
            }
        }
    }
}

/// Walks every sequence of choices a randomized procedure can make.
struct PathEnumerator {
    path: Vec<(usize, usize)>,
    cursor: usize,
}

impl ChoiceSource for PathEnumerator {
    fn pick(&mut self, n: usize) -> usize {
        let choice = if self.cursor < self.path.len() {
            debug_assert_eq!(self.path[self.cursor].1, n);
            self.path[self.cursor].0
        } else {
            self.path.push((0, n));
            0
        };
        self.cursor += 1;
        choice
    }
}

impl PathEnumerator {
    /// Calls `visit(src, weight)` once per path. `visits` counts against [`ENUMERATION_LIMIT`].
    fn for_each(visits: &mut u64, mut visit: impl FnMut(&mut PathEnumerator, &dyn Fn(&PathEnumerator) -> f64)) -> Result<()> {
        let weight = |e: &PathEnumerator| e.path[..e.cursor].iter().map(|&(_, n)| 1.0 / n as f64).product();
        let mut e = PathEnumerator {
            path: Vec::new(),
            cursor: 0,
        };
        loop {
            *visits += 1;
            if *visits > ENUMERATION_LIMIT {
                return Err(Error::EnumerationTooLarge { limit: ENUMERATION_LIMIT });
            }
            e.cursor = 0;
            visit(&mut e, &weight);
            e.path.truncate(e.cursor);
            loop {
                match e.path.pop() {
                    Some((c, n)) if c + 1 < n => {
                        e.path.push((c + 1, n));
                        break;
                    }
                    Some(_) => continue,
                    None => return Ok(()),
                }
            }
        }
    }
}

fn load_sampler(load: &LoadPmf) -> WeightedIndex<f64> {
    WeightedIndex::new(load.probs()).expect("load pmf has positive mass")
}

/// Marginal pmf of the number of users an interfering AP serves concurrently
/// on a fixed subchannel, over `0..=m_max`.
pub fn interferer_mtilde_pmf(
    scheme: SchemeId,
    accounting: SdmaAccounting,
    load: &LoadPmf,
    n: usize,
    m_max: usize,
    method: PmfMethod,
) -> Result<Pmf> {
    check_dims(n, m_max)?;
    let mut acc = vec![0.0; m_max + 1];
    match method {
        PmfMethod::Exact => {
            for (k, p) in load.support() {
                mtilde_given_k(scheme, accounting, k, n, m_max, &mut acc, p);
            }
        }
        PmfMethod::Enumeration => {
            let mut visits = 0;
            for (k, p) in load.support() {
                PathEnumerator::for_each(&mut visits, |src, weight| {
                    let alloc = allocate_with(scheme, k, n, m_max, src);
                    let served = alloc.served_on_with(0, accounting, src);
                    acc[served] += p * weight(src);
                })?;
            }
        }
        PmfMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return invalid("Monte Carlo pmf needs at least one sample");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sampler = load_sampler(load);
            for _ in 0..samples {
                let k = sampler.sample(&mut rng);
                let mut src = RngChoices(&mut rng);
                let alloc = allocate_with(scheme, k, n, m_max, &mut src);
                acc[alloc.served_on_with(0, accounting, &mut src)] += 1.0;
            }
        }
    }
    Ok(Pmf::from_weights(acc))
}

/// Joint pmf of `(K0, M)` for the typical user, whose cell holds `1 + K_extra`
/// users with `K_extra ~ extra_load`.
pub fn typical_joint_pmf(
    scheme: SchemeId,
    accounting: SdmaAccounting,
    extra_load: &LoadPmf,
    n: usize,
    m_max: usize,
    method: PmfMethod,
) -> Result<TypicalJoint> {
    check_dims(n, m_max)?;
    let mut triples = Vec::new();
    match method {
        PmfMethod::Exact => {
            for (extra, p) in extra_load.support() {
                typical_given_k(scheme, accounting, extra + 1, n, m_max, p, &mut triples);
            }
        }
        PmfMethod::Enumeration => {
            let mut visits = 0;
            for (extra, p) in extra_load.support() {
                PathEnumerator::for_each(&mut visits, |src, weight| {
                    let alloc = allocate_with(scheme, extra + 1, n, m_max, src);
                    let (k0, m) = alloc.user_share(0, accounting);
                    triples.push((k0, m, p * weight(src)));
                })?;
            }
        }
        PmfMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return invalid("Monte Carlo pmf needs at least one sample");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sampler = load_sampler(extra_load);
            for _ in 0..samples {
                let k = sampler.sample(&mut rng) + 1;
                let alloc = allocate_with(scheme, k, n, m_max, &mut RngChoices(&mut rng));
                let (k0, m) = alloc.user_share(0, accounting);
                triples.push((k0, m, 1.0));
            }
        }
    }
    TypicalJoint::from_weights(triples)
}

/// Everything the analytic engine needs to know about a scheme at fixed `(N, M_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessProfile {
    pub scheme: SchemeId,
    pub accounting: SdmaAccounting,
    pub n: usize,
    pub m_max: usize,
    /// Interferer mark `M̃` over `0..=m_max`.
    pub mtilde: Pmf,
    pub typical: TypicalJoint,
}

impl AccessProfile {
    /// `interferer_load` is the random-cell pmf (c = 3.5), `extra_load` the
    /// typical cell's additional users (c = 4.5).
    pub fn build(
        scheme: SchemeId,
        accounting: SdmaAccounting,
        interferer_load: &LoadPmf,
        extra_load: &LoadPmf,
        n: usize,
        m_max: usize,
        method: PmfMethod,
    ) -> Result<Self> {
        // distinct streams for the two estimators
        let typical_method = match method {
            PmfMethod::MonteCarlo { samples, seed } => PmfMethod::MonteCarlo {
                samples,
                seed: seed ^ 0x9e37_79b9_7f4a_7c15,
            },
            other => other,
        };
        Ok(Self {
            scheme,
            accounting,
            n,
            m_max,
            mtilde: interferer_mtilde_pmf(scheme, accounting, interferer_load, n, m_max, method)?,
            typical: typical_joint_pmf(scheme, accounting, extra_load, n, m_max, typical_method)?,
        })
    }

    /// Every AP serves `m_max` users on every subchannel, the typical cell included.
    pub fn full_buffer(scheme: SchemeId, n: usize, m_max: usize) -> Result<Self> {
        check_dims(n, m_max)?;
        Ok(Self {
            scheme,
            accounting: SdmaAccounting::default(),
            n,
            m_max,
            mtilde: Pmf::degenerate(m_max, m_max + 1),
            typical: TypicalJoint::degenerate(m_max, m_max)?,
        })
    }

    pub fn activity(&self) -> f64 {
        1.0 - self.mtilde.get(0)
    }
}
