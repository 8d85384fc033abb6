//! Non-cooperative multiple access inside one cell.
//!
//! Scheme 1 spreads users evenly over the `N` subchannels (one user per
//! subchannel per round, random order, random subchannel among those still
//! free in the round) and serves co-channel users by SDMA, falling back to
//! TDMA beyond `M_max`. Scheme 2 first packs users into random SDMA groups of
//! `M_max` (the last one possibly smaller) and spreads the groups with the
//! same round procedure, time-sharing groups that land on one subchannel.
//!
//! Subchannels and groups are 0-based.

mod profile;

pub use profile::{
    interferer_mtilde_pmf, subchannel_activity_probability, typical_joint_pmf, AccessProfile, PmfMethod, DEFAULT_MC_SAMPLES,
    ENUMERATION_LIMIT,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    /// Frequency first: even spread of users over subchannels.
    Scheme1,
    /// Space first: SDMA groups of `M_max`, then spread over subchannels.
    Scheme2,
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeId::Scheme1 => f.write_str("scheme1"),
            SchemeId::Scheme2 => f.write_str("scheme2"),
        }
    }
}

impl std::str::FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "scheme1" | "1" => Ok(SchemeId::Scheme1),
            "scheme2" | "2" => Ok(SchemeId::Scheme2),
            other => Err(format!("unknown scheme '{other}', expected scheme1 or scheme2")),
        }
    }
}

/// Source of uniform choices among `n` alternatives.
///
/// The allocation procedures only ever consume randomness through this trait,
/// which lets exact enumeration walk every outcome of the very same code.
pub(crate) trait ChoiceSource {
    fn pick(&mut self, n: usize) -> usize;
}

pub(crate) struct RngChoices<'a, R: ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> ChoiceSource for RngChoices<'_, R> {
    fn pick(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

/// How users are counted when several Scheme 2 groups time-share a
/// subchannel. Both rules agree for Scheme 1 and whenever a subchannel
/// carries at most one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdmaAccounting {
    /// The users on a subchannel are served `min(count, M_max)` at a time:
    /// `M = min(K0, M_max)` for the typical user and the same rule for an
    /// interferer's mark.
    #[default]
    Pooled,
    /// `M` is the typical user's own group size, and an interferer serves one
    /// of its time-shared groups, picked uniformly.
    PerGroup,
}

/// Placement of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UeSlot {
    pub subchannel: usize,
    /// SDMA group the user belongs to. For Scheme 1 this is the subchannel.
    pub group: usize,
    /// Users served concurrently by SDMA with this one, itself included.
    pub group_size: usize,
}

/// Result of running a scheme in one cell. `assignments[k]` belongs to user `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellAllocation {
    pub scheme: SchemeId,
    pub n: usize,
    pub m_max: usize,
    pub assignments: Vec<UeSlot>,
}

fn shuffle(items: &mut [usize], src: &mut impl ChoiceSource) {
    for i in (1..items.len()).rev() {
        let j = src.pick(i + 1);
        items.swap(i, j);
    }
}

/// Subchannel allocation of `count` entities in rounds of distinct random
/// subchannels. Returns the subchannel of each entity.
fn round_allocation(count: usize, n: usize, src: &mut impl ChoiceSource) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    shuffle(&mut order, src);
    let mut subchannel = vec![0; count];
    for round in order.chunks(n) {
        let mut free: Vec<usize> = (0..n).collect();
        for &entity in round {
            let idx = if free.len() > 1 { src.pick(free.len()) } else { 0 };
            subchannel[entity] = free.remove(idx);
        }
    }
    subchannel
}

pub(crate) fn scheme1_with(k: usize, n: usize, m_max: usize, src: &mut impl ChoiceSource) -> CellAllocation {
    let subchannel = round_allocation(k, n, src);
    let mut counts = vec![0usize; n];
    for &s in &subchannel {
        counts[s] += 1;
    }
    let assignments = subchannel
        .iter()
        .map(|&s| UeSlot {
            subchannel: s,
            group: s,
            group_size: counts[s].min(m_max),
        })
        .collect();
    CellAllocation {
        scheme: SchemeId::Scheme1,
        n,
        m_max,
        assignments,
    }
}

pub(crate) fn scheme2_with(k: usize, n: usize, m_max: usize, src: &mut impl ChoiceSource) -> CellAllocation {
    let mut users: Vec<usize> = (0..k).collect();
    shuffle(&mut users, src);
    let groups: Vec<&[usize]> = users.chunks(m_max).collect();
    let group_subchannel = round_allocation(groups.len(), n, src);
    let mut assignments = vec![
        UeSlot {
            subchannel: 0,
            group: 0,
            group_size: 0
        };
        k
    ];
    for (g, members) in groups.iter().enumerate() {
        for &ue in *members {
            assignments[ue] = UeSlot {
                subchannel: group_subchannel[g],
                group: g,
                group_size: members.len(),
            };
        }
    }
    CellAllocation {
        scheme: SchemeId::Scheme2,
        n,
        m_max,
        assignments,
    }
}

/// Runs Scheme 1 on a cell with `k` users.
pub fn allocate_scheme1<R: Rng + ?Sized>(k: usize, n: usize, m_max: usize, rng: &mut R) -> CellAllocation {
    assert!(n >= 1 && m_max >= 1, "need n >= 1 and m_max >= 1");
    scheme1_with(k, n, m_max, &mut RngChoices(rng))
}

/// Runs Scheme 2 on a cell with `k` users.
pub fn allocate_scheme2<R: Rng + ?Sized>(k: usize, n: usize, m_max: usize, rng: &mut R) -> CellAllocation {
    assert!(n >= 1 && m_max >= 1, "need n >= 1 and m_max >= 1");
    scheme2_with(k, n, m_max, &mut RngChoices(rng))
}

pub(crate) fn allocate_with(scheme: SchemeId, k: usize, n: usize, m_max: usize, src: &mut impl ChoiceSource) -> CellAllocation {
    match scheme {
        SchemeId::Scheme1 => scheme1_with(k, n, m_max, src),
        SchemeId::Scheme2 => scheme2_with(k, n, m_max, src),
    }
}

/// Runs `scheme` on a cell with `k` users.
pub fn allocate<R: Rng + ?Sized>(scheme: SchemeId, k: usize, n: usize, m_max: usize, rng: &mut R) -> CellAllocation {
    match scheme {
        SchemeId::Scheme1 => allocate_scheme1(k, n, m_max, rng),
        SchemeId::Scheme2 => allocate_scheme2(k, n, m_max, rng),
    }
}

impl CellAllocation {
    pub fn num_users(&self) -> usize {
        self.assignments.len()
    }

    pub fn subchannel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for a in &self.assignments {
            counts[a.subchannel] += 1;
        }
        counts
    }

    /// Sizes of the distinct SDMA groups time-sharing `subchannel`, by group index.
    pub fn groups_on(&self, subchannel: usize) -> Vec<usize> {
        let mut groups: Vec<(usize, usize)> = self
            .assignments
            .iter()
            .filter(|a| a.subchannel == subchannel)
            .map(|a| (a.group, a.group_size))
            .collect();
        groups.sort_unstable();
        groups.dedup();
        groups.into_iter().map(|(_, size)| size).collect()
    }

    /// Sorted multiset of SDMA group sizes over the whole cell.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut groups: Vec<(usize, usize)> = self.assignments.iter().map(|a| (a.group, a.group_size)).collect();
        groups.sort_unstable();
        groups.dedup();
        let mut sizes: Vec<usize> = groups.into_iter().map(|(_, s)| s).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// `(K0, M)` seen by user `ue`: users on its subchannel and the number
    /// served concurrently with it.
    pub fn user_share(&self, ue: usize, accounting: SdmaAccounting) -> (usize, usize) {
        let slot = self.assignments[ue];
        let k0 = self.assignments.iter().filter(|a| a.subchannel == slot.subchannel).count();
        match accounting {
            SdmaAccounting::Pooled => (k0, k0.min(self.m_max)),
            SdmaAccounting::PerGroup => (k0, slot.group_size),
        }
    }

    pub(crate) fn served_on_with(&self, subchannel: usize, accounting: SdmaAccounting, src: &mut impl ChoiceSource) -> usize {
        match (self.scheme, accounting) {
            (SchemeId::Scheme1, _) | (_, SdmaAccounting::Pooled) => self
                .assignments
                .iter()
                .filter(|a| a.subchannel == subchannel)
                .count()
                .min(self.m_max),
            (SchemeId::Scheme2, SdmaAccounting::PerGroup) => {
                let groups = self.groups_on(subchannel);
                match groups.len() {
                    0 => 0,
                    1 => groups[0],
                    g => groups[src.pick(g)],
                }
            }
        }
    }

    /// Users this AP serves concurrently on `subchannel` in a random resource
    /// block (the interferer mark).
    pub fn served_on<R: Rng + ?Sized>(&self, subchannel: usize, accounting: SdmaAccounting, rng: &mut R) -> usize {
        self.served_on_with(subchannel, accounting, &mut RngChoices(rng))
    }
}
