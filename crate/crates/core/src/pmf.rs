//! Small discrete distributions shared by the access and analytic modules.

use crate::error::{invalid, Result};

/// Tolerance on the total mass of any pmf handed across module boundaries.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Probability mass function on the integers `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("pmf needs at least one entry");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return invalid("pmf entries must be finite and non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return invalid(format!("pmf sums to {total}, expected 1"));
        }
        Ok(Self { probs })
    }

    /// Point mass at `k`, padded with zeros up to `len` entries.
    pub fn degenerate(k: usize, len: usize) -> Self {
        let mut probs = vec![0.0; len.max(k + 1)];
        probs[k] = 1.0;
        Self { probs }
    }

    /// Normalizes raw non-negative weights. Used by estimators that count.
    pub(crate) fn from_weights(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0);
        Self {
            probs: weights.into_iter().map(|w| w / total).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// `(k, p)` pairs with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate().filter(|(_, p)| *p > 0.0)
    }
}

/// One atom of the joint distribution of `(K0, M)` seen by the typical user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAtom {
    /// Users on the typical user's subchannel, the typical one included.
    pub k0: usize,
    /// Users served concurrently with the typical one by SDMA, itself included.
    pub m: usize,
    pub prob: f64,
}

/// Joint pmf of `(K0, M)`, stored as sorted atoms with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalJoint {
    atoms: Vec<JointAtom>,
}

impl TypicalJoint {
    /// Builds from unsorted, possibly repeated `(k0, m, weight)` triples. Weights are normalized.
    pub fn from_weights(triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut map = std::collections::BTreeMap::<(usize, usize), f64>::new();
        for (k0, m, w) in triples {
            if !w.is_finite() || w < 0.0 {
                return invalid("joint pmf weights must be finite and non-negative");
            }
            if k0 == 0 || m == 0 || m > k0 {
                return invalid(format!("joint pmf atom (k0 = {k0}, m = {m}) violates 1 <= m <= k0"));
            }
            if w > 0.0 {
                *map.entry((k0, m)).or_default() += w;
            }
        }
        let total: f64 = map.values().sum();
        if total <= 0.0 {
            return invalid("joint pmf has no mass");
        }
        let atoms = map.into_iter().map(|((k0, m), w)| JointAtom { k0, m, prob: w / total }).collect();
        Ok(Self { atoms })
    }

    pub fn degenerate(k0: usize, m: usize) -> Result<Self> {
        Self::from_weights([(k0, m, 1.0)])
    }

    pub fn atoms(&self) -> &[JointAtom] {
        &self.atoms
    }

    pub fn prob(&self, k0: usize, m: usize) -> f64 {
        self.atoms.iter().find(|a| a.k0 == k0 && a.m == m).map_or(0.0, |a| a.prob)
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Marginal pmf of `M`, indexed directly by `M` (entry 0 is always zero).
    pub fn m_marginal(&self) -> Pmf {
        let m_max = self.atoms.iter().map(|a| a.m).max().unwrap_or(1);
        let mut probs = vec![0.0; m_max + 1];
        for a in &self.atoms {
            probs[a.m] += a.prob;
        }
        Pmf { probs }
    }

    /// Marginal pmf of `K0`, indexed directly by `K0`.
    pub fn k0_marginal(&self) -> Pmf {
        let k_max = self.atoms.iter().map(|a| a.k0).max().unwrap_or(1);
        let mut probs = vec![0.0; k_max + 1];
        for a in &self.atoms {
            probs[a.k0] += a.prob;
        }
        Pmf { probs }
    }
}
