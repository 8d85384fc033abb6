//! Per-cell user-count distribution of a Poisson-Voronoi small-cell network.
//!
//! The number `K` of users associated with a random access point follows a
//! negative-binomial-type law with shape `c` (3.5 for a random cell, 4.5 for
//! the users sharing the typical user's cell in addition to it):
//!
//! ```text
//! Pr{K} = 3.5^c Γ(K + c) ρ^K / (Γ(c) K! (3.5 + ρ)^(K + c)),   ρ = λu / λa
//! ```
//!
//! The pmf is evaluated in log-gamma form and truncated at `k_max` with a
//! hard check on the discarded tail.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::pmf::MASS_TOLERANCE;

/// Shape constant of a random (Palm-typical) cell.
pub const RANDOM_CELL_SHAPE: f64 = 3.5;
/// Shape constant for the users sharing the typical user's cell.
pub const TAGGED_CELL_SHAPE: f64 = 4.5;

/// Largest tail mass `cell_load_pmf` accepts before refusing to truncate.
pub const TAIL_LIMIT: f64 = 1e-9;

const AREA_CONSTANT: f64 = 3.5;

/// Parameters of the model that generated a [`LoadPmf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadModel {
    /// λu / λa.
    pub ratio: f64,
    pub c: f64,
}

/// Truncated pmf of the number of users in a cell, indexed by `K = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadPmf {
    model: Option<LoadModel>,
    probs: Vec<f64>,
}

fn ln_term(k: usize, ratio: f64, c: f64) -> f64 {
    let kf = k as f64;
    c * AREA_CONSTANT.ln() + ln_gamma(kf + c) + kf * ratio.ln() - ln_gamma(c) - ln_gamma(kf + 1.0) - (kf + c) * (AREA_CONSTANT + ratio).ln()
}

/// Mass beyond `k_max`, bounded from above by summing terms until a geometric
/// bound on the remainder is negligible.
fn tail_mass(ratio: f64, c: f64, k_max: usize) -> f64 {
    let p = ratio / (AREA_CONSTANT + ratio);
    let mut k = k_max + 1;
    let mut term = ln_term(k, ratio, c).exp();
    let mut tail = 0.0;
    loop {
        tail += term;
        let step = (k as f64 + c) / (k as f64 + 1.0) * p;
        // successive ratios decrease towards p for c >= 1 and increase towards p otherwise
        let bound_ratio = step.max(p);
        if bound_ratio < 1.0 {
            let remainder = term * bound_ratio / (1.0 - bound_ratio);
            if remainder < TAIL_LIMIT * 1e-6 || term == 0.0 {
                return tail + remainder;
            }
        }
        term *= step;
        k += 1;
    }
}

fn validate(ratio: f64, c: f64, k_max: usize) -> Result<()> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return invalid(format!("load ratio must be positive, got {ratio}"));
    }
    if !(c.is_finite() && c > 0.0) {
        return invalid(format!("shape constant c must be positive, got {c}"));
    }
    if k_max < 1 {
        return invalid("k_max must be at least 1");
    }
    Ok(())
}

/// Per-cell load pmf for user/AP density ratio `ratio` and shape `c`,
/// renormalized over `0..=k_max`.
pub fn cell_load_pmf(ratio: f64, c: f64, k_max: usize) -> Result<LoadPmf> {
    validate(ratio, c, k_max)?;
    let tail = tail_mass(ratio, c, k_max);
    if tail >= TAIL_LIMIT {
        return Err(Error::TailMassTooLarge {
            k_max,
            tail,
            limit: TAIL_LIMIT,
        });
    }
    let mut probs: Vec<f64> = (0..=k_max).map(|k| ln_term(k, ratio, c).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(LoadPmf {
        model: Some(LoadModel { ratio, c }),
        probs,
    })
}

/// Pmf of the users sharing the typical user's cell, not counting the typical
/// user itself (shape 4.5).
pub fn tagged_cell_extra_load_pmf(ratio: f64, k_max: usize) -> Result<LoadPmf> {
    cell_load_pmf(ratio, TAGGED_CELL_SHAPE, k_max)
}

/// Smallest `k_max` whose discarded tail is below `1e-12`, never less than 40.
pub fn suggested_k_max(ratio: f64, c: f64) -> Result<usize> {
    validate(ratio, c, 1)?;
    let mut k_max = 40usize;
    while tail_mass(ratio, c, k_max) >= 1e-12 {
        k_max += k_max / 4;
    }
    Ok(k_max)
}

/// `Σ K^order Pr{K}` for `order` 1 or 2.
pub fn pmf_moment(pmf: &LoadPmf, order: u32) -> f64 {
    debug_assert!(order == 1 || order == 2);
    pmf.probs.iter().enumerate().map(|(k, p)| (k as f64).powi(order as i32) * p).sum()
}

impl LoadPmf {
    /// Arbitrary load distribution, e.g. a point mass in tests or an empirical histogram.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("load pmf needs at least one entry");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return invalid("load pmf entries must be finite and non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return invalid(format!("load pmf sums to {total}, expected 1"));
        }
        Ok(Self { model: None, probs })
    }

    pub fn degenerate(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self { model: None, probs }
    }

    pub fn model(&self) -> Option<LoadModel> {
        self.model
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        pmf_moment(self, 1)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate().filter(|(_, p)| *p > 0.0)
    }

    /// Running sums `Pr{K <= k}`.
    pub fn cumulative(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_cell_probability_has_closed_form() {
        let pmf = cell_load_pmf(10.0, 3.5, 200).unwrap();
        // at K = 0 the gamma factors cancel
        let expected = (3.5f64 / 13.5).powf(3.5);
        assert!((pmf.prob(0) - expected).abs() < 1e-14);
        assert!((pmf.prob(0) - 8.87e-3).abs() < 1e-5);
    }

    #[test]
    fn mean_equals_ratio_for_random_cell() {
        for (ratio, k_max) in [(0.5, 100), (2.0, 200), (10.0, 200)] {
            let pmf = cell_load_pmf(ratio, 3.5, k_max).unwrap();
            assert!(((pmf.mean() - ratio) / ratio).abs() < 1e-6, "ratio {ratio}");
            assert!((pmf.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(pmf.prob(0) > 0.0);
        }
    }

    #[test]
    fn forty_users_is_practically_never_exceeded() {
        let pmf = cell_load_pmf(10.0, 3.5, 200).unwrap();
        let above: f64 = pmf.probs()[41..].iter().sum();
        assert!(above < 1e-3, "{above}");
    }

    #[test]
    fn large_ratio_does_not_overflow() {
        let pmf = cell_load_pmf(50.0, 3.5, 2000).unwrap();
        assert!(pmf.probs().iter().all(|p| p.is_finite()));
        assert!(((pmf.mean() - 50.0) / 50.0).abs() < 1e-6);
    }

    #[test]
    fn short_truncation_is_refused() {
        match cell_load_pmf(10.0, 3.5, 40) {
            Err(Error::TailMassTooLarge { k_max: 40, tail, .. }) => assert!(tail > 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_inputs_are_rejected() {
        assert!(matches!(cell_load_pmf(0.0, 3.5, 10), Err(Error::InvalidParameter(_))));
        assert!(matches!(cell_load_pmf(1.0, -1.0, 10), Err(Error::InvalidParameter(_))));
        assert!(matches!(cell_load_pmf(1.0, 3.5, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn tagged_cell_carries_more_users() {
        let random = cell_load_pmf(10.0, 3.5, 200).unwrap();
        let tagged = tagged_cell_extra_load_pmf(10.0, 200).unwrap();
        // direct summation; the c = 4.5 mean is 4.5 / 3.5 * ratio
        assert!(tagged.mean() > random.mean());
        assert!((tagged.mean() - 4.5 / 3.5 * 10.0).abs() < 1e-6);
        for (a, b) in tagged.cumulative().iter().zip(random.cumulative()) {
            assert!(*a <= b + 1e-15);
        }
    }

    #[test]
    fn tagged_cell_is_empty_in_the_sparse_limit() {
        let pmf = tagged_cell_extra_load_pmf(1e-9, 50).unwrap();
        assert!((pmf.prob(0) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn moments() {
        let uniform = LoadPmf::from_probs(vec![0.5, 0.5]).unwrap();
        assert_eq!(pmf_moment(&uniform, 1), 0.5);
        assert_eq!(pmf_moment(&LoadPmf::degenerate(3), 2), 9.0);
        let pmf = cell_load_pmf(10.0, 3.5, 200).unwrap();
        assert!((pmf_moment(&pmf, 1) - 10.0).abs() < 1e-5);
    }

    #[test]
    fn suggested_truncation_is_accepted() {
        for ratio in [0.5, 10.0, 50.0] {
            let k = suggested_k_max(ratio, 4.5).unwrap();
            assert!(cell_load_pmf(ratio, 4.5, k).is_ok());
            assert!(cell_load_pmf(ratio, 3.5, k).is_ok());
        }
    }
}
