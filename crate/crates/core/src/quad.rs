//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! Improper integrals are mapped to finite ones by the callers, who know the
//! decay of their integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`]: stop once `error <= max(abs_tol, rel_tol * |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Interval {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15(f: &mut impl FnMut(f64) -> f64, lower: f64, upper: f64) -> Interval {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    // QUADPACK error scaling
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Interval {
        lower,
        upper,
        value,
        error,
    }
}

/// Integrates `f` over `[lower, upper]` by repeatedly bisecting the interval
/// with the largest error estimate.
pub fn integrate(mut f: impl FnMut(f64) -> f64, lower: f64, upper: f64, tol: Tolerance) -> Result<Estimate> {
    if lower == upper {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod15(&mut f, lower, upper);
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::from([first]);
    while error > tol.abs_tol.max(tol.rel_tol * value.abs()) {
        if heap.len() >= tol.max_intervals || !error.is_finite() {
            return Err(Error::QuadratureNotConverged {
                lower,
                upper,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lower + worst.upper);
        if mid <= worst.lower || mid >= worst.upper {
            // interval exhausted at machine precision; keep its contribution
            heap.push(worst);
            return Err(Error::QuadratureNotConverged {
                lower,
                upper,
                estimate: value,
                error,
            });
        }
        let left = kronrod15(&mut f, worst.lower, mid);
        let right = kronrod15(&mut f, mid, worst.upper);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of incremental updates
    let value = heap.iter().map(|i| i.value).sum();
    let error = heap.iter().map(|i| i.error).sum();
    Ok(Estimate { value, error, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((est.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn arctangent() {
        let est = integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((est.value - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let tol = Tolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 5000,
        };
        let est = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, tol).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn hopeless_integrand_reports_failure() {
        let tol = Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 20,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
