//! Closed-form-plus-quadrature evaluation of the SIR and user-rate cdfs.
//!
//! With interferer marks `M̃` drawn i.i.d. from the scheme's marginal pmf,
//!
//! ```text
//! F_SIR(θ | M) = 1 - 1 / (1 + ρ(θ, M))
//! ρ(θ, M)      = Σ_{M̃ ≥ 1} Pr{M̃} θ^(2/α) ∫_{θ^(-2/α)}^∞ φ(u^(-α/2), M, M̃) du
//! φ(x, y, z)   = 1 - (1 + x y / z)^(-z)
//! ```
//!
//! and the rate `R = 1{SIR ≥ θ0} log2(1 + SIR) M / (N K0)` has cdf
//! `F_SIR(θ0 | M)` below the breakpoint `log2(1 + θ0) M / (N K0)` and
//! `F_SIR(2^(r N K0 / M) - 1 | M)` above it, mixed over `(K0, M)`.
//!
//! All SIR thresholds are linear; dB conversion happens at the edges.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::access::AccessProfile;
use crate::curve::CdfCurve;
use crate::error::{invalid, Result};
use crate::pmf::{Pmf, TypicalJoint};
use crate::quad::{integrate, Tolerance};

/// Pointwise values carry quadrature error; dips below this are rounding.
const CURVE_SLACK: f64 = 1e-9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Path-loss exponent and SIR threshold (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub alpha: f64,
    pub theta0: f64,
}

impl ChannelParams {
    pub fn new(alpha: f64, theta0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(theta0.is_finite() && theta0 > 0.0) {
            return invalid(format!("SIR threshold must be positive, got {theta0}"));
        }
        Ok(Self { alpha, theta0 })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 2.0) {
        return invalid(format!("path-loss exponent must exceed 2, got {alpha}"));
    }
    Ok(())
}

/// `1 - (1 + x y / z)^(-z)`, accurate for small `x`.
pub fn phi(x: f64, y: f64, z: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    -(-z * (x * y / z).ln_1p()).exp_m1()
}

/// `θ^(2/α) ∫_{θ^(-2/α)}^∞ φ(u^(-α/2), m, m̃) du` for one interferer mark.
///
/// After `t = θ^(2/α) u` this is `∫_1^∞ φ(θ t^(-α/2), m, m̃) dt`. The
/// integrand stays near 1 up to `t ≈ T = (θ m / m̃)^(2/α)` and decays like
/// `t^(-α/2)` beyond, so the range is rescaled by `T` and the tail mapped to
/// `(0, 1]` with `s = w^(-2/(α-2))`, which makes the mapped integrand bounded.
fn rho_term(theta: f64, m: usize, mtilde: usize, alpha: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let (mf, mt) = (m as f64, mtilde as f64);
    let ln_knee = theta.ln() + (mf / mt).ln();
    let (scale, c) = if ln_knee > 0.0 {
        ((2.0 / alpha * ln_knee).exp(), mt / mf)
    } else {
        (1.0, theta)
    };
    let tol = Tolerance::default();
    let head = if scale > 1.0 {
        integrate(|s| phi(c * s.powf(-alpha / 2.0), mf, mt), 1.0 / scale, 1.0, tol)?.value
    } else {
        0.0
    };
    let gamma = 2.0 / (alpha - 2.0);
    let power = alpha / (alpha - 2.0);
    let tail = integrate(
        |w| {
            let y = w.powf(power);
            if y < 1e-280 {
                c * mf
            } else {
                phi(c * y, mf, mt) / y
            }
        },
        0.0,
        1.0,
        tol,
    )?
    .value;
    Ok(scale * (head + gamma * tail))
}

/// `ρ(θ, m)` averaged over the interferer mark pmf. The `M̃ = 0` mass contributes nothing.
pub fn rho(theta: f64, m: usize, mtilde_pmf: &Pmf, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(theta >= 0.0) {
        return invalid(format!("SIR threshold must be non-negative, got {theta}"));
    }
    if m == 0 {
        return invalid("the typical user's SDMA group has at least one member");
    }
    let mut total = 0.0;
    for (mt, p) in mtilde_pmf.support().filter(|(mt, _)| *mt >= 1) {
        total += p * rho_term(theta, m, mt, alpha)?;
    }
    Ok(total)
}

fn cdf_from_rho(rho: f64) -> f64 {
    if rho.is_infinite() {
        1.0
    } else {
        rho / (1.0 + rho)
    }
}

/// SIR cdf given `m` users co-served with the typical one by SDMA (itself included).
pub fn sir_cdf_conditional(theta: f64, m: usize, mtilde_pmf: &Pmf, alpha: f64) -> Result<f64> {
    Ok(cdf_from_rho(rho(theta, m, mtilde_pmf, alpha)?))
}

/// SIR cdf mixed over the pmf of `M` (indexed by `M`, entry 0 ignored).
pub fn sir_cdf(theta: f64, m_pmf: &Pmf, mtilde_pmf: &Pmf, alpha: f64) -> Result<f64> {
    let mut total = 0.0;
    for (m, p) in m_pmf.support().filter(|(m, _)| *m >= 1) {
        total += p * sir_cdf_conditional(theta, m, mtilde_pmf, alpha)?;
    }
    Ok(total)
}

/// Laplace transform `E[exp(-s I) | r0]` of the interference seen at distance
/// `r0` from the serving AP, with interferers of density `lambda_a` outside
/// the disk of radius `r0`:
///
/// ```text
/// exp(-2π λa Σ Pr{M̃} ∫_{r0}^∞ φ(u^(-α), s, M̃) u du)
/// ```
pub fn interference_laplace(s: f64, r0: f64, lambda_a: f64, mtilde_pmf: &Pmf, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(s >= 0.0) || !(r0 > 0.0) || !(lambda_a > 0.0) {
        return invalid("laplace transform needs s >= 0, r0 > 0 and lambda_a > 0");
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let tol = Tolerance::default();
    let mut exponent = 0.0;
    for (mt, p) in mtilde_pmf.support().filter(|(mt, _)| *mt >= 1) {
        if s.is_infinite() {
            return Ok(0.0);
        }
        let mt = mt as f64;
        // φ(u^(-α), s, m̃) ≈ 1 below the knee u = (s / m̃)^(1/α)
        let knee = r0.max((s / mt).powf(1.0 / alpha));
        let head = if knee > r0 {
            integrate(|u| phi(u.powf(-alpha), s, mt) * u, r0, knee, tol)?.value
        } else {
            0.0
        };
        let beta = 1.0 / (alpha - 2.0);
        let power = alpha / (alpha - 2.0);
        let x_scale = knee.powf(-alpha);
        let tail = integrate(
            |w| {
                let y = w.powf(power);
                if y < 1e-280 {
                    x_scale * s
                } else {
                    phi(x_scale * y, s, mt) / y
                }
            },
            0.0,
            1.0,
            tol,
        )?
        .value;
        exponent += p * (head + beta * knee * knee * tail);
    }
    Ok((-2.0 * PI * lambda_a * exponent).exp())
}

/// `log2(1 + SIR) / N`, the rate per resource block.
pub fn per_channel_rate(sir: f64, n: usize) -> f64 {
    sir.ln_1p() / LN_2 / n as f64
}

/// SIR needed to reach rate `r` with `k0` users on the subchannel and `m` of them in SDMA: `2^(r N K0 / M) - 1`.
pub fn rate_threshold(r: f64, k0: usize, m: usize, n: usize) -> f64 {
    (r * (n * k0) as f64 / m as f64 * LN_2).exp_m1()
}

/// Rate below which the cdf equals the SIR outage probability: `log2(1 + θ0) M / (N K0)`.
pub fn rate_breakpoint(theta0: f64, k0: usize, m: usize, n: usize) -> f64 {
    theta0.ln_1p() / LN_2 * m as f64 / (n * k0) as f64
}

fn check_share(k0: usize, m: usize, n: usize) -> Result<()> {
    if n == 0 || k0 == 0 || m == 0 || m > k0 {
        return invalid(format!("need n >= 1 and 1 <= m <= k0, got n = {n}, k0 = {k0}, m = {m}"));
    }
    Ok(())
}

/// Rate cdf conditioned on `(K0, M)`.
pub fn rate_cdf_conditional(r: f64, k0: usize, m: usize, n: usize, params: ChannelParams, mtilde_pmf: &Pmf) -> Result<f64> {
    check_share(k0, m, n)?;
    if !(r >= 0.0) {
        return invalid(format!("rate must be non-negative, got {r}"));
    }
    let theta = if r <= rate_breakpoint(params.theta0, k0, m, n) {
        params.theta0
    } else {
        rate_threshold(r, k0, m, n)
    };
    sir_cdf_conditional(theta, m, mtilde_pmf, params.alpha)
}

/// Rate cdf mixed over the typical user's joint `(K0, M)` pmf.
pub fn rate_cdf(r: f64, typical: &TypicalJoint, n: usize, params: ChannelParams, mtilde_pmf: &Pmf) -> Result<f64> {
    let mut total = 0.0;
    for atom in typical.atoms() {
        total += atom.prob * rate_cdf_conditional(r, atom.k0, atom.m, n, params, mtilde_pmf)?;
    }
    Ok(total.min(1.0))
}

/// Analytic SIR and rate distributions of one system configuration.
///
/// Caches the SIR outage probability per SDMA size, which every rate below
/// the breakpoint reuses.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    params: ChannelParams,
    profile: AccessProfile,
    m_pmf: Pmf,
    outage_by_m: Vec<f64>,
}

impl AnalyticModel {
    pub fn new(params: ChannelParams, profile: AccessProfile) -> Result<Self> {
        let m_pmf = profile.typical.m_marginal();
        let mut outage_by_m = vec![0.0; m_pmf.len()];
        for (m, _) in m_pmf.support() {
            outage_by_m[m] = sir_cdf_conditional(params.theta0, m, &profile.mtilde, params.alpha)?;
        }
        Ok(Self {
            params,
            profile,
            m_pmf,
            outage_by_m,
        })
    }

    pub fn params(&self) -> ChannelParams {
        self.params
    }

    pub fn profile(&self) -> &AccessProfile {
        &self.profile
    }

    /// Pmf of the typical user's SDMA group size `M`.
    pub fn m_pmf(&self) -> &Pmf {
        &self.m_pmf
    }

    pub fn sir_cdf(&self, theta: f64) -> Result<f64> {
        sir_cdf(theta, &self.m_pmf, &self.profile.mtilde, self.params.alpha)
    }

    /// Probability of an SIR outage at the threshold, `Σ Pr{M} F_SIR(θ0 | M)`.
    pub fn sir_outage(&self) -> f64 {
        self.m_pmf.support().map(|(m, p)| p * self.outage_by_m[m]).sum()
    }

    pub fn rate_cdf(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return invalid(format!("rate must be non-negative, got {r}"));
        }
        let n = self.profile.n;
        let mut total = 0.0;
        for atom in self.profile.typical.atoms() {
            let cdf = if r <= rate_breakpoint(self.params.theta0, atom.k0, atom.m, n) {
                self.outage_by_m[atom.m]
            } else {
                sir_cdf_conditional(
                    rate_threshold(r, atom.k0, atom.m, n),
                    atom.m,
                    &self.profile.mtilde,
                    self.params.alpha,
                )?
            };
            total += atom.prob * cdf;
        }
        Ok(total.min(1.0))
    }

    /// SIR cdf over linear thresholds; on failure reports the offending threshold.
    pub fn sir_curve(&self, thetas: &[f64]) -> std::result::Result<CdfCurve, (f64, crate::Error)> {
        let values = thetas
            .par_iter()
            .map(|&t| self.sir_cdf(t).map_err(|e| (t, e)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CdfCurve::from_evaluations(thetas.to_vec(), values, CURVE_SLACK)
    }

    pub fn rate_curve(&self, rates: &[f64]) -> std::result::Result<CdfCurve, (f64, crate::Error)> {
        let values = rates
            .par_iter()
            .map(|&r| self.rate_cdf(r).map_err(|e| (r, e)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CdfCurve::from_evaluations(rates.to_vec(), values, CURVE_SLACK)
    }
}
