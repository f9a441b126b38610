//! The three constants behind the limit law: finite-p quadratic forms
//! `kappa_{1,p}, kappa_{2,p}, kappa_{3,p}`, their `p -> infinity` limits, and
//! the series family used to assemble the limits.
//!
//! Definitions, with `w_{kl} = rho^{|k-l|}`:
//! - `kappa_{1,p} = sum_{k,l} beta_k beta_l w_{kl}`
//! - `kappa_{2,p} = sum_k (sum_l beta_l w_{kl})^2`
//! - `kappa_{3,p} = sum_{k,l,j,j'} beta_j beta_{j'} w_{kj} w_{lj'} w_{kl}`
//!
//! All three are evaluated in O(p) via geometric prefix recursions; the
//! literal nested sums live in [`crate::oracle`] as cross-checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{beta_tail_sq, BetaSpec, ModelConfig};
use crate::specfun::dilog;

const PI2_OVER_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Default series length for truncated evaluations.
pub const DEFAULT_TRUNCATION: usize = 1_000_000;

/// Which flavor a [`KappaSet`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMode {
    FiniteP(usize),
    Limit,
}

/// The constant triple, finite-p or limiting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KappaSet {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub mode: KappaMode,
}

/// The correlation profile of the response against each predictor.
///
/// `t_k = sum_{l <= p} beta_l rho^{|k-l|}` is the covariance of `y` with
/// `x_k`; `sigma_z2 = kappa_{1,p} + sigma_eps^2` is the variance of `y`.
#[derive(Debug, Clone)]
pub struct ThetaProfile {
    /// Unnormalized profile `t_k`, k = 1..p.
    pub t: Vec<f64>,
    /// Response variance `kappa_{1,p} + sigma_eps^2`.
    pub sigma_z2: f64,
}

impl ThetaProfile {
    /// Correlations `t_k / sigma_z`, each in (-1, 1).
    pub fn normalized(&self) -> Vec<f64> {
        let sd = self.sigma_z2.sqrt();
        self.t.iter().map(|tk| tk / sd).collect()
    }
}

// out_k = sum_l v_l rho^{|k-l|} via one forward and one backward pass.
fn kms_smooth(rho: f64, v: &[f64]) -> Vec<f64> {
    let p = v.len();
    let mut out = vec![0.0; p];
    let mut forward = 0.0;
    for k in 0..p {
        forward = rho * forward + v[k];
        out[k] = forward;
    }
    let mut backward = 0.0;
    for k in (0..p.saturating_sub(1)).rev() {
        backward = rho * (backward + v[k + 1]);
        out[k] += backward;
    }
    out
}

/// Profile `t_k` plus the response variance, in O(p).
pub fn theta_profile(config: &ModelConfig) -> Result<ThetaProfile> {
    config.validate()?;
    let betas = config.beta.coeffs(config.p);
    let t = kms_smooth(config.rho, &betas);
    let kappa1_p: f64 = betas.iter().zip(&t).map(|(b, tk)| b * tk).sum();
    Ok(ThetaProfile {
        t,
        sigma_z2: kappa1_p + config.sigma_eps2,
    })
}

/// Finite-p constants in O(p) via prefix recursions.
pub fn kappa_finite(config: &ModelConfig) -> Result<KappaSet> {
    config.validate()?;
    let betas = config.beta.coeffs(config.p);
    let t = kms_smooth(config.rho, &betas);
    let kappa1 = betas.iter().zip(&t).map(|(b, tk)| b * tk).sum();
    let kappa2 = t.iter().map(|tk| tk * tk).sum();
    let u = kms_smooth(config.rho, &t);
    let kappa3 = t.iter().zip(&u).map(|(tk, uk)| tk * uk).sum();
    Ok(KappaSet {
        kappa1,
        kappa2,
        kappa3,
        mode: KappaMode::FiniteP(config.p),
    })
}

/// The series family used to assemble the limit constants:
/// `beta(x) = sum_j beta_j^2 x^j`, the cross-term sums
/// `b1(rho) = sum_{j<j'} beta_j beta_{j'} rho^{j'-j}`,
/// `b2(rho) = sum_{j'<j} beta_j beta_{j'} rho^{j+j'}`,
/// and their first/second logarithmic derivatives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesFunctions {
    /// `beta(1)`
    pub beta_1: f64,
    /// `beta(rho)`
    pub beta_rho: f64,
    /// `beta(rho^2)`
    pub beta_rho2: f64,
    /// `beta^(1)(rho^2) = sum_j j beta_j^2 rho^{2j}`
    pub beta_d1_rho2: f64,
    /// `b1(rho)`
    pub b1: f64,
    /// `b2(rho)`
    pub b2: f64,
    /// `b1^(1)(rho) = rho b1'(rho)`
    pub b1_d1: f64,
    /// `b2^(1)(rho) = rho b2'(rho)`
    pub b2_d1: f64,
    /// `b^(2)(rho) = rho^2 b1''(rho) + b1^(1)(rho)`
    pub b_d2: f64,
}

/// Evaluates the series family.
///
/// The hyperbolic sequence `beta_j = 1/j` uses exact closed forms in the
/// dilogarithm and `log(1-rho)`; explicit specs use finite prefix-recursion
/// sums. `truncation` caps the number of coefficients consumed; an explicit
/// spec longer than the cap reports a truncation error when the discarded
/// tail could move any value by more than 1e-10.
pub fn series_functions(beta: &BetaSpec, rho: f64, truncation: usize) -> Result<SeriesFunctions> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::Config(format!(
            "series functions require |rho| < 1, got {rho}"
        )));
    }
    if truncation < 1 {
        return Err(Error::Config("truncation must be at least 1".into()));
    }
    beta.validate()?;
    match beta {
        BetaSpec::Hyperbolic => {
            let log1m = (1.0 - rho).ln();
            let li2_rho = dilog(rho)?;
            let li2_rho2 = dilog(rho * rho)?;
            Ok(SeriesFunctions {
                beta_1: PI2_OVER_6,
                beta_rho: li2_rho,
                beta_rho2: li2_rho2,
                beta_d1_rho2: -(1.0 - rho * rho).ln(),
                b1: 0.5 * log1m * log1m + li2_rho,
                b2: 0.5 * (log1m * log1m - li2_rho2),
                b1_d1: -log1m / (1.0 - rho),
                b2_d1: (1.0 - rho * rho).ln() - rho * log1m / (1.0 - rho),
                b_d2: (rho - rho * log1m) / ((1.0 - rho) * (1.0 - rho)),
            })
        }
        BetaSpec::Explicit(values) => {
            let used = values.len().min(truncation);
            if used < values.len() {
                let tail = beta_tail_sq(beta, used);
                let head: f64 = values.iter().take(used).map(|v| v * v).sum();
                // conservative geometric bound on everything discarded,
                // covering the squared-index derivative weights
                let weight = (1.0 + rho.abs()) / (1.0 - rho.abs()).powi(3);
                let estimate = (2.0 * (tail * head).sqrt() + tail) * weight;
                if estimate > 1e-10 {
                    return Err(Error::Truncation(format!(
                        "discarding {} trailing coefficients may move the series \
                         values by up to {estimate:.3e}",
                        values.len() - used
                    )));
                }
            }
            Ok(explicit_series(&values[..used], rho))
        }
    }
}

// Finite sums for an explicit coefficient vector, all O(len).
fn explicit_series(values: &[f64], rho: f64) -> SeriesFunctions {
    let rho2 = rho * rho;
    let mut beta_1 = 0.0;
    let mut beta_rho = 0.0;
    let mut beta_rho2 = 0.0;
    let mut beta_d1_rho2 = 0.0;
    // prefix states over j' (1-based index i):
    //   s = sum_{j<j'} v_j rho^{j'-j}
    //   s1 = sum_{j<j'} v_j (j'-j) rho^{j'-j}
    //   s2 = sum_{j<j'} v_j (j'-j)^2 rho^{j'-j}
    //   q0 = sum_{j<j'} v_j rho^j,  q1 = sum_{j<j'} j v_j rho^j
    let mut b1 = 0.0;
    let mut b1_d1 = 0.0;
    let mut b_d2 = 0.0;
    let mut b2 = 0.0;
    let mut b2_d1 = 0.0;
    let (mut s, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let (mut q0, mut q1) = (0.0, 0.0);
    let mut pow_rho = 1.0;
    let mut pow_rho2 = 1.0;
    let mut prev: Option<(f64, f64, f64)> = None; // (v_j, j, v_j rho^j)
    for (idx, &v) in values.iter().enumerate() {
        let j = (idx + 1) as f64;
        pow_rho *= rho;
        pow_rho2 *= rho2;
        beta_1 += v * v;
        beta_rho += v * v * pow_rho;
        beta_rho2 += v * v * pow_rho2;
        beta_d1_rho2 += j * v * v * pow_rho2;
        if let Some((pv, pj, pvr)) = prev {
            s2 = rho * (s2 + 2.0 * s1 + s + pv);
            s1 = rho * (s1 + s + pv);
            s = rho * (s + pv);
            q0 += pvr;
            q1 += pj * pvr;
        }
        b1 += v * s;
        b1_d1 += v * s1;
        b_d2 += v * s2;
        b2 += v * pow_rho * q0;
        b2_d1 += v * pow_rho * (j * q0 + q1);
        prev = Some((v, j, v * pow_rho));
    }
    SeriesFunctions {
        beta_1,
        beta_rho,
        beta_rho2,
        beta_d1_rho2,
        b1,
        b2,
        b1_d1,
        b2_d1,
        b_d2,
    }
}

/// Limit constants assembled from the series family:
/// - `kappa1 = beta(1) + 2 b1`
/// - `kappa2 = (beta(1)(1+rho^2) - beta(rho^2)) / (1-rho^2)
///    + 2 (b1_d1 + b1 (1+rho^2)/(1-rho^2) - b2/(1-rho^2))`
/// - `kappa3 = ((1+4rho^2+rho^4)(beta(1)+2 b1) - (1+3rho^2)(beta(rho^2)+2 b2))
///    / (1-rho^2)^2 + (3 b1_d1 (1+rho^2) - 2(b2_d1 + beta^(1)(rho^2)))
///    / (1-rho^2) + b^(2)`
///
/// For the hyperbolic sequence the fully simplified closed forms (see
/// [`hyperbolic_kappa_limits`]) are evaluated as well and the two routes are
/// asserted to agree.
pub fn kappa_limit(beta: &BetaSpec, rho: f64) -> Result<KappaSet> {
    let general = kappa_limit_general(beta, rho, DEFAULT_TRUNCATION)?;
    if matches!(beta, BetaSpec::Hyperbolic) {
        let closed = hyperbolic_kappa_limits(rho)?;
        for (g, c, name) in [
            (general.kappa1, closed.kappa1, "kappa1"),
            (general.kappa2, closed.kappa2, "kappa2"),
            (general.kappa3, closed.kappa3, "kappa3"),
        ] {
            assert!(
                (g - c).abs() <= 1e-9 * g.abs().max(1.0),
                "limit routes disagree on {name}: general {g}, closed {c}"
            );
        }
    }
    Ok(general)
}

/// The series-assembly route alone, without the hyperbolic cross-check.
/// Exposed so verification harnesses can compare the two routes and print
/// the gap instead of merely asserting it.
pub fn kappa_limit_general(beta: &BetaSpec, rho: f64, truncation: usize) -> Result<KappaSet> {
    let sf = series_functions(beta, rho, truncation)?;
    Ok(assemble_limits(&sf, rho))
}

fn assemble_limits(sf: &SeriesFunctions, rho: f64) -> KappaSet {
    let rho2 = rho * rho;
    let om = 1.0 - rho2;
    let kappa1 = sf.beta_1 + 2.0 * sf.b1;
    let kappa2 = sf.beta_1 * (1.0 + rho2) / om - sf.beta_rho2 / om
        + 2.0 * (sf.b1_d1 + sf.b1 * (1.0 + rho2) / om - sf.b2 / om);
    let kappa3 = ((1.0 + 4.0 * rho2 + rho2 * rho2) * (sf.beta_1 + 2.0 * sf.b1)
        - (1.0 + 3.0 * rho2) * (sf.beta_rho2 + 2.0 * sf.b2))
        / (om * om)
        + (3.0 * sf.b1_d1 * (1.0 + rho2) - 2.0 * (sf.b2_d1 + sf.beta_d1_rho2)) / om
        + sf.b_d2;
    KappaSet {
        kappa1,
        kappa2,
        kappa3,
        mode: KappaMode::Limit,
    }
}

/// Fully simplified limit constants for the hyperbolic sequence
/// `beta_j = 1/j`:
/// - `kappa1 = pi^2/6 + log^2(1-rho) + 2 Li2(rho)`
/// - `kappa2 = ((1+rho^2) kappa1 - log^2(1-rho) - 2(1+rho) log(1-rho)) /
///   (1-rho^2)`
/// - `kappa3 = kappa2 (1+3rho^2)/(1-rho^2) +
///   ((-1+rho+2rho^2)(1+rho) log(1-rho) + rho(1+rho)^2 - 2rho^4 kappa1) /
///   (1-rho^2)^2`
pub fn hyperbolic_kappa_limits(rho: f64) -> Result<KappaSet> {
    if !rho.is_finite() || rho.abs() >= 1.0 {
        return Err(Error::Config(format!(
            "limits require |rho| < 1, got {rho}"
        )));
    }
    let log1m = (1.0 - rho).ln();
    let rho2 = rho * rho;
    let om = 1.0 - rho2;
    let kappa1 = PI2_OVER_6 + log1m * log1m + 2.0 * dilog(rho)?;
    let kappa2 = ((1.0 + rho2) * kappa1 - log1m * log1m - 2.0 * (1.0 + rho) * log1m) / om;
    let kappa3 = kappa2 * (1.0 + 3.0 * rho2) / om
        + ((-1.0 + rho + 2.0 * rho2) * (1.0 + rho) * log1m + rho * (1.0 + rho) * (1.0 + rho)
            - 2.0 * rho2 * rho2 * kappa1)
            / (om * om);
    Ok(KappaSet {
        kappa1,
        kappa2,
        kappa3,
        mode: KappaMode::Limit,
    })
}
