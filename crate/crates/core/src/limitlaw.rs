//! Centering, scale, and variance of the limiting normal law.
//!
//! The normalized statistic `(||X'Y||^2 - centering) / n^{3/2}` converges to
//! `N(0, s^2)` with
//!
//! `s^2 = 4 kappa2^2 + 4 (kappa1 + sigma_eps^2)(2 kappa2 c + kappa3)
//!        + 2 c (kappa1 + sigma_eps^2)^2 (c + (1+rho^2)/(1-rho^2))`.
//!
//! Two centerings are available: the finite-p constants
//! `n^2 kappa_{2,p} + p n (kappa_{1,p} + sigma_eps^2)` or their limits
//! `n^2 (kappa2 + c (kappa1 + sigma_eps^2))` with `c = p/n`. The variance
//! splits as `s^2 = s1^2 + s2^2`, the two terms coming from the mixing scale
//! and the conditionally Gaussian fluctuation of the statistic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kappa::{kappa_finite, kappa_limit, KappaMode, KappaSet};
use crate::model::{BetaSpec, ModelConfig};

/// Which constants enter the centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringMode {
    /// Finite-p constants `kappa_{i,p}`.
    Finite,
    /// Limit constants `kappa_i`, with `c` realized as `p/n`.
    Limit,
}

/// The limiting normal law of the normalized statistic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitLaw {
    /// Deterministic value subtracted from `||X'Y||^2`.
    pub centering: f64,
    /// Normalizing scale `n^{3/2}`.
    pub scale: f64,
    /// Limit variance `s^2`.
    pub s2: f64,
    /// Mixing-scale component of `s^2`.
    pub s1_sq: f64,
    /// Conditional-fluctuation component of `s^2`.
    pub s2_sq: f64,
    /// Aspect ratio `p/n`.
    pub c: f64,
    pub centering_mode: CenteringMode,
}

/// Limit variance `s^2` and its two components `(s2, s1_sq, s2_sq)`.
///
/// `s1_sq = 8 kappa2^2 + 8 c sig2 kappa2 + 2 c^2 sig2^2` and
/// `s2_sq = 2 c (1+rho^2)/(1-rho^2) sig2^2 + 4 sig2 kappa3 - 4 kappa2^2`
/// with `sig2 = kappa1 + sigma_eps2`; their sum reproduces `s^2` exactly.
pub fn variance_s2(
    kappas: &KappaSet,
    c: f64,
    sigma_eps2: f64,
    rho: f64,
) -> Result<(f64, f64, f64)> {
    if kappas.mode != KappaMode::Limit {
        return Err(Error::Config(
            "variance_s2 expects limit-mode constants".into(),
        ));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config(format!("aspect ratio must be positive, got {c}")));
    }
    if !(sigma_eps2 > 0.0) || rho.abs() >= 1.0 {
        return Err(Error::Config(
            "need sigma_eps2 > 0 and |rho| < 1".into(),
        ));
    }
    let sig2 = kappas.kappa1 + sigma_eps2;
    let wave = (1.0 + rho * rho) / (1.0 - rho * rho);
    let s2 = 4.0 * kappas.kappa2 * kappas.kappa2
        + 4.0 * sig2 * (2.0 * kappas.kappa2 * c + kappas.kappa3)
        + 2.0 * c * sig2 * sig2 * (c + wave);
    if !(s2 > 0.0) {
        return Err(Error::Domain(format!(
            "computed variance s^2 = {s2} is not positive; inconsistent constants"
        )));
    }
    let s1_sq = 8.0 * kappas.kappa2 * kappas.kappa2
        + 8.0 * c * sig2 * kappas.kappa2
        + 2.0 * c * c * sig2 * sig2;
    let s2_sq = 2.0 * c * wave * sig2 * sig2 + 4.0 * sig2 * kappas.kappa3
        - 4.0 * kappas.kappa2 * kappas.kappa2;
    debug_assert!(
        (s1_sq + s2_sq - s2).abs() <= 1e-9 * s2.abs().max(1.0),
        "variance decomposition broke: {s1_sq} + {s2_sq} != {s2}"
    );
    Ok((s2, s1_sq, s2_sq))
}

/// `s^2` for the identity-covariance case (`rho = 0`), where all three
/// constants collapse to `beta(1) = sum_j beta_j^2`:
/// `2 beta(1)^2 (4 + 5c + c^2) + 4 beta(1) sigma_eps^2 (1 + 3c + c^2)
///  + 2 sigma_eps^4 (c + c^2)`.
pub fn variance_s2_iid(beta_sq_sum: f64, c: f64, sigma_eps2: f64) -> f64 {
    2.0 * beta_sq_sum * beta_sq_sum * (4.0 + 5.0 * c + c * c)
        + 4.0 * beta_sq_sum * sigma_eps2 * (1.0 + 3.0 * c + c * c)
        + 2.0 * sigma_eps2 * sigma_eps2 * (c + c * c)
}

/// Warns when the tail decay needed by the limit centering cannot be
/// certified from the coefficient spec alone. The hyperbolic sequence
/// satisfies it (`beta_j j -> 1`, tail `~ 1/p`); a finite explicit vector
/// carries no information about its own extension.
pub fn tail_hypothesis_warning(beta: &BetaSpec) -> Option<String> {
    match beta {
        BetaSpec::Hyperbolic => None,
        BetaSpec::Explicit(_) => Some(
            "limit-mode centering assumes a square-summable coefficient tail \
             decaying faster than p^{-1/2}; this cannot be certified from a \
             finite explicit vector"
                .to_string(),
        ),
    }
}

/// Centering constant for `||X'Y||^2` under the chosen mode.
pub fn centering(config: &ModelConfig, mode: CenteringMode) -> Result<f64> {
    config.validate()?;
    let n = config.n as f64;
    let p = config.p as f64;
    match mode {
        CenteringMode::Finite => {
            let k = kappa_finite(config)?;
            Ok(n * n * k.kappa2 + p * n * (k.kappa1 + config.sigma_eps2))
        }
        CenteringMode::Limit => {
            let k = kappa_limit(&config.beta, config.rho)?;
            let c = p / n;
            Ok(n * n * (k.kappa2 + c * (k.kappa1 + config.sigma_eps2)))
        }
    }
}

/// Bundles centering, scale `n^{3/2}`, and the variance at `c = p/n`.
pub fn limit_law(config: &ModelConfig, mode: CenteringMode) -> Result<LimitLaw> {
    config.validate()?;
    let n = config.n as f64;
    let c = config.p as f64 / n;
    let limits = kappa_limit(&config.beta, config.rho)?;
    let (s2, s1_sq, s2_sq) = variance_s2(&limits, c, config.sigma_eps2, config.rho)?;
    Ok(LimitLaw {
        centering: centering(config, mode)?,
        scale: n.powf(1.5),
        s2,
        s1_sq,
        s2_sq,
        c,
        centering_mode: mode,
    })
}
