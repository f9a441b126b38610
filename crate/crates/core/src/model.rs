//! The data-generating process: coefficient sequences, the AR(1)/Toeplitz
//! covariance `(rho^{|i-j|})`, exact O(p)-per-row Gaussian sampling, and
//! closed-form traces.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Regression coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSpec {
    /// `beta_j = 1/j`, square-summable with tail `sum_{j>p} beta_j^2 ~ 1/p`.
    Hyperbolic,
    /// Finitely many explicit coefficients; zero beyond the vector.
    Explicit(Vec<f64>),
}

impl BetaSpec {
    /// Coefficient `beta_j` for 1-based index `j`.
    pub fn coeff(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match self {
            BetaSpec::Hyperbolic => 1.0 / j as f64,
            BetaSpec::Explicit(values) => values.get(j - 1).copied().unwrap_or(0.0),
        }
    }

    /// First `p` coefficients.
    pub fn coeffs(&self, p: usize) -> Vec<f64> {
        (1..=p).map(|j| self.coeff(j)).collect()
    }

    /// Length of the explicit support, if any.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            BetaSpec::Hyperbolic => None,
            BetaSpec::Explicit(values) => Some(values.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let BetaSpec::Explicit(values) = self {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(
                    "explicit coefficients must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// Loads an explicit spec from a one-column CSV file: one real per line,
    /// optional single header line, blank lines ignored.
    pub fn from_csv(path: &Path) -> Result<BetaSpec> {
        let text = fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let field = line.trim().trim_matches('"');
            if field.is_empty() {
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if idx == 0 && values.is_empty() => {} // header line
                Err(_) => {
                    return Err(Error::Config(format!(
                        "{}: line {} is not a number: {field:?}",
                        path.display(),
                        idx + 1
                    )));
                }
            }
        }
        if values.is_empty() {
            return Err(Error::Config(format!(
                "{}: no coefficients found",
                path.display()
            )));
        }
        let spec = BetaSpec::Explicit(values);
        spec.validate()?;
        Ok(spec)
    }
}

/// Full model configuration for `Y = X beta + eps`.
#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    /// Number of observations (rows).
    pub n: usize,
    /// Number of predictors (columns).
    pub p: usize,
    /// AR(1) covariance parameter, `|rho| < 1`; `rho = 0` gives the identity.
    pub rho: f64,
    /// Noise variance `sigma_eps^2 > 0`.
    pub sigma_eps2: f64,
    pub beta: BetaSpec,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.p < 1 {
            return Err(Error::Config("n and p must be at least 1".into()));
        }
        if !self.rho.is_finite() || self.rho.abs() >= 1.0 {
            return Err(Error::Config(format!(
                "rho must satisfy |rho| < 1, got {}",
                self.rho
            )));
        }
        if !self.sigma_eps2.is_finite() || self.sigma_eps2 <= 0.0 {
            return Err(Error::Config(format!(
                "sigma_eps2 must be positive, got {}",
                self.sigma_eps2
            )));
        }
        self.beta.validate()
    }
}

/// Covariance entry `rho^{|i-j|}` (identity matrix when `rho = 0`).
pub fn kms_entry(rho: f64, i: usize, j: usize) -> f64 {
    rho.powi(i.abs_diff(j) as i32)
}

/// Streaming row generator.
///
/// Each design row is exactly `N_p(0, (rho^{|i-j|}))` via the stationary
/// AR(1) recursion `x_1 ~ N(0,1)`, `x_j = rho x_{j-1} + sqrt(1-rho^2) eta_j`;
/// the response is `y = x . beta + eps`. One row costs O(p) time and memory.
#[derive(Debug, Clone)]
pub struct RowSampler {
    betas: Vec<f64>,
    rho: f64,
    innovation_sd: f64,
    eps_sd: f64,
}

impl RowSampler {
    pub fn new(config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            betas: config.beta.coeffs(config.p),
            rho: config.rho,
            innovation_sd: (1.0 - config.rho * config.rho).sqrt(),
            eps_sd: config.sigma_eps2.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.betas.len()
    }

    /// Fills `x` with one design row and returns the response `y`.
    ///
    /// Draw order is fixed (`x_1`, innovations `eta_2..eta_p`, then `eps`),
    /// so any two consumers of the same stream see identical data.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [f64]) -> f64 {
        assert_eq!(x.len(), self.betas.len());
        let mut prev: f64 = rng.sample(StandardNormal);
        x[0] = prev;
        for slot in x.iter_mut().skip(1) {
            let eta: f64 = rng.sample(StandardNormal);
            prev = self.rho * prev + self.innovation_sd * eta;
            *slot = prev;
        }
        let signal: f64 = x.iter().zip(&self.betas).map(|(xj, bj)| xj * bj).sum();
        let eps: f64 = rng.sample(StandardNormal);
        signal + self.eps_sd * eps
    }
}

/// One design row and its response.
pub fn sample_row<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<(Vec<f64>, f64)> {
    let sampler = RowSampler::new(config)?;
    let mut x = vec![0.0; config.p];
    let y = sampler.sample_into(rng, &mut x);
    Ok((x, y))
}

/// Dense realization of the design and response for small instances.
#[derive(Debug, Clone)]
pub struct DenseData {
    pub n: usize,
    pub p: usize,
    /// Row-major `n x p` design matrix.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Default cap on `n * p` for dense materialization.
pub const DEFAULT_DENSE_CAP: usize = 4_000_000;

/// Materializes `(X, Y)` with the same stream discipline as the row
/// generator. Refuses instances larger than `max_entries`.
pub fn materialize_dense<R: Rng + ?Sized>(
    config: &ModelConfig,
    rng: &mut R,
    max_entries: usize,
) -> Result<DenseData> {
    let entries = config
        .n
        .checked_mul(config.p)
        .ok_or_else(|| Error::Budget("n * p overflows usize".into()))?;
    if entries > max_entries {
        return Err(Error::Budget(format!(
            "dense materialization of {} entries exceeds the cap {max_entries}",
            entries
        )));
    }
    let sampler = RowSampler::new(config)?;
    let mut x = vec![0.0; entries];
    let mut y = Vec::with_capacity(config.n);
    for row in x.chunks_exact_mut(config.p) {
        y.push(sampler.sample_into(rng, row));
    }
    Ok(DenseData {
        n: config.n,
        p: config.p,
        x,
        y,
    })
}

/// Exact `tr(Sigma^2) = sum_{|m| < p} (p - |m|) rho^{2|m|}` in closed form.
pub fn kms_trace_sq(rho: f64, p: usize) -> f64 {
    debug_assert!(rho.abs() < 1.0 && p >= 1);
    let pf = p as f64;
    if rho == 0.0 {
        return pf;
    }
    let q = rho * rho;
    let qp = q.powi(p as i32);
    // sum_{m=1}^{p-1} q^m and sum_{m=1}^{p-1} m q^m
    let geo = (q - qp) / (1.0 - q);
    let weighted = q * (1.0 - pf * qp / q + (pf - 1.0) * qp) / ((1.0 - q) * (1.0 - q));
    pf + 2.0 * (pf * geo - weighted)
}

/// Tail mass `sum_{j > p} beta_j^2`.
///
/// Zero for explicit specs of length at most `p`; for the hyperbolic
/// sequence this is `pi^2/6 - sum_{j<=p} j^{-2}`, which behaves like `1/p`.
pub fn beta_tail_sq(beta: &BetaSpec, p: usize) -> f64 {
    match beta {
        BetaSpec::Explicit(values) => values.iter().skip(p).map(|v| v * v).sum(),
        BetaSpec::Hyperbolic => {
            // ascending terms, summed smallest-first
            let partial: f64 = (1..=p).rev().map(|j| 1.0 / (j as f64 * j as f64)).sum();
            (std::f64::consts::PI * std::f64::consts::PI / 6.0 - partial).max(0.0)
        }
    }
}
