//! Variance-gamma distributions and the laws of products of correlated
//! Gaussians.
//!
//! `VG(r, theta, sigma, mu)` is the law of `mu + theta W + sigma sqrt(W) U`
//! with `W ~ Gamma(r/2, rate 1/2)` independent of `U ~ N(0,1)`. Products of
//! jointly Gaussian pairs are variance-gamma: for `(xi_1, xi_2)` centered
//! with variances `sigma_1^2, sigma_2^2` and correlation `rho`,
//! `sum_{j<=n} xi_{1j} xi_{2j} ~ VG(n, rho sigma_1 sigma_2,
//! sqrt(1-rho^2) sigma_1 sigma_2, 0)`, and a whole vector of such sums
//! admits a joint representation with one shared gamma subordinator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Parameter quadruple of a variance-gamma law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VgParams {
    /// Shape `r > 0` (gamma subordinator has shape `r/2`, rate `1/2`).
    pub r: f64,
    /// Asymmetry.
    pub theta: f64,
    /// Scale of the Gaussian component, `> 0`.
    pub sigma: f64,
    /// Location.
    pub mu: f64,
}

impl VgParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !(self.sigma > 0.0) || !self.theta.is_finite() || !self.mu.is_finite()
        {
            return Err(Error::Config(format!(
                "variance-gamma params need r > 0 and sigma > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Mean `mu + r theta`.
    pub fn mean(&self) -> f64 {
        self.mu + self.r * self.theta
    }

    /// Variance `2 r theta^2 + r sigma^2`.
    pub fn variance(&self) -> f64 {
        2.0 * self.r * self.theta * self.theta + self.r * self.sigma * self.sigma
    }
}

/// A centered bivariate Gaussian pair.
#[derive(Debug, Clone, Copy)]
pub struct BivariateGaussianSpec {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl BivariateGaussianSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0) || !(self.sigma2 > 0.0) || !(self.rho.abs() < 1.0) {
            return Err(Error::Config(format!(
                "bivariate spec needs positive scales and |rho| < 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Joint law of `p` cross-products against one shared factor: component `k`
/// is `sum_{j<=n} xi_{1j}^{(k)} xi_{2j}` where the `xi_1^{(k)}` have scales
/// `sigma1[k]`, pairwise correlations `rho_within[(k,l)]`, and correlation
/// `rho_cross[k]` with the shared `xi_2` of scale `sigma2`.
#[derive(Debug, Clone)]
pub struct ProductVectorSpec {
    pub p: usize,
    pub rho_cross: Vec<f64>,
    pub rho_within: DMatrix<f64>,
    pub sigma1: Vec<f64>,
    pub sigma2: f64,
}

impl ProductVectorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::Config("product vector needs p >= 1".into()));
        }
        if self.rho_cross.len() != self.p
            || self.sigma1.len() != self.p
            || self.rho_within.nrows() != self.p
            || self.rho_within.ncols() != self.p
        {
            return Err(Error::Config(format!(
                "inconsistent dimensions: p = {}, rho_cross {}, sigma1 {}, rho_within {}x{}",
                self.p,
                self.rho_cross.len(),
                self.sigma1.len(),
                self.rho_within.nrows(),
                self.rho_within.ncols()
            )));
        }
        if self.rho_cross.iter().any(|r| !(r.abs() < 1.0)) {
            return Err(Error::Config(
                "cross correlations must lie strictly inside (-1, 1)".into(),
            ));
        }
        if self.sigma1.iter().any(|s| !(*s > 0.0)) || !(self.sigma2 > 0.0) {
            return Err(Error::Config("scales must be positive".into()));
        }
        for k in 0..self.p {
            if (self.rho_within[(k, k)] - 1.0).abs() > 1e-12 {
                return Err(Error::Config(
                    "rho_within must have a unit diagonal".into(),
                ));
            }
            for l in 0..k {
                if (self.rho_within[(k, l)] - self.rho_within[(l, k)]).abs() > 1e-12 {
                    return Err(Error::Config("rho_within must be symmetric".into()));
                }
            }
        }
        Ok(())
    }
}

/// Density of `VG(r, theta, sigma, mu)` at `x`:
///
/// `f(x) = exp(theta d / sigma^2) / (sigma sqrt(pi) Gamma(r/2))
///         (|d| / (2 sqrt(theta^2 + sigma^2)))^{(r-1)/2}
///         K_{(r-1)/2}(sqrt(theta^2 + sigma^2) |d| / sigma^2)`,  `d = x - mu`.
///
/// The density diverges at `x = mu` when `r <= 1`; for `r > 1` the removable
/// point is evaluated from the small-argument limit of `K_nu`.
pub fn vg_pdf(params: &VgParams, x: f64) -> Result<f64> {
    params.validate()?;
    let nu = (params.r - 1.0) / 2.0;
    let d = x - params.mu;
    let sig2 = params.sigma * params.sigma;
    let root = (params.theta * params.theta + sig2).sqrt();
    let norm = 1.0
        / (params.sigma * std::f64::consts::PI.sqrt())
        * (-libm::lgamma(params.r / 2.0)).exp();
    if d == 0.0 {
        if params.r <= 1.0 {
            return Err(Error::Singularity(format!(
                "variance-gamma density with r = {} diverges at x = mu",
                params.r
            )));
        }
        // lim_{z->0} (z / (2 root))^nu K_nu(root z / sigma^2)
        //   = Gamma(nu) / 2 * (sigma^2 / root^2)^nu
        let limit = 0.5 * libm::tgamma(nu) * (sig2 / (root * root)).powf(nu);
        return Ok(norm * limit);
    }
    let tilt = (params.theta * d / sig2).exp();
    let bessel = crate::specfun::bessel_k(nu.abs(), root * d.abs() / sig2)?;
    Ok(norm * tilt * (d.abs() / (2.0 * root)).powf(nu) * bessel)
}

/// Characteristic function `exp(i mu t) / (1 + sigma^2 t^2 - 2 i theta t)^{r/2}`.
pub fn vg_cf(params: &VgParams, t: f64) -> Complex64 {
    let denom = Complex64::new(
        1.0 + params.sigma * params.sigma * t * t,
        -2.0 * params.theta * t,
    );
    (Complex64::i() * params.mu * t).exp() / denom.powf(params.r / 2.0)
}

/// `count` i.i.d. draws of `mu + theta W + sigma sqrt(W) U`.
pub fn vg_sample<R: Rng + ?Sized>(params: &VgParams, rng: &mut R, count: usize) -> Vec<f64> {
    let gamma = Gamma::new(params.r / 2.0, 2.0).expect("valid shape and scale");
    (0..count)
        .map(|_| {
            let w = gamma.sample(rng);
            let u: f64 = rng.sample(StandardNormal);
            params.mu + params.theta * w + params.sigma * w.sqrt() * u
        })
        .collect()
}

/// Law of the product `xi_1 xi_2` of one correlated Gaussian pair:
/// `VG(1, rho sigma1 sigma2, sqrt(1-rho^2) sigma1 sigma2, 0)`.
pub fn gaussian_product_law(spec: &BivariateGaussianSpec) -> Result<VgParams> {
    spec.validate()?;
    Ok(VgParams {
        r: 1.0,
        theta: spec.rho * spec.sigma1 * spec.sigma2,
        sigma: (1.0 - spec.rho * spec.rho).sqrt() * spec.sigma1 * spec.sigma2,
        mu: 0.0,
    })
}

/// Law of the sum of `n` i.i.d. such products: the shape parameter adds up
/// while `theta`, `sigma`, `mu` stay fixed.
pub fn gaussian_product_sum_law(spec: &BivariateGaussianSpec, n: usize) -> Result<VgParams> {
    if n < 1 {
        return Err(Error::Config("sum law needs n >= 1".into()));
    }
    let mut params = gaussian_product_law(spec)?;
    params.r = n as f64;
    Ok(params)
}

/// Pre-factorized sampler for the joint product-vector representation.
///
/// Component `k` is `sigma1[k] sigma2 (rho_cross[k] W +
/// sqrt(1 - rho_cross[k]^2) sqrt(W) U_k)` with one `W ~ Gamma(n/2, 1/2)`
/// shared across components and `(U_1..U_p)` a centered Gaussian vector
/// whose covariance has entries `(rho_within[(k,l)] - rho_cross[k]
/// rho_cross[l]) / sqrt((1 - rho_cross[k]^2)(1 - rho_cross[l]^2))`.
pub struct ProductVectorSampler {
    factor: DMatrix<f64>,
    mean_coef: Vec<f64>,
    fluct_coef: Vec<f64>,
    gamma: Gamma<f64>,
}

impl ProductVectorSampler {
    pub fn new(spec: &ProductVectorSpec, n: usize) -> Result<Self> {
        spec.validate()?;
        if n < 1 {
            return Err(Error::Config("sampler needs n >= 1".into()));
        }
        let sigma_u = residual_covariance(spec);
        let eigen = nalgebra::SymmetricEigen::new(sigma_u);
        let min_eig = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::Covariance(format!(
                "residual covariance has eigenvalue {min_eig:.3e} below -1e-10"
            )));
        }
        let sqrt_diag = DMatrix::from_diagonal(&eigen.eigenvalues.map(|l| l.max(0.0).sqrt()));
        let factor = eigen.eigenvectors * sqrt_diag;
        let mean_coef = (0..spec.p)
            .map(|k| spec.rho_cross[k] * spec.sigma1[k] * spec.sigma2)
            .collect();
        let fluct_coef = (0..spec.p)
            .map(|k| {
                (1.0 - spec.rho_cross[k] * spec.rho_cross[k]).sqrt()
                    * spec.sigma1[k]
                    * spec.sigma2
            })
            .collect();
        Ok(Self {
            factor,
            mean_coef,
            fluct_coef,
            gamma: Gamma::new(n as f64 / 2.0, 2.0).expect("valid shape and scale"),
        })
    }

    /// One draw of the `p`-vector. Consumes `1 + p` underlying variates in a
    /// fixed order (gamma first, then the Gaussian vector).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let p = self.mean_coef.len();
        let w = self.gamma.sample(rng);
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let u = &self.factor * z;
        (0..p)
            .map(|k| self.mean_coef[k] * w + self.fluct_coef[k] * w.sqrt() * u[k])
            .collect()
    }
}

// Covariance of the residual Gaussian vector (U_1..U_p).
fn residual_covariance(spec: &ProductVectorSpec) -> DMatrix<f64> {
    let denom: Vec<f64> = spec
        .rho_cross
        .iter()
        .map(|r| (1.0 - r * r).sqrt())
        .collect();
    DMatrix::from_fn(spec.p, spec.p, |k, l| {
        (spec.rho_within[(k, l)] - spec.rho_cross[k] * spec.rho_cross[l]) / (denom[k] * denom[l])
    })
}

/// One draw of the joint representation (see [`ProductVectorSampler`]).
pub fn product_vector_sample<R: Rng + ?Sized>(
    spec: &ProductVectorSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(ProductVectorSampler::new(spec, n)?.sample(rng))
}
