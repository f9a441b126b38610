//! Brute-force reference implementations. Each routine here recomputes a
//! quantity the production modules obtain by a faster or more structured
//! route, using deliberately different algorithms (literal nested sums,
//! direct quadrature, dense linear algebra). They ship in the library so
//! the `check` subcommand can re-verify the constants outside the test
//! tree, but they scale poorly on purpose and enforce explicit budgets.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{kms_entry, materialize_dense, ModelConfig};
use crate::specfun::{integrate, QuadratureSpec};
use crate::vg::{ProductVectorSpec, VgParams};

/// Size caps for the intentionally slow reference computations.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    /// Largest `p` admitted to the O(p^4) quadruple sum.
    pub max_p_quartic: usize,
    /// Dense-statistic cap: requires `n * p <= max_dense_np^2`.
    pub max_dense_np: usize,
    /// Sample size for Monte-Carlo cross-checks.
    pub mc_trials: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_p_quartic: 40,
            max_dense_np: 200,
            mc_trials: 100_000,
        }
    }
}

impl OracleBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_p_quartic < 1 || self.max_dense_np < 1 || self.mc_trials < 1 {
            return Err(Error::Config("oracle budgets must be positive".into()));
        }
        Ok(())
    }
}

fn check_quartic_budget(p: usize, budget: &OracleBudget) -> Result<()> {
    budget.validate()?;
    if p > budget.max_p_quartic {
        return Err(Error::Budget(format!(
            "p = {p} exceeds the brute-force cap {}",
            budget.max_p_quartic
        )));
    }
    Ok(())
}

/// Literal double sum `sum_{k,j} beta_k beta_j rho^{|k-j|}`.
pub fn kappa1_brute(config: &ModelConfig, budget: &OracleBudget) -> Result<f64> {
    config.validate()?;
    check_quartic_budget(config.p, budget)?;
    let beta = config.beta.coeffs(config.p);
    let mut sum = 0.0;
    for k in 0..config.p {
        for j in 0..config.p {
            sum += beta[k] * beta[j] * kms_entry(config.rho, k, j);
        }
    }
    Ok(sum)
}

/// Literal triple sum `sum_{k,j,j'} beta_j beta_j' rho^{|k-j|} rho^{|k-j'|}`.
pub fn kappa2_brute(config: &ModelConfig, budget: &OracleBudget) -> Result<f64> {
    config.validate()?;
    check_quartic_budget(config.p, budget)?;
    let beta = config.beta.coeffs(config.p);
    let mut sum = 0.0;
    for k in 0..config.p {
        for j in 0..config.p {
            for jp in 0..config.p {
                sum += beta[j]
                    * beta[jp]
                    * kms_entry(config.rho, k, j)
                    * kms_entry(config.rho, k, jp);
            }
        }
    }
    Ok(sum)
}

/// Literal quadruple sum
/// `sum_{k,l,j,j'} beta_j beta_j' rho^{|k-j|} rho^{|k-l|} rho^{|l-j'|}`.
pub fn kappa3_brute(config: &ModelConfig, budget: &OracleBudget) -> Result<f64> {
    config.validate()?;
    check_quartic_budget(config.p, budget)?;
    let beta = config.beta.coeffs(config.p);
    let mut sum = 0.0;
    for k in 0..config.p {
        for l in 0..config.p {
            let middle = kms_entry(config.rho, k, l);
            for j in 0..config.p {
                for jp in 0..config.p {
                    sum += beta[j]
                        * beta[jp]
                        * kms_entry(config.rho, k, j)
                        * middle
                        * kms_entry(config.rho, l, jp);
                }
            }
        }
    }
    Ok(sum)
}

// Integration bound for the gamma-mixture integrals after the substitution
// w = v^2: covers the subordinator bulk plus the saddle the shifted normal
// factor can push the mass toward.
fn mixture_upper_limit(params: &VgParams, d: f64) -> f64 {
    let root = (params.theta * params.theta + params.sigma * params.sigma).sqrt();
    let saddle_w = d.abs() / root;
    (params.r.sqrt() + 12.0).max(2.0 * saddle_w.sqrt() + 12.0)
}

fn mixture_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-9,
        max_subdivisions: 4000,
    }
}

// Gamma(r/2, rate 1/2) density of w = v^2 times the Jacobian 2v, i.e. the
// density of sqrt(W) at v, evaluated in log space.
fn sqrt_gamma_log_density(r: f64, v: f64) -> f64 {
    (1.0 - r / 2.0) * std::f64::consts::LN_2 - libm::lgamma(r / 2.0) + (r - 1.0) * v.ln()
        - v * v / 2.0
}

/// Density of `VG(r, theta, sigma, mu)` by direct quadrature of the
/// normal-mixture representation
/// `f(x) = int_0^inf phi((x - mu - theta w)/(sigma sqrt(w)))/(sigma sqrt(w))
///         gamma_{r/2, 1/2}(w) dw`,
/// integrated on the `v = sqrt(w)` scale where the integrand is smooth.
pub fn vg_pdf_quadrature(params: &VgParams, x: f64) -> Result<f64> {
    params.validate()?;
    let d = x - params.mu;
    let upper = mixture_upper_limit(params, d);
    let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    integrate(
        |v| {
            let z = (d - params.theta * v * v) / (params.sigma * v);
            let log_normal = -0.5 * z * z - half_log_2pi - (params.sigma * v).ln();
            (log_normal + sqrt_gamma_log_density(params.r, v)).exp()
        },
        0.0,
        upper,
        &mixture_spec(),
    )
}

/// CDF of `VG(r, theta, sigma, mu)` by quadrature of
/// `int_0^inf Phi((x - mu - theta w)/(sigma sqrt(w))) gamma_{r/2,1/2}(w) dw`
/// on the `v = sqrt(w)` scale.
pub fn vg_cdf_quadrature(params: &VgParams, x: f64) -> Result<f64> {
    params.validate()?;
    let d = x - params.mu;
    let upper = mixture_upper_limit(params, d);
    integrate(
        |v| {
            let z = (d - params.theta * v * v) / (params.sigma * v);
            crate::sim::normal_cdf(z) * sqrt_gamma_log_density(params.r, v).exp()
        },
        0.0,
        upper,
        &mixture_spec(),
    )
}

/// `||X'Y||^2` by dense materialization and an explicit matrix product.
/// Consumes the random stream exactly like the streaming path, so both can
/// be fed the same replication stream and compared.
pub fn dense_statistic<R: Rng + ?Sized>(
    config: &ModelConfig,
    rng: &mut R,
    budget: &OracleBudget,
) -> Result<f64> {
    budget.validate()?;
    let cap = budget.max_dense_np * budget.max_dense_np;
    let data = materialize_dense(config, rng, cap)?;
    let x = DMatrix::from_row_slice(data.n, data.p, &data.x);
    let y = DVector::from_column_slice(&data.y);
    let h = x.transpose() * y;
    Ok(h.norm_squared())
}

/// The residual-Gaussian covariance of the joint product representation,
/// assembled entry by entry, together with its smallest eigenvalue. A
/// negative eigenvalue is reported, not raised: this routine is diagnostic.
pub fn sigma_u_matrix(spec: &ProductVectorSpec) -> Result<(DMatrix<f64>, f64)> {
    spec.validate()?;
    let p = spec.p;
    let mut m = DMatrix::zeros(p, p);
    for k in 0..p {
        for l in 0..p {
            let num = spec.rho_within[(k, l)] - spec.rho_cross[k] * spec.rho_cross[l];
            let den = ((1.0 - spec.rho_cross[k] * spec.rho_cross[k])
                * (1.0 - spec.rho_cross[l] * spec.rho_cross[l]))
                .sqrt();
            m[(k, l)] = num / den;
        }
    }
    let min_eig = nalgebra::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok((m, min_eig))
}

/// Product-vector description of `X'Y` under the regression model: entry
/// `k` of `X'Y` sums `n` products of the pair `(X_k, y)`, where `X_k` has
/// unit variance, `y` has variance `beta' Sigma beta + sigma_eps^2`, the
/// design correlations are `rho^{|k-l|}`, and the cross correlations are
/// `(Sigma beta)_k / sd(y)`. Everything is assembled by literal sums.
pub fn kms_product_spec(config: &ModelConfig) -> Result<ProductVectorSpec> {
    config.validate()?;
    let p = config.p;
    let beta = config.beta.coeffs(p);
    let t: Vec<f64> = (0..p)
        .map(|k| {
            (0..p)
                .map(|j| beta[j] * kms_entry(config.rho, k, j))
                .sum()
        })
        .collect();
    let var_y: f64 =
        (0..p).map(|k| beta[k] * t[k]).sum::<f64>() + config.sigma_eps2;
    let sd_y = var_y.sqrt();
    Ok(ProductVectorSpec {
        p,
        rho_cross: t.iter().map(|tk| tk / sd_y).collect(),
        rho_within: DMatrix::from_fn(p, p, |k, l| kms_entry(config.rho, k, l)),
        sigma1: vec![1.0; p],
        sigma2: sd_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BetaSpec;

    #[test]
    fn quartic_budget_is_enforced() {
        let config = ModelConfig {
            n: 10,
            p: 41,
            rho: 0.5,
            sigma_eps2: 1.0,
            beta: BetaSpec::Hyperbolic,
        };
        let err = kappa3_brute(&config, &OracleBudget::default()).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn sqrt_gamma_density_normalizes() {
        for r in [1.0f64, 2.0, 5.5] {
            let total = integrate(
                |v| sqrt_gamma_log_density(r, v).exp(),
                0.0,
                r.sqrt() + 12.0,
                &mixture_spec(),
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-9, "r = {r}: {total}");
        }
    }
}
