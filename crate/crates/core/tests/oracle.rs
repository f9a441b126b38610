use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xtylaw::kappa::{kappa_finite, theta_profile};
use xtylaw::model::{kms_entry, sample_row, BetaSpec, ModelConfig};
use xtylaw::oracle::{
    dense_statistic, kappa1_brute, kappa2_brute, kappa3_brute, kms_product_spec, sigma_u_matrix,
    vg_cdf_quadrature, vg_pdf_quadrature, OracleBudget,
};
use xtylaw::specfun::{integrate, QuadratureSpec};
use xtylaw::vg::{vg_pdf, ProductVectorSpec, VgParams};
use xtylaw::Error;

fn model(beta: BetaSpec, rho: f64, n: usize, p: usize, sigma_eps2: f64) -> ModelConfig {
    ModelConfig {
        n,
        p,
        rho,
        sigma_eps2,
        beta,
    }
}

#[test]
fn brute_constants_hand_examples() {
    let budget = OracleBudget::default();
    let single = model(BetaSpec::Explicit(vec![1.0]), 0.5, 1, 1, 1.0);
    assert!((kappa1_brute(&single, &budget).unwrap() - 1.0).abs() < 1e-15);
    assert!((kappa2_brute(&single, &budget).unwrap() - 1.0).abs() < 1e-15);
    assert!((kappa3_brute(&single, &budget).unwrap() - 1.0).abs() < 1e-15);

    let pair = model(BetaSpec::Explicit(vec![1.0, 1.0]), 0.5, 2, 2, 1.0);
    assert!((kappa1_brute(&pair, &budget).unwrap() - 3.0).abs() < 1e-14);
    assert!((kappa2_brute(&pair, &budget).unwrap() - 4.5).abs() < 1e-14);
    assert!((kappa3_brute(&pair, &budget).unwrap() - 6.75).abs() < 1e-14);
}

#[test]
fn brute_constants_match_the_smoothing_recursion() {
    let budget = OracleBudget::default();
    for rho in [-0.7, 0.0, 0.45, 0.7] {
        for beta in [
            BetaSpec::Hyperbolic,
            BetaSpec::Explicit(vec![0.9, -0.4, 0.55, 0.2, -0.15]),
        ] {
            let cfg = model(beta, rho, 12, 12, 1.0);
            let fast = kappa_finite(&cfg).unwrap();
            for (brute, fast, name) in [
                (kappa1_brute(&cfg, &budget).unwrap(), fast.kappa1, "kappa1"),
                (kappa2_brute(&cfg, &budget).unwrap(), fast.kappa2, "kappa2"),
                (kappa3_brute(&cfg, &budget).unwrap(), fast.kappa3, "kappa3"),
            ] {
                assert!(
                    (brute - fast).abs() <= 1e-10 * fast.abs().max(1.0),
                    "{name} at rho = {rho}: {brute} vs {fast}"
                );
            }
        }
    }
}

#[test]
fn quartic_budget_is_enforced() {
    let budget = OracleBudget::default();
    let too_big = model(BetaSpec::Hyperbolic, 0.3, 41, 41, 1.0);
    assert!(matches!(
        kappa3_brute(&too_big, &budget),
        Err(Error::Budget(_))
    ));
    let bad_budget = OracleBudget {
        max_p_quartic: 0,
        ..OracleBudget::default()
    };
    assert!(bad_budget.validate().is_err());
}

#[test]
fn dense_budget_is_enforced() {
    let budget = OracleBudget::default();
    let too_big = model(BetaSpec::Hyperbolic, 0.0, 500, 500, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(matches!(
        dense_statistic(&too_big, &mut rng, &budget),
        Err(Error::Budget(_))
    ));
}

#[test]
fn dense_statistic_single_row_algebra() {
    // With one observation the statistic is y^2 sum_k x_k^2.
    let cfg = model(BetaSpec::Hyperbolic, 0.6, 1, 7, 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (x, y) = sample_row(&cfg, &mut rng).unwrap();
    let expected = y * y * x.iter().map(|v| v * v).sum::<f64>();

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let got = dense_statistic(&cfg, &mut rng, &OracleBudget::default()).unwrap();
    assert!((got - expected).abs() <= 1e-12 * expected, "{got} vs {expected}");
}

#[test]
fn pdf_quadrature_matches_the_closed_form() {
    let cases = [
        VgParams { r: 2.0, theta: 0.0, sigma: 1.0, mu: 0.0 },
        VgParams { r: 1.0, theta: 3.0, sigma: 5.196152422706632, mu: 0.0 },
        VgParams { r: 4.0, theta: 0.5, sigma: 1.0, mu: 2.0 },
        VgParams { r: 0.8, theta: -0.3, sigma: 0.7, mu: 1.0 },
    ];
    for params in cases {
        for offset in [-2.0, -0.5, 0.25, 1.0, 4.0] {
            let x = params.mu + offset;
            let direct = vg_pdf(&params, x).unwrap();
            let mixed = vg_pdf_quadrature(&params, x).unwrap();
            assert!(
                (mixed - direct).abs() <= 1e-7 * direct.max(1.0),
                "r = {}, x = {x}: {mixed} vs {direct}",
                params.r
            );
        }
    }
}

#[test]
fn pdf_quadrature_is_symmetric_without_drift() {
    let params = VgParams { r: 3.0, theta: 0.0, sigma: 1.3, mu: 0.5 };
    for offset in [0.3, 1.1, 2.7] {
        let right = vg_pdf_quadrature(&params, params.mu + offset).unwrap();
        let left = vg_pdf_quadrature(&params, params.mu - offset).unwrap();
        assert!((right - left).abs() < 1e-12, "offset = {offset}");
    }
}

#[test]
fn cdf_quadrature_is_a_proper_distribution_function() {
    let params = VgParams { r: 1.0, theta: 3.0, sigma: 5.196152422706632, mu: 0.0 };
    let grid = [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0, 20.0];
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| vg_cdf_quadrature(&params, x).unwrap())
        .collect();
    for pair in values.windows(2) {
        assert!(pair[0] <= pair[1] + 1e-12, "{values:?}");
    }
    // Tail rates are (sqrt(theta^2 + sigma^2) -+ theta) / sigma^2, so the
    // right tail decays like exp(-x/9) and needs a far abscissa.
    assert!(vg_cdf_quadrature(&params, -60.0).unwrap() < 1e-6);
    assert!(vg_cdf_quadrature(&params, 150.0).unwrap() > 1.0 - 1e-5);
}

#[test]
fn cdf_increment_equals_the_density_integral() {
    let params = VgParams { r: 2.0, theta: 0.4, sigma: 1.0, mu: 0.0 };
    let increment =
        vg_cdf_quadrature(&params, 1.0).unwrap() - vg_cdf_quadrature(&params, -1.0).unwrap();
    let spec = QuadratureSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let direct = integrate(|x| vg_pdf(&params, x).unwrap(), -1.0, 1.0, &spec).unwrap();
    assert!((increment - direct).abs() < 1e-8, "{increment} vs {direct}");
}

#[test]
fn residual_covariance_diagnostics() {
    let trivial = ProductVectorSpec {
        p: 1,
        rho_cross: vec![0.6],
        rho_within: DMatrix::identity(1, 1),
        sigma1: vec![1.0],
        sigma2: 2.0,
    };
    let (matrix, min_eig) = sigma_u_matrix(&trivial).unwrap();
    assert!((matrix[(0, 0)] - 1.0).abs() < 1e-12);
    assert!((min_eig - 1.0).abs() < 1e-12);

    // When within-correlations factor through the shared channel the
    // residuals are exactly independent.
    let (rho1, rho2) = (0.5, -0.3);
    let factorable = ProductVectorSpec {
        p: 2,
        rho_cross: vec![rho1, rho2],
        rho_within: DMatrix::from_row_slice(2, 2, &[1.0, rho1 * rho2, rho1 * rho2, 1.0]),
        sigma1: vec![1.0, 1.0],
        sigma2: 1.0,
    };
    let (matrix, min_eig) = sigma_u_matrix(&factorable).unwrap();
    assert!(matrix[(0, 1)].abs() < 1e-14);
    assert!((min_eig - 1.0).abs() < 1e-12);

    // An inconsistent spec is reported with a negative eigenvalue, the
    // diagnostic never raises.
    let inconsistent = ProductVectorSpec {
        p: 2,
        rho_cross: vec![0.9, 0.9],
        rho_within: DMatrix::identity(2, 2),
        sigma1: vec![1.0, 1.0],
        sigma2: 1.0,
    };
    let (_, min_eig) = sigma_u_matrix(&inconsistent).unwrap();
    assert!(min_eig < -0.5, "min_eig = {min_eig}");
}

#[test]
fn model_product_spec_is_positive_and_consistent() {
    let cfg = model(BetaSpec::Hyperbolic, 0.7, 25, 8, 1.0);
    let spec = kms_product_spec(&cfg).unwrap();
    spec.validate().unwrap();
    assert_eq!(spec.p, 8);
    assert!(spec.sigma1.iter().all(|&s| s == 1.0));

    // sigma2^2 is the marginal variance of y and rho_cross the normalized
    // smoothed coefficients.
    let theta = theta_profile(&cfg).unwrap();
    assert!((spec.sigma2 * spec.sigma2 - theta.sigma_z2).abs() < 1e-12);
    let normalized = theta.normalized();
    for (k, want) in normalized.iter().enumerate() {
        assert!((spec.rho_cross[k] - want).abs() < 1e-12, "k = {k}");
        for l in 0..8 {
            assert!((spec.rho_within[(k, l)] - kms_entry(0.7, k, l)).abs() < 1e-15);
        }
    }

    let (_, min_eig) = sigma_u_matrix(&spec).unwrap();
    assert!(min_eig >= -1e-10, "min_eig = {min_eig}");
}
