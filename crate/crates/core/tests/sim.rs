use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xtylaw::kappa::kappa_finite;
use xtylaw::limitlaw::CenteringMode;
use xtylaw::model::{BetaSpec, ModelConfig};
use xtylaw::oracle::{dense_statistic, OracleBudget};
use xtylaw::sim::{ks_distance, normal_cdf, run_mc, statistic, McConfig};
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

/// Standard normal quantile by bisection on `normal_cdf`.
fn normal_quantile(u: f64) -> f64 {
    assert!(u > 0.0 && u < 1.0);
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ks_is_half_grid_spacing_on_exact_quantiles() {
    // Points at the (i - 1/2)/N quantiles make the empirical CDF straddle
    // the limit CDF symmetrically, giving exactly 1/(2N).
    let n = 100;
    let sample: Vec<f64> = (1..=n)
        .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
        .collect();
    let ks = ks_distance(&sample, 1.0).unwrap();
    assert!((ks - 0.005).abs() < 1e-9, "ks = {ks}");
}

#[test]
fn ks_of_a_point_mass_at_zero_is_one_half() {
    let ks = ks_distance(&[0.0, 0.0], 1.0).unwrap();
    assert!((ks - 0.5).abs() < 1e-15);
}

#[test]
fn ks_scale_tracks_the_reference_standard_deviation() {
    let n = 400;
    let sample: Vec<f64> = (1..=n)
        .map(|i| 3.0 * normal_quantile((i as f64 - 0.5) / n as f64))
        .collect();
    // Against s = 3 the sample is perfectly calibrated; against s = 1 it is
    // far too spread out.
    assert!(ks_distance(&sample, 3.0).unwrap() < 0.002);
    assert!(ks_distance(&sample, 1.0).unwrap() > 0.2);
}

#[test]
fn ks_input_validation() {
    assert!(matches!(ks_distance(&[0.0], 0.0), Err(Error::Domain(_))));
    assert!(matches!(ks_distance(&[0.0], -1.0), Err(Error::Domain(_))));
    assert!(matches!(ks_distance(&[], 1.0), Err(Error::Domain(_))));
}

#[test]
fn ks_of_a_calibrated_gaussian_sample_is_small() {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = 2.5;
    let mut sample: Vec<f64> = (0..1000)
        .map(|_| s * rng.sample::<f64, _>(StandardNormal))
        .collect();
    sample.sort_by(f64::total_cmp);
    let ks = ks_distance(&sample, s).unwrap();
    // 0.043 is the 5% critical value at N = 1000.
    assert!(ks < 0.043, "ks = {ks}");
}

#[test]
fn streaming_statistic_matches_dense_materialization() {
    let budget = OracleBudget::default();
    for (n, p) in [(50usize, 50usize), (200, 120)] {
        let cfg = model(BetaSpec::Hyperbolic, 0.45, n, p, 2.0);
        let mut rng_a = ChaCha8Rng::seed_from_u64(33);
        let mut rng_b = ChaCha8Rng::seed_from_u64(33);
        let streamed = statistic(&cfg, &mut rng_a).unwrap();
        let dense = dense_statistic(&cfg, &mut rng_b, &budget).unwrap();
        assert!(
            (streamed - dense).abs() <= 1e-10 * dense.abs(),
            "n = {n}, p = {p}: {streamed} vs {dense}"
        );
    }
}

#[test]
fn runs_are_reproducible() {
    let mc = McConfig::new(
        model(BetaSpec::Hyperbolic, 0.3, 80, 80, 1.0),
        64,
        99,
        CenteringMode::Limit,
    );
    let a = run_mc(&mc).unwrap();
    let b = run_mc(&mc).unwrap();
    assert_eq!(a.normalized_values, b.normalized_values);
    assert_eq!(a.ks_distance, b.ks_distance);
}

#[test]
fn summary_components_are_well_formed() {
    let mc = McConfig::new(
        model(BetaSpec::Hyperbolic, -0.4, 100, 50, 1.0),
        300,
        5,
        CenteringMode::Limit,
    );
    let summary = run_mc(&mc).unwrap();

    assert_eq!(summary.normalized_values.len(), 300);
    assert!(summary.normalized_values.windows(2).all(|w| w[0] <= w[1]));
    assert!(summary.ks_distance >= 0.0 && summary.ks_distance <= 1.0);

    assert_eq!(summary.empirical_cdf.len(), McConfig::DEFAULT_CDF_GRID_POINTS);
    for pair in summary.empirical_cdf.windows(2) {
        assert!(pair[0].x < pair[1].x);
        assert!(pair[0].empirical_cdf <= pair[1].empirical_cdf);
        assert!(pair[0].limit_cdf <= pair[1].limit_cdf);
    }
    for point in &summary.empirical_cdf {
        assert!((0.0..=1.0).contains(&point.empirical_cdf));
        assert!((0.0..=1.0).contains(&point.limit_cdf));
    }
    // The padded grid spans the sample, so the empirical CDF sweeps 0 to 1.
    assert_eq!(summary.empirical_cdf.first().unwrap().empirical_cdf, 0.0);
    assert_eq!(summary.empirical_cdf.last().unwrap().empirical_cdf, 1.0);

    assert_eq!(summary.empirical_pdf.len(), McConfig::DEFAULT_HISTOGRAM_BINS);
    let width = summary.empirical_pdf[1].bin_center - summary.empirical_pdf[0].bin_center;
    let mass: f64 = summary
        .empirical_pdf
        .iter()
        .map(|b| b.empirical_density * width)
        .sum();
    assert!((mass - 1.0).abs() < 1e-9, "mass = {mass}");
}

#[test]
fn single_replication_is_well_formed() {
    let mut mc = McConfig::new(
        model(BetaSpec::Hyperbolic, 0.2, 30, 30, 1.0),
        1,
        1,
        CenteringMode::Finite,
    );
    mc.histogram_bins = 8;
    mc.cdf_grid_points = 16;
    let summary = run_mc(&mc).unwrap();
    assert_eq!(summary.normalized_values.len(), 1);
    assert!(summary.ks_distance.is_finite());
    let width = summary.empirical_pdf[1].bin_center - summary.empirical_pdf[0].bin_center;
    let mass: f64 = summary
        .empirical_pdf
        .iter()
        .map(|b| b.empirical_density * width)
        .sum();
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn config_validation_rejects_degenerate_runs() {
    let good = McConfig::new(
        model(BetaSpec::Hyperbolic, 0.0, 10, 10, 1.0),
        10,
        0,
        CenteringMode::Limit,
    );
    assert!(good.validate().is_ok());

    let mut zero_reps = good.clone();
    zero_reps.reps = 0;
    assert!(zero_reps.validate().is_err());

    let mut tiny_grid = good.clone();
    tiny_grid.cdf_grid_points = 1;
    assert!(tiny_grid.validate().is_err());

    let mut no_bins = good;
    no_bins.histogram_bins = 0;
    assert!(no_bins.validate().is_err());
}

#[test]
fn statistic_mean_matches_the_exact_moment_formula() {
    // E ||X'Y||^2 = (n^2 + n) kappa_{2,p} + p n (kappa_{1,p} + sigma_eps^2).
    // The n kappa_{2,p} term beats the Monte-Carlo error at this size, so
    // the exact formula must fit where the n^2-only centering misses.
    let n = 40usize;
    let cfg = model(BetaSpec::Hyperbolic, 0.3, n, n, 4.0);
    let k = kappa_finite(&cfg).unwrap();
    let nf = n as f64;
    let exact = (nf * nf + nf) * k.kappa2 + nf * nf * (k.kappa1 + 4.0);
    let uncorrected = exact - nf * k.kappa2;

    let reps = 40_000usize;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        rng.set_stream(rep as u64);
        let v = statistic(&cfg, &mut rng).unwrap();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / reps as f64;
    let var = sum_sq / reps as f64 - mean * mean;
    let se = (var / reps as f64).sqrt();

    assert!(
        (mean - exact).abs() < 3.0 * se,
        "mean {mean} vs exact {exact} (se {se})"
    );
    assert!(
        (mean - exact).abs() < (mean - uncorrected).abs(),
        "exact formula should fit better: gap {} vs {}",
        (mean - exact).abs(),
        (mean - uncorrected).abs()
    );
}
