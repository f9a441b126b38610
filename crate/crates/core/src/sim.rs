//! Monte-Carlo engine: streaming evaluation of the statistic `||X'Y||^2`,
//! its normalized form, replication over reproducible per-replication RNG
//! streams, and empirical-distribution summaries against `N(0, s^2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limitlaw::{self, CenteringMode, LimitLaw};
use crate::model::{ModelConfig, RowSampler};

/// Neumaier compensated accumulator. The statistic is of order `n^2` while
/// its fluctuation is of order `n^{3/2}`; naive summation at large `n`
/// erodes exactly the digits the normalized statistic lives in.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One replication of `||X'Y||^2 = sum_k (sum_i X_{k,i} y_i)^2`, streaming
/// row by row in O(p) memory.
pub fn statistic<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<f64> {
    let sampler = RowSampler::new(config)?;
    let p = sampler.dim();
    let mut h = vec![KahanSum::default(); p];
    let mut x = vec![0.0; p];
    for _ in 0..config.n {
        let y = sampler.sample_into(rng, &mut x);
        for (acc, &xk) in h.iter_mut().zip(x.iter()) {
            acc.add(xk * y);
        }
    }
    let mut total = KahanSum::default();
    for acc in &h {
        let hk = acc.value();
        total.add(hk * hk);
    }
    Ok(total.value())
}

/// `(statistic - centering) / n^{3/2}` for a law built from the same config.
pub fn normalized_statistic<R: Rng + ?Sized>(
    config: &ModelConfig,
    law: &LimitLaw,
    rng: &mut R,
) -> Result<f64> {
    Ok((statistic(config, rng)? - law.centering) / law.scale)
}

/// Monte-Carlo run description.
#[derive(Debug, Clone, Serialize)]
pub struct McConfig {
    pub model: ModelConfig,
    pub reps: usize,
    pub master_seed: u64,
    pub centering_mode: CenteringMode,
    pub cdf_grid_points: usize,
    pub histogram_bins: usize,
}

impl McConfig {
    pub const DEFAULT_CDF_GRID_POINTS: usize = 512;
    pub const DEFAULT_HISTOGRAM_BINS: usize = 40;

    pub fn new(model: ModelConfig, reps: usize, master_seed: u64, mode: CenteringMode) -> Self {
        Self {
            model,
            reps,
            master_seed,
            centering_mode: mode,
            cdf_grid_points: Self::DEFAULT_CDF_GRID_POINTS,
            histogram_bins: Self::DEFAULT_HISTOGRAM_BINS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.reps < 1 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if self.cdf_grid_points < 2 || self.histogram_bins < 1 {
            return Err(Error::Config(
                "need cdf_grid_points >= 2 and histogram_bins >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One point of the empirical-vs-limit CDF comparison grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CdfPoint {
    pub x: f64,
    pub empirical_cdf: f64,
    pub limit_cdf: f64,
}

/// One histogram bin of the empirical-vs-limit density comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdfBin {
    pub bin_center: f64,
    pub empirical_density: f64,
    pub limit_density: f64,
}

/// Replication results and distribution summaries.
#[derive(Debug, Clone, Serialize)]
pub struct McSummary {
    /// Normalized statistics, sorted ascending.
    pub normalized_values: Vec<f64>,
    /// `sup_x |F_hat(x) - Phi(x/s)|` evaluated at the jump points.
    pub ks_distance: f64,
    pub limit: LimitLaw,
    pub empirical_cdf: Vec<CdfPoint>,
    pub empirical_pdf: Vec<PdfBin>,
    pub runtime_seconds: f64,
}

/// Runs `mc.reps` independent replications. Replication `i` draws from a
/// ChaCha stream keyed `(master_seed, i)`, so the output is identical for
/// any parallelism degree and any scheduling order.
pub fn run_mc(mc: &McConfig) -> Result<McSummary> {
    mc.validate()?;
    let start = std::time::Instant::now();
    let law = limitlaw::limit_law(&mc.model, mc.centering_mode)?;
    let values: Vec<f64> = (0..mc.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.master_seed);
            rng.set_stream(rep as u64);
            normalized_statistic(&mc.model, &law, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut sorted = values;
    sorted.sort_by(f64::total_cmp);

    let s = law.s2.sqrt();
    let ks = ks_distance(&sorted, s)?;

    let n = sorted.len();
    let (lo, hi) = padded_range(sorted[0], sorted[n - 1]);

    let grid = mc.cdf_grid_points;
    let empirical_cdf = (0..grid)
        .map(|g| {
            let x = lo + (hi - lo) * g as f64 / (grid - 1) as f64;
            let below = sorted.partition_point(|&v| v <= x);
            CdfPoint {
                x,
                empirical_cdf: below as f64 / n as f64,
                limit_cdf: normal_cdf(x / s),
            }
        })
        .collect();

    let bins = mc.histogram_bins;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in &sorted {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let empirical_pdf = counts
        .iter()
        .enumerate()
        .map(|(b, &cnt)| {
            let center = lo + (b as f64 + 0.5) * width;
            PdfBin {
                bin_center: center,
                empirical_density: cnt as f64 / (n as f64 * width),
                limit_density: normal_pdf(center / s) / s,
            }
        })
        .collect();

    Ok(McSummary {
        normalized_values: sorted,
        ks_distance: ks,
        limit: law,
        empirical_cdf,
        empirical_pdf,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

// Plot range: the sample range padded by 5% on each side (a fixed pad when
// the sample is degenerate, e.g. reps = 1).
fn padded_range(min: f64, max: f64) -> (f64, f64) {
    let span = max - min;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 };
    (min - pad, max + pad)
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of a
/// sorted sample and `Phi(./s)`:
/// `max_i max(|i/N - Phi(x_i/s)|, |(i-1)/N - Phi(x_i/s)|)`.
pub fn ks_distance(sorted_sample: &[f64], s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("ks_distance needs s > 0, got {s}")));
    }
    if sorted_sample.is_empty() {
        return Err(Error::Domain("ks_distance needs a nonempty sample".into()));
    }
    debug_assert!(sorted_sample.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted_sample.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted_sample.iter().enumerate() {
        let f = normal_cdf(x / s);
        let above = ((i + 1) as f64 / n - f).abs();
        let below = (i as f64 / n - f).abs();
        sup = sup.max(above).max(below);
    }
    Ok(sup)
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
