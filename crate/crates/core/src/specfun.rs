//! Special functions: the real dilogarithm, the modified Bessel function of
//! the second kind, and an adaptive Gauss-Kronrod quadrature shared by the
//! brute-force oracles.

use crate::error::{Error, Result};

/// `pi^2 / 6`, the series value at 1.
pub const PI2_OVER_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Error targets and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (against the current whole-interval estimate).
    pub rel_tol: f64,
    /// Maximum number of panels before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Config(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Real dilogarithm `Li2(x) = -∫_0^x log(1-u)/u du` for `x <= 1`.
///
/// Negative arguments follow the convention `∫_0^x = -∫_x^0`. Series
/// summation is used on `|x| <= 1/2`; the reflection, Landen, and inversion
/// identities map the rest of the domain there. `dilog(1)` is exactly
/// `pi^2/6`.
pub fn dilog(x: f64) -> Result<f64> {
    if !x.is_finite() || x > 1.0 {
        return Err(Error::Domain(format!(
            "dilog is defined for real x <= 1, got {x}"
        )));
    }
    Ok(dilog_unchecked(x))
}

fn dilog_unchecked(x: f64) -> f64 {
    if x == 1.0 {
        return PI2_OVER_6;
    }
    if x < -1.0 {
        // inversion: Li2(x) = -pi^2/6 - log^2(-x)/2 - Li2(1/x), 1/x in (-1, 0)
        let l = (-x).ln();
        return -PI2_OVER_6 - 0.5 * l * l - dilog_unchecked(1.0 / x);
    }
    if x < -0.5 {
        // Landen: Li2(x) = -Li2(x/(x-1)) - log^2(1-x)/2, x/(x-1) in (1/3, 1/2]
        let l = (1.0 - x).ln();
        return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
    }
    if x <= 0.5 {
        return dilog_series(x);
    }
    // reflection: Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x), 1-x in [0, 1/2)
    PI2_OVER_6 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x)
}

// Power series sum_{k>=1} x^k / k^2 on |x| <= 1/2.
fn dilog_series(x: f64) -> f64 {
    debug_assert!(x.abs() <= 0.5);
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 1..200u32 {
        pow *= x;
        let term = pow / f64::from(k * k);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the second kind `K_nu(x)` for `nu >= 0`,
/// `x > 0`, evaluated from the integral representation
/// `K_nu(x) = ∫_0^∞ exp(-x cosh t) cosh(nu t) dt`.
///
/// The integrand is rescaled by its peak value in log space, so large-`nu`
/// arguments do not overflow intermediate terms. The result itself can still
/// exceed the f64 range (e.g. large `nu` with tiny `x`), in which case
/// infinity is returned.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::Domain(format!("bessel_k requires nu >= 0, got {nu}")));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("bessel_k requires x > 0, got {x}")));
    }
    // log integrand g(t) = -x cosh t + log cosh(nu t) peaks near asinh(nu/x)
    let t_peak = (nu / x).asinh();
    let g_max = log_bessel_integrand(nu, x, t_peak);
    // truncate where the integrand falls ~1e-20 below its peak
    let cutoff = g_max - 46.0;
    let mut t_hi = t_peak + 1.0;
    while log_bessel_integrand(nu, x, t_hi) > cutoff {
        t_hi += 0.5;
    }
    let spec = QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 500,
    };
    let scaled = integrate(
        |t| (log_bessel_integrand(nu, x, t) - g_max).exp(),
        0.0,
        t_hi,
        &spec,
    )?;
    Ok(scaled * g_max.exp())
}

fn log_bessel_integrand(nu: f64, x: f64, t: f64) -> f64 {
    -x * t.cosh() + ln_cosh(nu * t)
}

// log cosh z without overflow: |z| + log1p(exp(-2|z|)) - log 2
fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Adaptive Gauss-Kronrod (G7-K15) integration of `f` over `[a, b]`.
///
/// Splits the panel with the largest error estimate until the summed error
/// estimate meets `max(abs_tol, rel_tol * |estimate|)`. Evaluation nodes are
/// interior, so integrable endpoint singularities (like the removable
/// `log(1-u)/u` at zero) are never evaluated at the endpoint itself.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(
            "integration endpoints must be finite".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut panels = vec![gauss_kronrod_panel(&f, lo, hi)];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            return Ok(sign * total);
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Convergence(format!(
                "error estimate {err:.3e} above tolerance {tol:.3e} after {} panels",
                panels.len()
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i)
            .expect("panel list is non-empty");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if mid <= panel.a || mid >= panel.b {
            return Err(Error::Convergence(
                "panel width collapsed below f64 resolution".into(),
            ));
        }
        panels.push(gauss_kronrod_panel(&f, panel.a, mid));
        panels.push(gauss_kronrod_panel(&f, mid, panel.b));
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Kronrod-15 abscissae on [0, 1] (positive half, node 7 is the center).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss-7 weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Panel { a, b, value, error }
}
