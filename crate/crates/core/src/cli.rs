//! Command-line front end: constants, limit laws, Monte-Carlo runs, and
//! self-verification suites, all emitted as versioned JSON envelopes plus
//! optional CSV plot data.
//!
//! Exit codes: 0 success, 1 failed check or gate (or an escalated warning
//! under `--strict`), 2 usage error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kappa;
use crate::limitlaw::{self, CenteringMode};
use crate::model::{kms_entry, BetaSpec, ModelConfig};
use crate::oracle::{self, OracleBudget};
use crate::sim::{self, McConfig, McSummary};
use crate::specfun::{self, QuadratureSpec};
use crate::vg::{self, VgParams};

/// JSON schema tag; field names are frozen within a version.
pub const SCHEMA_VERSION: &str = "1";
/// Environment variable consulted for the default worker count.
pub const THREADS_ENV_VAR: &str = "XTYLAW_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "xtylaw",
    version,
    about = "Limit law and Monte-Carlo study of ||X'Y||^2 under AR(1) Gaussian designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (overrides the XTYLAW_THREADS variable; default all
    /// cores). Results never depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON envelope to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pretty-print the JSON envelope.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Treat hypothesis warnings as failures (exit 1).
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Compact single-line JSON.
    Json,
    /// Indented JSON.
    Pretty,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Constants kappa_1, kappa_2, kappa_3: finite-p sums and/or limits.
    Kappa(KappaArgs),
    /// Centering, scale, and variance of the limiting normal law.
    Limits(LimitsArgs),
    /// Monte-Carlo replication study of the normalized statistic.
    Simulate(SimulateArgs),
    /// Oracle cross-check suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct BetaArgs {
    /// Coefficient family: currently `hyperbolic` (beta_j = 1/j).
    #[arg(long, conflicts_with = "beta_file")]
    beta: Option<String>,
    /// CSV file with one explicit coefficient per row (optional header).
    #[arg(long)]
    beta_file: Option<PathBuf>,
}

impl BetaArgs {
    fn resolve(&self) -> Result<BetaSpec> {
        if let Some(path) = &self.beta_file {
            return BetaSpec::from_csv(path);
        }
        match self.beta.as_deref() {
            None | Some("hyperbolic") => Ok(BetaSpec::Hyperbolic),
            Some(other) => Err(Error::Config(format!(
                "unknown --beta family '{other}'; use 'hyperbolic' or --beta-file"
            ))),
        }
    }
}

#[derive(Debug, Args)]
struct KappaArgs {
    #[command(flatten)]
    beta: BetaArgs,
    /// AR(1) coefficient, |rho| < 1.
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    /// Dimension for the finite-p constants.
    #[arg(long)]
    p: Option<usize>,
    /// Compute the p -> infinity limits instead.
    #[arg(long, conflicts_with_all = ["p", "both"])]
    limit: bool,
    /// Compute finite-p and limit constants plus the sqrt(p)-scaled gaps.
    #[arg(long, requires = "p")]
    both: bool,
}

#[derive(Debug, Args)]
#[command(group = ArgGroup::new("dim").required(true).args(["p", "c"]))]
struct LimitsArgs {
    #[command(flatten)]
    beta: BetaArgs,
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    /// Sample size.
    #[arg(long)]
    n: usize,
    /// Dimension (alternative: --c).
    #[arg(long)]
    p: Option<usize>,
    /// Aspect ratio; realized as p = round(c * n).
    #[arg(long)]
    c: Option<f64>,
    /// Noise variance sigma_eps^2.
    #[arg(long, default_value_t = 4.0)]
    sigma2: f64,
}

#[derive(Debug, Args)]
#[command(group = ArgGroup::new("dim").required(true).args(["p", "c"]))]
struct SimulateArgs {
    #[command(flatten)]
    beta: BetaArgs,
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<usize>,
    /// Aspect ratio; realized as p = round(c * n).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    sigma2: f64,
    /// Number of replications.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Master seed; replication i uses the stream (seed, i).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which constants enter the centering.
    #[arg(long, value_enum, default_value_t = CenteringFlag::Auto)]
    centering: CenteringFlag,
    #[arg(long, default_value_t = McConfig::DEFAULT_CDF_GRID_POINTS)]
    cdf_grid_points: usize,
    #[arg(long, default_value_t = McConfig::DEFAULT_HISTOGRAM_BINS)]
    histogram_bins: usize,
    /// Also write `<prefix>_cdf.csv` and `<prefix>_pdf.csv`.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    /// Exit 1 if the KS distance exceeds this bound (CI gate).
    #[arg(long)]
    fail_above: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CenteringFlag {
    /// Limit constants for the hyperbolic family, finite-p otherwise.
    Auto,
    Finite,
    Limit,
}

impl CenteringFlag {
    fn resolve(self, beta: &BetaSpec) -> CenteringMode {
        match self {
            CenteringFlag::Finite => CenteringMode::Finite,
            CenteringFlag::Limit => CenteringMode::Limit,
            CenteringFlag::Auto => match beta {
                BetaSpec::Hyperbolic => CenteringMode::Limit,
                BetaSpec::Explicit(_) => CenteringMode::Finite,
            },
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Which oracle suite to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Specfun,
    Vg,
    Kappa,
    Trace,
    All,
}

/// Top-level JSON output shape shared by every subcommand.
#[derive(Debug, Serialize)]
pub struct OutputEnvelope {
    pub schema_version: &'static str,
    pub command: String,
    pub config_echo: Value,
    pub results: Value,
    pub seed: Option<u64>,
    pub timing: f64,
}

struct CmdOutput {
    command: &'static str,
    config_echo: Value,
    results: Value,
    seed: Option<u64>,
    exit: i32,
}

/// Parses argv, runs the selected command, prints the envelope, and returns
/// the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    init_threads(cli.threads);
    let start = Instant::now();
    let output = match dispatch(&cli) {
        Ok(output) => output,
        Err(err) => {
            eprintln!("error: {err}");
            return match err {
                Error::Config(_) => 2,
                _ => 1,
            };
        }
    };
    let envelope = OutputEnvelope {
        schema_version: SCHEMA_VERSION,
        command: output.command.to_string(),
        config_echo: output.config_echo,
        results: output.results,
        seed: output.seed,
        timing: start.elapsed().as_secs_f64(),
    };
    if let Err(err) = emit(&cli, &envelope) {
        eprintln!("error: {err}");
        return 1;
    }
    output.exit
}

fn init_threads(flag: Option<usize>) {
    let requested = flag.or_else(|| {
        std::env::var(THREADS_ENV_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(threads) = requested {
        // Ignore the error from re-initialization in in-process tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn emit(cli: &Cli, envelope: &OutputEnvelope) -> Result<()> {
    let body = match cli.format {
        Format::Json => serde_json::to_string(envelope),
        Format::Pretty => serde_json::to_string_pretty(envelope),
    }
    .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    match &cli.out {
        Some(path) => std::fs::write(path, body + "\n")?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "{body}")?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<CmdOutput> {
    match &cli.command {
        Command::Kappa(args) => cmd_kappa(args, cli.strict),
        Command::Limits(args) => cmd_limits(args, cli.strict),
        Command::Simulate(args) => cmd_simulate(args, cli.strict),
        Command::Check(args) => cmd_check(args),
    }
}

// Placeholder (n, sigma_eps2) for computations that only read (p, rho, beta).
fn kappa_only_config(beta: BetaSpec, rho: f64, p: usize) -> ModelConfig {
    ModelConfig {
        n: 1,
        p,
        rho,
        sigma_eps2: 1.0,
        beta,
    }
}

fn warn(warnings: &mut Vec<String>, message: String) {
    eprintln!("warning: {message}");
    warnings.push(message);
}

fn cmd_kappa(args: &KappaArgs, strict: bool) -> Result<CmdOutput> {
    let beta = args.beta.resolve()?;
    let want_finite = args.p.is_some();
    let want_limit = args.limit || args.both;
    if !(want_finite || want_limit) {
        return Err(Error::Config(
            "pass --p for finite-p constants, --limit for limits, or --both".into(),
        ));
    }
    if want_finite && want_limit && !args.both {
        return Err(Error::Config(
            "--p and --limit are exclusive; use --both for the comparison".into(),
        ));
    }

    let mut warnings = Vec::new();
    let mut results = serde_json::Map::new();
    let finite = match args.p {
        Some(p) => {
            let set = kappa::kappa_finite(&kappa_only_config(beta.clone(), args.rho, p))?;
            results.insert("finite".into(), json!(set));
            Some(set)
        }
        None => None,
    };
    let limit = if want_limit {
        if let Some(msg) = limitlaw::tail_hypothesis_warning(&beta) {
            warn(&mut warnings, msg);
        }
        let set = kappa::kappa_limit(&beta, args.rho)?;
        results.insert("limit".into(), json!(set));
        Some(set)
    } else {
        None
    };
    if let (Some(f), Some(l), Some(p)) = (finite, limit, args.p) {
        let scale = (p as f64).sqrt();
        results.insert(
            "sqrt_p_scaled_gap".into(),
            json!({
                "kappa1": scale * (f.kappa1 - l.kappa1).abs(),
                "kappa2": scale * (f.kappa2 - l.kappa2).abs(),
                "kappa3": scale * (f.kappa3 - l.kappa3).abs(),
            }),
        );
    }
    results.insert("warnings".into(), json!(warnings));

    Ok(CmdOutput {
        command: "kappa",
        config_echo: json!({
            "beta": beta,
            "rho": args.rho,
            "p": args.p,
            "limit": args.limit,
            "both": args.both,
        }),
        results: Value::Object(results),
        seed: None,
        exit: i32::from(strict && !warnings.is_empty()),
    })
}

fn resolve_dimension(n: usize, p: Option<usize>, c: Option<f64>) -> Result<usize> {
    match (p, c) {
        (Some(p), None) => Ok(p),
        (None, Some(c)) if c > 0.0 => {
            let p = (c * n as f64).round() as usize;
            if p < 1 {
                return Err(Error::Config(format!("c = {c} with n = {n} rounds to p = 0")));
            }
            Ok(p)
        }
        (None, Some(c)) => Err(Error::Config(format!("aspect ratio must be positive, got {c}"))),
        _ => Err(Error::Config("pass exactly one of --p or --c".into())),
    }
}

fn cmd_limits(args: &LimitsArgs, strict: bool) -> Result<CmdOutput> {
    let beta = args.beta.resolve()?;
    let p = resolve_dimension(args.n, args.p, args.c)?;
    let config = ModelConfig {
        n: args.n,
        p,
        rho: args.rho,
        sigma_eps2: args.sigma2,
        beta: beta.clone(),
    };
    let mut warnings = Vec::new();
    if let Some(msg) = limitlaw::tail_hypothesis_warning(&beta) {
        warn(&mut warnings, msg);
    }
    let finite = limitlaw::limit_law(&config, CenteringMode::Finite)?;
    let limit = limitlaw::limit_law(&config, CenteringMode::Limit)?;
    Ok(CmdOutput {
        command: "limits",
        config_echo: json!(config),
        results: json!({
            "finite": finite,
            "limit": limit,
            "warnings": warnings,
        }),
        seed: None,
        exit: i32::from(strict && !warnings.is_empty()),
    })
}

fn cmd_simulate(args: &SimulateArgs, strict: bool) -> Result<CmdOutput> {
    let beta = args.beta.resolve()?;
    let p = resolve_dimension(args.n, args.p, args.c)?;
    let model = ModelConfig {
        n: args.n,
        p,
        rho: args.rho,
        sigma_eps2: args.sigma2,
        beta: beta.clone(),
    };
    let mode = args.centering.resolve(&beta);
    let mut warnings = Vec::new();
    if mode == CenteringMode::Limit {
        if let Some(msg) = limitlaw::tail_hypothesis_warning(&beta) {
            warn(&mut warnings, msg);
        }
    }
    let mc = McConfig {
        model,
        reps: args.reps,
        master_seed: args.seed,
        centering_mode: mode,
        cdf_grid_points: args.cdf_grid_points,
        histogram_bins: args.histogram_bins,
    };
    let summary = sim::run_mc(&mc)?;
    if let Some(prefix) = &args.out_prefix {
        write_plot_csvs(prefix, &summary)?;
    }

    let mut exit = 0;
    if let Some(bound) = args.fail_above {
        if summary.ks_distance > bound {
            eprintln!(
                "gate: ks_distance {:.6} exceeds --fail-above {bound}",
                summary.ks_distance
            );
            exit = 1;
        }
    }
    if strict && !warnings.is_empty() {
        exit = 1;
    }

    Ok(CmdOutput {
        command: "simulate",
        config_echo: json!({
            "model": mc.model,
            "reps": mc.reps,
            "master_seed": mc.master_seed,
            "centering_mode": mc.centering_mode,
            "cdf_grid_points": mc.cdf_grid_points,
            "histogram_bins": mc.histogram_bins,
            "warnings": warnings,
        }),
        results: json!(summary),
        seed: Some(args.seed),
        exit,
    })
}

fn write_plot_csvs(prefix: &Path, summary: &McSummary) -> Result<()> {
    let base = prefix.to_string_lossy();
    let mut cdf = String::from("x,empirical_cdf,limit_cdf\n");
    for pt in &summary.empirical_cdf {
        cdf.push_str(&format!("{},{},{}\n", pt.x, pt.empirical_cdf, pt.limit_cdf));
    }
    std::fs::write(format!("{base}_cdf.csv"), cdf)?;
    let mut pdf = String::from("bin_center,empirical_density,limit_density\n");
    for bin in &summary.empirical_pdf {
        pdf.push_str(&format!(
            "{},{},{}\n",
            bin.bin_center, bin.empirical_density, bin.limit_density
        ));
    }
    std::fs::write(format!("{base}_pdf.csv"), pdf)?;
    Ok(())
}

/// One verified identity: both sides, their gap, and the tolerance applied.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
}

fn check_abs(name: String, lhs: f64, rhs: f64, tol: f64) -> CheckLine {
    let gap = (lhs - rhs).abs();
    CheckLine {
        name,
        lhs,
        rhs,
        gap,
        tol,
        pass: gap.is_finite() && gap <= tol,
    }
}

// Relative comparison with a unit floor so near-zero references degrade to
// an absolute check.
fn check_rel(name: String, lhs: f64, rhs: f64, rel: f64) -> CheckLine {
    check_abs(name, lhs, rhs, rel * rhs.abs().max(1.0))
}

fn cmd_check(args: &CheckArgs) -> Result<CmdOutput> {
    let mut lines = Vec::new();
    if matches!(args.suite, Suite::Specfun | Suite::All) {
        check_specfun(&mut lines)?;
    }
    if matches!(args.suite, Suite::Vg | Suite::All) {
        check_vg(&mut lines)?;
    }
    if matches!(args.suite, Suite::Kappa | Suite::All) {
        check_kappa(&mut lines)?;
    }
    if matches!(args.suite, Suite::Trace | Suite::All) {
        check_trace(&mut lines)?;
    }

    let failures = lines.iter().filter(|l| !l.pass).count();
    for line in &lines {
        eprintln!(
            "[{}] {:<52} lhs {:>24.16e} rhs {:>24.16e} gap {:>10.3e} tol {:>8.1e}",
            if line.pass { "PASS" } else { "FAIL" },
            line.name,
            line.lhs,
            line.rhs,
            line.gap,
            line.tol
        );
    }
    eprintln!(
        "suite {:?}: {} checks, {} failed",
        args.suite,
        lines.len(),
        failures
    );

    Ok(CmdOutput {
        command: "check",
        config_echo: json!({ "suite": format!("{:?}", args.suite).to_lowercase() }),
        results: json!({
            "checks": lines,
            "total": lines.len(),
            "failures": failures,
            "passed": failures == 0,
        }),
        seed: None,
        exit: i32::from(failures > 0),
    })
}

fn check_specfun(lines: &mut Vec<CheckLine>) -> Result<()> {
    for x in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        lines.push(check_abs(
            format!("dilog duplication x={x}"),
            specfun::dilog(x)? + specfun::dilog(-x)?,
            0.5 * specfun::dilog(x * x)?,
            1e-10,
        ));
    }
    for x in [-0.95, -0.5, -0.2, 0.2, 0.5, 0.8, 0.95] {
        lines.push(check_abs(
            format!("dilog Landen x={x}"),
            specfun::dilog(x / (x - 1.0))? + specfun::dilog(x)?,
            -0.5 * (1.0 - x).ln().powi(2),
            1e-10,
        ));
    }
    let quad = QuadratureSpec::default();
    for rho in [-0.9, -0.5, 0.3, 0.7, 0.95] {
        let integral = specfun::integrate(
            |x| (1.0 - rho * x).ln() / (x * (1.0 - x)),
            0.0,
            rho,
            &quad,
        )?;
        let closed = -0.5 * (specfun::dilog(rho * rho)? + (1.0 - rho).ln().powi(2));
        lines.push(check_abs(
            format!("dilog integral identity rho={rho}"),
            integral,
            closed,
            1e-8,
        ));
    }
    for x in [0.5, 1.0, 2.0, 5.0] {
        let half = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        lines.push(check_rel(
            format!("bessel K_1/2({x}) closed form"),
            specfun::bessel_k(0.5, x)?,
            half,
            1e-9,
        ));
        lines.push(check_rel(
            format!("bessel K_3/2({x}) closed form"),
            specfun::bessel_k(1.5, x)?,
            half * (1.0 + 1.0 / x),
            1e-9,
        ));
        lines.push(check_rel(
            format!("bessel recurrence nu=3/2 x={x}"),
            specfun::bessel_k(2.5, x)?,
            specfun::bessel_k(0.5, x)? + (3.0 / x) * specfun::bessel_k(1.5, x)?,
            1e-9,
        ));
    }
    Ok(())
}

fn check_vg(lines: &mut Vec<CheckLine>) -> Result<()> {
    // r = 2, theta = 0 is the standard Laplace density e^{-|x|}/2.
    let laplace = VgParams {
        r: 2.0,
        theta: 0.0,
        sigma: 1.0,
        mu: 0.0,
    };
    lines.push(check_abs(
        "vg pdf Laplace at 0".into(),
        vg::vg_pdf(&laplace, 0.0)?,
        0.5,
        1e-12,
    ));
    lines.push(check_abs(
        "vg pdf Laplace at 1".into(),
        vg::vg_pdf(&laplace, 1.0)?,
        0.5 * (-1.0f64).exp(),
        1e-12,
    ));
    let cf = vg::vg_cf(&laplace, 1.0);
    lines.push(check_abs("vg cf Laplace t=1 (re)".into(), cf.re, 0.5, 1e-12));
    lines.push(check_abs("vg cf Laplace t=1 (im)".into(), cf.im, 0.0, 1e-12));

    let param_sets = [
        VgParams { r: 3.0, theta: 0.5, sigma: 1.0, mu: 0.0 },
        VgParams { r: 1.0, theta: 0.0, sigma: 1.0, mu: 0.0 },
        VgParams { r: 2.5, theta: -0.8, sigma: 0.7, mu: 1.2 },
        VgParams { r: 6.0, theta: 1.0, sigma: 2.0, mu: -1.0 },
    ];
    for params in &param_sets {
        for step in [-2.5, -1.0, 0.5, 1.5, 3.0] {
            let x = params.mu + step;
            lines.push(check_abs(
                format!(
                    "vg pdf vs mixture quadrature r={} theta={} x={x}",
                    params.r, params.theta
                ),
                vg::vg_pdf(params, x)?,
                oracle::vg_pdf_quadrature(params, x)?,
                1e-7,
            ));
        }
    }

    let norm_params = param_sets[0];
    let total = specfun::integrate(
        |x| vg::vg_pdf(&norm_params, x).expect("valid params"),
        -40.0,
        40.0,
        &QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
        },
    )?;
    lines.push(check_abs("vg pdf normalization".into(), total, 1.0, 1e-6));
    Ok(())
}

fn check_kappa(lines: &mut Vec<CheckLine>) -> Result<()> {
    let budget = OracleBudget::default();
    let explicit = BetaSpec::Explicit(vec![0.9, -0.4, 0.55, 0.2, -0.15, 0.35, 0.1, -0.05]);
    for rho in [-0.9, -0.5, 0.0, 0.3, 0.7] {
        for (label, beta) in [("hyperbolic", BetaSpec::Hyperbolic), ("explicit", explicit.clone())]
        {
            let config = kappa_only_config(beta, rho, 40);
            let fast = kappa::kappa_finite(&config)?;
            for (name, lhs, rhs) in [
                ("kappa1", fast.kappa1, oracle::kappa1_brute(&config, &budget)?),
                ("kappa2", fast.kappa2, oracle::kappa2_brute(&config, &budget)?),
                ("kappa3", fast.kappa3, oracle::kappa3_brute(&config, &budget)?),
            ] {
                lines.push(check_rel(
                    format!("{name} fast vs brute p=40 rho={rho} {label}"),
                    lhs,
                    rhs,
                    1e-10,
                ));
            }
        }
    }
    for rho in [-0.95, -0.6, 0.0, 0.3, 0.5, 0.7, 0.9] {
        let general =
            kappa::kappa_limit_general(&BetaSpec::Hyperbolic, rho, kappa::DEFAULT_TRUNCATION)?;
        let closed = kappa::hyperbolic_kappa_limits(rho)?;
        for (name, lhs, rhs) in [
            ("kappa1", general.kappa1, closed.kappa1),
            ("kappa2", general.kappa2, closed.kappa2),
            ("kappa3", general.kappa3, closed.kappa3),
        ] {
            lines.push(check_rel(
                format!("{name} limit series route vs closed form rho={rho}"),
                lhs,
                rhs,
                1e-9,
            ));
        }
    }
    Ok(())
}

fn check_trace(lines: &mut Vec<CheckLine>) -> Result<()> {
    for rho in [-0.9, -0.3, 0.0, 0.5, 0.95] {
        for p in [1usize, 2, 17, 200] {
            let brute: f64 = (0..p)
                .flat_map(|i| (0..p).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let e = kms_entry(rho, i, j);
                    e * e
                })
                .sum();
            lines.push(check_rel(
                format!("tr(Sigma^2) closed form rho={rho} p={p}"),
                crate::model::kms_trace_sq(rho, p),
                brute,
                1e-12,
            ));
        }
    }
    Ok(())
}
