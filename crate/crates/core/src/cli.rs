//! Batch front end. Every subcommand writes its table to `--out` (or stdout)
//! and its verification reports to `--report` (or stderr, one JSON object per
//! line).
//!
//! Exit codes: 0 when every requested check passes, 2 when a check fails,
//! 1 on bad input. Input errors are printed to stderr as a single line
//! `{"error": <kind>, "message": <text>}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::branching::{OffspringDistribution, OffspringSpec};
use crate::construct::{
    closed_form_measure, extremal_invariant_measure, invariant_measure, true_invariant_measure, ClosedFormKind,
    InvariantMeasure,
};
use crate::error::{Error, Result};
use crate::io::{read_measure_csv, write_measure_csv, write_table};
use crate::montecarlo::{quasi_stationarity_test, qsd_sampling_test, yaglom_mc, MCReport, QsdSampler, SubordinatorSpec};
use crate::report::VerificationReport;
use crate::selfsimilar::{gamma_integral_check, normalize_for_qsd, MeasureSpec, SelfSimilarMeasure};
use crate::verify::{
    eigen_residual, functional_equation_residual, grid_up_to, hoppe_roundtrip, joffe_partial_sums, recover_lambda,
    LogBins,
};
use crate::yaglom::{h_identity_report, standard_grid, yaglom_limit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

const DEFAULT_ORDER: usize = 512;
const DEFAULT_OFFSPRING: OffspringSpec = OffspringSpec::PureDeath { m: 0.5 };

/// Settings that may also be supplied as a JSON file via `--config`.
/// Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub offspring: Option<OffspringSpec>,
    pub measure: Option<MeasureSpec>,
    pub alpha: Option<f64>,
    pub order: Option<usize>,
    pub rel_tol: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(name = "bgw-qsd", version, about = "Invariant measures and QSDs of subcritical Galton-Watson processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Offspring law as JSON, e.g. '{"type":"geometric","b":0.25}' (default: pure death, m = 0.5)
    #[arg(long)]
    offspring: Option<String>,
    /// JSON run configuration; unknown keys are rejected
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truncation order K
    #[arg(long)]
    order: Option<usize>,
    /// Output table (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verification reports as a JSON array (default: stderr, one per line)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    QsdPower,
    Log,
    NegativePower,
    TruePower,
}

impl From<Kind> for ClosedFormKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::QsdPower => ClosedFormKind::QsdPower,
            Kind::Log => ClosedFormKind::Log,
            Kind::NegativePower => ClosedFormKind::NegativePower,
            Kind::TruePower => ClosedFormKind::TruePower,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum McMode {
    Qsd,
    OneStep,
    Yaglom,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Yaglom limit nu_min and the identities satisfied by its generating function
    Yaglom {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Build an invariant measure or QSD
    Construct {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Representing measure as JSON, e.g. '{"type":"log_uniform","c":1}'
        #[arg(long, conflicts_with_all = ["kind", "extremal"])]
        measure: Option<String>,
        /// Closed form in terms of 1 - H
        #[arg(long, value_enum, conflicts_with = "extremal")]
        kind: Option<Kind>,
        /// Extremal 1-invariant measure with Λ a unit atom at m^{-t}
        #[arg(long)]
        extremal: Option<f64>,
        /// Include state 0 (alpha < 0)
        #[arg(long)]
        true_measure: bool,
        /// Rescale Λ so that the result is a probability measure
        #[arg(long)]
        normalize: bool,
        /// Check the eigenvector and functional equations
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        k_report: Option<usize>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        eigen_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        fe_tol: f64,
    },
    /// Check a measure table against the eigenvector and functional equations
    Verify {
        #[command(flatten)]
        common: Common,
        /// Measure table written by `construct`
        #[arg(long)]
        input: PathBuf,
        /// Eigenvalue to test (default: the one recorded in the table)
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        k_report: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        z_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        eigen_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        fe_tol: f64,
    },
    /// Bin the rescaled measure m^{-alpha n} nu(p_n^{-1} .) against x^{-alpha} Λ(dx)
    Recover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 16)]
        bins: usize,
        /// Target Λ as JSON; enables the per-bin deviation check
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Hoppe's map from H to the QSD of eigenvalue m^alpha and back
    Hoppe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Partial sums of Joffe's recurrence series for the Q-process
    Joffe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Monte Carlo cross-checks
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = McMode::Qsd)]
        mode: McMode,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Generations for `--mode yaglom`
        #[arg(long, default_value_t = 5)]
        generations: usize,
        #[arg(long, default_value_t = 256)]
        k_report: usize,
        /// Largest accepted TV distance (default: three times the expected noise)
        #[arg(long)]
        tv_tol: Option<f64>,
    },
    /// Quadrature against Γ(-α)(a^α - 1) for Λ = dx/x
    GammaCheck {
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.9])]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.0, -0.5, 0.0, 0.3, 0.7])]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            print_error("InvalidArguments", first);
            return EXIT_INPUT;
        }
    };
    match dispatch(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            print_error(e.kind(), &e.to_string());
            EXIT_INPUT
        }
    }
}

fn print_error(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

struct Ctx {
    cfg: RunConfig,
    common: Common,
}

impl Ctx {
    fn new(common: Common) -> Result<Self> {
        let cfg = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(Self { cfg, common })
    }

    fn offspring(&self) -> Result<OffspringDistribution> {
        let spec = match &self.common.offspring {
            Some(s) => parse_json::<OffspringSpec>(s, "offspring")?,
            None => self.cfg.offspring.clone().unwrap_or(DEFAULT_OFFSPRING),
        };
        OffspringDistribution::from_spec(&spec)
    }

    fn order(&self) -> usize {
        self.common.order.or(self.cfg.order).unwrap_or(DEFAULT_ORDER)
    }

    fn alpha(&self, flag: Option<f64>) -> Result<f64> {
        flag.or(self.cfg.alpha).ok_or_else(|| Error::InvalidSpec("missing --alpha".into()))
    }

    fn measure(&self, flag: &Option<String>) -> Result<Option<MeasureSpec>> {
        match flag {
            Some(s) => Ok(Some(parse_json(s, "measure")?)),
            None => Ok(self.cfg.measure.clone()),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.common.out.clone().or_else(|| self.cfg.out.clone())
    }

    fn report(&self) -> Option<PathBuf> {
        self.common.report.clone().or_else(|| self.cfg.report.clone())
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("--{what}: {e}")))
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn flush(mut w: Box<dyn Write>) -> Result<()> {
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Writes the reports and returns whether all passed.
fn emit_reports(reports: &[VerificationReport], path: &Option<PathBuf>) -> Result<bool> {
    match path {
        Some(p) => {
            let text = serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.to_string()))?;
            std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        }
        None => {
            for r in reports {
                eprintln!("{}", json!({ "check_name": r.check_name, "residual": r.residual, "tolerance": r.tolerance, "passed": r.passed }));
            }
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Yaglom { common, tol } => cmd_yaglom(&Ctx::new(common)?, tol),
        Command::Construct {
            common,
            alpha,
            measure,
            kind,
            extremal,
            true_measure,
            normalize,
            verify,
            k_report,
            rel_tol,
            eigen_tol,
            fe_tol,
        } => {
            let ctx = Ctx::new(common)?;
            let dist = ctx.offspring()?;
            let k = ctx.order();
            let rel_tol = rel_tol.or(ctx.cfg.rel_tol).unwrap_or(1e-12);
            let nu = if let Some(t) = extremal {
                extremal_invariant_measure(&dist, t, k, rel_tol)?
            } else if let Some(kind) = kind {
                closed_form_measure(&dist, ctx.alpha(alpha)?, kind.into(), k)?
            } else {
                let alpha = ctx.alpha(alpha)?;
                let spec = ctx.measure(&measure)?.unwrap_or(MeasureSpec::LogUniform { c: 1.0 });
                let mut lambda = SelfSimilarMeasure::from_spec(&spec, dist.mean())?;
                if normalize {
                    lambda = normalize_for_qsd(&lambda, alpha)?;
                }
                if true_measure {
                    true_invariant_measure(&dist, alpha, &lambda, k, rel_tol)?
                } else {
                    invariant_measure(&dist, alpha, &lambda, k, rel_tol)?
                }
            };
            let mut w = open_out(&ctx.out())?;
            write_measure_csv(&mut w, &nu)?;
            flush(w)?;
            if !verify {
                return Ok(true);
            }
            let k_report = k_report.unwrap_or(k / 4).max(1);
            let reports = check_measure(&nu, &dist, nu.lambda, k_report, 0.95, eigen_tol, fe_tol)?;
            emit_reports(&reports, &ctx.report())
        }
        Command::Verify { common, input, lambda, k_report, z_max, eigen_tol, fe_tol } => {
            let ctx = Ctx::new(common)?;
            let dist = ctx.offspring()?;
            let nu = read_input(&input)?;
            let k_report = k_report.unwrap_or(nu.order() / 4).max(1);
            let reports = check_measure(&nu, &dist, lambda.unwrap_or(nu.lambda), k_report, z_max, eigen_tol, fe_tol)?;
            emit_reports(&reports, &ctx.report())
        }
        Command::Recover { common, input, n, lo, hi, bins, measure, tol } => {
            let ctx = Ctx::new(common)?;
            let dist = ctx.offspring()?;
            let nu = read_input(&input)?;
            let m = dist.mean();
            let bins = LogBins::new(lo.unwrap_or(m * m), hi.unwrap_or(1.0 / (m * m)), bins)?;
            let r = recover_lambda(&nu, nu.alpha, &dist, n, &bins)?;
            let target = ctx.measure(&measure)?.map(|s| SelfSimilarMeasure::from_spec(&s, m)).transpose()?;
            let mut rows = Vec::with_capacity(bins.count);
            let expected = target.as_ref().map(|l| r.target(l, nu.alpha));
            for (i, e) in r.edges.windows(2).enumerate() {
                let mut row = vec![e[0], e[1], r.masses[i]];
                if let Some(t) = &expected {
                    row.push(t[i]);
                }
                rows.push(row);
            }
            let columns: &[&str] = if expected.is_some() { &["lo", "hi", "mass", "target"] } else { &["lo", "hi", "mass"] };
            let mut w = open_out(&ctx.out())?;
            write_table(&mut w, &json!({ "n": n, "p_n": r.p_n, "alpha": nu.alpha, "lattice_points": r.lattice_points }), columns, &rows)?;
            flush(w)?;
            match target {
                Some(l) => {
                    let dev = r.relative_deviation(&l, nu.alpha);
                    let worst = dev.iter().copied().fold(0.0, f64::max);
                    emit_reports(&[VerificationReport::new("lambda_recovery", worst, tol).with_details(dev)], &ctx.report())
                }
                None => Ok(true),
            }
        }
        Command::Hoppe { common, alpha, tol } => {
            let ctx = Ctx::new(common)?;
            let dist = ctx.offspring()?;
            let grid = standard_grid();
            let r = hoppe_roundtrip(&dist, ctx.alpha(alpha)?, ctx.order(), &grid)?;
            let rows: Vec<Vec<f64>> = grid.iter().enumerate().map(|(i, &z)| vec![z, r.g_alpha[i], r.q_back[i]]).collect();
            let mut w = open_out(&ctx.out())?;
            write_table(&mut w, &json!({ "alpha": alpha, "m": dist.mean() }), &["z", "g_alpha", "q_back"], &rows)?;
            flush(w)?;
            emit_reports(&[r.report(tol)], &ctx.report())
        }
        Command::Joffe { common, n } => {
            let ctx = Ctx::new(common)?;
            let dist = ctx.offspring()?;
            let s = joffe_partial_sums(&dist, n);
            let rows: Vec<Vec<f64>> = s.iter().enumerate().map(|(i, &v)| vec![(i + 1) as f64, v]).collect();
            let header = json!({
                "m": dist.mean(),
                "criterion": "the Q-process is recurrent iff S_n diverges; finite partial sums do not decide this",
            });
            let mut w = open_out(&ctx.out())?;
            write_table(&mut w, &header, &["n", "s_n"], &rows)?;
            flush(w)?;
            Ok(true)
        }
        Command::Mc { common, mode, alpha, measure, samples, seed, generations, k_report, tv_tol } => {
            let ctx = Ctx::new(common)?;
            cmd_mc(&ctx, mode, alpha, &measure, samples, seed, generations, k_report, tv_tol)
        }
        Command::GammaCheck { a, alpha, rel_tol, tol, out, report } => {
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for &al in &alpha {
                for &aa in &a {
                    let c = gamma_integral_check(aa, al, rel_tol)?;
                    rows.push(vec![c.a, c.alpha, c.numeric, c.closed_form, c.rel_error]);
                    reports.push(VerificationReport::new(format!("gamma_integral(a={aa},alpha={al})"), c.rel_error, tol));
                }
            }
            let mut w = open_out(&out)?;
            write_table(&mut w, &json!({ "measure": "dx/x" }), &["a", "alpha", "numeric", "closed_form", "rel_error"], &rows)?;
            flush(w)?;
            emit_reports(&reports, &report)
        }
    }
}

fn cmd_yaglom(ctx: &Ctx, tol: f64) -> Result<bool> {
    let dist = ctx.offspring()?;
    let y = yaglom_limit(&dist, ctx.order(), 1e-14, 100_000)?;
    let rows: Vec<Vec<f64>> = y.nu_min.iter().enumerate().map(|(i, &v)| vec![(i + 1) as f64, v]).collect();
    let header = json!({ "m": y.m, "iterations": y.iterations, "sup_delta": y.sup_delta, "order": y.order() });
    let mut w = open_out(&ctx.out())?;
    write_table(&mut w, &header, &["k", "nu_min_k"], &rows)?;
    flush(w)?;
    let mut reports = h_identity_report(&y, &dist, &standard_grid()).reports(tol, tol * 0.1);
    let ratio = y.ratio_seq.last().map_or(0.0, |r| (r - y.m).abs());
    reports.push(VerificationReport::new("survival_ratio", ratio, 1e-6));
    emit_reports(&reports, &ctx.report())
}

fn read_input(path: &Path) -> Result<InvariantMeasure> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_measure_csv(BufReader::new(f))
}

fn check_measure(
    nu: &InvariantMeasure,
    dist: &OffspringDistribution,
    lambda: f64,
    k_report: usize,
    z_max: f64,
    eigen_tol: f64,
    fe_tol: f64,
) -> Result<Vec<VerificationReport>> {
    let k = nu.order();
    Ok(vec![
        eigen_residual(nu, dist, lambda, k, k_report)?.with_tolerance(eigen_tol),
        functional_equation_residual(nu, dist, lambda, &grid_up_to(0.05, z_max))?.with_tolerance(fe_tol),
    ])
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    ctx: &Ctx,
    mode: McMode,
    alpha: Option<f64>,
    measure: &Option<String>,
    samples: Option<u64>,
    seed: Option<u64>,
    generations: usize,
    k_report: usize,
    tv_tol: Option<f64>,
) -> Result<bool> {
    let dist = ctx.offspring()?;
    let k = ctx.order();
    let samples = samples.or(ctx.cfg.samples).unwrap_or(100_000);
    let seed = seed.or(ctx.cfg.seed).unwrap_or(0);
    let k_report = k_report.min(k);
    let qsd = || -> Result<(SubordinatorSpec, InvariantMeasure)> {
        let alpha = ctx.alpha(alpha)?;
        let spec = ctx.measure(measure)?.unwrap_or(MeasureSpec::LogUniform { c: 1.0 });
        let s = SubordinatorSpec::normalized(alpha, &SelfSimilarMeasure::from_spec(&spec, dist.mean())?)?;
        let nu = invariant_measure(&dist, alpha, s.lambda().expect("jump part"), k, 1e-12)?;
        Ok((s, nu))
    };
    let report: MCReport = match mode {
        McMode::Qsd => {
            let (spec, nu) = qsd()?;
            let y = yaglom_limit(&dist, k, 1e-14, 100_000)?;
            let sampler = QsdSampler::new(spec, &y.nu_min, k)?;
            qsd_sampling_test(&sampler, &nu.nu[..k_report], samples, seed)
        }
        McMode::OneStep => {
            let (_, nu) = qsd()?;
            quasi_stationarity_test(&dist, &nu.nu, k_report, samples, seed)?
        }
        McMode::Yaglom => yaglom_mc(&dist, generations, samples, seed)?,
    };
    let tol = tv_tol.or(ctx.cfg.tol).unwrap_or(3.0 * report.tv_noise);
    let mut w = open_out(&ctx.out())?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w).map_err(|e| Error::Io(e.to_string()))?;
    flush(w)?;
    emit_reports(&[VerificationReport::new("tv_distance", report.tv_distance, tol)], &ctx.report())
}
