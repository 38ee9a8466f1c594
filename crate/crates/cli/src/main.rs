//! `riskdir`: estimate the riskiest directions of multivariate heavy-tailed
//! data from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riskdir::detector::{algorithm_estimate, risk_ranking, scan, DEFAULT_BISECTION_TOL};
use riskdir::io::{
    diagnostic_for_report, ingest_csv, load_model, render_plot_csv, render_svg, write_sample_csv, EstimateReport,
    OracleCheckReport, RegionReport, RunConfig, SampleSummary,
};
use riskdir::sphere::{direction_grid_seeded, geodesic_dist, hausdorff_dist, UnitVector};
use riskdir::synth::{perturb_directions, sample_cone_mixture, true_s, AnalyticG};
use riskdir::tail::PolarSample;
use riskdir::Error;

#[derive(Parser)]
#[command(
    name = "riskdir",
    version,
    about = "Estimate the riskiest directions of heavy-tailed data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the data once and report the estimated set of riskiest directions.
    Detect(Opts),
    /// Rank directions by repeated scans, removing each level's observations.
    Rank(Opts),
    /// Draw a sample from a model and write it as CSV.
    Simulate(Opts),
    /// Check the radial tail for heavy-tailedness.
    Diagnose(Opts),
    /// Run the oracle algorithm on a model and compare with its true set.
    OracleCheck(Opts),
}

#[derive(Args)]
struct Opts {
    /// File of `key = value` lines; keys are the flag names without dashes.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV of observations, one per row.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model file, or `preset:<name>`.
    #[arg(long)]
    model: Option<String>,
    /// Order `p` of the norm giving the radius.
    #[arg(long)]
    norm_p: Option<f64>,
    /// Accept a ball when `ĝ <= 1 + c`.
    #[arg(long)]
    tolerance_c: Option<f64>,
    /// Radius threshold as a quantile of the radii.
    #[arg(long, conflicts_with = "threshold_abs")]
    threshold_quantile: Option<f64>,
    /// Absolute radius threshold.
    #[arg(long)]
    threshold_abs: Option<f64>,
    /// Share of observations in each scanning ball.
    #[arg(long)]
    ball_mass: Option<f64>,
    /// Number of grid directions.
    #[arg(long)]
    grid: Option<usize>,
    /// Seed of simulation and perturbation.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of ranking levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Use log differences of consecutive rows.
    #[arg(long)]
    log_diff: bool,
    /// Keep rows with all components negative and negate them.
    #[arg(long)]
    negative_quadrant: bool,
    /// Move each direction randomly by up to this many radians.
    #[arg(long)]
    perturb: Option<f64>,
    /// JSON report path; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Plot path: SVG for two-dimensional data, CSV otherwise or when the
    /// path ends in `.csv`.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Sample size drawn from a model.
    #[arg(long)]
    n: Option<usize>,
    /// Output path of `simulate`; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = Vec::new();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut push = |k: &'static str, x: Option<String>| {
            if let Some(x) = x {
                v.push((k, x));
            }
        };
        push("input", path(&self.input));
        push("model", self.model.clone());
        push("norm-p", self.norm_p.map(|x| x.to_string()));
        push("tolerance-c", self.tolerance_c.map(|x| x.to_string()));
        push("threshold-quantile", self.threshold_quantile.map(|x| x.to_string()));
        push("threshold-abs", self.threshold_abs.map(|x| x.to_string()));
        push("ball-mass", self.ball_mass.map(|x| x.to_string()));
        push("grid", self.grid.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("levels", self.levels.map(|x| x.to_string()));
        push("log-diff", self.log_diff.then(|| "true".into()));
        push("negative-quadrant", self.negative_quadrant.then(|| "true".into()));
        push("perturb", self.perturb.map(|x| x.to_string()));
        push("report", path(&self.report));
        push("plot", path(&self.plot));
        push("n", self.n.map(|x| x.to_string()));
        push("output", path(&self.output));
        v
    }

    /// Defaults, then the config file, then flags.
    fn run_config(&self) -> riskdir::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &self.config {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            cfg.apply_file_text(&text)?;
        }
        let pairs = self.pairs();
        cfg.apply(pairs.iter().map(|(k, v)| (*k, v.as_str())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::DimensionTooSmall(_)
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedCombination(..)
        | Error::NonInvertibleHazard(_)
        | Error::NonMonotoneOracle { .. } => 2,
        Error::Malformed { .. } | Error::Data(_) | Error::ZeroRow(_) | Error::Io(_) => 3,
        Error::InsufficientExceedances { .. }
        | Error::NoExceedances(_)
        | Error::AllExceed(_)
        | Error::InsufficientTail(_) => 4,
        Error::DegenerateGeodesic | Error::EmptySet | Error::Unrepresentable => 1,
    }
}

fn write_out(path: Option<&Path>, text: &str) -> riskdir::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The sample to analyse and its summary.
fn load_sample(cfg: &RunConfig) -> riskdir::Result<(PolarSample, SampleSummary)> {
    cfg.require_one_source()?;
    let (s, summary) = match (&cfg.input, &cfg.model) {
        (Some(path), _) => {
            let ing = ingest_csv(path, cfg.norm_p, cfg.preprocess)?;
            let summary = SampleSummary::from_ingest(&ing);
            if ing.zero_rows_dropped > 0 {
                eprintln!("note: dropped {} all-zero rows", ing.zero_rows_dropped);
            }
            (ing.sample, summary)
        }
        (None, Some(m)) => {
            let s = sample_cone_mixture(&load_model(m)?, cfg.n, cfg.seed)?;
            let summary = SampleSummary::simulated(&s);
            (s, summary)
        }
        (None, None) => unreachable!(),
    };
    let s = match cfg.perturb {
        Some(r) => perturb_directions(&s, r, perturb_seed(cfg.seed))?,
        None => s,
    };
    Ok((s, summary))
}

/// Perturbation draws from its own seed so that it is independent of the
/// simulation draws.
fn perturb_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn write_plot(cfg: &RunConfig, report: &EstimateReport) -> riskdir::Result<()> {
    let Some(path) = &cfg.plot else {
        return Ok(());
    };
    let as_csv = report.sample.dim != 2 || path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if as_csv {
        render_plot_csv(report)
    } else {
        render_svg(report)?
    };
    write_out(Some(path), &text)
}

fn finish_report(cfg: &RunConfig, report: &EstimateReport) -> riskdir::Result<()> {
    for (j, level) in report.levels.iter().enumerate() {
        for w in &level.warnings {
            eprintln!("warning: level {}: {w}", j + 1);
        }
    }
    write_out(cfg.report.as_deref(), &report.to_json())?;
    write_plot(cfg, report)
}

fn cmd_detect(cfg: &RunConfig) -> riskdir::Result<u8> {
    let (s, summary) = load_sample(cfg)?;
    let est = scan(&s, &cfg.detector)?;
    let report = EstimateReport::new("detect", cfg, summary, &s, std::slice::from_ref(&est), None);
    finish_report(cfg, &report)?;
    Ok(0)
}

fn cmd_rank(cfg: &RunConfig) -> riskdir::Result<u8> {
    let (s, summary) = load_sample(cfg)?;
    let ranking = risk_ranking(&s, &cfg.detector, cfg.levels)?;
    let report = EstimateReport::new(
        "rank",
        cfg,
        summary,
        &s,
        &ranking.levels,
        Some((&ranking.removed_fractions, &ranking.stop)),
    );
    finish_report(cfg, &report)?;
    Ok(0)
}

fn cmd_simulate(cfg: &RunConfig) -> riskdir::Result<u8> {
    if cfg.input.is_some() {
        return Err(Error::Config("simulate takes --model, not --input".into()));
    }
    let model = cfg
        .model
        .as_deref()
        .ok_or_else(|| Error::Config("simulate needs --model".into()))?;
    let s = sample_cone_mixture(&load_model(model)?, cfg.n, cfg.seed)?;
    let s = match cfg.perturb {
        Some(r) => perturb_directions(&s, r, perturb_seed(cfg.seed))?,
        None => s,
    };
    write_out(cfg.output.as_deref(), &write_sample_csv(&s))?;
    Ok(0)
}

fn cmd_diagnose(cfg: &RunConfig) -> riskdir::Result<u8> {
    let (s, _) = load_sample(cfg)?;
    let d = diagnostic_for_report(&s).map_err(Error::InsufficientTail)?;
    let mut text = serde_json::to_string_pretty(&d).expect("diagnostic serializes");
    text.push('\n');
    write_out(cfg.report.as_deref(), &text)?;
    eprintln!(
        "hazard ratio slope {:.4} ({}); {:.0}% of curvature checks negative ({})",
        d.ratio_slope,
        if d.ratio_decreasing {
            "decreasing"
        } else {
            "not decreasing"
        },
        100.0 * d.negative_curvature_fraction,
        if d.concave { "concave" } else { "not concave" }
    );
    Ok(0)
}

/// Largest distance from a dense probe set to the nearest grid direction.
fn covering_radius(grid: &[UnitVector]) -> riskdir::Result<f64> {
    let d = grid[0].dim();
    let probes = direction_grid_seeded(d, 20_000, 17)?;
    let mut worst = 0.0f64;
    for p in &probes {
        let mut best = f64::INFINITY;
        for g in grid {
            best = best.min(geodesic_dist(p, g)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

fn cmd_oracle_check(cfg: &RunConfig) -> riskdir::Result<u8> {
    if cfg.input.is_some() {
        return Err(Error::Config("oracle-check takes --model, not --input".into()));
    }
    let name = cfg
        .model
        .as_deref()
        .ok_or_else(|| Error::Config("oracle-check needs --model".into()))?;
    let model = load_model(name)?;
    let oracle = AnalyticG::new(&model)?;
    let grid = direction_grid_seeded(model.dim(), cfg.detector.grid_m, cfg.detector.seed)?;
    let est = algorithm_estimate(&oracle, &grid, DEFAULT_BISECTION_TOL)?;
    let truth = true_s(&model)?;
    let hausdorff = hausdorff_dist(&est.closure(), &truth, 4000).unwrap_or(f64::INFINITY);
    let spacing = if model.dim() == 2 {
        std::f64::consts::TAU / grid.len() as f64
    } else {
        covering_radius(&grid)?
    };
    let bound = spacing + 2.0 * DEFAULT_BISECTION_TOL;
    let report = OracleCheckReport {
        model: name.to_string(),
        grid_m: grid.len(),
        tolerance: DEFAULT_BISECTION_TOL,
        hausdorff,
        bound,
        within_bound: hausdorff <= bound,
        estimate: RegionReport::new(&est),
        truth: RegionReport::new(&truth),
    };
    println!(
        "hausdorff {hausdorff:.6} bound {bound:.6} {}",
        if report.within_bound { "ok" } else { "exceeded" }
    );
    if let Some(p) = &cfg.report {
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        write_out(Some(p), &text)?;
    }
    Ok(if report.within_bound { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, run): (&Opts, fn(&RunConfig) -> riskdir::Result<u8>) = match &cli.command {
        Command::Detect(o) => (o, cmd_detect),
        Command::Rank(o) => (o, cmd_rank),
        Command::Simulate(o) => (o, cmd_simulate),
        Command::Diagnose(o) => (o, cmd_diagnose),
        Command::OracleCheck(o) => (o, cmd_oracle_check),
    };
    match opts.run_config().and_then(|cfg| run(&cfg)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
