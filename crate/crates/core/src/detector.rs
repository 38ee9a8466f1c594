//! Estimation of the set of riskiest directions.
//!
//! [`scan`] works on data: every grid direction `v` gets the smallest ball
//! `B(v, s_v)` holding a fixed share of the observations, and the ball is
//! accepted when `ĝ(k, B(v, s_v)) <= 1 + c`. [`algorithm_estimate`] works on
//! an exact limit oracle `G` instead and intersects, over the grid, the
//! smallest balls around `v` whose complements are not dominant.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sphere::{
    ball_complement, direction_grid_seeded, dist, CapSet, GeodesicBall, UnitVector, DEFAULT_GRID_SEED,
};
use crate::tail::{resolve_threshold, GHatEvaluator, PolarSample, ThresholdSpec, MIN_RELIABLE_COUNT};

/// Fewest exceedances a scan will run on.
pub const MIN_SCAN_EXCEEDANCES: usize = 20;

/// Default bisection tolerance (radians) for [`algorithm_av`].
pub const DEFAULT_BISECTION_TOL: f64 = 1e-4;

/// A ranking level is only computed on at least this many observations.
pub const MIN_RANKING_SAMPLE: usize = 1000;

/// An estimate covering less than this share of the sphere is flagged.
pub const NEGLIGIBLE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// A ball is accepted when `ĝ <= 1 + tolerance_c`.
    pub tolerance_c: f64,
    pub threshold: ThresholdSpec,
    /// Share of all observations inside each scanning ball.
    pub ball_mass_q: f64,
    pub grid_m: usize,
    /// Seed of the direction grid for `d > 3`.
    pub seed: u64,
    /// Rejections with fewer exceedances inside the ball are not subtracted.
    pub min_reliable_count: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            tolerance_c: 0.5,
            threshold: ThresholdSpec::default(),
            ball_mass_q: 0.1,
            grid_m: 360,
            seed: DEFAULT_GRID_SEED,
            min_reliable_count: MIN_RELIABLE_COUNT,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance_c > 0.0 && self.tolerance_c.is_finite()) {
            return Err(invalid(
                "tolerance_c",
                format!("must be positive, got {}", self.tolerance_c),
            ));
        }
        if !(self.ball_mass_q > 0.0 && self.ball_mass_q < 1.0) {
            return Err(invalid("ball_mass_q", format!("{} not in (0, 1)", self.ball_mass_q)));
        }
        if self.grid_m < 4 {
            return Err(invalid(
                "grid_m",
                format!("at least 4 directions needed, got {}", self.grid_m),
            ));
        }
        self.threshold.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionVerdict {
    pub v: UnitVector,
    /// Radius of the open scanning ball.
    pub s_v: f64,
    pub g_value: f64,
    /// Exceedances inside the ball.
    pub count_in: usize,
    pub accepted: bool,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    EmptyEstimate,
    NegligibleEstimate { fraction: f64 },
    AllUnreliable,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::EmptyEstimate => write!(f, "the estimate is empty"),
            Warning::NegligibleEstimate { fraction } => {
                write!(f, "the estimate covers only {:.3}% of the sphere", 100.0 * fraction)
            }
            Warning::AllUnreliable => write!(f, "every verdict rests on fewer exceedances than the reliability floor"),
        }
    }
}

/// Result of one [`scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateS {
    /// Accepted balls minus reliably rejected balls.
    pub estimate: CapSet,
    /// One per grid direction, in grid order.
    pub verdicts: Vec<DirectionVerdict>,
    pub config: DetectorConfig,
    /// Resolved radius threshold `k`.
    pub threshold_k: f64,
    pub n_exceedances: usize,
    pub warnings: Vec<Warning>,
}

/// Radius `s_v` of the smallest open ball around `v` holding `⌈n q⌉`
/// directions: the `⌈n q⌉`-th smallest distance, moved up by one ulp.
pub fn smallest_mass_ball(s: &PolarSample, v: &UnitVector, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q", format!("{q} not in (0, 1)")));
    }
    if v.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: v.dim(),
        });
    }
    let nq = s.len() as f64 * q;
    if nq < 1.0 {
        return Err(invalid("q", format!("n q = {nq} < 1")));
    }
    let m = (nq - 1e-9).ceil() as usize;
    let mut d: Vec<f64> = s.directions().iter().map(|u| dist(v, u)).collect();
    let (_, r, _) = d.select_nth_unstable_by(m - 1, f64::total_cmp);
    Ok(r.next_up().min(PI))
}

/// The finite-sample accept/reject scan over a direction grid.
pub fn scan(s: &PolarSample, cfg: &DetectorConfig) -> Result<EstimateS> {
    cfg.validate()?;
    let k = resolve_threshold(s, cfg.threshold)?;
    let eval = GHatEvaluator::new(s, k)?;
    if eval.n_exceedances() < MIN_SCAN_EXCEEDANCES {
        return Err(Error::InsufficientExceedances {
            found: eval.n_exceedances(),
            required: MIN_SCAN_EXCEEDANCES,
        });
    }
    let d = s.dim();
    let grid = direction_grid_seeded(d, cfg.grid_m, cfg.seed)?;
    let verdicts = grid
        .into_par_iter()
        .map(|v| {
            let s_v = smallest_mass_ball(s, &v, cfg.ball_mass_q)?;
            let g = eval.eval_ball(&GeodesicBall::open(v.clone(), s_v)?);
            Ok(DirectionVerdict {
                v,
                s_v,
                g_value: g.value,
                count_in: g.count_in,
                accepted: g.value <= 1.0 + cfg.tolerance_c,
                reliable: g.count_in >= cfg.min_reliable_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ball = |v: &DirectionVerdict| GeodesicBall::open(v.v.clone(), v.s_v);
    let positive = verdicts
        .iter()
        .filter(|v| v.accepted)
        .map(ball)
        .collect::<Result<Vec<_>>>()?;
    let negative = verdicts
        .iter()
        .filter(|v| !v.accepted && v.reliable)
        .map(ball)
        .collect::<Result<Vec<_>>>()?;
    let estimate = CapSet::from_balls(d, positive, negative)?;

    let mut warnings = Vec::new();
    if verdicts.iter().all(|v| !v.reliable) {
        warnings.push(Warning::AllUnreliable);
    }
    warnings.extend(size_warning(&estimate));
    Ok(EstimateS {
        estimate,
        verdicts,
        config: cfg.clone(),
        threshold_k: k,
        n_exceedances: eval.n_exceedances(),
        warnings,
    })
}

fn size_warning(estimate: &CapSet) -> Option<Warning> {
    if estimate.is_empty() {
        return Some(Warning::EmptyEstimate);
    }
    let fraction = estimate.measure_fraction(20_000);
    (fraction < NEGLIGIBLE_FRACTION).then_some(Warning::NegligibleEstimate { fraction })
}

/// Exact limit `G(A) = lim_k g(k, A)`, valued in `[1, ∞]`.
pub trait GOracle: Sync {
    fn g(&self, a: &CapSet) -> Result<f64>;
}

/// Outcome of the per-direction step of the oracle algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AvOutcome {
    /// `-v` lies in the dominant set.
    Full,
    /// No ball around `v` has a non-dominant complement.
    Empty,
    /// Smallest radius whose ball complement is non-dominant.
    Radius(f64),
}

fn complement_of_ball(v: &UnitVector, r: f64) -> Result<CapSet> {
    Ok(CapSet::from_ball(ball_complement(&GeodesicBall::open(v.clone(), r)?)))
}

/// `r_v = inf { r : G(B(v, r)^c) > 1 }` by bisection to within `tol`.
///
/// The returned radius is the midpoint of the final bracket, so
/// `G(B(v, r_v + tol)^c) > 1` and `G(B(v, r_v - tol)^c) = 1`.
pub fn av_outcome(oracle: &dyn GOracle, v: &UnitVector, tol: f64) -> Result<AvOutcome> {
    if !(tol > 0.0 && tol < PI / 4.0) {
        return Err(invalid("tol", format!("{tol} not in (0, π/4)")));
    }
    let edge = tol * 1e-2;
    let g = |r: f64| oracle.g(&complement_of_ball(v, r)?);
    let (mut lo, mut hi) = (edge, PI - edge);
    let mut g_hi = g(hi)?;
    if g_hi <= 1.0 {
        return Ok(AvOutcome::Full);
    }
    let mut g_lo = g(lo)?;
    if g_lo > 1.0 {
        return Ok(AvOutcome::Empty);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid < g_lo || g_mid > g_hi {
            return Err(Error::NonMonotoneOracle {
                lo,
                hi: mid,
                g_lo,
                g_hi: g_mid,
            });
        }
        if g_mid > 1.0 {
            hi = mid;
            g_hi = g_mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    Ok(AvOutcome::Radius(0.5 * (lo + hi)))
}

/// `A_v`: the full sphere, the empty set, or the open ball `B(v, r_v)`.
pub fn algorithm_av(oracle: &dyn GOracle, v: &UnitVector, tol: f64) -> Result<CapSet> {
    Ok(match av_outcome(oracle, v, tol)? {
        AvOutcome::Full => CapSet::full(v.dim()),
        AvOutcome::Empty => CapSet::empty(v.dim()),
        AvOutcome::Radius(r) => CapSet::from_ball(GeodesicBall::open(v.clone(), r)?),
    })
}

/// `∩_v A_v` over the grid, written as the sphere minus the closed
/// complements `B̄(-v, π - r_v)`.
pub fn algorithm_estimate(oracle: &dyn GOracle, grid: &[UnitVector], tol: f64) -> Result<CapSet> {
    let Some(first) = grid.first() else {
        return Err(invalid("grid", "empty direction grid"));
    };
    let d = first.dim();
    let outcomes = grid
        .par_iter()
        .map(|v| av_outcome(oracle, v, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut negative = Vec::new();
    for (v, o) in grid.iter().zip(outcomes) {
        match o {
            AvOutcome::Empty => return Ok(CapSet::empty(d)),
            AvOutcome::Full => {}
            AvOutcome::Radius(r) => negative.push(ball_complement(&GeodesicBall::open(v.clone(), r)?)),
        }
    }
    CapSet::from_balls(d, vec![GeodesicBall::full(d)], negative)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum StopReason {
    MaxLevels,
    EmptyEstimate,
    SampleTooSmall,
    /// A level after the first could not be computed.
    ScanFailed(String),
}

/// Successive estimates, each computed after deleting the observations
/// whose directions fall in the earlier ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRanking {
    pub levels: Vec<EstimateS>,
    /// Share of each level's input sample that fell in its estimate.
    pub removed_fractions: Vec<f64>,
    pub stop: StopReason,
}

pub fn risk_ranking(s: &PolarSample, cfg: &DetectorConfig, max_levels: usize) -> Result<RiskRanking> {
    if max_levels < 1 {
        return Err(invalid("max_levels", "at least one level required"));
    }
    let mut levels: Vec<EstimateS> = Vec::new();
    let mut removed_fractions = Vec::new();
    let mut current = s.clone();
    let stop = loop {
        let mut level = match scan(&current, cfg) {
            Ok(l) => l,
            Err(e) if levels.is_empty() => return Err(e),
            Err(e) => break StopReason::ScanFailed(e.to_string()),
        };
        let raw = level.estimate.clone();
        if !levels.is_empty() {
            level.estimate = subtract_levels(&raw, &levels)?;
            level
                .warnings
                .retain(|w| !matches!(w, Warning::EmptyEstimate | Warning::NegligibleEstimate { .. }));
            level.warnings.extend(size_warning(&level.estimate));
        }
        let before = current.len();
        let kept = current.filter_directions(|u| !raw.contains(u));
        let removed = before - kept.as_ref().map_or(0, |k| k.len());
        removed_fractions.push(removed as f64 / before as f64);
        let empty = level.estimate.is_empty();
        levels.push(level);
        if empty {
            break StopReason::EmptyEstimate;
        }
        if levels.len() >= max_levels {
            break StopReason::MaxLevels;
        }
        match kept {
            Ok(k) if k.len() >= MIN_RANKING_SAMPLE => current = k,
            _ => break StopReason::SampleTooSmall,
        }
    };
    Ok(RiskRanking {
        levels,
        removed_fractions,
        stop,
    })
}

// Exact on the circle. In higher dimensions the earlier positive balls are
// removed whole, which can remove more than the earlier estimates.
fn subtract_levels(estimate: &CapSet, earlier: &[EstimateS]) -> Result<CapSet> {
    if estimate.arc_form().is_some() {
        return earlier
            .iter()
            .try_fold(estimate.clone(), |acc, l| acc.difference(&l.estimate));
    }
    let mut negative = estimate.negative().to_vec();
    for l in earlier {
        negative.extend(l.estimate.positive().iter().cloned());
    }
    CapSet::from_balls(estimate.dim(), estimate.positive().to_vec(), negative)
}
