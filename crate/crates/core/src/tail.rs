//! Polar decomposition, empirical hazard and the exceedance statistic `ĝ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sphere::{CapSet, GeodesicBall, UnitVector};

/// Exceedance counts inside a set below this are reported as low-count.
pub const MIN_RELIABLE_COUNT: usize = 10;

/// Observations split into radii (under an `l_p` norm) and `l_2` unit
/// directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSample {
    radii: Vec<f64>,
    directions: Vec<UnitVector>,
    norm_p: f64,
    sorted_index: Vec<usize>,
    desc_radii: Vec<f64>,
}

impl PolarSample {
    /// Builds a sample from already decomposed observations.
    pub fn new(radii: Vec<f64>, directions: Vec<UnitVector>, norm_p: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(invalid("radii", "sample is empty"));
        }
        if radii.len() != directions.len() {
            return Err(invalid(
                "directions",
                format!("{} radii but {} directions", radii.len(), directions.len()),
            ));
        }
        if !(norm_p >= 1.0) {
            return Err(invalid("norm_p", format!("must be >= 1, got {norm_p}")));
        }
        if let Some(i) = radii.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::ZeroRow(i));
        }
        let d = directions[0].dim();
        if let Some(u) = directions.iter().find(|u| u.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.dim(),
            });
        }
        let mut sorted_index: Vec<usize> = (0..radii.len()).collect();
        sorted_index.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]).then(a.cmp(&b)));
        let desc_radii = sorted_index.iter().map(|&i| radii[i]).collect();
        Ok(PolarSample {
            radii,
            directions,
            norm_p,
            sorted_index,
            desc_radii,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.directions[0].dim()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn directions(&self) -> &[UnitVector] {
        &self.directions
    }

    pub fn norm_p(&self) -> f64 {
        self.norm_p
    }

    /// Indices ordering the radii from largest to smallest.
    pub fn sorted_index(&self) -> &[usize] {
        &self.sorted_index
    }

    /// Number of radii strictly greater than `k`.
    pub fn count_above(&self, k: f64) -> usize {
        self.desc_radii.partition_point(|&r| r > k)
    }

    /// The observations for which `keep(direction)` is true.
    pub fn filter_directions(&self, keep: impl Fn(&UnitVector) -> bool) -> Result<PolarSample> {
        let (radii, directions): (Vec<f64>, Vec<UnitVector>) = self
            .radii
            .iter()
            .zip(&self.directions)
            .filter(|(_, u)| keep(u))
            .map(|(r, u)| (*r, u.clone()))
            .unzip();
        PolarSample::new(radii, directions, self.norm_p)
    }
}

/// `‖x‖_p`.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|c| c.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|c| c * c).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        x.iter().fold(0.0, |m, c| m.max(c.abs()))
    } else {
        let m = x.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|c| (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Splits each row into `R = ‖x‖_p` and the `l_2` direction `x / ‖x‖_2`.
pub fn polar_decompose(raw: &[Vec<f64>], p: f64) -> Result<PolarSample> {
    if raw.is_empty() {
        return Err(invalid("raw", "no observations"));
    }
    let d = raw[0].len();
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if !(p >= 1.0) {
        return Err(invalid("norm_p", format!("must be >= 1, got {p}")));
    }
    let mut radii = Vec::with_capacity(raw.len());
    let mut directions = Vec::with_capacity(raw.len());
    for (i, row) in raw.iter().enumerate() {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        let r = lp_norm(row, p);
        if r == 0.0 {
            return Err(Error::ZeroRow(i));
        }
        if !r.is_finite() {
            return Err(invalid("raw", format!("non-finite value in row {i}")));
        }
        radii.push(r);
        directions.push(UnitVector::new(row.clone())?);
    }
    PolarSample::new(radii, directions, p)
}

/// How the radius threshold `k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// Level `q` in `(0, 1)`: the top `⌈n (1 - q)⌉` radii exceed `k`.
    Quantile(f64),
    /// A fixed radius.
    Absolute(f64),
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec::Quantile(0.995)
    }
}

impl ThresholdSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdSpec::Quantile(q) if !(q > 0.0 && q < 1.0) => {
                Err(invalid("threshold", format!("quantile {q} not in (0, 1)")))
            }
            ThresholdSpec::Absolute(k) if !(k > 0.0 && k.is_finite()) => {
                Err(invalid("threshold", format!("absolute threshold {k} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Number of exceedances requested by a quantile level on `n` points.
pub fn quantile_exceedances(n: usize, q: f64) -> usize {
    ((n as f64) * (1.0 - q) - 1e-9).ceil().max(1.0) as usize
}

/// Resolves a threshold to a radius `k`.
///
/// For a quantile level `q` with `m = ⌈n (1 - q)⌉`, `k` is the `(m + 1)`-th
/// largest radius, so that exactly `m` radii exceed it when there are no
/// ties.
pub fn resolve_threshold(s: &PolarSample, spec: ThresholdSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        ThresholdSpec::Absolute(k) => Ok(k),
        ThresholdSpec::Quantile(q) => {
            let m = quantile_exceedances(s.len(), q);
            if m >= s.len() {
                return Err(Error::InsufficientExceedances {
                    found: 0,
                    required: m + 1,
                });
            }
            Ok(s.desc_radii[m])
        }
    }
}

/// Knots `(k, h_n(k))` of the empirical hazard `h_n(k) = -log(#{R > k} / n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    pub knots: Vec<(f64, f64)>,
    /// Requested `k` at or above the largest radius (no exceedances).
    pub omitted: Vec<f64>,
}

pub fn empirical_hazard(s: &PolarSample, ks: &[f64]) -> HazardCurve {
    let n = s.len() as f64;
    let mut knots = Vec::new();
    let mut omitted = Vec::new();
    for &k in ks {
        let c = s.count_above(k);
        if c == 0 {
            omitted.push(k);
        } else {
            knots.push((k, -(c as f64 / n).ln()));
        }
    }
    HazardCurve { knots, omitted }
}

/// Advisory check of heavy-tailedness on the upper tail of the radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    /// Least-squares slope of `h_n(k) / k` against `k` over the knots.
    pub ratio_slope: f64,
    /// `h_n(k) / k` trends downwards.
    pub ratio_decreasing: bool,
    /// Fraction of second differences of `h_n` that are significantly
    /// negative.
    pub negative_curvature_fraction: f64,
    /// More than half of the second differences are significantly negative.
    pub concave: bool,
    pub hazard: HazardCurve,
}

const DIAGNOSTIC_KNOTS: usize = 6;

/// Hazard shape over the largest `upper_fraction` of the radii.
///
/// Knots are spaced geometrically from the radius bounding the upper
/// fraction up to the radius exceeded by 5% of it. A second difference of
/// the hazard counts as negative only when it lies more than one standard
/// error below zero; `h_n` increments over disjoint intervals are nearly
/// independent with variance `1/N_hi - 1/N_lo`.
pub fn heavy_tail_diagnostic(s: &PolarSample, upper_fraction: f64) -> Result<TailDiagnostic> {
    if !(upper_fraction > 0.0 && upper_fraction <= 0.5) {
        return Err(invalid("upper_fraction", format!("{upper_fraction} not in (0, 0.5]")));
    }
    let n = s.len();
    let m = ((n as f64) * upper_fraction).floor() as usize;
    if m < 100 {
        return Err(Error::InsufficientTail(format!(
            "{m} points in the upper fraction, at least 100 required"
        )));
    }
    let top = (m / 20).max(10);
    let k0 = s.desc_radii[m];
    let k1 = s.desc_radii[top];
    if !(k1 > k0) || !(k0 > 0.0) {
        return Err(Error::InsufficientTail("too few distinct tail radii".into()));
    }
    let ratio = (k1 / k0).powf(1.0 / (DIAGNOSTIC_KNOTS - 1) as f64);
    let ks: Vec<f64> = (0..DIAGNOSTIC_KNOTS).map(|i| k0 * ratio.powi(i as i32)).collect();
    let hazard = empirical_hazard(s, &ks);
    if hazard.knots.len() < 3 {
        return Err(Error::InsufficientTail("too few distinct tail radii".into()));
    }
    let counts: Vec<f64> = hazard.knots.iter().map(|(k, _)| s.count_above(*k) as f64).collect();

    let xs: Vec<f64> = hazard.knots.iter().map(|(k, _)| *k).collect();
    let ys: Vec<f64> = hazard.knots.iter().map(|(k, h)| h / k).collect();
    let ratio_slope = ls_slope(&xs, &ys);

    let pts = &hazard.knots;
    let mut negative = 0;
    let total = pts.len() - 2;
    for i in 0..total {
        let (dk1, dk2) = (pts[i + 1].0 - pts[i].0, pts[i + 2].0 - pts[i + 1].0);
        let s1 = (pts[i + 1].1 - pts[i].1) / dk1;
        let s2 = (pts[i + 2].1 - pts[i + 1].1) / dk2;
        let v1 = (1.0 / counts[i + 1] - 1.0 / counts[i]).max(0.0);
        let v2 = (1.0 / counts[i + 2] - 1.0 / counts[i + 1]).max(0.0);
        let se = (v1 / (dk1 * dk1) + v2 / (dk2 * dk2)).sqrt();
        if s2 - s1 < -se {
            negative += 1;
        }
    }
    let frac = negative as f64 / total as f64;
    Ok(TailDiagnostic {
        ratio_slope,
        ratio_decreasing: ratio_slope < 0.0,
        negative_curvature_fraction: frac,
        concave: frac > 0.5,
        hazard,
    })
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Value of `ĝ(k, A)` with the counts behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GHat {
    /// `+∞` when no exceedance falls in the set.
    pub value: f64,
    /// `#{R > k, U ∈ A}`.
    pub count_in: usize,
    /// `#{R > k}`.
    pub count_total: usize,
    pub low_count: bool,
}

/// Exceedances above a fixed threshold, ready for repeated `ĝ` queries.
#[derive(Debug, Clone)]
pub struct GHatEvaluator<'a> {
    n: usize,
    k: f64,
    exceedances: Vec<&'a UnitVector>,
    log_total: f64,
}

impl<'a> GHatEvaluator<'a> {
    pub fn new(s: &'a PolarSample, k: f64) -> Result<Self> {
        let c = s.count_above(k);
        if c == 0 {
            return Err(Error::NoExceedances(k));
        }
        if c == s.len() {
            return Err(Error::AllExceed(k));
        }
        let exceedances = s.sorted_index[..c].iter().map(|&i| &s.directions[i]).collect();
        let n = s.len();
        Ok(GHatEvaluator {
            n,
            k,
            exceedances,
            log_total: (c as f64 / n as f64).ln(),
        })
    }

    pub fn threshold(&self) -> f64 {
        self.k
    }

    pub fn n_exceedances(&self) -> usize {
        self.exceedances.len()
    }

    /// Directions of the observations above the threshold.
    pub fn exceedance_directions(&self) -> &[&'a UnitVector] {
        &self.exceedances
    }

    fn for_count(&self, count_in: usize) -> GHat {
        let value = if count_in == 0 {
            f64::INFINITY
        } else if count_in == self.exceedances.len() {
            1.0
        } else {
            (count_in as f64 / self.n as f64).ln() / self.log_total
        };
        GHat {
            value,
            count_in,
            count_total: self.exceedances.len(),
            low_count: count_in < MIN_RELIABLE_COUNT,
        }
    }

    pub fn eval(&self, a: &CapSet) -> GHat {
        self.for_count(self.exceedances.iter().filter(|u| a.contains(u)).count())
    }

    pub fn eval_ball(&self, b: &GeodesicBall) -> GHat {
        self.for_count(self.exceedances.iter().filter(|u| b.contains(u)).count())
    }
}

/// `ĝ(k, A) = log(#{R > k, U ∈ A} / n) / log(#{R > k} / n)`.
pub fn g_hat(s: &PolarSample, k: f64, a: &CapSet) -> Result<GHat> {
    Ok(GHatEvaluator::new(s, k)?.eval(a))
}
