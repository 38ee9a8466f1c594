//! Data ingestion, run configuration, model description files, reports and
//! plots.
//!
//! Configuration and model files share one flat text format: one
//! `key = value` pair per line, `#` starts a comment, blank lines are
//! ignored.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detector::{DetectorConfig, EstimateS, StopReason, Warning};
use crate::error::{Error, Result};
use crate::sphere::{Arc, ArcSet, CapSet, GeodesicBall, UnitVector};
use crate::synth::{
    eight_cone_default, football, pareto_gap, singleton, three_tier_default, two_halves, Cone, ConeMixtureModel,
    RadialLaw,
};
use crate::tail::{heavy_tail_diagnostic, lp_norm, polar_decompose, PolarSample, TailDiagnostic, ThresholdSpec};

/// Fewest rows left after preprocessing that [`ingest_csv`] accepts.
pub const MIN_USABLE_ROWS: usize = 100;

/// Share of the largest radii examined by the tail diagnostic in reports.
pub const DIAGNOSTIC_UPPER_FRACTION: f64 = 0.05;

/// Most exceedances stored in a report for plotting.
pub const MAX_SCATTER_POINTS: usize = 5000;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

// ---------------------------------------------------------------------------
// Ingestion

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocess {
    /// Replace row `t` by `log row_t - log row_{t-1}`.
    pub log_diff: bool,
    /// Keep rows whose components are all negative, then negate them.
    pub negative_quadrant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub sample: PolarSample,
    /// Data rows in the file, header excluded.
    pub rows_read: usize,
    pub header: bool,
    /// Rows removed by the quadrant filter.
    pub filtered_out: usize,
    /// All-zero rows, which have no direction.
    pub zero_rows_dropped: usize,
}

pub fn ingest_csv(path: &Path, p: f64, pre: Preprocess) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, p, pre)
}

/// [`ingest_csv`] on any reader.
pub fn ingest_reader<R: Read>(reader: R, p: f64, pre: Preprocess) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut header = false;
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = rec.iter().map(|c| c.parse::<f64>().ok()).collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            header = true;
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Malformed {
                line,
                reason: format!("expected {w} columns, found {}", rec.len()),
            });
        }
        let mut row = Vec::with_capacity(w);
        for (j, v) in parsed.into_iter().enumerate() {
            match v {
                Some(x) if x.is_finite() => row.push(x),
                _ => {
                    return Err(Error::Malformed {
                        line,
                        reason: format!("column {} is not a finite number: {:?}", j + 1, &rec[j]),
                    })
                }
            }
        }
        rows.push(row);
        lines.push(line);
    }
    let d = width.ok_or_else(|| Error::Data("no data rows".into()))?;
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let rows_read = rows.len();

    if pre.log_diff {
        for (row, line) in rows.iter().zip(&lines) {
            if let Some(x) = row.iter().find(|x| !(**x > 0.0)) {
                return Err(Error::Data(format!(
                    "line {line}: log differences need positive values, found {x}"
                )));
            }
        }
        rows = rows
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| b.ln() - a.ln()).collect())
            .collect();
    }
    let mut filtered_out = 0;
    if pre.negative_quadrant {
        let before = rows.len();
        rows.retain(|r| r.iter().all(|x| *x < 0.0));
        filtered_out = before - rows.len();
        rows.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x = -*x));
    }
    let before = rows.len();
    rows.retain(|r| r.iter().any(|x| *x != 0.0));
    let zero_rows_dropped = before - rows.len();
    if rows.len() < MIN_USABLE_ROWS {
        return Err(Error::Data(format!(
            "{} usable rows after preprocessing, at least {MIN_USABLE_ROWS} required",
            rows.len()
        )));
    }
    Ok(Ingested {
        sample: polar_decompose(&rows, p)?,
        rows_read,
        header,
        filtered_out,
        zero_rows_dropped,
    })
}

/// Writes observations `x = R U / |U|_p` as CSV with a header `x1,...,xd`.
/// Values use the shortest representation that parses back exactly.
pub fn write_sample_csv(s: &PolarSample) -> String {
    let d = s.dim();
    let mut out = (1..=d).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for (r, u) in s.radii().iter().zip(s.directions()) {
        let scale = r / lp_norm(u.coords(), s.norm_p());
        let row: Vec<String> = u.coords().iter().map(|c| format!("{:?}", c * scale)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// key = value files

/// Parses `key = value` lines. Keys are returned with `_` replaced by `-`.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        out.push((i + 1, key, v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse {v:?}")))
}

fn real(key: &str, v: &str) -> Result<f64> {
    let x: f64 = num(key, v)?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}`: {v:?} is not finite")));
    }
    Ok(x)
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, got {v:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Run configuration

/// Settings of one command. Keys accepted by [`RunConfig::set`] are the
/// long flag names without dashes: `input`, `model`, `norm-p`,
/// `tolerance-c`, `threshold-quantile`, `threshold-abs`, `ball-mass`,
/// `grid`, `seed`, `levels`, `log-diff`, `negative-quadrant`, `perturb`,
/// `report`, `plot`, `n`, `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Path of a model file, or `preset:<name>`.
    pub model: Option<String>,
    pub norm_p: f64,
    pub detector: DetectorConfig,
    pub preprocess: Preprocess,
    /// Radius of the random direction perturbation, if any.
    pub perturb: Option<f64>,
    /// Seed of simulation and perturbation.
    pub seed: u64,
    /// Sample size drawn from a model.
    pub n: usize,
    pub levels: usize,
    pub report: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            model: None,
            norm_p: 2.0,
            detector: DetectorConfig::default(),
            preprocess: Preprocess::default(),
            perturb: None,
            seed: 1,
            n: 100_000,
            levels: 3,
            report: None,
            plot: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('_', "-");
        let k = key.as_str();
        match k {
            "input" => self.input = Some(PathBuf::from(value)),
            "model" => self.model = Some(value.to_string()),
            "norm-p" => self.norm_p = real(k, value)?,
            "tolerance-c" => self.detector.tolerance_c = real(k, value)?,
            "threshold-quantile" => self.detector.threshold = ThresholdSpec::Quantile(real(k, value)?),
            "threshold-abs" => self.detector.threshold = ThresholdSpec::Absolute(real(k, value)?),
            "ball-mass" => self.detector.ball_mass_q = real(k, value)?,
            "grid" => self.detector.grid_m = num(k, value)?,
            "seed" => self.seed = num(k, value)?,
            "levels" => self.levels = num(k, value)?,
            "log-diff" => self.preprocess.log_diff = flag(k, value)?,
            "negative-quadrant" => self.preprocess.negative_quadrant = flag(k, value)?,
            "perturb" => self.perturb = Some(real(k, value)?),
            "report" => self.report = Some(PathBuf::from(value)),
            "plot" => self.plot = Some(PathBuf::from(value)),
            "n" => self.n = num(k, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies pairs in order; giving both threshold keys is an error.
    pub fn apply<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        let mut thresholds = 0;
        for (k, v) in pairs {
            if k.replace('_', "-").starts_with("threshold-") {
                thresholds += 1;
            }
            self.set(k, v)?;
        }
        if thresholds > 1 {
            return Err(Error::Config(
                "give either threshold-quantile or threshold-abs, not both".into(),
            ));
        }
        Ok(())
    }

    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        let pairs = parse_kv(text)?;
        self.apply(pairs.iter().map(|(_, k, v)| (k.as_str(), v.as_str())))
            .map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("config file: {m}")),
                e => e,
            })
    }

    /// Range checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        if !(self.norm_p >= 1.0) {
            return Err(Error::Config(format!("norm-p must be at least 1, got {}", self.norm_p)));
        }
        if let Some(r) = self.perturb {
            if !(r > 0.0 && r <= PI / 8.0) {
                return Err(Error::Config(format!("perturb must lie in (0, π/8], got {r}")));
            }
        }
        if self.levels < 1 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        self.detector.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Exactly one data source must be given.
    pub fn require_one_source(&self) -> Result<()> {
        match (&self.input, &self.model) {
            (Some(_), None) | (None, Some(_)) => Ok(()),
            (None, None) => Err(Error::Config("give --input or --model".into())),
            (Some(_), Some(_)) => Err(Error::Config("give only one of --input and --model".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// Model files

/// Names accepted by `preset = ...` in model files and `preset:<name>`.
pub const PRESETS: [&str; 6] = [
    "eight_cone",
    "pareto_gap",
    "two_halves",
    "three_tier",
    "singleton",
    "football",
];

/// Reads a model from `arg`: either `preset:<name>` or a path to a model
/// file.
pub fn load_model(arg: &str) -> Result<ConeMixtureModel> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return parse_model(&format!("preset = {name}"));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::Config(format!("model file {arg}: {e}")))?;
    parse_model(&text)
}

/// Parses a model file.
///
/// ```text
/// dimension = 2
/// cone.heavy.arc = 0 0.785398163397   # start, length; half-open
/// cone.heavy.law = pareto
/// cone.heavy.alpha = 2
/// cone.rest.rest = true               # everything not in another cone
/// cone.rest.law = weibull
/// cone.rest.beta = 0.5
/// cone.rest.lambda = 1
/// ```
///
/// A cone region is one of `arc = start length` (circle only),
/// `cap = c1 ... cd radius` (closed cap, centre normalised) or
/// `rest = true`. Laws: `pareto` (`alpha`, `x_m` = 1), `weibull` (`beta`,
/// `lambda`), `lognormal` (`mu`, `sigma`). `weight` is either given for
/// every cone, summing to 1, or for none, in which case directions are
/// uniform and weights are area shares; overlapping caps are not detected.
///
/// Instead of cones a file may name a preset with `preset = <name>`, see
/// [`PRESETS`]; optional keys `alpha-light` (pareto_gap, default 3),
/// `angle` and `weight` (singleton, defaults 1 and 0.01) and `cap-radius`
/// (football, default 0.3) adjust it.
pub fn parse_model(text: &str) -> Result<ConeMixtureModel> {
    let pairs = parse_kv(text)?;
    let mut top: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut cones: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (line, key, value) in pairs {
        if let Some(rest) = key.strip_prefix("cone.") {
            let (id, field) = rest
                .split_once('.')
                .ok_or_else(|| Error::Config(format!("line {line}: expected `cone.<id>.<field>`")))?;
            if !cones.contains_key(id) {
                order.push(id.to_string());
            }
            let entry = cones.entry(id.to_string()).or_default();
            if entry.insert(field.to_string(), (line, value)).is_some() {
                return Err(Error::Config(format!("line {line}: duplicate key `{key}`")));
            }
        } else if top.insert(key.clone(), (line, value)).is_some() {
            return Err(Error::Config(format!("line {line}: duplicate key `{key}`")));
        }
    }
    if let Some((line, name)) = top.get("preset") {
        if !cones.is_empty() {
            return Err(Error::Config(format!(
                "line {line}: a preset cannot be combined with cones"
            )));
        }
        return preset(name, &top).map_err(|e| Error::Config(format!("line {line}: {e}")));
    }
    for (k, (line, _)) in &top {
        if k != "dimension" {
            return Err(Error::Config(format!("line {line}: unknown key `{k}`")));
        }
    }
    let (dline, dtext) = top
        .get("dimension")
        .ok_or_else(|| Error::Config("model file needs `dimension`".into()))?;
    let dim: usize = num("dimension", dtext).map_err(|e| Error::Config(format!("line {dline}: {e}")))?;
    if dim < 2 {
        return Err(Error::Config(format!("line {dline}: dimension must be at least 2")));
    }
    if cones.is_empty() {
        return Err(Error::Config("model file has no cones".into()));
    }

    enum Shape {
        Arc(ArcSet),
        Cap(GeodesicBall),
        Rest,
    }
    let mut shapes = Vec::new();
    let mut laws = Vec::new();
    let mut weights = Vec::new();
    for id in &order {
        let fields = &cones[id];
        let ctx = |line: usize, m: String| Error::Config(format!("line {line}: cone `{id}`: {m}"));
        let first_line = fields.values().map(|(l, _)| *l).min().unwrap_or(0);
        let regions: Vec<&str> = ["arc", "cap", "rest"]
            .into_iter()
            .filter(|k| fields.contains_key(*k))
            .collect();
        if regions.len() != 1 {
            return Err(ctx(first_line, "needs exactly one of `arc`, `cap` and `rest`".into()));
        }
        let (line, value) = &fields[regions[0]];
        let nums = || -> Result<Vec<f64>> { value.split_whitespace().map(|t| real(regions[0], t)).collect() };
        let shape = match regions[0] {
            "arc" => {
                if dim != 2 {
                    return Err(ctx(*line, "`arc` needs dimension 2".into()));
                }
                let v = nums().map_err(|e| ctx(*line, e.to_string()))?;
                if v.len() != 2 || !(v[1] > 0.0 && v[1] <= TAU) {
                    return Err(ctx(*line, "`arc` takes a start and a length in (0, 2π]".into()));
                }
                Shape::Arc(ArcSet::arc(v[0], v[1], true, false))
            }
            "cap" => {
                let v = nums().map_err(|e| ctx(*line, e.to_string()))?;
                if v.len() != dim + 1 {
                    return Err(ctx(*line, format!("`cap` takes {dim} centre coordinates and a radius")));
                }
                let centre = UnitVector::new(v[..dim].to_vec()).map_err(|e| ctx(*line, e.to_string()))?;
                Shape::Cap(GeodesicBall::closed(centre, v[dim]).map_err(|e| ctx(*line, e.to_string()))?)
            }
            _ => {
                if !flag("rest", value).map_err(|e| ctx(*line, e.to_string()))? {
                    return Err(ctx(*line, "`rest` can only be true".into()));
                }
                Shape::Rest
            }
        };
        shapes.push(shape);
        laws.push(parse_law(fields).map_err(|e| ctx(first_line, e.to_string()))?);
        weights.push(match fields.get("weight") {
            Some((l, v)) => Some(real("weight", v).map_err(|e| ctx(*l, e.to_string()))?),
            None => None,
        });
        for (k, (l, _)) in fields {
            if ![
                "arc", "cap", "rest", "weight", "law", "alpha", "x-m", "beta", "lambda", "mu", "sigma",
            ]
            .contains(&k.as_str())
            {
                return Err(ctx(*l, format!("unknown field `{k}`")));
            }
        }
    }
    if shapes.iter().filter(|s| matches!(s, Shape::Rest)).count() > 1 {
        return Err(Error::Config("at most one cone may be `rest`".into()));
    }

    let to_set = |s: &Shape| -> Result<CapSet> {
        match s {
            Shape::Arc(a) => Ok(CapSet::from_arcs(a.clone())),
            Shape::Cap(b) => Ok(CapSet::from_ball(b.clone())),
            Shape::Rest => unreachable!(),
        }
    };
    let mut others = CapSet::empty(dim);
    for s in shapes.iter().filter(|s| !matches!(s, Shape::Rest)) {
        others = others.union(&to_set(s)?)?;
    }
    let regions: Vec<CapSet> = shapes
        .iter()
        .map(|s| match s {
            Shape::Rest => others.complement(),
            s => to_set(s),
        })
        .collect::<Result<_>>()?;

    let given = weights.iter().filter(|w| w.is_some()).count();
    let weights: Vec<f64> = if given == weights.len() {
        let w: Vec<f64> = weights.into_iter().map(|w| w.expect("all given")).collect();
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("cone weights sum to {total}, not 1")));
        }
        w.iter().map(|x| x / total).collect()
    } else if given == 0 {
        let mut w: Vec<f64> = shapes
            .iter()
            .map(|s| match s {
                Shape::Arc(a) => a.length() / TAU,
                Shape::Cap(b) => cap_area_fraction(dim, b.radius),
                Shape::Rest => 0.0,
            })
            .collect();
        let used: f64 = w.iter().sum();
        if let Some(i) = shapes.iter().position(|s| matches!(s, Shape::Rest)) {
            w[i] = match regions[i].arc_form() {
                Some(a) => a.length() / TAU,
                None => 1.0 - used,
            };
        }
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    } else {
        return Err(Error::Config("give `weight` for every cone or for none".into()));
    };

    let cones = regions
        .into_iter()
        .zip(weights)
        .zip(laws)
        .map(|((region, weight), law)| Cone { region, weight, law })
        .collect();
    ConeMixtureModel::new(dim, cones).map_err(|e| Error::Config(e.to_string()))
}

fn parse_law(fields: &BTreeMap<String, (usize, String)>) -> Result<RadialLaw> {
    let get = |k: &str| -> Result<f64> {
        let (_, v) = fields
            .get(k)
            .ok_or_else(|| Error::Config(format!("law parameter `{k}` missing")))?;
        real(k, v)
    };
    let (_, name) = fields.get("law").ok_or_else(|| Error::Config("`law` missing".into()))?;
    let law = match name.to_ascii_lowercase().as_str() {
        "pareto" => RadialLaw::Pareto {
            alpha: get("alpha")?,
            x_m: if fields.contains_key("x-m") { get("x-m")? } else { 1.0 },
        },
        "weibull" => RadialLaw::weibull(get("beta")?, get("lambda")?),
        "lognormal" => RadialLaw::LogNormal {
            mu: get("mu")?,
            sigma: get("sigma")?,
        },
        other => return Err(Error::Config(format!("unknown law `{other}`"))),
    };
    law.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(law)
}

/// Share of the sphere `S^{d-1}` covered by a cap of geodesic radius `r`.
pub fn cap_area_fraction(d: usize, r: f64) -> f64 {
    if r >= PI {
        return 1.0;
    }
    if r > PI / 2.0 {
        return 1.0 - cap_area_fraction(d, PI - r);
    }
    let s = r.sin();
    0.5 * statrs::function::beta::beta_reg((d as f64 - 1.0) / 2.0, 0.5, s * s)
}

fn preset(name: &str, top: &BTreeMap<String, (usize, String)>) -> Result<ConeMixtureModel> {
    let param = |k: &str, default: f64| -> Result<f64> { top.get(k).map_or(Ok(default), |(_, v)| real(k, v)) };
    let allowed: &[&str] = match name {
        "pareto_gap" => &["alpha-light"],
        "singleton" => &["angle", "weight"],
        "football" => &["cap-radius"],
        _ => &[],
    };
    for k in top.keys() {
        if k != "preset" && !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!("key `{k}` does not apply to preset `{name}`")));
        }
    }
    let model = match name {
        "eight_cone" => Ok(eight_cone_default()),
        "pareto_gap" => pareto_gap(param("alpha-light", 3.0)?),
        "two_halves" => two_halves(RadialLaw::pareto(2.0), RadialLaw::pareto(3.0)),
        "three_tier" => Ok(three_tier_default()),
        "singleton" => singleton(
            param("angle", 1.0)?,
            param("weight", 0.01)?,
            RadialLaw::weibull(0.5, 4.0),
        ),
        "football" => football(
            param("cap-radius", 0.3)?,
            RadialLaw::pareto(2.0),
            RadialLaw::weibull(0.5, 4.0),
        ),
        _ => {
            return Err(Error::Config(format!(
                "unknown preset `{name}`; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    model.map_err(|e| Error::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// Reports

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(de::Error::custom(format!("expected a number, got {t:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: Option<String>,
    pub model: Option<String>,
    pub norm_p: f64,
    pub detector: DetectorConfig,
    pub preprocess: Preprocess,
    pub perturb: Option<f64>,
    /// Sample size drawn from the model; absent for file input.
    pub n: Option<usize>,
    pub levels: usize,
}

impl ConfigEcho {
    pub fn new(cfg: &RunConfig) -> Self {
        let mut detector = cfg.detector.clone();
        detector.tolerance_c = round12(detector.tolerance_c);
        detector.ball_mass_q = round12(detector.ball_mass_q);
        detector.threshold = match detector.threshold {
            ThresholdSpec::Quantile(q) => ThresholdSpec::Quantile(round12(q)),
            ThresholdSpec::Absolute(k) => ThresholdSpec::Absolute(round12(k)),
        };
        ConfigEcho {
            input: cfg.input.as_ref().map(|p| p.display().to_string()),
            model: cfg.model.clone(),
            norm_p: round12(cfg.norm_p),
            detector,
            preprocess: cfg.preprocess,
            perturb: cfg.perturb.map(round12),
            n: cfg.model.as_ref().map(|_| cfg.n),
            levels: cfg.levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub dim: usize,
    /// Observations analysed.
    pub n: usize,
    pub rows_read: usize,
    pub filtered_out: usize,
    pub zero_rows_dropped: usize,
}

impl SampleSummary {
    pub fn from_ingest(i: &Ingested) -> Self {
        SampleSummary {
            dim: i.sample.dim(),
            n: i.sample.len(),
            rows_read: i.rows_read,
            filtered_out: i.filtered_out,
            zero_rows_dropped: i.zero_rows_dropped,
        }
    }

    pub fn simulated(s: &PolarSample) -> Self {
        SampleSummary {
            dim: s.dim(),
            n: s.len(),
            rows_read: s.len(),
            filtered_out: 0,
            zero_rows_dropped: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub coords: Vec<f64>,
    /// Angle in `[0, 2π)` on the circle.
    pub angle: Option<f64>,
    pub s_v: f64,
    #[serde(with = "extended_float")]
    pub g: f64,
    pub count_in: usize,
    pub accepted: bool,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapReport {
    pub center: Vec<f64>,
    pub radius: f64,
    pub closed: bool,
}

/// An estimate as arcs on the circle or as positive caps minus negative
/// caps in higher dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionReport {
    Arcs {
        arcs: Vec<Arc>,
    },
    Caps {
        positive: Vec<CapReport>,
        negative: Vec<CapReport>,
    },
}

impl RegionReport {
    pub fn new(set: &CapSet) -> Self {
        let cap = |b: &GeodesicBall| CapReport {
            center: b.center.coords().iter().map(|c| round12(*c)).collect(),
            radius: round12(b.radius),
            closed: b.closed,
        };
        match set.arc_form() {
            Some(a) => RegionReport::Arcs {
                arcs: a
                    .arcs()
                    .into_iter()
                    .map(|x| Arc {
                        start: round12(x.start),
                        length: round12(x.length),
                        ..x
                    })
                    .collect(),
            },
            None => RegionReport::Caps {
                positive: set.positive().iter().map(cap).collect(),
                negative: set.negative().iter().map(cap).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub threshold_k: f64,
    pub n_exceedances: usize,
    pub estimate: RegionReport,
    /// Approximate share of the sphere covered by the estimate.
    pub measure_fraction: f64,
    /// Share of this level's input that was removed before the next level.
    pub removed_fraction: Option<f64>,
    pub warnings: Vec<Warning>,
    pub verdicts: Vec<VerdictReport>,
}

impl LevelReport {
    pub fn new(e: &EstimateS, removed_fraction: Option<f64>) -> Self {
        LevelReport {
            threshold_k: round12(e.threshold_k),
            n_exceedances: e.n_exceedances,
            estimate: RegionReport::new(&e.estimate),
            measure_fraction: round12(e.estimate.measure_fraction(20_000)),
            removed_fraction: removed_fraction.map(round12),
            warnings: e
                .warnings
                .iter()
                .map(|w| match w {
                    Warning::NegligibleEstimate { fraction } => Warning::NegligibleEstimate {
                        fraction: round12(*fraction),
                    },
                    w => w.clone(),
                })
                .collect(),
            verdicts: e
                .verdicts
                .iter()
                .map(|v| VerdictReport {
                    coords: v.v.coords().iter().map(|c| round12(*c)).collect(),
                    angle: (v.v.dim() == 2).then(|| round12(v.v.angle())),
                    s_v: round12(v.s_v),
                    g: round12(v.g_value),
                    count_in: v.count_in,
                    accepted: v.accepted,
                    reliable: v.reliable,
                })
                .collect(),
        }
    }
}

/// An exceedance of the first level's threshold, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub direction: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub command: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub sample: SampleSummary,
    pub diagnostic: Option<TailDiagnostic>,
    /// Why the diagnostic is missing.
    pub diagnostic_note: Option<String>,
    pub levels: Vec<LevelReport>,
    pub stop: Option<StopReason>,
    /// Largest exceedances of the first level, at most
    /// [`MAX_SCATTER_POINTS`].
    pub points: Vec<ScatterPoint>,
}

/// Tail diagnostic with floats rounded for reporting.
pub fn diagnostic_for_report(s: &PolarSample) -> std::result::Result<TailDiagnostic, String> {
    let mut d = heavy_tail_diagnostic(s, DIAGNOSTIC_UPPER_FRACTION).map_err(|e| e.to_string())?;
    d.ratio_slope = round12(d.ratio_slope);
    d.negative_curvature_fraction = round12(d.negative_curvature_fraction);
    d.hazard.knots.iter_mut().for_each(|(k, h)| {
        *k = round12(*k);
        *h = round12(*h);
    });
    Ok(d)
}

impl EstimateReport {
    /// Report of a scan (`levels.len() == 1`, no ranking) or of a ranking.
    pub fn new(
        command: &str,
        cfg: &RunConfig,
        sample: SampleSummary,
        s: &PolarSample,
        levels: &[EstimateS],
        ranking: Option<(&[f64], &StopReason)>,
    ) -> Self {
        let (diagnostic, diagnostic_note) = match diagnostic_for_report(s) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e)),
        };
        let points = levels.first().map_or_else(Vec::new, |l| {
            let k = l.threshold_k;
            s.sorted_index()
                .iter()
                .take_while(|&&i| s.radii()[i] > k)
                .take(MAX_SCATTER_POINTS)
                .map(|&i| ScatterPoint {
                    direction: s.directions()[i].coords().iter().map(|c| round12(*c)).collect(),
                    radius: round12(s.radii()[i]),
                })
                .collect()
        });
        EstimateReport {
            command: command.to_string(),
            seed: cfg.seed,
            config: ConfigEcho::new(cfg),
            sample,
            diagnostic,
            diagnostic_note,
            levels: levels
                .iter()
                .enumerate()
                .map(|(j, l)| LevelReport::new(l, ranking.and_then(|(r, _)| r.get(j).copied())))
                .collect(),
            stop: ranking.map(|(_, s)| s.clone()),
            points,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("report: {e}")))
    }
}

/// Result of comparing the oracle algorithm with the true set of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckReport {
    pub model: String,
    pub grid_m: usize,
    pub tolerance: f64,
    #[serde(with = "extended_float")]
    pub hausdorff: f64,
    /// Grid spacing plus twice the tolerance.
    pub bound: f64,
    pub within_bound: bool,
    pub estimate: RegionReport,
    pub truth: RegionReport,
}

// ---------------------------------------------------------------------------
// Plots

const LEVEL_COLOURS: [&str; 5] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Scatter of the reported exceedances on the circle with the estimate arcs
/// drawn on the unit circle. A point `R u` is placed at distance
/// `1 + ln(R / k)` from the centre, so the threshold is the unit circle.
pub fn render_svg(report: &EstimateReport) -> Result<String> {
    if report.sample.dim != 2 {
        return Err(Error::Config("an SVG plot needs two-dimensional data".into()));
    }
    const SIZE: f64 = 640.0;
    const C: f64 = SIZE / 2.0;
    const MARGIN: f64 = 40.0;
    let k = report.levels.first().map_or(1.0, |l| l.threshold_k);
    let rho = |r: f64| 1.0 + (r / k).ln().max(0.0);
    let rho_max = report.points.iter().map(|p| rho(p.radius)).fold(1.5, f64::max);
    let scale = (C - MARGIN) / rho_max;
    let xy = |theta: f64, r: f64| (C + scale * r * theta.cos(), C - scale * r * theta.sin());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(
        s,
        r##"<circle cx="{C:.3}" cy="{C:.3}" r="{:.3}" fill="none" stroke="#999999" stroke-width="1"/>"##,
        scale
    );
    for p in &report.points {
        let theta = p.direction[1].atan2(p.direction[0]);
        let (x, y) = xy(theta, rho(p.radius));
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="1.6" fill="#333333" fill-opacity="0.6"/>"##
        );
    }
    for (j, level) in report.levels.iter().enumerate() {
        let colour = LEVEL_COLOURS[j % LEVEL_COLOURS.len()];
        let r = 1.0 + 0.04 * j as f64;
        let RegionReport::Arcs { arcs } = &level.estimate else {
            continue;
        };
        for a in arcs {
            if a.length >= TAU - 1e-12 {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{C:.3}" cy="{C:.3}" r="{:.3}" fill="none" stroke="{colour}" stroke-width="4"/>"##,
                    scale * r
                );
            } else if a.length <= 1e-3 {
                let (x, y) = xy(a.start + a.length / 2.0, r);
                let _ = writeln!(s, r##"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{colour}"/>"##);
            } else {
                let (x0, y0) = xy(a.start, r);
                let (x1, y1) = xy(a.start + a.length, r);
                let large = u8::from(a.length > PI);
                let _ = writeln!(
                    s,
                    r##"<path d="M {x0:.3} {y0:.3} A {rr:.3} {rr:.3} 0 {large} 0 {x1:.3} {y1:.3}" fill="none" stroke="{colour}" stroke-width="4"/>"##,
                    rr = scale * r
                );
            }
        }
        let _ = writeln!(
            s,
            r##"<text x="10" y="{:.0}" font-family="sans-serif" font-size="12" fill="{colour}">level {}</text>"##,
            20.0 + 16.0 * j as f64,
            j + 1
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Plot data for any dimension: one row per reported exceedance
/// (`point`, value = radius) and per grid direction (`verdict`,
/// value = ĝ).
pub fn render_plot_csv(report: &EstimateReport) -> String {
    let d = report.sample.dim;
    let mut s = String::from("kind,level,value,accepted");
    for j in 1..=d {
        let _ = write!(s, ",u{j}");
    }
    s.push('\n');
    let coords = |c: &[f64]| c.iter().map(|x| format!(",{x:?}")).collect::<String>();
    for p in &report.points {
        let _ = writeln!(s, "point,1,{:?},{}", p.radius, coords(&p.direction));
    }
    for (j, level) in report.levels.iter().enumerate() {
        for v in &level.verdicts {
            let g = if v.g.is_finite() {
                format!("{:?}", v.g)
            } else {
                "inf".into()
            };
            let _ = writeln!(s, "verdict,{},{g},{}{}", j + 1, u8::from(v.accepted), coords(&v.coords));
        }
    }
    s
}
