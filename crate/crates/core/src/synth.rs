//! Generative models with a known set of riskiest directions.
//!
//! A [`ConeMixtureModel`] splits the sphere into regions, each carrying an
//! angular weight and a radial law; [`AnalyticG`] evaluates the exact limit
//! `G` for it and [`true_s`] returns the dominant set. [`EllipticalModel`]
//! gives a direction-dependent hazard `c(u) h(k)`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::distributions::{Distribution, Open01, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::GOracle;
use crate::error::{invalid, Error, Result};
use crate::sphere::{direction_grid, uniform_in_cap, uniform_on_sphere, ArcSet, CapSet, GeodesicBall, UnitVector};
use crate::tail::PolarSample;

/// Observations per independently seeded generation chunk.
pub const CHUNK: usize = 16_384;

/// Probe points used for angular overlaps when `d >= 3`.
pub const DEFAULT_PROBES: usize = 20_000;

/// Right-unbounded law of the radius.
///
/// Weibull is in rate form, `P(R > k) = exp(-λ k^β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialLaw {
    Pareto { alpha: f64, x_m: f64 },
    Weibull { beta: f64, lambda: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl RadialLaw {
    pub fn pareto(alpha: f64) -> Self {
        RadialLaw::Pareto { alpha, x_m: 1.0 }
    }

    pub fn weibull(beta: f64, lambda: f64) -> Self {
        RadialLaw::Weibull { beta, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialLaw::Pareto { alpha, x_m } => alpha > 0.0 && x_m > 0.0 && alpha.is_finite() && x_m.is_finite(),
            RadialLaw::Weibull { beta, lambda } => beta > 0.0 && beta <= 1.0 && lambda > 0.0 && lambda.is_finite(),
            RadialLaw::LogNormal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("law", format!("invalid parameters {self:?}")))
        }
    }

    pub fn name(&self) -> String {
        match *self {
            RadialLaw::Pareto { alpha, x_m } => format!("Pareto(alpha={alpha}, x_m={x_m})"),
            RadialLaw::Weibull { beta, lambda } => format!("Weibull(beta={beta}, lambda={lambda})"),
            RadialLaw::LogNormal { mu, sigma } => format!("LogNormal(mu={mu}, sigma={sigma})"),
        }
    }

    /// `P(R > k)`.
    pub fn survival(&self, k: f64) -> f64 {
        (-self.hazard(k)).exp()
    }

    pub fn cdf(&self, k: f64) -> f64 {
        -(-self.hazard(k)).exp_m1()
    }

    /// `h(k) = -log P(R > k)`.
    pub fn hazard(&self, k: f64) -> f64 {
        match *self {
            RadialLaw::Pareto { alpha, x_m } => {
                if k <= x_m {
                    0.0
                } else {
                    alpha * (k / x_m).ln()
                }
            }
            RadialLaw::Weibull { beta, lambda } => {
                if k <= 0.0 {
                    0.0
                } else {
                    lambda * k.powf(beta)
                }
            }
            RadialLaw::LogNormal { mu, sigma } => {
                if k <= 0.0 {
                    return 0.0;
                }
                let z = (k.ln() - mu) / (sigma * std::f64::consts::SQRT_2);
                -(0.5 * statrs::function::erf::erfc(z)).ln()
            }
        }
    }

    /// The radius `k` with `h(k) = t`.
    pub fn inverse_hazard(&self, t: f64) -> Result<f64> {
        match *self {
            RadialLaw::Pareto { alpha, x_m } => Ok(x_m * (t / alpha).exp()),
            RadialLaw::Weibull { beta, lambda } => Ok((t / lambda).powf(1.0 / beta)),
            RadialLaw::LogNormal { .. } => Err(Error::NonInvertibleHazard(self.name())),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadialLaw::Pareto { alpha, x_m } => {
                let u: f64 = rng.sample(Open01);
                x_m * u.powf(-1.0 / alpha)
            }
            RadialLaw::Weibull { beta, lambda } => {
                let u: f64 = rng.sample(Open01);
                (-u.ln() / lambda).powf(1.0 / beta)
            }
            RadialLaw::LogNormal { mu, sigma } => (mu + sigma * rng.sample::<f64, _>(StandardNormal)).exp(),
        }
    }

    /// Orders laws by tail weight; `Greater` means `self` has the heavier
    /// tail (slower growing hazard).
    pub fn heaviness_cmp(&self, other: &RadialLaw) -> Ordering {
        use RadialLaw::*;
        let rank = |l: &RadialLaw| match l {
            Pareto { .. } => 2,
            LogNormal { .. } => 1,
            Weibull { .. } => 0,
        };
        match (*self, *other) {
            (Pareto { alpha: a, .. }, Pareto { alpha: b, .. }) => b.total_cmp(&a),
            (LogNormal { sigma: a, .. }, LogNormal { sigma: b, .. }) => a.total_cmp(&b),
            (Weibull { beta: b1, lambda: l1 }, Weibull { beta: b2, lambda: l2 }) => {
                b2.total_cmp(&b1).then(l2.total_cmp(&l1))
            }
            (a, b) => rank(&a).cmp(&rank(&b)),
        }
    }

    /// `lim h_self(k) / h_dominant(k)` for a law no heavier than `dominant`.
    pub fn tail_ratio(&self, dominant: &RadialLaw) -> Result<f64> {
        use RadialLaw::*;
        let unsupported = || Error::UnsupportedCombination(self.name(), dominant.name());
        match (*self, *dominant) {
            (Pareto { alpha, .. }, Pareto { alpha: star, .. }) => Ok(alpha / star),
            (Weibull { .. } | LogNormal { .. }, Pareto { .. }) => Ok(f64::INFINITY),
            (LogNormal { sigma, .. }, LogNormal { sigma: star, .. }) if sigma == star => Ok(1.0),
            (Weibull { .. }, LogNormal { .. }) => Ok(f64::INFINITY),
            (
                Weibull { beta, lambda },
                Weibull {
                    beta: b_star,
                    lambda: l_star,
                },
            ) => match beta.total_cmp(&b_star) {
                Ordering::Equal => Ok(lambda / l_star),
                Ordering::Greater => Ok(f64::INFINITY),
                Ordering::Less => Err(unsupported()),
            },
            _ => Err(unsupported()),
        }
    }
}

/// One region of a cone mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub region: CapSet,
    pub weight: f64,
    pub law: RadialLaw,
}

/// Directions drawn from region `j` with probability `weight_j`, uniformly
/// inside it, with radius drawn from the region's law.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMixtureModel {
    dim: usize,
    cones: Vec<Cone>,
}

impl ConeMixtureModel {
    pub fn new(dim: usize, cones: Vec<Cone>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if cones.is_empty() {
            return Err(invalid("cones", "model has no cones"));
        }
        for c in &cones {
            if c.region.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.region.dim(),
                });
            }
            if !(c.weight > 0.0) {
                return Err(invalid("weight", format!("must be positive, got {}", c.weight)));
            }
            if c.region.is_empty() {
                return Err(invalid("region", "cone region is empty"));
            }
            c.law.validate()?;
        }
        let total: f64 = cones.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("weight", format!("weights sum to {total}, not 1")));
        }
        Ok(ConeMixtureModel { dim, cones })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// The heaviest radial law present.
    pub fn dominant_law(&self) -> RadialLaw {
        self.cones
            .iter()
            .map(|c| c.law)
            .max_by(|a, b| a.heaviness_cmp(b))
            .expect("model has cones")
    }
}

fn has_positive_measure(region: &CapSet) -> bool {
    match region.arc_form() {
        Some(a) => a.has_positive_length(),
        None => region.positive().iter().any(|b| b.radius > 0.0) && !region.is_empty(),
    }
}

fn sample_region<R: Rng + ?Sized>(rng: &mut R, region: &CapSet) -> Result<UnitVector> {
    if let Some(arcs) = region.arc_form() {
        let parts = arcs.arcs();
        let total: f64 = parts.iter().map(|a| a.length).sum();
        if total == 0.0 {
            let a = parts[rng.gen_range(0..parts.len())];
            return Ok(UnitVector::from_angle(a.start));
        }
        let mut t = rng.gen::<f64>() * total;
        for a in &parts {
            if t < a.length {
                return Ok(UnitVector::from_angle(a.start + t));
            }
            t -= a.length;
        }
        let last = parts.last().expect("non-empty region");
        return Ok(UnitVector::from_angle(last.start + last.length * 0.5));
    }
    let live: Vec<&GeodesicBall> = region.positive().iter().filter(|b| !b.is_empty()).collect();
    let d = region.dim();
    for _ in 0..1_000_000 {
        let p = if live.len() == 1 {
            uniform_in_cap(rng, &live[0].center, live[0].radius)
        } else {
            uniform_on_sphere(rng, d)
        };
        if region.contains(&p) {
            return Ok(p);
        }
    }
    Err(invalid("region", "rejection sampling found no point of the region"))
}

/// Draws `n` observations; the second vector holds the cone of each.
///
/// Chunk `j` of [`CHUNK`] observations is generated from stream `j` of a
/// ChaCha8 generator seeded with `seed`.
pub fn sample_cone_mixture_labeled(model: &ConeMixtureModel, n: usize, seed: u64) -> Result<(PolarSample, Vec<usize>)> {
    if n == 0 {
        return Err(invalid("n", "at least one observation required"));
    }
    let weights =
        WeightedIndex::new(model.cones.iter().map(|c| c.weight)).map_err(|e| invalid("weight", e.to_string()))?;
    let chunks: Vec<(usize, usize)> = (0..n).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(n))).collect();
    let parts = chunks
        .par_iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let mut out = Vec::with_capacity(b - a);
            for _ in a..b {
                let c = weights.sample(&mut rng);
                let cone = &model.cones[c];
                let u = sample_region(&mut rng, &cone.region)?;
                let r = cone.law.sample(&mut rng);
                out.push((r, u, c));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut radii = Vec::with_capacity(n);
    let mut dirs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (r, u, c) in parts.into_iter().flatten() {
        radii.push(r);
        dirs.push(u);
        labels.push(c);
    }
    Ok((PolarSample::new(radii, dirs, 2.0)?, labels))
}

pub fn sample_cone_mixture(model: &ConeMixtureModel, n: usize, seed: u64) -> Result<PolarSample> {
    Ok(sample_cone_mixture_labeled(model, n, seed)?.0)
}

/// Elliptical direction law with conditional hazard
/// `-log P(R > k | U = u) = c(u) h(k)`.
///
/// Directions are `A z / |A z|` for standard normal `z`. With `M = A Aᵀ`,
/// `c(u) = scale · sqrt(λ_max(M) · uᵀ M⁻¹ u)`: the ratio of the longest
/// semi-axis to the ellipse's radius in direction `u`, times `scale`. It is
/// antipodally symmetric and equals `scale` exactly along the major axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalModel {
    axes: DMatrix<f64>,
    m_inv: DMatrix<f64>,
    lambda_max: f64,
    pub base: RadialLaw,
    pub hazard_scale: f64,
}

impl EllipticalModel {
    /// `axes` is the `d × d` matrix `A`, given by rows.
    pub fn new(axes: &[Vec<f64>], base: RadialLaw, hazard_scale: f64) -> Result<Self> {
        let d = axes.len();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if let Some(r) = axes.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        base.validate()?;
        if !(hazard_scale > 0.0 && hazard_scale.is_finite()) {
            return Err(invalid("hazard_scale", format!("must be positive, got {hazard_scale}")));
        }
        let a = DMatrix::from_fn(d, d, |i, j| axes[i][j]);
        let m = &a * a.transpose();
        let m_inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| invalid("axes", "axis matrix is singular"))?;
        let lambda_max = m.symmetric_eigenvalues().max();
        Ok(EllipticalModel {
            axes: a,
            m_inv,
            lambda_max,
            base,
            hazard_scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.nrows()
    }

    pub fn c(&self, u: &UnitVector) -> f64 {
        let v = nalgebra::DVector::from_column_slice(u.coords());
        let q = (v.transpose() * &self.m_inv * &v)[(0, 0)];
        self.hazard_scale * (self.lambda_max * q).sqrt()
    }
}

/// Draws from an [`EllipticalModel`]; the radius is obtained by inverting
/// `c(U) h(R) = E` with `E` standard exponential.
pub fn sample_elliptical(model: &EllipticalModel, n: usize, seed: u64) -> Result<PolarSample> {
    if n == 0 {
        return Err(invalid("n", "at least one observation required"));
    }
    model.base.inverse_hazard(1.0)?;
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radii = Vec::with_capacity(n);
    let mut dirs = Vec::with_capacity(n);
    for _ in 0..n {
        let z = nalgebra::DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &model.axes * z;
        let u = UnitVector::new(x.iter().copied().collect())?;
        let e: f64 = -rng.sample::<f64, _>(Open01).ln();
        radii.push(model.base.inverse_hazard(e / model.c(&u))?);
        dirs.push(u);
    }
    PolarSample::new(radii, dirs, 2.0)
}

/// Moves every direction to an independent uniform point of the closed cap
/// of the given radius around it; radii are kept.
pub fn perturb_directions(s: &PolarSample, radius: f64, seed: u64) -> Result<PolarSample> {
    if !(radius > 0.0 && radius <= PI / 8.0) {
        return Err(invalid("radius", format!("{radius} not in (0, π/8]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = s
        .directions()
        .iter()
        .map(|u| uniform_in_cap(&mut rng, u, radius))
        .collect();
    PolarSample::new(s.radii().to_vec(), dirs, s.norm_p())
}

/// Exact `G` of a cone mixture: the smallest tail ratio over the cones that
/// the set meets with positive probability.
///
/// A region of positive measure is met when the overlap has positive
/// measure: exact arc length on the circle, and in higher dimensions a hit
/// among a fixed set of quasi-uniform probe points. A region of measure
/// zero (point masses) is met when the set contains one of its points.
#[derive(Debug, Clone)]
pub struct AnalyticG<'m> {
    model: &'m ConeMixtureModel,
    ratios: Vec<std::result::Result<f64, Error>>,
    massive: Vec<bool>,
    probes: Vec<(UnitVector, usize)>,
}

impl<'m> AnalyticG<'m> {
    pub fn new(model: &'m ConeMixtureModel) -> Result<Self> {
        Self::with_probes(model, DEFAULT_PROBES)
    }

    pub fn with_probes(model: &'m ConeMixtureModel, probes: usize) -> Result<Self> {
        let dominant = model.dominant_law();
        let ratios = model.cones.iter().map(|c| c.law.tail_ratio(&dominant)).collect();
        let massive: Vec<bool> = model.cones.iter().map(|c| has_positive_measure(&c.region)).collect();
        let probes = if model.dim == 2 {
            Vec::new()
        } else {
            direction_grid(model.dim, probes)?
                .into_iter()
                .filter_map(|p| {
                    (0..model.cones.len())
                        .find(|&j| massive[j] && model.cones[j].region.contains(&p))
                        .map(|j| (p, j))
                })
                .collect()
        };
        Ok(AnalyticG {
            model,
            ratios,
            massive,
            probes,
        })
    }

    fn meets(&self, j: usize, a: &CapSet) -> bool {
        let region = &self.model.cones[j].region;
        if !self.massive[j] {
            return region
                .positive()
                .iter()
                .any(|b| region.contains(&b.center) && a.contains(&b.center));
        }
        match (region.arc_form(), a.arc_form()) {
            (Some(r), Some(x)) => r.intersection(x).has_positive_length(),
            _ => self.probes.iter().any(|(p, l)| *l == j && a.contains(p)),
        }
    }

    /// Tail ratio of cone `j` against the dominant law.
    pub fn ratio(&self, j: usize) -> Result<f64> {
        self.ratios[j].clone()
    }
}

impl GOracle for AnalyticG<'_> {
    fn g(&self, a: &CapSet) -> Result<f64> {
        if a.dim() != self.model.dim {
            return Err(Error::DimensionMismatch {
                expected: self.model.dim,
                got: a.dim(),
            });
        }
        let mut g = f64::INFINITY;
        for j in 0..self.model.cones.len() {
            if self.meets(j, a) {
                g = g.min(self.ratios[j].clone()?);
            }
        }
        Ok(g)
    }
}

pub fn analytic_g(model: &ConeMixtureModel, a: &CapSet) -> Result<f64> {
    AnalyticG::new(model)?.g(a)
}

/// Closure of the union of the positive-measure regions whose law has tail
/// ratio 1.
pub fn true_s(model: &ConeMixtureModel) -> Result<CapSet> {
    let oracle = AnalyticG::with_probes(model, 4)?;
    let mut s = CapSet::empty(model.dim);
    for (j, c) in model.cones.iter().enumerate() {
        if oracle.massive[j] && oracle.ratio(j)? == 1.0 {
            s = s.union(&c.region)?;
        }
    }
    Ok(s.closure())
}

/// `m` equal half-open sectors `[2πj/m, 2π(j+1)/m)` of the circle.
pub fn sectors(laws: &[RadialLaw]) -> Result<ConeMixtureModel> {
    let m = laws.len();
    let width = TAU / m as f64;
    let cones = laws
        .iter()
        .enumerate()
        .map(|(j, &law)| Cone {
            region: CapSet::from_arcs(ArcSet::arc(j as f64 * width, width, true, false)),
            weight: 1.0 / m as f64,
            law,
        })
        .collect();
    ConeMixtureModel::new(2, cones)
}

/// Eight sectors; sectors 0 and 4 (centred at π/8 and 9π/8) carry `heavy`.
pub fn eight_cone(heavy: RadialLaw, light: RadialLaw) -> Result<ConeMixtureModel> {
    let laws: Vec<RadialLaw> = (0..8).map(|j| if j % 4 == 0 { heavy } else { light }).collect();
    sectors(&laws)
}

/// Two heavy Pareto(2) sectors among six Weibull(0.5, 1) sectors.
pub fn eight_cone_default() -> ConeMixtureModel {
    eight_cone(RadialLaw::pareto(2.0), RadialLaw::weibull(0.5, 1.0)).expect("valid preset")
}

/// Eight sectors, all Pareto: index 2 in sectors 0 and 4, `alpha_light`
/// elsewhere.
pub fn pareto_gap(alpha_light: f64) -> Result<ConeMixtureModel> {
    eight_cone(RadialLaw::pareto(2.0), RadialLaw::pareto(alpha_light))
}

/// The upper half circle with `heavy`, the lower with `light`.
pub fn two_halves(heavy: RadialLaw, light: RadialLaw) -> Result<ConeMixtureModel> {
    sectors(&[heavy, light])
}

/// Uniform directions; arc `j` given as `(start, length, law)` carries its
/// law, the rest of the circle carries `rest`. Arcs must not overlap.
pub fn arc_mixture(parts: &[(f64, f64, RadialLaw)], rest: RadialLaw) -> Result<ConeMixtureModel> {
    let mut cones = Vec::with_capacity(parts.len() + 1);
    let mut covered = ArcSet::empty();
    for &(start, length, law) in parts {
        if !(length > 0.0 && length < TAU) {
            return Err(invalid("length", format!("arc length {length} not in (0, 2π)")));
        }
        let a = ArcSet::arc(start, length, true, false);
        if covered.intersection(&a).has_positive_length() {
            return Err(invalid("arcs", "arcs overlap"));
        }
        covered = covered.union(&a);
        cones.push(Cone {
            region: CapSet::from_arcs(a),
            weight: length / TAU,
            law,
        });
    }
    let remainder = covered.complement();
    if remainder.has_positive_length() {
        cones.push(Cone {
            weight: remainder.length() / TAU,
            region: CapSet::from_arcs(remainder),
            law: rest,
        });
    }
    let total: f64 = cones.iter().map(|c| c.weight).sum();
    cones.iter_mut().for_each(|c| c.weight /= total);
    ConeMixtureModel::new(2, cones)
}

/// Uniform directions with Pareto(2) radii on `[0, heavy_width)`,
/// Pareto(2.5) radii on `[π, π + mid_width)` and `light` radii elsewhere.
pub fn three_tier(heavy_width: f64, mid_width: f64, light: RadialLaw) -> Result<ConeMixtureModel> {
    arc_mixture(
        &[
            (0.0, heavy_width, RadialLaw::pareto(2.0)),
            (PI, mid_width, RadialLaw::pareto(2.5)),
        ],
        light,
    )
}

/// [`three_tier`] with a quarter circle of Pareto(2), a 0.15 rad arc of
/// Pareto(2.5) and Weibull(0.5, 4) elsewhere.
pub fn three_tier_default() -> ConeMixtureModel {
    three_tier(PI / 2.0, 0.15, RadialLaw::weibull(0.5, 4.0)).expect("valid preset")
}

/// A Pareto(2) point mass at `angle` with probability `weight`, and
/// `light` radii with uniform directions otherwise.
pub fn singleton(angle: f64, weight: f64, light: RadialLaw) -> Result<ConeMixtureModel> {
    let point = CapSet::from_ball(GeodesicBall::closed(UnitVector::from_angle(angle), 0.0)?);
    ConeMixtureModel::new(
        2,
        vec![
            Cone {
                region: point,
                weight,
                law: RadialLaw::pareto(2.0),
            },
            Cone {
                region: CapSet::full(2),
                weight: 1.0 - weight,
                law: light,
            },
        ],
    )
}

/// The twelve vertices of a regular icosahedron.
pub fn icosahedron_vertices() -> Vec<UnitVector> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            v.push(vec![0.0, a, b]);
            v.push(vec![a, b, 0.0]);
            v.push(vec![b, 0.0, a]);
        }
    }
    v.into_iter().map(|c| UnitVector::new(c).expect("non-zero")).collect()
}

/// Football-like model on `S^2`: twelve closed caps of radius `cap_radius`
/// at the icosahedron vertices with `heavy` radii, `light` elsewhere;
/// angular weights proportional to area.
pub fn football(cap_radius: f64, heavy: RadialLaw, light: RadialLaw) -> Result<ConeMixtureModel> {
    let centres = icosahedron_vertices();
    if !(cap_radius > 0.0 && cap_radius < 0.55) {
        return Err(invalid("cap_radius", format!("{cap_radius} not in (0, 0.55)")));
    }
    let share = (1.0 - cap_radius.cos()) / 2.0;
    let caps: Vec<GeodesicBall> = centres
        .iter()
        .map(|c| GeodesicBall::closed(c.clone(), cap_radius))
        .collect::<Result<_>>()?;
    let mut cones: Vec<Cone> = caps
        .iter()
        .map(|b| Cone {
            region: CapSet::from_ball(b.clone()),
            weight: share,
            law: heavy,
        })
        .collect();
    cones.push(Cone {
        region: CapSet::from_balls(3, vec![GeodesicBall::full(3)], caps)?,
        weight: 1.0 - 12.0 * share,
        law: light,
    });
    ConeMixtureModel::new(3, cones)
}
