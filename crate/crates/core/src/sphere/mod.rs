//! Geometry of the unit sphere under the geodesic (great-circle) metric.
//!
//! Everything here works with l2-normalised directions. Distances are in
//! radians and lie in `[0, π]`. Caps are [`GeodesicBall`]s; finite unions of
//! caps minus finite unions of caps are [`CapSet`]s. On the circle (`d = 2`)
//! a [`CapSet`] also carries an exact interval form, [`ArcSet`], which makes
//! every set operation exact there.

mod arcs;
mod capset;

pub use arcs::{Arc, ArcSet};
pub use capset::{hausdorff_dist, swell, CapSet};

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance on the l2 norm of a stored unit vector.
pub const UNIT_TOL: f64 = 1e-9;

/// Seed used by [`direction_grid`] for `d > 3`.
pub const DEFAULT_GRID_SEED: u64 = 0x5eed_0fd1;

/// A point on the unit sphere `S^{d-1}`, `d >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalises `coords` to unit l2 length.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coords", "non-finite coordinate"));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("coords", "zero vector has no direction"));
        }
        let mut coords = coords;
        if (norm - 1.0).abs() > f64::EPSILON {
            coords.iter_mut().for_each(|c| *c /= norm);
        }
        Ok(UnitVector(coords))
    }

    /// The point `(cos θ, sin θ)` on the circle.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVector(vec![c, s])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Polar angle in `[0, 2π)`; only meaningful for `d = 2`.
    pub fn angle(&self) -> f64 {
        normalize_angle(self.0[1].atan2(self.0[0]))
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn antipode(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }

    pub(crate) fn from_raw_unchecked(coords: Vec<f64>) -> Self {
        UnitVector(coords)
    }

    fn check_dim(&self, other: &UnitVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Geodesic distance `arccos(x · y)` between two unit vectors.
pub fn geodesic_dist(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(dist(x, y))
}

// arccos of the clamped dot product loses half the significant digits near 0
// and π; the chord forms below are the same function evaluated stably, and
// give exactly 0 for identical and exactly π for antipodal inputs.
pub(crate) fn dist(x: &UnitVector, y: &UnitVector) -> f64 {
    let mut dot = 0.0;
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (a, b) in x.0.iter().zip(&y.0) {
        dot += a * b;
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    if dot >= 0.0 {
        2.0 * (diff.sqrt() / 2.0).min(1.0).asin()
    } else {
        PI - 2.0 * (sum.sqrt() / 2.0).min(1.0).asin()
    }
}

/// Open (`closed = false`) or closed geodesic ball `B(center, radius)`.
///
/// Radius 0 closed is the singleton `{center}`, radius 0 open is empty, and
/// radius π closed is the whole sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicBall {
    pub center: UnitVector,
    pub radius: f64,
    pub closed: bool,
}

impl GeodesicBall {
    pub fn new(center: UnitVector, radius: f64, closed: bool) -> Result<Self> {
        if !(0.0..=PI).contains(&radius) {
            return Err(invalid("radius", format!("{radius} not in [0, π]")));
        }
        Ok(GeodesicBall { center, radius, closed })
    }

    pub fn open(center: UnitVector, radius: f64) -> Result<Self> {
        Self::new(center, radius, false)
    }

    pub fn closed(center: UnitVector, radius: f64) -> Result<Self> {
        Self::new(center, radius, true)
    }

    /// The closed ball of radius π around an arbitrary centre.
    pub fn full(dim: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[0] = 1.0;
        GeodesicBall {
            center: UnitVector(c),
            radius: PI,
            closed: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, y: &UnitVector) -> bool {
        let d = dist(&self.center, y);
        if self.closed {
            d <= self.radius
        } else {
            d < self.radius
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.closed && self.radius == 0.0
    }

    pub fn is_full(&self) -> bool {
        self.radius >= PI && self.closed
    }
}

/// Complement of a ball: `B(x, r)^c = B̄(-x, π - r)` and vice versa.
///
/// The returned ball has the opposite `closed` flag, so the input and the
/// output partition the sphere.
pub fn ball_complement(b: &GeodesicBall) -> GeodesicBall {
    GeodesicBall {
        center: b.center.antipode(),
        radius: (PI - b.radius).max(0.0),
        closed: !b.closed,
    }
}

/// Point at geodesic distance `t` from `x` along the minimising geodesic
/// towards `target` (spherical linear interpolation).
pub fn geodesic_point_between(x: &UnitVector, target: &UnitVector, t: f64) -> Result<UnitVector> {
    x.check_dim(target)?;
    let total = dist(x, target);
    if total <= 1e-12 || total >= PI - 1e-12 {
        return Err(Error::DegenerateGeodesic);
    }
    if !(0.0..=total).contains(&t) {
        return Err(invalid("t", format!("{t} not in [0, {total}]")));
    }
    let dot = x.dot(target);
    let mut w: Vec<f64> = target.0.iter().zip(&x.0).map(|(y, x)| y - dot * x).collect();
    let wn = w.iter().map(|c| c * c).sum::<f64>().sqrt();
    w.iter_mut().for_each(|c| *c /= wn);
    let (s, c) = t.sin_cos();
    let z = x.0.iter().zip(&w).map(|(a, b)| c * a + s * b).collect();
    UnitVector::new(z)
}

/// Deterministic set of `m` directions covering `S^{d-1}`.
///
/// `d = 2`: equally spaced angles starting at 0. `d = 3`: Fibonacci lattice.
/// `d > 3`: normalised Gaussian draws from a fixed seed.
pub fn direction_grid(d: usize, m: usize) -> Result<Vec<UnitVector>> {
    direction_grid_seeded(d, m, DEFAULT_GRID_SEED)
}

pub fn direction_grid_seeded(d: usize, m: usize, seed: u64) -> Result<Vec<UnitVector>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if m < 4 {
        return Err(invalid("m", format!("grid needs at least 4 directions, got {m}")));
    }
    let grid = match d {
        2 => (0..m)
            .map(|i| UnitVector::from_angle(TAU * i as f64 / m as f64))
            .collect(),
        3 => fibonacci_lattice(m),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m).map(|_| uniform_on_sphere(&mut rng, d)).collect()
        }
    };
    Ok(grid)
}

fn fibonacci_lattice(m: usize) -> Vec<UnitVector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            UnitVector(vec![r * c, r * s, z])
        })
        .collect()
}

/// Uniform draw on `S^{d-1}`.
pub fn uniform_on_sphere<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-24 {
            let n = n2.sqrt();
            return UnitVector(v.into_iter().map(|c| c / n).collect());
        }
    }
}

/// Uniform draw (w.r.t. surface measure) on the cap `B̄(center, radius)`.
pub fn uniform_in_cap<R: Rng + ?Sized>(rng: &mut R, center: &UnitVector, radius: f64) -> UnitVector {
    let d = center.dim();
    let radius = radius.clamp(0.0, PI);
    if radius == 0.0 {
        return center.clone();
    }
    if d == 2 {
        let theta = center.angle() + rng.gen_range(-radius..=radius);
        return UnitVector::from_angle(theta);
    }
    // polar angle density on the cap is proportional to sin^{d-2}(θ)
    let peak = if radius >= PI / 2.0 { 1.0 } else { radius.sin() };
    let theta = loop {
        let t = rng.gen::<f64>() * radius;
        if rng.gen::<f64>() <= (t.sin() / peak).powi(d as i32 - 2) {
            break t;
        }
    };
    let tangent = loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let proj: f64 = g.iter().zip(&center.0).map(|(a, b)| a * b).sum();
        let w: Vec<f64> = g.iter().zip(&center.0).map(|(a, b)| a - proj * b).collect();
        let n = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-12 {
            break w.into_iter().map(|c| c / n).collect::<Vec<_>>();
        }
    };
    let (s, c) = theta.sin_cos();
    let z: Vec<f64> = center.0.iter().zip(&tangent).map(|(a, b)| c * a + s * b).collect();
    let n = z.iter().map(|c| c * c).sum::<f64>().sqrt();
    UnitVector(z.into_iter().map(|c| c / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn uv(c: &[f64]) -> UnitVector {
        UnitVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn trivial_distances() {
        let x = uv(&[1.0, 0.0]);
        let y = uv(&[0.0, 1.0]);
        assert_eq!(geodesic_dist(&x, &x).unwrap(), 0.0);
        assert_eq!(geodesic_dist(&x, &x.antipode()).unwrap(), PI);
        assert!((geodesic_dist(&x, &y).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let x = uv(&[1.0, 0.0]);
        let y = uv(&[0.0, 1.0, 0.0]);
        assert!(matches!(geodesic_dist(&x, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unit_vector_renormalises_and_rejects_bad_input() {
        let u = uv(&[3.0, 4.0]);
        assert!((u.coords()[0] - 0.6).abs() < 1e-15);
        assert!(UnitVector::new(vec![0.0, 0.0]).is_err());
        assert!(matches!(UnitVector::new(vec![1.0]), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn complement_examples() {
        let b = GeodesicBall::open(uv(&[1.0, 0.0]), PI / 4.0).unwrap();
        let c = ball_complement(&b);
        assert!(c.closed);
        assert_eq!(c.center, uv(&[-1.0, 0.0]));
        assert!((c.radius - 3.0 * PI / 4.0).abs() < 1e-15);

        let x = uv(&[0.0, 1.0]);
        let c = ball_complement(&GeodesicBall::open(x.clone(), PI).unwrap());
        assert_eq!(c.radius, 0.0);
        assert!(c.closed);
        assert!(c.contains(&x.antipode()));
        assert!(!c.contains(&x));

        // closed input flips to open
        let c = ball_complement(&GeodesicBall::closed(x.clone(), 1.0).unwrap());
        assert!(!c.closed);
    }

    #[test]
    fn complement_partitions_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = uniform_on_sphere(&mut rng, 3);
            let r = rng.gen_range(1e-6..=PI);
            let b = GeodesicBall::open(x, r).unwrap();
            let c = ball_complement(&b);
            let p = uniform_on_sphere(&mut rng, 3);
            assert!(b.contains(&p) ^ c.contains(&p));
        }
    }

    #[test]
    fn grid_examples() {
        let g = direction_grid(2, 4).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (u, e) in g.iter().zip(expected) {
            assert!((u.coords()[0] - e[0]).abs() < 1e-15 && (u.coords()[1] - e[1]).abs() < 1e-15);
        }

        let g = direction_grid(2, 360).unwrap();
        for w in g.windows(2) {
            assert!((dist(&w[0], &w[1]) - PI / 180.0).abs() < 1e-12);
        }

        let g = direction_grid(3, 100).unwrap();
        assert_eq!(g.len(), 100);
        let mut min = f64::INFINITY;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                min = min.min(dist(&g[i], &g[j]));
            }
        }
        assert!(min > 0.1, "min pairwise distance {min}");

        assert!(direction_grid(2, 3).is_err());
        assert!(direction_grid(1, 10).is_err());
        assert_eq!(direction_grid(5, 20).unwrap(), direction_grid(5, 20).unwrap());
        assert!(direction_grid(5, 20).unwrap().iter().all(|u| u.dim() == 5));
    }

    #[test]
    fn slerp_endpoints() {
        let x = uv(&[1.0, 0.0, 0.0]);
        let y = uv(&[0.0, 1.0, 1.0]);
        assert_eq!(geodesic_point_between(&x, &y, 0.0).unwrap(), x);
        let end = geodesic_point_between(&x, &y, dist(&x, &y)).unwrap();
        assert!(dist(&end, &y) < 1e-9);
        assert_eq!(geodesic_point_between(&x, &x, 0.0), Err(Error::DegenerateGeodesic));
        assert_eq!(
            geodesic_point_between(&x, &x.antipode(), 0.0),
            Err(Error::DegenerateGeodesic)
        );
        assert!(geodesic_point_between(&x, &y, 4.0).is_err());
    }

    #[test]
    fn cap_sampling_stays_in_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2, 3, 5] {
            let c = uniform_on_sphere(&mut rng, d);
            for _ in 0..500 {
                let p = uniform_in_cap(&mut rng, &c, 0.3);
                assert!(dist(&c, &p) <= 0.3 + 1e-12);
            }
        }
    }

    #[test]
    fn cap_sampling_is_uniform_on_s2() {
        // for a uniform law on a cap of S^2, 1 - cos θ is uniform on [0, 1 - cos r]
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = uv(&[0.0, 0.0, 1.0]);
        let r = 1.0f64;
        let n = 20_000;
        let below = (0..n)
            .filter(|_| {
                let p = uniform_in_cap(&mut rng, &c, r);
                (1.0 - p.coords()[2]) < (1.0 - r.cos()) / 2.0
            })
            .count();
        let frac = below as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.015, "{frac}");
    }

    proptest! {
        #[test]
        fn metric_axioms(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = uniform_on_sphere(&mut rng, d);
            let y = uniform_on_sphere(&mut rng, d);
            let z = uniform_on_sphere(&mut rng, d);
            prop_assert_eq!(dist(&x, &y), dist(&y, &x));
            prop_assert!(dist(&x, &z) <= dist(&x, &y) + dist(&y, &z) + 1e-9);
            prop_assert!((0.0..=PI).contains(&dist(&x, &y)));
        }

        #[test]
        fn dist_agrees_with_arccos(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = uniform_on_sphere(&mut rng, 4);
            let y = uniform_on_sphere(&mut rng, 4);
            let reference = x.dot(&y).clamp(-1.0, 1.0).acos();
            prop_assert!((dist(&x, &y) - reference).abs() < 1e-7);
        }
    }
}
