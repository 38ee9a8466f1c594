use std::f64::consts::{PI, TAU};

use super::arcs::ArcSet;
use super::{ball_complement, direction_grid, dist, GeodesicBall, UnitVector};
use crate::error::{invalid, Error, Result};

/// `(∪ positive) \ (∪ negative)`: a finite union of caps with a finite union
/// of caps removed.
///
/// On the circle the set also keeps its exact interval form; set operations
/// are then done on intervals and the ball lists are rebuilt from the result.
/// In higher dimensions set operations are exact but only available when
/// the result is again of the form above (see [`Error::Unrepresentable`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CapSet {
    dim: usize,
    positive: Vec<GeodesicBall>,
    negative: Vec<GeodesicBall>,
    arcs: Option<ArcSet>,
}

enum Form {
    Empty,
    Full,
    FullMinus,
    Union,
    General,
}

fn ball_arcs(b: &GeodesicBall) -> ArcSet {
    ArcSet::from_ball(b.center.angle(), b.radius, b.closed)
}

fn balls_disjoint(a: &GeodesicBall, b: &GeodesicBall) -> bool {
    let d = dist(&a.center, &b.center);
    d > a.radius + b.radius || (d == a.radius + b.radius && !(a.closed && b.closed))
}

fn ball_within(inner: &GeodesicBall, outer: &GeodesicBall) -> bool {
    if outer.is_full() || inner.is_empty() {
        return true;
    }
    let reach = dist(&inner.center, &outer.center) + inner.radius;
    reach < outer.radius || (reach == outer.radius && (outer.closed || !inner.closed))
}

impl CapSet {
    pub fn empty(dim: usize) -> Self {
        CapSet {
            dim,
            positive: Vec::new(),
            negative: Vec::new(),
            arcs: (dim == 2).then(ArcSet::empty),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self::from_ball(GeodesicBall::full(dim))
    }

    pub fn from_ball(ball: GeodesicBall) -> Self {
        let dim = ball.dim();
        let arcs = (dim == 2).then(|| ball_arcs(&ball));
        CapSet {
            dim,
            positive: vec![ball],
            negative: Vec::new(),
            arcs,
        }
    }

    /// `(∪ positive) \ (∪ negative)`; every ball must have dimension `dim`.
    pub fn from_balls(dim: usize, positive: Vec<GeodesicBall>, negative: Vec<GeodesicBall>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if let Some(b) = positive.iter().chain(&negative).find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
        let arcs = (dim == 2).then(|| {
            let pos = positive.iter().fold(ArcSet::empty(), |acc, b| acc.union(&ball_arcs(b)));
            let neg = negative.iter().fold(ArcSet::empty(), |acc, b| acc.union(&ball_arcs(b)));
            pos.difference(&neg)
        });
        Ok(CapSet {
            dim,
            positive,
            negative,
            arcs,
        })
    }

    /// Builds the circle set from its interval form. Each arc becomes one
    /// ball; an arc with one open and one closed end becomes an open ball
    /// plus the closed endpoint as a radius-0 closed ball.
    pub fn from_arcs(arcs: ArcSet) -> Self {
        let mut positive = Vec::new();
        if arcs.is_full() {
            positive.push(GeodesicBall::full(2));
        } else {
            for a in arcs.arcs() {
                let center = UnitVector::from_angle(a.midpoint());
                let radius = (a.length / 2.0).min(PI);
                if a.length == 0.0 {
                    positive.push(GeodesicBall {
                        center,
                        radius: 0.0,
                        closed: true,
                    });
                    continue;
                }
                let closed = a.start_closed && a.end_closed;
                positive.push(GeodesicBall { center, radius, closed });
                if !closed {
                    for (is_closed, angle) in [(a.start_closed, a.start), (a.end_closed, a.end())] {
                        if is_closed {
                            positive.push(GeodesicBall {
                                center: UnitVector::from_angle(angle),
                                radius: 0.0,
                                closed: true,
                            });
                        }
                    }
                }
            }
        }
        CapSet {
            dim: 2,
            positive,
            negative: Vec::new(),
            arcs: Some(arcs),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positive(&self) -> &[GeodesicBall] {
        &self.positive
    }

    pub fn negative(&self) -> &[GeodesicBall] {
        &self.negative
    }

    /// Exact interval form, present for `d = 2`.
    pub fn arc_form(&self) -> Option<&ArcSet> {
        self.arcs.as_ref()
    }

    pub fn contains(&self, x: &UnitVector) -> bool {
        self.positive.iter().any(|b| b.contains(x)) && !self.negative.iter().any(|b| b.contains(x))
    }

    /// Membership in a superset of the closure: positive balls taken closed,
    /// negative balls taken open.
    pub fn contains_closure(&self, x: &UnitVector) -> bool {
        if let Some(a) = &self.arcs {
            return a.closure().contains(x.angle());
        }
        let near = |b: &GeodesicBall| dist(&b.center, x) <= b.radius;
        let inside = |b: &GeodesicBall| dist(&b.center, x) < b.radius;
        self.positive.iter().any(near) && !self.negative.iter().any(inside)
    }

    fn form(&self) -> Form {
        let pos: Vec<&GeodesicBall> = self.positive.iter().filter(|b| !b.is_empty()).collect();
        let neg_empty = self.negative.iter().all(|b| b.is_empty());
        if pos.is_empty() || self.negative.iter().any(|b| b.is_full()) {
            Form::Empty
        } else if pos.iter().any(|b| b.is_full()) {
            if neg_empty {
                Form::Full
            } else {
                Form::FullMinus
            }
        } else if neg_empty {
            Form::Union
        } else {
            Form::General
        }
    }

    /// Exact on the circle; in higher dimensions a set whose positive balls
    /// are all covered by negative balls is detected by probing points of
    /// each positive ball.
    pub fn is_empty(&self) -> bool {
        if let Some(a) = &self.arcs {
            return a.is_empty();
        }
        match self.form() {
            Form::Empty => true,
            Form::Full | Form::Union => false,
            Form::FullMinus | Form::General => !self.probe_points(512).iter().any(|p| self.contains(p)),
        }
    }

    pub fn is_full(&self) -> bool {
        if let Some(a) = &self.arcs {
            return a.is_full();
        }
        matches!(self.form(), Form::Full)
    }

    fn probe_points(&self, per_ball: usize) -> Vec<UnitVector> {
        let mut pts = Vec::new();
        let global = direction_grid(self.dim, per_ball.max(4)).unwrap_or_default();
        for b in self.positive.iter().filter(|b| !b.is_empty()) {
            pts.push(b.center.clone());
            for r in [0.25, 0.5, 0.75, 0.999] {
                pts.extend(boundary_points(&b.center, b.radius * r, per_ball / 8 + 4));
            }
        }
        pts.extend(global);
        pts
    }

    fn check_dim(&self, other: &CapSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &CapSet) -> Result<CapSet> {
        self.check_dim(other)?;
        if let (Some(a), Some(b)) = (&self.arcs, &other.arcs) {
            return Ok(CapSet::from_arcs(a.union(b)));
        }
        let (a, b) = (self, other);
        Ok(match (a.form(), b.form()) {
            (Form::Empty, _) => b.clone(),
            (_, Form::Empty) => a.clone(),
            (Form::Full, _) | (_, Form::Full) => CapSet::full(a.dim),
            _ => {
                let covered = |neg: &[GeodesicBall], pos: &[GeodesicBall]| {
                    neg.iter().all(|n| pos.iter().any(|p| ball_within(n, p)))
                };
                let a_full = matches!(a.form(), Form::FullMinus);
                let b_full = matches!(b.form(), Form::FullMinus);
                if (a_full && covered(&a.negative, &b.positive) && b.negative.is_empty())
                    || (b_full && covered(&b.negative, &a.positive) && a.negative.is_empty())
                {
                    return Ok(CapSet::full(a.dim));
                }
                let disjoint = |neg: &[GeodesicBall], pos: &[GeodesicBall]| {
                    neg.iter()
                        .all(|n| pos.iter().all(|p| p.is_empty() || balls_disjoint(n, p)))
                };
                if disjoint(&a.negative, &b.positive) && disjoint(&b.negative, &a.positive) {
                    let positive = a.positive.iter().chain(&b.positive).cloned().collect();
                    let negative = a.negative.iter().chain(&b.negative).cloned().collect();
                    CapSet::from_balls(a.dim, positive, negative)?
                } else {
                    return Err(Error::Unrepresentable);
                }
            }
        })
    }

    pub fn complement(&self) -> Result<CapSet> {
        if let Some(a) = &self.arcs {
            return Ok(CapSet::from_arcs(a.complement()));
        }
        let dim = self.dim;
        let live_neg: Vec<GeodesicBall> = self.negative.iter().filter(|b| !b.is_empty()).cloned().collect();
        match self.form() {
            Form::Empty => Ok(CapSet::full(dim)),
            Form::Full => Ok(CapSet::empty(dim)),
            Form::FullMinus => CapSet::from_balls(dim, live_neg, Vec::new()),
            Form::Union => CapSet::from_balls(dim, vec![GeodesicBall::full(dim)], self.positive.clone()),
            Form::General => {
                let live_pos: Vec<&GeodesicBall> = self.positive.iter().filter(|b| !b.is_empty()).collect();
                if live_pos.len() == 1 {
                    let mut positive = vec![ball_complement(live_pos[0])];
                    positive.extend(live_neg);
                    CapSet::from_balls(dim, positive, Vec::new())
                } else {
                    Err(Error::Unrepresentable)
                }
            }
        }
    }

    pub fn intersection(&self, other: &CapSet) -> Result<CapSet> {
        self.check_dim(other)?;
        if let (Some(a), Some(b)) = (&self.arcs, &other.arcs) {
            return Ok(CapSet::from_arcs(a.intersection(b)));
        }
        let (a, b) = (self, other);
        let negative = || a.negative.iter().chain(&b.negative).cloned().collect::<Vec<_>>();
        match (a.form(), b.form()) {
            (Form::Empty, _) | (_, Form::Empty) => Ok(CapSet::empty(a.dim)),
            (Form::Full | Form::FullMinus, _) => CapSet::from_balls(a.dim, b.positive.clone(), negative()),
            (_, Form::Full | Form::FullMinus) => CapSet::from_balls(a.dim, a.positive.clone(), negative()),
            _ => {
                // A ∩ (P \ N) = A \ (P^c ∪ N) when the other side has a single positive ball
                for (x, y) in [(a, b), (b, a)] {
                    let live: Vec<&GeodesicBall> = y.positive.iter().filter(|p| !p.is_empty()).collect();
                    if live.len() == 1 {
                        let mut neg = x.negative.clone();
                        neg.push(ball_complement(live[0]));
                        neg.extend(y.negative.iter().cloned());
                        return CapSet::from_balls(a.dim, x.positive.clone(), neg);
                    }
                }
                a.complement()?.union(&b.complement()?)?.complement()
            }
        }
    }

    pub fn difference(&self, other: &CapSet) -> Result<CapSet> {
        self.check_dim(other)?;
        if let (Some(a), Some(b)) = (&self.arcs, &other.arcs) {
            return Ok(CapSet::from_arcs(a.difference(b)));
        }
        if matches!(other.form(), Form::Union | Form::Empty) {
            let mut negative = self.negative.clone();
            negative.extend(other.positive.iter().cloned());
            return CapSet::from_balls(self.dim, self.positive.clone(), negative);
        }
        self.intersection(&other.complement()?)
    }

    /// Superset of the closure (exact on the circle and for caps in general
    /// position): positive balls closed, negative balls open.
    pub fn closure(&self) -> CapSet {
        if let Some(a) = &self.arcs {
            return CapSet::from_arcs(a.closure());
        }
        let close = |b: &GeodesicBall, closed| GeodesicBall { closed, ..b.clone() };
        CapSet {
            dim: self.dim,
            positive: self.positive.iter().map(|b| close(b, true)).collect(),
            negative: self
                .negative
                .iter()
                .filter(|b| b.radius > 0.0)
                .map(|b| close(b, false))
                .collect(),
            arcs: None,
        }
    }

    /// Fraction of the sphere's surface covered: exact on the circle,
    /// otherwise the fraction of `resolution` quasi-uniform points inside.
    pub fn measure_fraction(&self, resolution: usize) -> f64 {
        if let Some(a) = &self.arcs {
            return a.length() / TAU;
        }
        let grid = direction_grid(self.dim, resolution.max(4)).unwrap_or_default();
        grid.iter().filter(|p| self.contains(p)).count() as f64 / grid.len() as f64
    }

    fn sample_points(&self, resolution: usize) -> Vec<UnitVector> {
        let mut pts: Vec<UnitVector> = direction_grid(self.dim, resolution.max(4))
            .unwrap_or_default()
            .into_iter()
            .filter(|p| self.contains_closure(p))
            .collect();
        let per_ball = (resolution / 4).max(32);
        for b in self.positive.iter().chain(&self.negative) {
            pts.push(b.center.clone());
            pts.extend(boundary_points(&b.center, b.radius, per_ball));
        }
        pts.retain(|p| self.contains_closure(p));
        pts
    }
}

/// Points on the boundary circle of the cap `B(center, radius)`.
fn boundary_points(center: &UnitVector, radius: f64, count: usize) -> Vec<UnitVector> {
    let d = center.dim();
    if radius <= 0.0 {
        return vec![center.clone()];
    }
    if radius >= PI {
        return vec![center.antipode()];
    }
    // orthonormal basis of the tangent space at `center`
    let c = center.coords();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        let proj: f64 = c[k];
        for (ei, ci) in e.iter_mut().zip(c) {
            *ei -= proj * ci;
        }
        for b in &basis {
            let p: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
            for (ei, bi) in e.iter_mut().zip(b) {
                *ei -= p * bi;
            }
        }
        let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(e.into_iter().map(|x| x / n).collect());
        }
        if basis.len() == d - 1 {
            break;
        }
    }
    let dirs: Vec<Vec<f64>> = if d - 1 == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        direction_grid(d - 1, count.max(4))
            .unwrap_or_default()
            .into_iter()
            .map(Vec::from)
            .collect()
    };
    let (s, co) = radius.sin_cos();
    dirs.iter()
        .map(|w| {
            let mut z: Vec<f64> = c.iter().map(|x| co * x).collect();
            for (wk, b) in w.iter().zip(&basis) {
                for (zi, bi) in z.iter_mut().zip(b) {
                    *zi += s * wk * bi;
                }
            }
            let n = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            UnitVector::from_raw_unchecked(z.into_iter().map(|x| x / n).collect())
        })
        .collect()
}

/// Geodesic `delta`-swelling `{x : dist(x, a) < delta}`.
///
/// Exact on the circle. In higher dimensions positive balls grow by `delta`
/// and negative balls shrink by `delta`, which is exact for unions of balls.
pub fn swell(a: &CapSet, delta: f64) -> Result<CapSet> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    if let Some(arcs) = &a.arcs {
        return Ok(CapSet::from_arcs(arcs.swell(delta)));
    }
    let positive = a
        .positive
        .iter()
        .filter(|b| !b.is_empty())
        .map(|b| {
            let r = b.radius + delta;
            if r >= PI {
                GeodesicBall::full(a.dim)
            } else {
                GeodesicBall {
                    center: b.center.clone(),
                    radius: r,
                    closed: false,
                }
            }
        })
        .collect();
    let negative = a
        .negative
        .iter()
        .filter(|b| b.radius > delta)
        .map(|b| GeodesicBall {
            center: b.center.clone(),
            radius: b.radius - delta,
            closed: b.closed,
        })
        .collect();
    CapSet::from_balls(a.dim, positive, negative)
}

/// Hausdorff distance between the closures of two sets.
///
/// Exact on the circle. For `d >= 3` both sets are replaced by finite point
/// samples (`resolution` quasi-uniform points of the sphere plus points on
/// every cap boundary, kept if they lie in the set) and the sampled
/// distance is returned; its error is of the order of the sample spacing.
pub fn hausdorff_dist(a: &CapSet, b: &CapSet, resolution: usize) -> Result<f64> {
    a.check_dim(b)?;
    if let (Some(x), Some(y)) = (&a.arcs, &b.arcs) {
        return x.hausdorff(y).ok_or(Error::EmptySet);
    }
    let pa = a.sample_points(resolution);
    let pb = b.sample_points(resolution);
    if pa.is_empty() || pb.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = |from: &[UnitVector], to_set: &CapSet, to: &[UnitVector]| {
        from.iter()
            .map(|p| {
                if to_set.contains_closure(p) {
                    0.0
                } else {
                    to.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min)
                }
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&pa, b, &pb).max(directed(&pb, a, &pa)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::uniform_on_sphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball2(angle: f64, r: f64, closed: bool) -> GeodesicBall {
        GeodesicBall::new(UnitVector::from_angle(angle), r, closed).unwrap()
    }

    fn arc_set(start: f64, end: f64) -> CapSet {
        CapSet::from_arcs(ArcSet::arc(start, end - start, true, true))
    }

    #[test]
    fn ball_and_arc_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let pos: Vec<_> = (0..3)
                .map(|_| ball2(rng.gen_range(0.0..TAU), rng.gen_range(0.0..1.5), rng.gen()))
                .collect();
            let neg: Vec<_> = (0..2)
                .map(|_| ball2(rng.gen_range(0.0..TAU), rng.gen_range(0.0..0.8), rng.gen()))
                .collect();
            let s = CapSet::from_balls(2, pos, neg).unwrap();
            let rebuilt = CapSet::from_arcs(s.arc_form().unwrap().clone());
            for _ in 0..500 {
                let p = uniform_on_sphere(&mut rng, 2);
                let by_arcs = s.arc_form().unwrap().contains(p.angle());
                assert_eq!(s.contains(&p), by_arcs);
                assert_eq!(rebuilt.contains(&p), by_arcs);
            }
        }
    }

    #[test]
    fn half_open_arc_rebuilds_endpoint() {
        let s = CapSet::from_arcs(ArcSet::arc(0.5, 1.0, true, false));
        assert!(s.contains(&UnitVector::from_angle(0.5)) || s.arc_form().unwrap().contains(0.5));
        assert!(s.positive().iter().any(|b| b.radius == 0.0 && b.closed));
    }

    #[test]
    fn swell_examples() {
        let x = UnitVector::from_angle(1.0);
        let b = CapSet::from_ball(GeodesicBall::open(x.clone(), 0.3).unwrap());
        let s = swell(&b, 0.2).unwrap();
        let expected = ArcSet::from_ball(1.0, 0.5, false);
        let got = s.arc_form().unwrap();
        assert_eq!(got.arcs().len(), 1);
        assert!((got.arcs()[0].start - expected.arcs()[0].start).abs() < 1e-12);
        assert!((got.length() - 1.0).abs() < 1e-12);

        assert!(swell(&CapSet::full(2), 0.1).unwrap().is_full());
        assert!(swell(&CapSet::full(3), 0.1).unwrap().is_full());
        assert!(swell(&b, 0.0).is_err());
        assert!(swell(&b, -1.0).is_err());

        let b3 = CapSet::from_ball(GeodesicBall::open(UnitVector::new(vec![0.0, 0.0, 1.0]).unwrap(), 0.3).unwrap());
        let s3 = swell(&b3, 0.2).unwrap();
        assert_eq!(s3.positive()[0].radius, 0.5);
    }

    #[test]
    fn swell_monotone_in_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pos: Vec<_> = (0..3)
            .map(|_| GeodesicBall::open(uniform_on_sphere(&mut rng, 3), rng.gen_range(0.1..1.0)).unwrap())
            .collect();
        let a = CapSet::from_balls(3, pos, vec![]).unwrap();
        let s1 = swell(&a, 0.1).unwrap();
        let s2 = swell(&a, 0.3).unwrap();
        for _ in 0..5000 {
            let p = uniform_on_sphere(&mut rng, 3);
            if a.contains(&p) {
                assert!(s1.contains(&p));
            }
            if s1.contains(&p) {
                assert!(s2.contains(&p));
            }
        }
    }

    #[test]
    fn hausdorff_on_circle() {
        let a = arc_set(0.0, PI / 2.0);
        assert_eq!(hausdorff_dist(&a, &a, 100).unwrap(), 0.0);
        let b = arc_set(0.2, PI / 2.0 + 0.2);
        assert!((hausdorff_dist(&a, &b, 100).unwrap() - 0.2).abs() < 1e-12);
        let c = arc_set(0.0, PI / 4.0);
        let d = arc_set(PI / 2.0, 3.0 * PI / 4.0);
        assert!((hausdorff_dist(&c, &d, 100).unwrap() - PI / 2.0).abs() < 1e-12);
        assert_eq!(hausdorff_dist(&c, &CapSet::empty(2), 100), Err(Error::EmptySet));
    }

    #[test]
    fn hausdorff_sampled_in_3d() {
        let n = UnitVector::new(vec![0.0, 0.0, 1.0]).unwrap();
        let a = CapSet::from_ball(GeodesicBall::closed(n.clone(), 0.5).unwrap());
        let b = CapSet::from_ball(GeodesicBall::closed(n.clone(), 0.7).unwrap());
        let h = hausdorff_dist(&a, &b, 2000).unwrap();
        assert!((h - 0.2).abs() < 0.02, "{h}");
        assert!(hausdorff_dist(&a, &a, 500).unwrap() < 1e-12);
        assert_eq!(hausdorff_dist(&a, &CapSet::empty(3), 500), Err(Error::EmptySet));
        // a point-like set deep inside a big cap: sup is attained in the interior
        let tiny = CapSet::from_ball(GeodesicBall::closed(n.clone(), 0.0).unwrap());
        let h = hausdorff_dist(&a, &tiny, 2000).unwrap();
        assert!((h - 0.5).abs() < 0.02, "{h}");
    }

    #[test]
    fn set_operations_in_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b1 = GeodesicBall::open(uniform_on_sphere(&mut rng, 3), 0.8).unwrap();
        let b2 = GeodesicBall::closed(uniform_on_sphere(&mut rng, 3), 0.6).unwrap();
        let a = CapSet::from_ball(b1.clone());
        let d = CapSet::from_ball(b2.clone());
        let union = a.union(&d).unwrap();
        let comp = a.complement().unwrap();
        let inter = a.intersection(&d).unwrap();
        let diff = a.difference(&d).unwrap();
        let everything = a.union(&comp).unwrap();
        assert!(everything.is_full());
        let comp_general = diff.complement().unwrap();
        for _ in 0..5000 {
            let p = uniform_on_sphere(&mut rng, 3);
            let (x, y) = (a.contains(&p), d.contains(&p));
            assert_eq!(union.contains(&p), x || y);
            assert_eq!(comp.contains(&p), !x);
            assert_eq!(inter.contains(&p), x && y);
            assert_eq!(diff.contains(&p), x && !y);
            assert_eq!(comp_general.contains(&p), !(x && !y));
        }
        assert!(CapSet::empty(3).is_empty());
        assert!(!a.is_empty());
        assert!(a.difference(&a).unwrap().is_empty());
    }

    #[test]
    fn unrepresentable_union_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = uniform_on_sphere(&mut rng, 3);
        let a = CapSet::from_balls(
            3,
            vec![GeodesicBall::open(c.clone(), 1.0).unwrap()],
            vec![GeodesicBall::open(c.clone(), 0.2).unwrap()],
        )
        .unwrap();
        let b = CapSet::from_ball(GeodesicBall::open(c, 0.5).unwrap());
        assert_eq!(a.union(&b), Err(Error::Unrepresentable));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = CapSet::full(2);
        let b = CapSet::full(3);
        assert!(matches!(a.union(&b), Err(Error::DimensionMismatch { .. })));
        assert!(CapSet::from_balls(3, vec![GeodesicBall::full(2)], vec![]).is_err());
    }
}
