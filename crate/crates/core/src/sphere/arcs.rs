//! Exact interval arithmetic on the circle.
//!
//! A set is stored as sorted, pairwise disjoint, non-touching intervals of
//! `[0, 2π)`, each with its own endpoint closure flags. An arc that crosses
//! angle 0 is stored as two intervals, `[a, 2π)` and `[0, b]`; [`ArcSet::arcs`]
//! joins them back for presentation.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::normalize_angle;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }
}

/// A circular arc starting at `start` and running counter-clockwise for
/// `length` radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
    pub start_closed: bool,
    pub end_closed: bool,
}

impl Arc {
    pub fn end(&self) -> f64 {
        normalize_angle(self.start + self.length)
    }

    pub fn midpoint(&self) -> f64 {
        normalize_angle(self.start + self.length / 2.0)
    }
}

/// Subset of the circle as a finite union of arcs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArcSet {
    parts: Vec<Interval>,
}

/// Shortest angular distance between two angles.
pub(crate) fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { parts: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet {
            parts: vec![Interval {
                lo: 0.0,
                hi: TAU,
                lo_closed: true,
                hi_closed: false,
            }],
        }
    }

    pub fn point(theta: f64) -> Self {
        let t = normalize_angle(theta);
        ArcSet {
            parts: vec![Interval {
                lo: t,
                hi: t,
                lo_closed: true,
                hi_closed: true,
            }],
        }
    }

    /// Arc from `start` running `length` radians counter-clockwise.
    pub fn arc(start: f64, length: f64, start_closed: bool, end_closed: bool) -> Self {
        if length >= TAU {
            return Self::full();
        }
        if length <= 0.0 {
            return if length == 0.0 && start_closed && end_closed {
                Self::point(start)
            } else {
                Self::empty()
            };
        }
        let lo = normalize_angle(start);
        let hi = lo + length;
        let mut parts = Vec::with_capacity(2);
        if hi < TAU {
            parts.push(Interval {
                lo,
                hi,
                lo_closed: start_closed,
                hi_closed: end_closed,
            });
        } else {
            parts.push(Interval {
                lo,
                hi: TAU,
                lo_closed: start_closed,
                hi_closed: false,
            });
            let wrapped = hi - TAU;
            parts.push(Interval {
                lo: 0.0,
                hi: wrapped.min(lo),
                lo_closed: true,
                hi_closed: end_closed || wrapped >= lo,
            });
        }
        Self::normalized(parts)
    }

    /// The angular interval covered by the ball of the given radius around
    /// the angle `center`.
    pub fn from_ball(center: f64, radius: f64, closed: bool) -> Self {
        if radius == 0.0 {
            return if closed { Self::point(center) } else { Self::empty() };
        }
        if radius >= PI {
            if closed || radius > PI {
                return Self::full();
            }
            return Self::point(center + PI).complement();
        }
        Self::arc(center - radius, 2.0 * radius, closed, closed)
    }

    fn normalized(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        parts.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap().then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = out.last_mut() {
                let joins = p.lo < last.hi || (p.lo == last.hi && (p.lo_closed || last.hi_closed));
                if joins {
                    if p.lo == last.lo {
                        last.lo_closed |= p.lo_closed;
                    }
                    if p.hi > last.hi {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    } else if p.hi == last.hi {
                        last.hi_closed |= p.hi_closed;
                    }
                    continue;
                }
            }
            out.push(p);
        }
        ArcSet { parts: out }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.parts.len() == 1 && {
            let p = &self.parts[0];
            p.lo == 0.0 && p.lo_closed && p.hi >= TAU
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = normalize_angle(theta);
        self.parts.iter().any(|p| p.contains(t))
    }

    /// Total angular length.
    pub fn length(&self) -> f64 {
        self.parts.iter().map(|p| p.hi - p.lo).sum()
    }

    /// True if the set contains an interval of positive length.
    pub fn has_positive_length(&self) -> bool {
        self.parts.iter().any(|p| p.hi > p.lo)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Self::normalized(parts)
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = 0.0;
        let mut cursor_closed = true;
        for p in &self.parts {
            out.push(Interval {
                lo: cursor,
                hi: p.lo,
                lo_closed: cursor_closed,
                hi_closed: !p.lo_closed,
            });
            cursor = p.hi;
            cursor_closed = !p.hi_closed;
        }
        if cursor < TAU {
            out.push(Interval {
                lo: cursor,
                hi: TAU,
                lo_closed: cursor_closed,
                hi_closed: false,
            });
        }
        Self::normalized(out)
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersection(&other.complement())
    }

    /// Same point set with every endpoint included.
    pub fn closure(&self) -> ArcSet {
        let parts = self
            .parts
            .iter()
            .map(|p| Interval {
                lo: p.lo,
                hi: p.hi,
                lo_closed: true,
                hi_closed: p.hi < TAU,
            })
            .collect();
        let mut s = Self::normalized(parts);
        // a part ending at 2π means the closure contains angle 0
        if self.parts.last().is_some_and(|p| p.hi >= TAU) {
            s = s.union(&Self::point(0.0));
        }
        s
    }

    /// Open `delta`-neighbourhood `{x : dist(x, A) < delta}`.
    pub fn swell(&self, delta: f64) -> ArcSet {
        let parts = self
            .arcs()
            .into_iter()
            .map(|a| ArcSet::arc(a.start - delta, a.length + 2.0 * delta, false, false))
            .fold(ArcSet::empty(), |acc, s| acc.union(&s));
        if self.is_full() {
            return Self::full();
        }
        parts
    }

    /// Canonical list of maximal arcs, with an arc crossing angle 0 joined
    /// into one. The full circle is a single arc of length 2π.
    pub fn arcs(&self) -> Vec<Arc> {
        if self.is_full() {
            return vec![Arc {
                start: 0.0,
                length: TAU,
                start_closed: true,
                end_closed: true,
            }];
        }
        let mut arcs: Vec<Arc> = self
            .parts
            .iter()
            .map(|p| Arc {
                start: p.lo,
                length: p.hi - p.lo,
                start_closed: p.lo_closed,
                end_closed: p.hi_closed,
            })
            .collect();
        let n = arcs.len();
        if n >= 2 {
            let first = self.parts[0];
            let last = self.parts[n - 1];
            if first.lo == 0.0 && first.lo_closed && last.hi >= TAU {
                let head = arcs.remove(0);
                let tail = arcs.last_mut().unwrap();
                tail.length += head.length;
                tail.end_closed = head.end_closed;
            }
        }
        arcs
    }

    /// Distance from an angle to the closure of the set.
    pub fn dist_to(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        self.parts
            .iter()
            .map(|p| {
                if t >= p.lo && t <= p.hi {
                    0.0
                } else {
                    circ_dist(t, p.lo).min(circ_dist(t, p.hi))
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `sup_{a ∈ self} dist(a, other)`, exact. Both sets must be non-empty.
    pub fn directed_hausdorff(&self, other: &ArcSet) -> f64 {
        if other.is_full() {
            return 0.0;
        }
        // dist(·, other) is piecewise linear with its local maxima at the
        // midpoints of the gaps of `other`, so the supremum over `self` is
        // attained at an endpoint of `self` or at such a midpoint.
        let mut candidates: Vec<f64> = self.parts.iter().flat_map(|p| [p.lo, p.hi]).collect();
        let closure = self.closure();
        for gap in other.closure().complement().arcs() {
            let mid = gap.midpoint();
            if closure.contains(mid) {
                candidates.push(mid);
            }
        }
        candidates.into_iter().map(|c| other.dist_to(c)).fold(0.0, f64::max)
    }

    /// Hausdorff distance between the closures; `None` if either is empty.
    pub fn hausdorff(&self, other: &ArcSet) -> Option<f64> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        Some(self.directed_hausdorff(other).max(other.directed_hausdorff(self)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_around_arc() {
        let a = ArcSet::arc(-0.5, 1.0, false, false);
        assert!(a.contains(0.0));
        assert!(a.contains(TAU - 0.4));
        assert!(a.contains(0.4));
        assert!(!a.contains(0.5));
        assert!(!a.contains(TAU - 0.5));
        let arcs = a.arcs();
        assert_eq!(arcs.len(), 1);
        assert!((arcs[0].start - (TAU - 0.5)).abs() < 1e-15);
        assert!((arcs[0].length - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_respects_endpoints() {
        let a = ArcSet::arc(1.0, 1.0, true, false);
        let c = a.complement();
        assert!(!c.contains(1.0));
        assert!(c.contains(2.0));
        assert!(c.contains(0.0));
        assert!(a.union(&c).is_full());
        assert!(a.intersection(&c).is_empty());
        assert!(ArcSet::full().complement().is_empty());
        assert!(ArcSet::empty().complement().is_full());
    }

    #[test]
    fn open_half_ball_of_radius_pi_misses_antipode() {
        let a = ArcSet::from_ball(0.0, PI, false);
        assert!(!a.contains(PI));
        assert!(a.contains(PI - 1e-9));
        assert!(a.contains(0.0));
    }

    #[test]
    fn swell_merges_close_arcs() {
        // arcs [0, 1] and [1.2, 2]; gap 0.2 < 2δ = 0.3
        let a = ArcSet::arc(0.0, 1.0, true, true).union(&ArcSet::arc(1.2, 0.8, true, true));
        let s = a.swell(0.15);
        let arcs = s.arcs();
        assert_eq!(arcs.len(), 1);
        assert!((arcs[0].start - (TAU - 0.15)).abs() < 1e-12);
        assert!((arcs[0].length - 2.3).abs() < 1e-12);
        // gap larger than 2δ stays split
        assert_eq!(a.swell(0.05).arcs().len(), 2);
    }

    #[test]
    fn hausdorff_examples() {
        let a = ArcSet::arc(0.0, PI / 2.0, true, true);
        assert_eq!(a.hausdorff(&a), Some(0.0));
        let b = ArcSet::arc(0.1, PI / 2.0, true, true);
        assert!((a.hausdorff(&b).unwrap() - 0.1).abs() < 1e-12);
        let c = ArcSet::arc(0.0, PI / 4.0, true, true);
        let d = ArcSet::arc(PI / 2.0, PI / 4.0, true, true);
        assert!((c.hausdorff(&d).unwrap() - PI / 2.0).abs() < 1e-12);
        assert_eq!(a.hausdorff(&ArcSet::empty()), None);
        // point inside a long arc: sup attained at the far end of the arc
        let p = ArcSet::point(1.0);
        let long = ArcSet::arc(0.0, 3.0, true, true);
        assert!((long.hausdorff(&p).unwrap() - 2.0).abs() < 1e-12);
        // full circle vs a point: antipode is the farthest
        assert!((ArcSet::full().hausdorff(&p).unwrap() - PI).abs() < 1e-12);
    }

    fn brute_hausdorff(a: &ArcSet, b: &ArcSet) -> f64 {
        let m = 3_000;
        let pts = |s: &ArcSet| -> Vec<f64> {
            let mut v: Vec<f64> = (0..m)
                .map(|i| TAU * i as f64 / m as f64)
                .filter(|t| s.closure().contains(*t))
                .collect();
            v.extend(s.parts.iter().flat_map(|p| [p.lo, p.hi]));
            v
        };
        let (pa, pb) = (pts(a), pts(b));
        let dir = |x: &[f64], y: &[f64]| {
            x.iter()
                .map(|s| y.iter().map(|t| circ_dist(*s, *t)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        dir(&pa, &pb).max(dir(&pb, &pa))
    }

    fn arb_arcset() -> impl Strategy<Value = ArcSet> {
        prop::collection::vec((0.0..TAU, 0.0..2.5f64, any::<bool>(), any::<bool>()), 1..4).prop_map(|v| {
            v.into_iter()
                .map(|(s, l, a, b)| ArcSet::arc(s, l, a, b))
                .fold(ArcSet::empty(), |acc, x| acc.union(&x))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hausdorff_matches_brute_force(a in arb_arcset(), b in arb_arcset()) {
            prop_assume!(!a.is_empty() && !b.is_empty());
            let exact = a.hausdorff(&b).unwrap();
            let brute = brute_hausdorff(&a, &b);
            prop_assert!((exact - brute).abs() < 2.0 * TAU / 3_000.0, "{} vs {}", exact, brute);
        }

        #[test]
        fn boolean_algebra_pointwise(a in arb_arcset(), b in arb_arcset(), t in 0.0..TAU) {
            prop_assert_eq!(a.union(&b).contains(t), a.contains(t) || b.contains(t));
            prop_assert_eq!(a.intersection(&b).contains(t), a.contains(t) && b.contains(t));
            prop_assert_eq!(a.difference(&b).contains(t), a.contains(t) && !b.contains(t));
            prop_assert_eq!(a.complement().contains(t), !a.contains(t));
        }

        #[test]
        fn swell_is_monotone(a in arb_arcset(), d1 in 0.01..0.5f64, extra in 0.0..0.5f64, t in 0.0..TAU) {
            let s1 = a.swell(d1);
            let s2 = a.swell(d1 + extra);
            if a.contains(t) { prop_assert!(s1.contains(t)); }
            if s1.contains(t) { prop_assert!(s2.contains(t)); }
            prop_assert_eq!(s1.contains(t), a.dist_to(t) < d1);
        }
    }
}
