//! Finite unions of intervals on the real line.
//!
//! Sets are stored as sorted, pairwise-disjoint closed intervals `[lo, hi]`
//! with `lo < hi`. Intervals that overlap or touch are merged, so open/closed
//! endpoint conventions are only resolved up to sets of measure zero. The
//! unbounded line is represented with infinite endpoints.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Intersection, or `None` if it has zero length.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn real_line() -> Self {
        IntervalSet {
            parts: vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        Self::from_intervals(vec![Interval::new(lo, hi)])
    }

    /// Normalizes an arbitrary list: drops empty pieces, sorts by left
    /// endpoint and merges overlapping or touching neighbours.
    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| p.lo < p.hi);
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        IntervalSet { parts: merged }
    }

    /// Builds a set from `[lo, hi]` pairs, rejecting non-finite or reversed pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let mut parts = Vec::with_capacity(pairs.len());
        for &[lo, hi] in pairs {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return Err(Error::InvalidDomain(format!(
                    "interval [{lo}, {hi}] must be finite with lo < hi"
                )));
            }
            parts.push(Interval::new(lo, hi));
        }
        Ok(Self::from_intervals(parts))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        // parts are sorted; find the last interval starting at or before x
        let idx = self.parts.partition_point(|p| p.lo <= x);
        idx > 0 && self.parts[idx - 1].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Self::from_intervals(parts)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (self.parts[i], other.parts[j]);
            if let Some(c) = a.intersect(&b) {
                out.push(c);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { parts: out }
    }

    /// Intersection with a single interval.
    pub fn clip(&self, lo: f64, hi: f64) -> IntervalSet {
        self.intersection(&IntervalSet {
            parts: vec![Interval::new(lo, hi)],
        })
    }

    /// Closure of `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.parts {
            let mut cursor = a.lo;
            for b in &other.parts {
                if b.hi <= cursor {
                    continue;
                }
                if b.lo >= a.hi {
                    break;
                }
                if b.lo > cursor {
                    out.push(Interval::new(cursor, b.lo));
                }
                cursor = cursor.max(b.hi);
                if cursor >= a.hi {
                    break;
                }
            }
            if cursor < a.hi {
                out.push(Interval::new(cursor, a.hi));
            }
        }
        Self::from_intervals(out)
    }

    /// Minkowski sum with the ball `(-r, r)`.
    pub fn dilate(&self, r: f64) -> IntervalSet {
        Self::from_intervals(
            self.parts
                .iter()
                .map(|p| Interval::new(p.lo - r, p.hi + r))
                .collect(),
        )
    }

    /// Returns the first piece of `self` not contained in `other` (up to
    /// `tol` at each endpoint), or `None` if `self ⊆ other`.
    pub fn first_not_contained_in(&self, other: &IntervalSet, tol: f64) -> Option<Interval> {
        self.parts.iter().copied().find(|p| {
            !other
                .parts
                .iter()
                .any(|q| q.lo - tol <= p.lo && p.hi <= q.hi + tol)
        })
    }

    /// Euclidean distance from `x` to the set (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                if x < p.lo {
                    p.lo - x
                } else if x > p.hi {
                    x - p.hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(pairs: &[[f64; 2]]) -> IntervalSet {
        IntervalSet::from_pairs(pairs).unwrap()
    }

    #[test]
    fn merges_touching_and_overlapping() {
        let s = set(&[[2.0, 3.0], [0.0, 1.0], [1.0, 1.5], [2.5, 4.0]]);
        assert_eq!(s.intervals(), &[Interval::new(0.0, 1.5), Interval::new(2.0, 4.0)]);
    }

    #[test]
    fn difference_and_dilation() {
        let omega = set(&[[0.0, 1.0]]);
        let collar = omega.dilate(1.0).difference(&omega);
        assert_eq!(collar.intervals(), &[Interval::new(-1.0, 0.0), Interval::new(1.0, 2.0)]);
        assert_eq!(collar.measure(), 2.0);
    }

    #[test]
    fn containment_report() {
        let big = set(&[[-1.0, 0.0], [1.0, 2.0]]);
        assert!(set(&[[-0.5, 0.0]]).first_not_contained_in(&big, 0.0).is_none());
        let bad = set(&[[-0.5, 0.0], [0.5, 1.5]]);
        assert_eq!(
            bad.first_not_contained_in(&big, 0.0),
            Some(Interval::new(0.5, 1.5))
        );
    }

    #[test]
    fn real_line_intersection() {
        let r = IntervalSet::real_line().clip(-2.0, 3.0);
        assert_eq!(r.intervals(), &[Interval::new(-2.0, 3.0)]);
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((-10.0f64..10.0, 0.01f64..3.0), 0..6).prop_map(|v| {
            IntervalSet::from_intervals(v.into_iter().map(|(a, l)| Interval::new(a, a + l)).collect())
        })
    }

    proptest! {
        #[test]
        fn normalized_sets_are_sorted_and_separated(s in arb_set()) {
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn inclusion_exclusion(a in arb_set(), b in arb_set()) {
            let lhs = a.union(&b).measure();
            let rhs = a.measure() + b.measure() - a.intersection(&b).measure();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs));
            let split = a.difference(&b).measure() + a.intersection(&b).measure();
            prop_assert!((split - a.measure()).abs() <= 1e-12 * (1.0 + split));
        }

        #[test]
        fn membership_agrees_with_operations(a in arb_set(), b in arb_set(), x in -12.0f64..12.0) {
            prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
            if a.contains(x) && b.contains(x) {
                prop_assert!(a.intersection(&b).contains(x));
            }
        }
    }
}
