use std::fmt;

use super::Scalar;
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` inside `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if lo.gt(&hi) {
            return Err(Error::InvalidInterval(format!("[{lo}, {hi}]: lo > hi")));
        }
        if lo.lt(&S::zero()) || hi.gt(&S::one()) {
            return Err(Error::InvalidInterval(format!("[{lo}, {hi}] not inside [0, 1]")));
        }
        Ok(Interval { lo, hi })
    }

    /// `[0, 1]`.
    pub fn unit() -> Self {
        Interval { lo: S::zero(), hi: S::one() }
    }

    pub fn point(x: S) -> Result<Self> {
        Self::new(x.clone(), x)
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn length(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn contains(&self, x: &S) -> bool {
        self.lo.le(x) && x.le(&self.hi)
    }

    /// `other ⊆ self`.
    pub fn contains_interval(&self, other: &Interval<S>) -> bool {
        self.lo.le(&other.lo) && other.hi.le(&self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo.eq_value(&self.hi)
    }

    pub fn midpoint(&self) -> S {
        self.lo.midpoint(&self.hi)
    }

    /// Builds an interval without the `[0, 1]` check. Used for images that
    /// are known to lie in `(0, 1)` by construction.
    pub(crate) fn raw(lo: S, hi: S) -> Self {
        Interval { lo, hi }
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Finite disjoint union of closed intervals.
///
/// Components are sorted by `lo` and separated by strictly positive gaps;
/// touching components are merged on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet<S> {
    components: Vec<Interval<S>>,
}

impl<S: Scalar> Default for IntervalSet<S> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<S: Scalar> IntervalSet<S> {
    pub fn empty() -> Self {
        IntervalSet { components: Vec::new() }
    }

    pub fn unit() -> Self {
        IntervalSet { components: vec![Interval::unit()] }
    }

    /// Sorts and merges an arbitrary list of intervals.
    pub fn normalize(raw: impl IntoIterator<Item = Interval<S>>) -> Self {
        let mut raw: Vec<Interval<S>> = raw.into_iter().collect();
        raw.sort_by(|a, b| a.lo.compare(&b.lo).then_with(|| a.hi.compare(&b.hi)));
        let mut components: Vec<Interval<S>> = Vec::with_capacity(raw.len());
        for iv in raw {
            match components.last_mut() {
                Some(last) if iv.lo.le(&last.hi) => {
                    if iv.hi.gt(&last.hi) {
                        last.hi = iv.hi;
                    }
                }
                _ => components.push(iv),
            }
        }
        IntervalSet { components }
    }

    /// Components already sorted, disjoint and inside `[0, 1]`.
    pub(crate) fn from_sorted(components: Vec<Interval<S>>) -> Self {
        IntervalSet { components }
    }

    pub fn components(&self) -> &[Interval<S>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Lebesgue measure of the union.
    pub fn measure(&self) -> S {
        S::sum_values(self.components.iter().flat_map(|c| [c.hi.clone(), -c.lo.clone()]))
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: &S) -> bool {
        // Components are sorted: binary search on the first component whose hi >= x.
        let idx = self.components.partition_point(|c| c.hi.lt(x));
        self.components.get(idx).is_some_and(|c| c.contains(x))
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Result<Interval<S>> {
        match (self.components.first(), self.components.last()) {
            (Some(first), Some(last)) => Ok(Interval::raw(first.lo.clone(), last.hi.clone())),
            _ => Err(Error::EmptySet),
        }
    }

    /// Every component of `self` lies inside a single component of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet<S>) -> bool {
        self.components.iter().all(|c| {
            let idx = other.components.partition_point(|o| o.hi.lt(&c.lo));
            other.components.get(idx).is_some_and(|o| o.contains_interval(c))
        })
    }

    pub fn union(&self, other: &IntervalSet<S>) -> Self {
        Self::normalize(self.components.iter().chain(other.components.iter()).cloned())
    }
}

impl<S: Scalar> FromIterator<Interval<S>> for IntervalSet<S> {
    fn from_iter<I: IntoIterator<Item = Interval<S>>>(iter: I) -> Self {
        Self::normalize(iter)
    }
}
