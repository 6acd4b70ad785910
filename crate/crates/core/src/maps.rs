//! Contractions of `[0, 1]` into `(0, 1)`.
//!
//! The descriptor universe is closed: affine maps, monotone quadratics,
//! clamps of another descriptor, and finite compositions. Every descriptor is
//! continuous and piecewise monotone with computable kinks, which is what
//! makes exact interval images and pointwise preimages possible.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{Interval, Scalar};

/// Default stopping tolerance of fixed-point iteration for nonlinear maps.
pub const DEFAULT_EPS_FP: f64 = 1e-13;
/// Default iteration cap of fixed-point iteration.
pub const DEFAULT_FP_MAX_ITER: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind<S> {
    /// `x ↦ slope·x + intercept`
    Affine { slope: S, intercept: S },
    /// `x ↦ a·x² + b·x + c`, monotone on `[0, 1]`
    Quadratic { a: S, b: S, c: S },
    /// `inner` on `[lo, hi]`, constant `inner(lo)` on `[0, lo]` and
    /// constant `inner(hi)` on `[hi, 1]`.
    Clamped { inner: Box<MapDescriptor<S>>, lo: S, hi: S },
    /// `chain[0]` is applied first: the map is `chain[k-1] ∘ … ∘ chain[0]`.
    Composed { chain: Vec<MapDescriptor<S>> },
}

/// A validated contraction. Construct through [`MapDescriptor::affine`],
/// [`MapDescriptor::quadratic`], [`MapDescriptor::clamped`],
/// [`MapDescriptor::composed`] or [`compose`].
#[derive(Clone, Debug, PartialEq)]
pub struct MapDescriptor<S> {
    kind: MapKind<S>,
}

/// Certified Lipschitz constant `κ < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzBound<S>(S);

impl<S: Scalar> LipschitzBound<S> {
    pub fn value(&self) -> &S {
        &self.0
    }
}

/// Result of [`MapDescriptor::preimage`].
#[derive(Clone, Debug, PartialEq)]
pub struct Preimage<S> {
    /// Ascending solutions; plateau endpoints when `non_discrete`.
    pub points: Vec<S>,
    /// A plateau attains the target value, so the solution set contains an
    /// interval.
    pub non_discrete: bool,
    /// `false` when a quadratic root had to be computed in floating point.
    pub exact: bool,
}

impl<S: Scalar> Preimage<S> {
    fn none() -> Self {
        Preimage { points: Vec::new(), non_discrete: false, exact: true }
    }

    fn merge(&mut self, other: Preimage<S>) {
        self.points.extend(other.points);
        self.non_discrete |= other.non_discrete;
        self.exact &= other.exact;
    }

    fn finish(mut self) -> Self {
        self.points.sort_by(|a, b| a.compare(b));
        self.points.dedup_by(|a, b| a.eq_value(b));
        self
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointOptions {
    pub eps_fp: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { eps_fp: DEFAULT_EPS_FP, max_iter: DEFAULT_FP_MAX_ITER }
    }
}

impl<S: Scalar> MapDescriptor<S> {
    pub fn affine(slope: S, intercept: S) -> Result<Self> {
        MapDescriptor { kind: MapKind::Affine { slope, intercept } }.validated()
    }

    pub fn quadratic(a: S, b: S, c: S) -> Result<Self> {
        let slope0 = b.clone();
        let slope1 = a.clone() + a.clone() + b.clone();
        let sign = |v: &S| v.compare(&S::zero());
        use std::cmp::Ordering::*;
        match (sign(&slope0), sign(&slope1)) {
            (Less, Greater) | (Greater, Less) => {
                return Err(Error::InvalidMap(format!(
                    "quadratic {a}x²+{b}x+{c} is not monotone on [0, 1]"
                )))
            }
            _ => {}
        }
        MapDescriptor { kind: MapKind::Quadratic { a, b, c } }.validated()
    }

    pub fn clamped(inner: MapDescriptor<S>, lo: S, hi: S) -> Result<Self> {
        if lo.lt(&S::zero()) || hi.gt(&S::one()) || !lo.lt(&hi) {
            return Err(Error::InvalidMap(format!("clamp bounds must satisfy 0 ≤ lo < hi ≤ 1, got [{lo}, {hi}]")));
        }
        MapDescriptor { kind: MapKind::Clamped { inner: Box::new(inner), lo, hi } }.validated()
    }

    /// `chain[0]` is applied first.
    pub fn composed(chain: Vec<MapDescriptor<S>>) -> Result<Self> {
        match chain.len() {
            0 => Err(Error::InvalidMap("composed chain must be non-empty".into())),
            _ => MapDescriptor { kind: MapKind::Composed { chain } }.validated(),
        }
    }

    /// Constant map `x ↦ value`.
    pub fn constant(value: S) -> Result<Self> {
        Self::affine(S::zero(), value)
    }

    fn validated(self) -> Result<Self> {
        let kappa = self.raw_lipschitz();
        if !kappa.lt(&S::one()) {
            return Err(Error::InvalidMap(format!("Lipschitz bound {kappa} ≥ 1")));
        }
        let image = self.image(&Interval::unit());
        if !(image.lo().gt(&S::zero()) && image.hi().lt(&S::one())) {
            return Err(Error::InvalidMap(format!("image {image} of [0, 1] is not inside (0, 1)")));
        }
        Ok(self)
    }

    pub fn kind(&self) -> &MapKind<S> {
        &self.kind
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, MapKind::Affine { .. })
    }

    /// True when no quadratic piece is involved, so the map is continuous
    /// piecewise affine.
    pub fn is_piecewise_affine(&self) -> bool {
        match &self.kind {
            MapKind::Affine { .. } => true,
            MapKind::Quadratic { .. } => false,
            MapKind::Clamped { inner, .. } => inner.is_piecewise_affine(),
            MapKind::Composed { chain } => chain.iter().all(|m| m.is_piecewise_affine()),
        }
    }

    /// `m(x)` for `x ∈ [0, 1]`.
    pub fn eval(&self, x: &S) -> Result<S> {
        if x.lt(&S::zero()) || x.gt(&S::one()) {
            return Err(Error::Domain { value: x.to_string(), domain: "[0, 1]" });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &S) -> S {
        match &self.kind {
            MapKind::Affine { slope, intercept } => S::mul_add(slope, x, intercept),
            MapKind::Quadratic { a, b, c } => S::mul_add(&S::mul_add(a, x, b), x, c),
            MapKind::Clamped { inner, lo, hi } => inner.eval_unchecked(&clamp(x, lo, hi)),
            MapKind::Composed { chain } => {
                chain.iter().fold(x.clone(), |acc, m| m.eval_unchecked(&acc))
            }
        }
    }

    fn raw_lipschitz(&self) -> S {
        match &self.kind {
            MapKind::Affine { slope, .. } => slope.abs(),
            MapKind::Quadratic { a, b, .. } => {
                let end = a.clone() + a.clone() + b.clone();
                b.abs().max_of(&end.abs())
            }
            MapKind::Clamped { inner, .. } => inner.raw_lipschitz(),
            MapKind::Composed { chain } => {
                chain.iter().fold(S::one(), |acc, m| acc * m.raw_lipschitz())
            }
        }
    }

    /// Affine → `|a|`; quadratic → `max(|b|, |2a + b|)`; clamp → bound of
    /// the inner map; composition → product of the chain's bounds.
    pub fn lipschitz_bound(&self) -> LipschitzBound<S> {
        LipschitzBound(self.raw_lipschitz())
    }

    /// Exact image of the closed interval `iv ⊆ [0, 1]`.
    pub fn image(&self, iv: &Interval<S>) -> Interval<S> {
        match &self.kind {
            MapKind::Affine { .. } | MapKind::Quadratic { .. } => {
                // Monotone on [0, 1]: the image is spanned by the endpoint values.
                let u = self.eval_unchecked(iv.lo());
                let v = self.eval_unchecked(iv.hi());
                if u.le(&v) {
                    Interval::raw(u, v)
                } else {
                    Interval::raw(v, u)
                }
            }
            MapKind::Clamped { inner, lo, hi } => {
                inner.image(&Interval::raw(clamp(iv.lo(), lo, hi), clamp(iv.hi(), lo, hi)))
            }
            MapKind::Composed { chain } => {
                chain.iter().fold(iv.clone(), |acc, m| m.image(&acc))
            }
        }
    }

    /// All `x ∈ domain` with `m(x) = y`, ascending.
    pub fn preimage(&self, y: &S, domain: &Interval<S>) -> Preimage<S> {
        self.preimage_raw(y, domain).finish()
    }

    fn preimage_raw(&self, y: &S, domain: &Interval<S>) -> Preimage<S> {
        match &self.kind {
            MapKind::Affine { slope, intercept } => {
                if slope.is_zero_value() {
                    if intercept.eq_value(y) {
                        Preimage {
                            points: vec![domain.lo().clone(), domain.hi().clone()],
                            non_discrete: true,
                            exact: true,
                        }
                    } else {
                        Preimage::none()
                    }
                } else {
                    let x = (y.clone() - intercept.clone()) / slope.clone();
                    let points = if domain.contains(&x) { vec![x] } else { Vec::new() };
                    Preimage { points, non_discrete: false, exact: true }
                }
            }
            MapKind::Quadratic { a, b, c } => {
                if a.is_zero_value() {
                    let lin = MapDescriptor { kind: MapKind::Affine { slope: b.clone(), intercept: c.clone() } };
                    return lin.preimage_raw(y, domain);
                }
                solve_quadratic(a, b, &(c.clone() - y.clone()), domain)
            }
            MapKind::Clamped { inner, lo, hi } => {
                let mut out = Preimage::none();
                // Left plateau [0, lo] (only when it has positive length).
                if lo.gt(&S::zero()) && domain.lo().le(lo) && inner.eval_unchecked(lo).eq_value(y) {
                    out.merge(Preimage {
                        points: vec![domain.lo().clone(), lo.min_of(domain.hi())],
                        non_discrete: true,
                        exact: true,
                    });
                }
                if hi.lt(&S::one()) && domain.hi().ge(hi) && inner.eval_unchecked(hi).eq_value(y) {
                    out.merge(Preimage {
                        points: vec![hi.max_of(domain.lo()), domain.hi().clone()],
                        non_discrete: true,
                        exact: true,
                    });
                }
                let mid_lo = domain.lo().max_of(lo);
                let mid_hi = domain.hi().min_of(hi);
                if mid_lo.le(&mid_hi) {
                    out.merge(inner.preimage_raw(y, &Interval::raw(mid_lo, mid_hi)));
                }
                out
            }
            MapKind::Composed { chain } => {
                let mut out = Preimage { points: vec![y.clone()], non_discrete: false, exact: true };
                for (j, m) in chain.iter().enumerate().rev() {
                    let dom = if j == 0 { domain.clone() } else { Interval::unit() };
                    let mut next = Preimage::none();
                    next.non_discrete = out.non_discrete;
                    next.exact = out.exact;
                    for target in &out.points {
                        next.merge(m.preimage_raw(target, &dom));
                    }
                    out = next.finish();
                }
                out
            }
        }
    }

    /// Points of `(0, 1)` where the derivative may jump, ascending.
    pub fn kinks(&self) -> Vec<S> {
        let mut out = match &self.kind {
            MapKind::Affine { .. } | MapKind::Quadratic { .. } => Vec::new(),
            MapKind::Clamped { inner, lo, hi } => {
                let mut v: Vec<S> = inner.kinks().into_iter().filter(|k| lo.lt(k) && k.lt(hi)).collect();
                if lo.gt(&S::zero()) {
                    v.push(lo.clone());
                }
                if hi.lt(&S::one()) {
                    v.push(hi.clone());
                }
                v
            }
            MapKind::Composed { chain } => {
                let mut v = chain[0].kinks();
                for j in 1..chain.len() {
                    let prefix = MapDescriptor { kind: MapKind::Composed { chain: chain[..j].to_vec() } };
                    for k in chain[j].kinks() {
                        v.extend(prefix.preimage(&k, &Interval::unit()).points);
                    }
                }
                v
            }
        };
        out.retain(|k| k.gt(&S::zero()) && k.lt(&S::one()));
        out.sort_by(|a, b| a.compare(b));
        out.dedup_by(|a, b| a.eq_value(b));
        out
    }

    /// Upper bound of `|Dm|` over `iv`.
    pub fn slope_bound_on(&self, iv: &Interval<S>) -> S {
        match &self.kind {
            MapKind::Affine { slope, .. } => slope.abs(),
            MapKind::Quadratic { a, b, .. } => {
                // 2ax + b is linear in x: extremes sit at the endpoints.
                let two_a = a.clone() + a.clone();
                let at_lo = two_a.clone() * iv.lo().clone() + b.clone();
                let at_hi = two_a * iv.hi().clone() + b.clone();
                at_lo.abs().max_of(&at_hi.abs())
            }
            MapKind::Clamped { inner, lo, hi } => {
                if iv.hi().le(lo) || iv.lo().ge(hi) {
                    S::zero()
                } else {
                    inner.slope_bound_on(&Interval::raw(iv.lo().max_of(lo), iv.hi().min_of(hi)))
                }
            }
            MapKind::Composed { chain } => {
                let mut range = iv.clone();
                let mut bound = S::one();
                for m in chain {
                    bound = bound * m.slope_bound_on(&range);
                    range = m.image(&range);
                }
                bound
            }
        }
    }

    /// The unique `z` with `m(z) = z`.
    pub fn fixed_point(&self) -> Result<S> {
        self.fixed_point_with(&FixedPointOptions::default())
    }

    pub fn fixed_point_with(&self, opts: &FixedPointOptions) -> Result<S> {
        if let MapKind::Affine { slope, intercept } = &self.kind {
            return Ok(intercept.clone() / (S::one() - slope.clone()));
        }
        if self.is_piecewise_affine() {
            return self.piecewise_affine_fixed_point();
        }
        if let MapKind::Quadratic { a, b, c } = &self.kind {
            if a.is_zero_value() {
                return Ok(c.clone() / (S::one() - b.clone()));
            }
            // a z² + (b − 1) z + c = 0 has exactly one root in [0, 1].
            let roots = solve_quadratic(a, &(b.clone() - S::one()), c, &Interval::unit());
            if roots.exact && roots.points.len() == 1 {
                return Ok(roots.points[0].clone());
            }
        }
        let mut x = 0.5f64;
        let f64_map = |v: f64| self.eval_unchecked(&S::from_f64(v)).to_f64();
        for _ in 0..opts.max_iter {
            let next = f64_map(x);
            if (next - x).abs() <= opts.eps_fp {
                return Ok(S::from_f64(next));
            }
            x = next;
        }
        Err(Error::IterationCap(opts.max_iter))
    }

    /// On each piece between consecutive kinks the map is affine; solve
    /// `z = a z + b` there and keep the root that lands in its piece.
    fn piecewise_affine_fixed_point(&self) -> Result<S> {
        let mut cuts = vec![S::zero()];
        cuts.extend(self.kinks());
        cuts.push(S::one());
        for w in cuts.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            let mp = self.eval_unchecked(p);
            let mq = self.eval_unchecked(q);
            let slope = (mq - mp.clone()) / (q.clone() - p.clone());
            let intercept = mp - slope.clone() * p.clone();
            let z = intercept / (S::one() - slope);
            if p.le(&z) && z.le(q) {
                return Ok(z);
            }
        }
        Err(Error::Inconsistent(format!("no fixed point found for {self}")))
    }
}

/// `outer ∘ inner`. Affine pairs collapse to a single affine map; other
/// combinations become a flattened [`MapKind::Composed`] chain.
pub fn compose<S: Scalar>(outer: &MapDescriptor<S>, inner: &MapDescriptor<S>) -> MapDescriptor<S> {
    match (&outer.kind, &inner.kind) {
        (
            MapKind::Affine { slope: a1, intercept: b1 },
            MapKind::Affine { slope: a2, intercept: b2 },
        ) => MapDescriptor {
            kind: MapKind::Affine {
                slope: a1.clone() * a2.clone(),
                intercept: a1.clone() * b2.clone() + b1.clone(),
            },
        },
        _ => {
            let mut chain = Vec::new();
            for m in [inner, outer] {
                match &m.kind {
                    MapKind::Composed { chain: c } => chain.extend(c.iter().cloned()),
                    _ => chain.push(m.clone()),
                }
            }
            // Both operands are valid contractions into (0, 1), so the
            // composition is one as well.
            MapDescriptor { kind: MapKind::Composed { chain } }
        }
    }
}

/// Composes a digit word (1-based map indices), `word[0]` applied first.
/// `None` for the empty word, i.e. the identity.
pub fn compose_word<S: Scalar>(maps: &[MapDescriptor<S>], word: &[usize]) -> Option<MapDescriptor<S>> {
    let mut iter = word.iter();
    let first = maps[*iter.next()? - 1].clone();
    Some(iter.fold(first, |acc, &d| compose(&maps[d - 1], &acc)))
}

fn clamp<S: Scalar>(x: &S, lo: &S, hi: &S) -> S {
    if x.lt(lo) {
        lo.clone()
    } else if x.gt(hi) {
        hi.clone()
    } else {
        x.clone()
    }
}

/// Roots of `a x² + b x + c` in `domain`, `a ≠ 0`.
fn solve_quadratic<S: Scalar>(a: &S, b: &S, c: &S, domain: &Interval<S>) -> Preimage<S> {
    let four = S::from_ratio(4, 1);
    let two = S::from_ratio(2, 1);
    let disc = b.clone() * b.clone() - four * a.clone() * c.clone();
    if disc.lt(&S::zero()) {
        return Preimage::none();
    }
    let (roots, exact) = match disc.sqrt_exact() {
        Some(r) => {
            let denom = two * a.clone();
            (
                vec![(-b.clone() - r.clone()) / denom.clone(), (-b.clone() + r) / denom],
                true,
            )
        }
        None => {
            let (af, bf, df) = (a.to_f64(), b.to_f64(), disc.to_f64().max(0.0).sqrt());
            // Numerically stable pair of roots.
            let qf = -0.5 * (bf + bf.signum() * df);
            let mut v = vec![qf / af];
            if qf != 0.0 {
                v.push(c.to_f64() / qf);
            }
            (v.into_iter().map(S::from_f64).collect(), false)
        }
    };
    Preimage {
        points: roots.into_iter().filter(|x| domain.contains(x)).collect(),
        non_discrete: false,
        exact,
    }
}

impl<S: Scalar> fmt::Display for MapDescriptor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Affine { slope, intercept } => write!(f, "affine {slope} {intercept}"),
            MapKind::Quadratic { a, b, c } => write!(f, "quadratic {a} {b} {c}"),
            MapKind::Clamped { inner, lo, hi } => write!(f, "clamped {lo} {hi} ({inner})"),
            MapKind::Composed { chain } => {
                write!(f, "composed(")?;
                for (i, m) in chain.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Float, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn aff(a: &str, b: &str) -> MapDescriptor<Rational> {
        MapDescriptor::affine(q(a), q(b)).unwrap()
    }

    fn iv(a: &str, b: &str) -> Interval<Rational> {
        Interval::new(q(a), q(b)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(aff("4/5", "1/10").eval(&q("1")).unwrap(), q("9/10"));
        assert_eq!(aff("3/5", "1/20").eval(&q("0")).unwrap(), q("1/20"));
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("0"), q("2/5")).unwrap();
        // inner(2/5) = 4/25 + 1/10 = 0.26
        assert_eq!(c.eval(&q("0.9")).unwrap(), q("0.26"));
        assert!(matches!(c.eval(&q("1.5")), Err(Error::Domain { .. })));
        assert!(matches!(c.eval(&q("-0.1")), Err(Error::Domain { .. })));
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(aff("4/5", "1/10").lipschitz_bound().value(), &q("4/5"));
        let chain = MapDescriptor::composed(vec![aff("1/2", "1/4"), aff("1/2", "1/8"), aff("1/2", "1/8")]).unwrap();
        assert_eq!(chain.lipschitz_bound().value(), &q("1/8"));
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("0.1"), q("0.7")).unwrap();
        assert_eq!(c.lipschitz_bound().value(), &q("2/5"));
        let quad = MapDescriptor::quadratic(q("-1/4"), q("1/2"), q("1/4")).unwrap();
        // max(|1/2|, |0|)
        assert_eq!(quad.lipschitz_bound().value(), &q("1/2"));
    }

    #[test]
    fn compose_examples() {
        let phi1 = aff("1/2", "1/4");
        let phi2 = aff("1/2", "1/8");
        let m = compose(&phi2, &compose(&phi2, &phi1));
        assert_eq!(m, aff("1/8", "1/4"));

        let p = aff("4/5", "1/10");
        let pp = compose(&p, &p);
        assert_eq!(pp, aff("16/25", "9/50"));
        assert_eq!(pp.eval(&q("1")).unwrap(), q("41/50"));

        assert!(MapDescriptor::affine(q("1"), q("0")).is_err());
    }

    #[test]
    fn image_examples() {
        assert_eq!(aff("4/5", "1/10").image(&Interval::unit()), iv("1/10", "9/10"));
        assert_eq!(aff("-2/5", "1/2").image(&Interval::unit()), iv("1/10", "1/2"));
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("0"), q("2/5")).unwrap();
        assert_eq!(c.image(&iv("1/2", "1")), iv("0.26", "0.26"));
    }

    #[test]
    fn preimage_examples() {
        let phi1 = aff("1/2", "1/4");
        let phi2 = aff("1/2", "1/8");
        // Branch domains [0, 0.3) and [0.3, 1).
        assert_eq!(phi1.preimage(&q("0.3"), &iv("0", "0.3")).points, vec![q("0.1")]);
        assert_eq!(phi2.preimage(&q("0.3"), &iv("0.3", "1")).points, vec![q("0.35")]);
        assert!(phi1.preimage(&q("0.2"), &iv("0", "0.3")).points.is_empty());
    }

    #[test]
    fn plateau_preimage_is_flagged() {
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("0"), q("2/5")).unwrap();
        let p = c.preimage(&q("0.26"), &Interval::unit());
        assert!(p.non_discrete);
        assert_eq!(p.points, vec![q("2/5"), q("1")]);
        let constant = MapDescriptor::constant(q("1/3")).unwrap();
        assert!(constant.preimage(&q("1/3"), &Interval::unit()).non_discrete);
        assert!(constant.preimage(&q("1/2"), &Interval::unit()).points.is_empty());
    }

    #[test]
    fn quadratic_preimage_exact_and_inexact() {
        // x²/4 + x/4 + 1/8 is increasing on [0, 1].
        let m = MapDescriptor::quadratic(q("1/4"), q("1/4"), q("1/8")).unwrap();
        // m(1/2) = 1/16 + 1/8 + 1/8 = 5/16
        let p = m.preimage(&q("5/16"), &Interval::unit());
        assert!(p.exact);
        assert_eq!(p.points, vec![q("1/2")]);
        let p = m.preimage(&q("1/5"), &Interval::unit());
        assert!(!p.exact);
        assert_eq!(p.points.len(), 1);
        let x = p.points[0].to_f64();
        assert!((m.eval(&Rational::from_f64(x)).unwrap().to_f64() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_quadratic_rejected() {
        // derivative 2x - 1/2 changes sign at 1/4
        assert!(MapDescriptor::quadratic(q("1/2"), q("-1/2"), q("1/2")).is_err());
    }

    #[test]
    fn image_must_stay_inside_open_unit_interval() {
        assert!(MapDescriptor::affine(q("1/2"), q("0")).is_err());
        assert!(MapDescriptor::affine(q("1/2"), q("1/2")).is_err());
        assert!(MapDescriptor::clamped(aff("1/2", "1/4"), q("1/2"), q("1/2")).is_err());
        assert!(MapDescriptor::<Rational>::composed(vec![]).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(aff("4/5", "1/10").fixed_point().unwrap(), q("1/2"));
        assert_eq!(aff("3/5", "1/20").fixed_point().unwrap(), q("1/8"));
        assert_eq!(aff("1/8", "1/4").fixed_point().unwrap(), q("2/7"));
    }

    #[test]
    fn fixed_point_of_clamped_composition_is_exact() {
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("0"), q("2/5")).unwrap();
        let m = MapDescriptor::composed(vec![c.clone(), aff("-1/2", "3/4")]).unwrap();
        let z = m.fixed_point().unwrap();
        assert_eq!(m.eval(&z).unwrap(), z);
    }

    #[test]
    fn fixed_point_of_quadratic() {
        let m = MapDescriptor::quadratic(q("1/4"), q("1/4"), q("1/8")).unwrap();
        let z = m.fixed_point().unwrap();
        assert!((m.eval(&z).unwrap().to_f64() - z.to_f64()).abs() <= 1e-12);
        let mf = MapDescriptor::quadratic(Float(0.25), Float(0.25), Float(0.125)).unwrap();
        let zf = mf.fixed_point().unwrap();
        assert!((mf.eval(&zf).unwrap().0 - zf.0).abs() <= 1e-12);
    }

    #[test]
    fn kinks_of_composition_are_pulled_back() {
        let c = MapDescriptor::clamped(aff("2/5", "1/10"), q("1/5"), q("2/5")).unwrap();
        let m = MapDescriptor::composed(vec![aff("1/2", "0.1"), c]).unwrap();
        // x/2 + 1/10 hits 1/5 at x = 1/5 and 2/5 at x = 3/5.
        assert_eq!(m.kinks(), vec![q("1/5"), q("3/5")]);
    }
}
