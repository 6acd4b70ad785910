//! Ordered iterated function systems: the attractor recursion `A_k`, the
//! composition families `C_k`, highly-contractive certification and the
//! capping construction that turns a `κ < 1/2` system into a highly
//! contractive one near a fixed breakpoint vector.

use crate::error::{Error, Result};
use num::{BigInt, Integer, One, Signed, Zero};

use crate::maps::{compose, MapDescriptor, MapKind};
use crate::numerics::{Interval, IntervalSet, Rational, Scalar};
use crate::pcmap::Breakpoints;

/// Default cap on the number of members of a composition family.
pub const DEFAULT_COMPOSITION_CAP: usize = 100_000;

/// An ordered list of at least two contractions. Order matters: the i-th map
/// drives the i-th branch of a piecewise contraction.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedFunctionSystem<S> {
    maps: Vec<MapDescriptor<S>>,
}

/// A length-`k` composition `φ_{i_k} ∘ … ∘ φ_{i_1}` and its digit word
/// `(i_1, …, i_k)` (1-based, `i_1` applied first).
#[derive(Clone, Debug, PartialEq)]
pub struct Composition<S> {
    pub word: Vec<usize>,
    /// `None` for the identity (the empty word).
    pub map: Option<MapDescriptor<S>>,
}

impl<S: Scalar> Composition<S> {
    pub fn eval(&self, x: &S) -> Result<S> {
        match &self.map {
            Some(m) => m.eval(x),
            None => Ok(x.clone()),
        }
    }
}

/// All compositions of a fixed length.
#[derive(Clone, Debug)]
pub struct CompositionFamily<S> {
    pub depth: usize,
    pub members: Vec<Composition<S>>,
}

impl<S: Scalar> CompositionFamily<S> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member with the given digit word.
    pub fn get(&self, word: &[usize]) -> Option<&Composition<S>> {
        self.members.iter().find(|c| c.word == word)
    }
}

/// Output of [`IteratedFunctionSystem::cap`].
#[derive(Clone, Debug)]
pub struct CappingPlan<S> {
    /// `min_i (x_i − x_{i−1}) / 3`; also the radius of the neighbourhood `V`.
    pub delta: S,
    pub centers: Breakpoints<S>,
    pub capped: IteratedFunctionSystem<S>,
    /// Certified highly-contractive bound of `capped`.
    pub rho: S,
}

impl<S: Scalar> CappingPlan<S> {
    /// `|y_i − x_i| < δ` for every breakpoint.
    pub fn neighbourhood_contains(&self, y: &Breakpoints<S>) -> bool {
        y.len() == self.centers.len()
            && y.points().iter().zip(self.centers.points()).all(|(a, b)| (a.clone() - b.clone()).abs().lt(&self.delta))
    }
}

impl<S: Scalar> IteratedFunctionSystem<S> {
    pub fn new(maps: Vec<MapDescriptor<S>>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidIfs(format!("need at least 2 maps, got {}", maps.len())));
        }
        Ok(IteratedFunctionSystem { maps })
    }

    pub fn maps(&self) -> &[MapDescriptor<S>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `⋃_i φ_i(s)`.
    pub fn image(&self, s: &IntervalSet<S>) -> IntervalSet<S> {
        IntervalSet::normalize(
            self.maps
                .iter()
                .flat_map(|m| s.components().iter().map(move |c| m.image(c))),
        )
    }

    /// `A_0 = [0, 1]`, `A_{k+1} = ⋃_i φ_i(A_k)` for `k < k_max`.
    pub fn ak_sequence(&self, k_max: usize) -> Vec<IntervalSet<S>> {
        if let Some(seq) = self.affine_ak_sequence(k_max) {
            return seq;
        }
        let mut out = Vec::with_capacity(k_max + 1);
        out.push(IntervalSet::unit());
        for k in 0..k_max {
            let next = self.image(&out[k]);
            out.push(next);
        }
        out
    }

    /// Exact recursion for all-affine systems. Endpoints are kept as integer
    /// numerators over `D^k`, where `D` is the common denominator of the
    /// coefficients.
    fn affine_ak_sequence(&self, k_max: usize) -> Option<Vec<IntervalSet<S>>> {
        if !S::EXACT {
            return None;
        }
        let mut coeffs = Vec::with_capacity(self.maps.len());
        for m in &self.maps {
            let MapKind::Affine { slope, intercept } = m.kind() else { return None };
            coeffs.push((slope.to_rational()?, intercept.to_rational()?));
        }
        let d = coeffs.iter().fold(BigInt::one(), |acc, (a, b)| acc.lcm(a.denom()).lcm(b.denom()));
        let ints: Vec<(BigInt, BigInt)> =
            coeffs.iter().map(|(a, b)| (a.numer() * (&d / a.denom()), b.numer() * (&d / b.denom()))).collect();
        let shift = (d.bits() > 0 && d.trailing_zeros() == Some(d.bits() - 1)).then(|| d.bits() - 1);

        let mut level: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::one())];
        let mut scale = BigInt::one();
        let mut out = Vec::with_capacity(k_max + 1);
        out.push(IntervalSet::unit());
        for k in 1..=k_max {
            let mut raw = Vec::with_capacity(level.len() * ints.len());
            for (a, b) in &ints {
                let offset = b * &scale;
                for (lo, hi) in &level {
                    let (x, y) = (a * lo + &offset, a * hi + &offset);
                    raw.push(if a.is_negative() { (y, x) } else { (x, y) });
                }
            }
            raw.sort_unstable();
            level = Vec::with_capacity(raw.len());
            for (lo, hi) in raw {
                match level.last_mut() {
                    Some(last) if lo <= last.1 => {
                        if hi > last.1 {
                            last.1 = hi;
                        }
                    }
                    _ => level.push((lo, hi)),
                }
            }
            scale *= &d;
            let to_s = |p: &BigInt| -> S {
                let r = match shift {
                    Some(e) => {
                        let m = e * k as u64;
                        let t = p.trailing_zeros().unwrap_or(m).min(m);
                        Rational::new_raw(p >> t, BigInt::one() << (m - t))
                    }
                    None => Rational::new(p.clone(), scale.clone()),
                };
                S::from_rational(r)
            };
            out.push(IntervalSet::from_sorted(
                level.iter().map(|(lo, hi)| Interval::raw(to_s(lo), to_s(hi))).collect(),
            ));
        }
        Some(out)
    }

    /// Certified `ρ < 1` bounding `Σ_i |Dφ_i|` on `[0, 1]`, or `None` when the
    /// computable bound is `≥ 1`.
    ///
    /// The bound is the maximum over the common refinement of all kinks of
    /// the per-piece sums of slope bounds; plateaus contribute zero.
    pub fn highly_contractive_bound(&self) -> Option<S> {
        let rho = self.slope_sum_bound();
        rho.lt(&S::one()).then_some(rho)
    }

    /// The refined slope-sum bound itself, whether or not it is below one.
    pub fn slope_sum_bound(&self) -> S {
        let mut cuts: Vec<S> = self.maps.iter().flat_map(|m| m.kinks()).collect();
        cuts.push(S::zero());
        cuts.push(S::one());
        cuts.sort_by(|a, b| a.compare(b));
        cuts.dedup_by(|a, b| a.eq_value(b));
        cuts.windows(2)
            .map(|w| {
                let piece = Interval::raw(w[0].clone(), w[1].clone());
                self.maps.iter().fold(S::zero(), |acc, m| acc + m.slope_bound_on(&piece))
            })
            .fold(S::zero(), |acc, s| acc.max_of(&s))
    }

    /// All `n^k` compositions of length `k`, in lexicographic word order.
    pub fn compositions(&self, k: usize, cap: usize) -> Result<CompositionFamily<S>> {
        let n = self.maps.len();
        let count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::CapExceeded { what: "composition family size", cap });
        }
        let mut members = vec![Composition { word: Vec::new(), map: None }];
        for _ in 0..k {
            let mut next = Vec::with_capacity(members.len() * n);
            for h in &members {
                for (i, phi) in self.maps.iter().enumerate() {
                    let mut word = h.word.clone();
                    word.push(i + 1);
                    let map = match &h.map {
                        Some(inner) => compose(phi, inner),
                        None => phi.clone(),
                    };
                    next.push(Composition { word, map: Some(map) });
                }
            }
            members = next;
        }
        Ok(CompositionFamily { depth: k, members })
    }

    /// Caps every map outside a `δ`-collar of its branch.
    ///
    /// Requires every Lipschitz bound to be `< 1/2`; the capped system is
    /// then highly contractive with `ρ ≤ 2κ`, and for every breakpoint vector
    /// `y` with `|y_i − x_i| < δ` it induces the same piecewise contraction
    /// as the original system.
    pub fn cap(&self, bp: &Breakpoints<S>) -> Result<CappingPlan<S>> {
        let n = self.maps.len();
        if bp.len() + 1 != n {
            return Err(Error::Precondition(format!("{n} maps need {} breakpoints, got {}", n - 1, bp.len())));
        }
        let half = S::from_ratio(1, 2);
        let mut kappa = S::zero();
        for (i, m) in self.maps.iter().enumerate() {
            let b = m.lipschitz_bound().value().clone();
            if !b.lt(&half) {
                return Err(Error::Precondition(format!("map {} has Lipschitz bound {b} ≥ 1/2", i + 1)));
            }
            kappa = kappa.max_of(&b);
        }
        let delta = bp.min_gap() / S::from_ratio(3, 1);
        let x = bp.points();
        let mut capped = Vec::with_capacity(n);
        for (i, phi) in self.maps.iter().enumerate() {
            let lo = if i == 0 { S::zero() } else { x[i - 1].clone() - delta.clone() };
            let hi = if i == n - 1 { S::one() } else { x[i].clone() + delta.clone() };
            capped.push(MapDescriptor::clamped(phi.clone(), lo, hi)?);
        }
        let capped = IteratedFunctionSystem::new(capped)?;
        let rho = capped.slope_sum_bound();
        let two_kappa = kappa.clone() + kappa;
        if !(rho.lt(&S::one()) && rho.le(&two_kappa)) {
            return Err(Error::Inconsistent(format!("capped system has slope sum {rho} > 2κ = {two_kappa}")));
        }
        Ok(CappingPlan { delta, centers: bp.clone(), capped, rho })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MapKind;
    use crate::numerics::Rational;

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn aff(a: &str, b: &str) -> MapDescriptor<Rational> {
        MapDescriptor::affine(q(a), q(b)).unwrap()
    }

    fn iv(a: &str, b: &str) -> Interval<Rational> {
        Interval::new(q(a), q(b)).unwrap()
    }

    fn two_maps() -> IteratedFunctionSystem<Rational> {
        IteratedFunctionSystem::new(vec![aff("4/5", "1/10"), aff("3/5", "1/20")]).unwrap()
    }

    #[test]
    fn rejects_single_map() {
        assert!(IteratedFunctionSystem::new(vec![aff("1/2", "1/4")]).is_err());
    }

    #[test]
    fn image_examples() {
        let ifs = two_maps();
        let a1 = ifs.image(&IntervalSet::unit());
        assert_eq!(a1.components(), &[iv("1/20", "9/10")]);
        assert!(ifs.image(&IntervalSet::empty()).is_empty());
        let a2 = ifs.image(&a1);
        assert_eq!(a2.components(), &[iv("2/25", "41/50")]);
        assert_eq!(a2.hull().unwrap(), iv("2/25", "41/50"));
    }

    #[test]
    fn ak_sequence_examples() {
        let seq = two_maps().ak_sequence(1);
        assert_eq!(seq.len(), 2);
        assert_eq!(seq[0].components(), &[Interval::unit()]);
        assert_eq!(seq[1].components(), &[iv("0.05", "0.9")]);

        let consts = IteratedFunctionSystem::new(vec![
            MapDescriptor::constant(q("1/3")).unwrap(),
            MapDescriptor::constant(q("2/3")).unwrap(),
        ])
        .unwrap();
        let seq = consts.ak_sequence(1);
        assert_eq!(seq[1].components(), &[iv("1/3", "1/3"), iv("2/3", "2/3")]);
    }

    #[test]
    fn affine_recursion_matches_generic_images() {
        let systems = [
            vec![aff("2/5", "1/10"), aff("-3/8", "7/8")],
            vec![aff("1/3", "1/9"), aff("-1/7", "1/2"), aff("1/5", "2/3")],
            vec![aff("0", "1/4"), aff("1/2", "1/4")],
            vec![aff("3/8", "1/16"), aff("-1/4", "15/16"), aff("1/8", "1/2")],
        ];
        for maps in systems {
            let ifs = IteratedFunctionSystem::new(maps).unwrap();
            let fast = ifs.ak_sequence(6);
            let mut set = IntervalSet::unit();
            for a in &fast {
                assert_eq!(a, &set);
                set = ifs.image(&set);
            }
        }
    }

    #[test]
    fn highly_contractive_examples() {
        assert_eq!(two_maps().highly_contractive_bound(), None);
        let pair = IteratedFunctionSystem::new(vec![aff("2/5", "1/10"), aff("2/5", "3/10")]).unwrap();
        assert_eq!(pair.highly_contractive_bound(), Some(q("4/5")));
    }

    #[test]
    fn composition_examples() {
        let ifs = two_maps();
        let c0 = ifs.compositions(0, DEFAULT_COMPOSITION_CAP).unwrap();
        assert_eq!(c0.len(), 1);
        assert!(c0.members[0].map.is_none());
        assert_eq!(c0.members[0].eval(&q("0.3")).unwrap(), q("0.3"));

        let c2 = ifs.compositions(2, DEFAULT_COMPOSITION_CAP).unwrap();
        let mut slopes: Vec<Rational> = c2
            .members
            .iter()
            .map(|c| match c.map.as_ref().unwrap().kind() {
                MapKind::Affine { slope, .. } => slope.clone(),
                _ => panic!("affine compositions stay affine"),
            })
            .collect();
        slopes.sort();
        assert_eq!(slopes, vec![q("9/25"), q("12/25"), q("12/25"), q("16/25")]);
        let m11 = c2.get(&[1, 1]).unwrap().map.as_ref().unwrap();
        assert!(m11.lipschitz_bound().value() <= &q("16/25"));

        assert!(matches!(ifs.compositions(20, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn capping_example() {
        let ifs = IteratedFunctionSystem::new(vec![aff("2/5", "1/10"), aff("2/5", "3/10")]).unwrap();
        let bp = Breakpoints::new(vec![q("0.3")]).unwrap();
        let plan = ifs.cap(&bp).unwrap();
        assert_eq!(plan.delta, q("1/10"));
        match plan.capped.maps()[0].kind() {
            MapKind::Clamped { lo, hi, .. } => assert_eq!((lo, hi), (&q("0"), &q("0.4"))),
            _ => panic!(),
        }
        match plan.capped.maps()[1].kind() {
            MapKind::Clamped { lo, hi, .. } => assert_eq!((lo, hi), (&q("0.2"), &q("1"))),
            _ => panic!(),
        }
        assert_eq!(plan.capped.highly_contractive_bound(), Some(q("4/5")));
        assert!(plan.rho <= q("0.8"));
    }

    #[test]
    fn capping_requires_small_bound() {
        let bp = Breakpoints::new(vec![q("0.3")]).unwrap();
        assert!(matches!(two_maps().cap(&bp), Err(Error::Precondition(_))));
        let ifs = IteratedFunctionSystem::new(vec![aff("2/5", "1/10"), aff("2/5", "3/10")]).unwrap();
        let bp2 = Breakpoints::new(vec![q("0.3"), q("0.6")]).unwrap();
        assert!(matches!(ifs.cap(&bp2), Err(Error::Precondition(_))));
    }
}
