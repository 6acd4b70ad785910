//! The n-interval piecewise contraction `f(x) = φ_i(x)` on `[x_{i−1}, x_i)`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::ifs::IteratedFunctionSystem;
use crate::maps::{compose_word, FixedPointOptions, MapDescriptor, Preimage};
use crate::numerics::{Interval, RationalKey, Scalar};

pub const DEFAULT_EPS_ORBIT: f64 = 1e-10;
pub const DEFAULT_ORBIT_MAX_ITER: usize = 10_000;
pub const DEFAULT_MAX_PERIOD: usize = 256;
/// Number of consecutive periods the itinerary word must repeat before a
/// cycle candidate is refined.
pub const CONFIRM_PERIODS: usize = 3;
pub const DEFAULT_POWER_CAP: usize = 10_000;

/// `0 < x_1 < … < x_{n−1} < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Breakpoints<S> {
    points: Vec<S>,
}

impl<S: Scalar> Breakpoints<S> {
    pub fn new(points: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidBreakpoints("at least one breakpoint is required".into()));
        }
        if points.iter().any(|x| !(x.gt(&S::zero()) && x.lt(&S::one()))) {
            return Err(Error::InvalidBreakpoints("breakpoints must lie in (0, 1)".into()));
        }
        if points.windows(2).any(|w| !w[0].lt(&w[1])) {
            return Err(Error::InvalidBreakpoints("breakpoints not strictly increasing".into()));
        }
        Ok(Breakpoints { points })
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `min_{1≤i≤n} (x_i − x_{i−1})` with `x_0 = 0`, `x_n = 1`.
    pub fn min_gap(&self) -> S {
        let mut prev = S::zero();
        let mut gap = S::one();
        for x in self.points.iter().chain(std::iter::once(&S::one())) {
            gap = gap.min_of(&(x.clone() - prev));
            prev = x.clone();
        }
        gap
    }

    /// Index `i` with `points[i] == x`.
    pub fn position(&self, x: &S) -> Option<usize> {
        let idx = self.points.partition_point(|p| p.lt(x));
        self.points.get(idx).filter(|p| p.eq_value(x)).map(|_| idx)
    }
}

/// Which branch owns a breakpoint `x_i`. `Right` (the default) gives the
/// half-open branches `[x_{i−1}, x_i)`; `Left` moves `x_i` into branch `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Closure {
    #[default]
    Right,
    Left,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseContraction<S> {
    ifs: IteratedFunctionSystem<S>,
    bp: Breakpoints<S>,
    closures: Vec<Closure>,
}

/// Digit sequence `d_k = d(f^k(x))`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub digits: Vec<usize>,
    pub preperiod: usize,
    pub period: Option<usize>,
}

/// A periodic orbit `{z, f(z), …, f^{p−1}(z)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit<S> {
    /// Orbit points in dynamical order.
    pub points: Vec<S>,
    pub period: usize,
    /// Digits of the orbit points.
    pub word: Vec<usize>,
    /// Indices of the partition intervals visited, when the orbit came from
    /// a quasi-partition; empty otherwise.
    pub home_cycle: Vec<usize>,
}

impl<S: Scalar> PeriodicOrbit<S> {
    /// Same point set (exact or within the comparison tolerance).
    pub fn same_points(&self, other: &PeriodicOrbit<S>) -> bool {
        let sorted = |o: &PeriodicOrbit<S>| {
            let mut v = o.points.clone();
            v.sort_by(|a, b| a.compare(b));
            v
        };
        let (a, b) = (sorted(self), sorted(other));
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.eq_value(y))
    }

    /// Same point set up to `eps` (absolute, in `f64`).
    pub fn close_to(&self, other: &PeriodicOrbit<S>, eps: f64) -> bool {
        let sorted = |o: &PeriodicOrbit<S>| {
            let mut v: Vec<f64> = o.points.iter().map(|p| p.to_f64()).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (a, b) = (sorted(self), sorted(other));
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= eps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InconclusiveReason {
    IterationCap,
    /// Iterate `step` equals breakpoint `x_{breakpoint}` (1-based).
    HitBreakpointExactly { step: usize, breakpoint: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitOutcome<S> {
    Converged(PeriodicOrbit<S>),
    Inconclusive(InconclusiveReason),
}

#[derive(Clone, Debug)]
pub struct OrbitRecord<S> {
    pub start: S,
    /// `points[j + 1] = f(points[j])`.
    pub points: Vec<S>,
    pub itinerary: Itinerary,
    pub outcome: OrbitOutcome<S>,
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub max_iter: usize,
    pub eps_orbit: f64,
    pub max_period: usize,
    /// Stop with `HitBreakpointExactly` when an iterate lands on a breakpoint.
    pub require_generic: bool,
    pub fixed_point: FixedPointOptions,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            max_iter: DEFAULT_ORBIT_MAX_ITER,
            eps_orbit: DEFAULT_EPS_ORBIT,
            max_period: DEFAULT_MAX_PERIOD,
            require_generic: false,
            fixed_point: FixedPointOptions::default(),
        }
    }
}

/// Output of [`PiecewiseContraction::power`].
#[derive(Clone, Debug)]
pub struct PowerMap<S> {
    /// The `r`-interval contraction agreeing with `f^k`.
    pub pc: PiecewiseContraction<S>,
    /// Digit word (under `f`) followed by each refined branch.
    pub words: Vec<Vec<usize>>,
}

impl<S: Scalar> PiecewiseContraction<S> {
    pub fn new(ifs: IteratedFunctionSystem<S>, bp: Breakpoints<S>) -> Result<Self> {
        if ifs.len() != bp.len() + 1 {
            return Err(Error::Precondition(format!(
                "{} maps need {} breakpoints, got {}",
                ifs.len(),
                ifs.len() - 1,
                bp.len()
            )));
        }
        let closures = vec![Closure::Right; bp.len()];
        Ok(PiecewiseContraction { ifs, bp, closures })
    }

    /// Replaces the per-breakpoint ownership flags.
    pub fn with_closures(mut self, closures: Vec<Closure>) -> Result<Self> {
        if closures.len() != self.bp.len() {
            return Err(Error::Precondition("one closure flag per breakpoint".into()));
        }
        self.closures = closures;
        Ok(self)
    }

    pub fn ifs(&self) -> &IteratedFunctionSystem<S> {
        &self.ifs
    }

    pub fn breakpoints(&self) -> &Breakpoints<S> {
        &self.bp
    }

    pub fn closures(&self) -> &[Closure] {
        &self.closures
    }

    /// Number of branches.
    pub fn n(&self) -> usize {
        self.ifs.len()
    }

    pub fn branch_map(&self, digit: usize) -> &MapDescriptor<S> {
        &self.ifs.maps()[digit - 1]
    }

    /// Closed hull `[x_{i−1}, x_i]` of branch `digit`.
    pub fn branch_hull(&self, digit: usize) -> Interval<S> {
        let x = self.bp.points();
        let lo = if digit == 1 { S::zero() } else { x[digit - 2].clone() };
        let hi = if digit == self.n() { S::one() } else { x[digit - 1].clone() };
        Interval::raw(lo, hi)
    }

    /// Unique `i` with `x` in branch `i`.
    pub fn digit(&self, x: &S) -> Result<usize> {
        if x.lt(&S::zero()) || x.ge(&S::one()) {
            return Err(Error::Domain { value: x.to_string(), domain: "[0, 1)" });
        }
        let pts = self.bp.points();
        let idx = pts.partition_point(|p| p.lt(x));
        if let Some(p) = pts.get(idx) {
            if p.eq_value(x) {
                return Ok(match self.closures[idx] {
                    Closure::Right => idx + 2,
                    Closure::Left => idx + 1,
                });
            }
        }
        Ok(idx + 1)
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        let d = self.digit(x)?;
        Ok(self.branch_map(d).eval_unchecked(x))
    }

    /// `f^k(x)`.
    pub fn iterate(&self, x: &S, k: usize) -> Result<S> {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// `f^{−1}({y})`, computed branchwise.
    pub fn preimage(&self, y: &S) -> Preimage<S> {
        let mut points = Vec::new();
        let mut non_discrete = false;
        let mut exact = true;
        for d in 1..=self.n() {
            let pre = self.branch_map(d).preimage(y, &self.branch_hull(d));
            exact &= pre.exact;
            if pre.non_discrete {
                non_discrete = true;
                points.extend(pre.points);
                continue;
            }
            points.extend(pre.points.into_iter().filter(|x| x.lt(&S::one()) && self.digit(x).ok() == Some(d)));
        }
        points.sort_by(|a, b| a.compare(b));
        points.dedup_by(|a, b| a.eq_value(b));
        Preimage { points, non_discrete, exact }
    }

    /// Forward orbit of `x0` with cycle detection.
    ///
    /// Exact backend: a repeated point closes a cycle. Both backends: when
    /// the last three periods of the itinerary repeat a word of length `p`
    /// and `|f^t(x) − f^{t−p}(x)| ≤ eps_orbit`, the fixed point of the
    /// composed word map is computed and accepted if it returns to itself
    /// after `p` steps of `f`.
    pub fn orbit(&self, x0: &S, opts: &OrbitOptions) -> Result<OrbitRecord<S>> {
        self.digit(x0)?;
        let mut points = vec![x0.clone()];
        let mut approx = vec![x0.to_f64()];
        let mut digits: Vec<usize> = Vec::new();
        let mut seen: HashMap<RationalKey, usize> = HashMap::new();
        let mut rejected: HashSet<Vec<usize>> = HashSet::new();
        if let Some(r) = x0.to_rational() {
            seen.insert(r.into(), 0);
        }

        for step in 0..opts.max_iter {
            let x = &points[step];
            if opts.require_generic {
                if let Some(i) = self.bp.position(x) {
                    let itinerary = Itinerary { digits, preperiod: 0, period: None };
                    return Ok(OrbitRecord {
                        start: x0.clone(),
                        points,
                        itinerary,
                        outcome: OrbitOutcome::Inconclusive(InconclusiveReason::HitBreakpointExactly {
                            step,
                            breakpoint: i + 1,
                        }),
                    });
                }
            }
            let d = self.digit(x)?;
            digits.push(d);
            let y = self.branch_map(d).eval_unchecked(x);

            let key: Option<RationalKey> = y.to_rational().map(Into::into);
            if let Some(first) = key.as_ref().and_then(|k| seen.get(k).copied()) {
                let period = points.len() - first;
                let orbit = self.orbit_from(&points[first], period)?;
                let itinerary = Itinerary { digits, preperiod: first, period: Some(period) };
                return Ok(OrbitRecord {
                    start: x0.clone(),
                    points,
                    itinerary,
                    outcome: OrbitOutcome::Converged(orbit),
                });
            }
            if let Some(k) = key {
                seen.insert(k, points.len());
            }
            approx.push(y.to_f64());
            points.push(y);

            if let Some((orbit, preperiod)) = self.cycle_candidate(&digits, &approx, opts, &mut rejected)? {
                let period = orbit.period;
                let itinerary = Itinerary { digits, preperiod, period: Some(period) };
                return Ok(OrbitRecord {
                    start: x0.clone(),
                    points,
                    itinerary,
                    outcome: OrbitOutcome::Converged(orbit),
                });
            }
        }
        let itinerary = Itinerary { digits, preperiod: 0, period: None };
        Ok(OrbitRecord {
            start: x0.clone(),
            points,
            itinerary,
            outcome: OrbitOutcome::Inconclusive(InconclusiveReason::IterationCap),
        })
    }

    fn cycle_candidate(
        &self,
        digits: &[usize],
        approx: &[f64],
        opts: &OrbitOptions,
        rejected: &mut HashSet<Vec<usize>>,
    ) -> Result<Option<(PeriodicOrbit<S>, usize)>> {
        let t = digits.len();
        let newest = approx[t];
        for p in 1..=opts.max_period.min(t / CONFIRM_PERIODS) {
            if (newest - approx[t - p]).abs() > opts.eps_orbit {
                continue;
            }
            let window = &digits[t - CONFIRM_PERIODS * p..];
            if (p..window.len()).any(|j| window[j] != window[j - p]) {
                continue;
            }
            let word = &window[..p];
            // a repeated shorter word has the same fixed point
            if (1..p).any(|q| p % q == 0 && (q..p).all(|j| word[j] == word[j - q])) || rejected.contains(word) {
                continue;
            }
            let psi = compose_word(self.ifs.maps(), word).expect("non-empty word");
            let z = psi.fixed_point_with(&opts.fixed_point)?;
            if !(z.ge(&S::zero()) && z.lt(&S::one())) {
                rejected.insert(word.to_vec());
                continue;
            }
            let returns = |q: usize| -> Result<bool> {
                let back = self.iterate(&z, q)?;
                Ok(if S::EXACT {
                    back.eq_value(&z)
                } else {
                    (back.to_f64() - z.to_f64()).abs() <= opts.eps_orbit
                })
            };
            if !returns(p)? {
                rejected.insert(word.to_vec());
                continue;
            }
            // the word may repeat a shorter cycle
            let mut p = p;
            for q in 1..p {
                if p % q == 0 && returns(q)? {
                    p = q;
                    break;
                }
            }
            let mut preperiod = t - CONFIRM_PERIODS * p;
            while preperiod > 0 && digits[preperiod - 1] == digits[preperiod - 1 + p] {
                preperiod -= 1;
            }
            return Ok(Some((self.orbit_from(&z, p)?, preperiod)));
        }
        Ok(None)
    }

    fn orbit_from(&self, z: &S, period: usize) -> Result<PeriodicOrbit<S>> {
        let mut points = Vec::with_capacity(period);
        let mut word = Vec::with_capacity(period);
        let mut x = z.clone();
        for _ in 0..period {
            let d = self.digit(&x)?;
            word.push(d);
            let next = self.branch_map(d).eval_unchecked(&x);
            points.push(x);
            x = next;
        }
        Ok(PeriodicOrbit { points, period, word, home_cycle: Vec::new() })
    }

    /// No composition of length `1..=depth` maps `0` or a breakpoint onto a
    /// breakpoint. `false` is definitive; `true` only up to `depth`.
    pub fn check_generic(&self, depth: usize, cap: usize) -> Result<bool> {
        let n = self.n() as u128;
        let per_level = n.checked_pow(depth as u32).unwrap_or(u128::MAX);
        if per_level.saturating_mul(self.bp.len() as u128 + 1) > cap as u128 {
            return Err(Error::CapExceeded { what: "genericity test orbit count", cap });
        }
        let targets = self.bp.points();
        let mut level: Vec<S> = std::iter::once(S::zero()).chain(targets.iter().cloned()).collect();
        for _ in 0..depth {
            let mut next: Vec<S> = level
                .iter()
                .flat_map(|v| self.ifs.maps().iter().map(move |m| m.eval_unchecked(v)))
                .collect();
            next.sort_by(|a, b| a.compare(b));
            next.dedup_by(|a, b| a.eq_value(b));
            if next.iter().any(|v| self.bp.position(v).is_some()) {
                return Ok(false);
            }
            level = next;
        }
        Ok(true)
    }

    /// `⋃_{ℓ<k} f^{−ℓ}({x_1, …, x_{n−1}})`, sorted. Exact backend only.
    pub fn refined_breakpoints(&self, k: usize, cap: usize) -> Result<Vec<S>> {
        if !S::EXACT {
            return Err(Error::RequiresExact("refined breakpoint computation"));
        }
        let mut all: Vec<S> = self.bp.points().to_vec();
        let mut frontier = all.clone();
        for _ in 1..k {
            let mut next = Vec::new();
            for y in &frontier {
                let pre = self.preimage(y);
                if pre.non_discrete {
                    return Err(Error::NonDiscretePreimage(y.to_string()));
                }
                if !pre.exact {
                    return Err(Error::InexactPreimage(y.to_string()));
                }
                next.extend(pre.points);
            }
            all.extend(next.iter().cloned());
            frontier = next;
            if all.len() > cap {
                return Err(Error::CapExceeded { what: "refined breakpoint count", cap });
            }
        }
        all.sort_by(|a, b| a.compare(b));
        all.dedup_by(|a, b| a.eq_value(b));
        Ok(all)
    }

    /// The piecewise contraction agreeing with `f^k`: its breakpoints are
    /// `⋃_{ℓ<k} f^{−ℓ}({x_i})` and its branch maps are the length-`k`
    /// compositions followed by each open piece. Closure flags are chosen so
    /// the result equals `f^k` at the breakpoints too.
    pub fn power(&self, k: usize, cap: usize) -> Result<PowerMap<S>> {
        if k == 0 {
            return Err(Error::Precondition("power k must be ≥ 1".into()));
        }
        let ys = self.refined_breakpoints(k, cap)?;
        if ys.len() + 1 > cap {
            return Err(Error::CapExceeded { what: "power map branch count", cap });
        }
        if ys.first().is_some_and(|y| y.is_zero_value()) {
            return Err(Error::Precondition("0 is a preimage of a breakpoint".into()));
        }
        let mut edges = vec![S::zero()];
        edges.extend(ys.iter().cloned());
        edges.push(S::one());
        let mut words = Vec::with_capacity(edges.len() - 1);
        let mut maps = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let mut x = w[0].midpoint(&w[1]);
            let mut word = Vec::with_capacity(k);
            for _ in 0..k {
                let d = self.digit(&x)?;
                word.push(d);
                x = self.branch_map(d).eval_unchecked(&x);
            }
            maps.push(compose_word(self.ifs.maps(), &word).expect("k ≥ 1"));
            words.push(word);
        }
        let mut closures = Vec::with_capacity(ys.len());
        for (j, y) in ys.iter().enumerate() {
            let actual = self.iterate(y, k)?;
            if maps[j + 1].eval_unchecked(y).eq_value(&actual) {
                closures.push(Closure::Right);
            } else if maps[j].eval_unchecked(y).eq_value(&actual) {
                closures.push(Closure::Left);
            } else {
                return Err(Error::PowerMapDiscontinuity(y.to_string()));
            }
        }
        let pc = PiecewiseContraction::new(IteratedFunctionSystem::new(maps)?, Breakpoints::new(ys)?)?
            .with_closures(closures)?;
        Ok(PowerMap { pc, words })
    }
}
