//! The finite preimage set `Q`, the invariant quasi-partition with its
//! transition map `τ` and digit map `η`, periodic orbits, ω-limits and the
//! equivalence classes bounding the number of periodic orbits by `n`.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::maps::{compose_word, MapDescriptor};
use crate::numerics::{Interval, RationalKey, Scalar};
use crate::pcmap::PiecewiseContraction;

pub use crate::pcmap::PeriodicOrbit;

pub const DEFAULT_Q_DEPTH_CAP: usize = 64;
pub const DEFAULT_Q_SIZE_CAP: usize = 10_000;
pub const DEFAULT_OMEGA_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QStatus {
    /// A full backward level produced no new point.
    Complete,
    /// The depth or size cap was hit first.
    Truncated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QPoint<S> {
    pub value: S,
    /// 1-based index of the breakpoint whose preimage tree produced the point.
    pub source: usize,
    /// `k` with `f^k(value) = x_source`.
    pub depth: usize,
}

/// `Q = ⋃_i ⋃_{k≥0} f^{−k}({x_i})`, as far as it was computed.
#[derive(Clone, Debug)]
pub struct QSet<S> {
    /// Sorted by value.
    pub points: Vec<QPoint<S>>,
    /// Number of backward levels computed.
    pub depth_reached: usize,
    pub status: QStatus,
}

impl<S: Scalar> QSet<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<S> {
        self.points.iter().map(|p| p.value.clone()).collect()
    }

    /// Points of `Q_i` (1-based `i`).
    pub fn of_breakpoint(&self, i: usize) -> Vec<S> {
        self.points.iter().filter(|p| p.source == i).map(|p| p.value.clone()).collect()
    }
}

/// Backward breadth-first closure of the breakpoints under `f^{−1}`.
pub fn compute_q<S: Scalar>(f: &PiecewiseContraction<S>, depth_cap: usize, size_cap: usize) -> Result<QSet<S>> {
    if !S::EXACT {
        return Err(Error::RequiresExact("Q computation"));
    }
    let key = |x: &S| -> RationalKey { x.to_rational().expect("exact backend").into() };
    let mut seen: HashSet<RationalKey> = HashSet::new();
    let mut points = Vec::new();
    let mut level: Vec<QPoint<S>> = Vec::new();
    for (i, x) in f.breakpoints().points().iter().enumerate() {
        if seen.insert(key(x)) {
            level.push(QPoint { value: x.clone(), source: i + 1, depth: 0 });
        }
    }
    points.extend(level.iter().cloned());

    let mut status = QStatus::Truncated;
    let mut depth_reached = 0;
    for depth in 1..=depth_cap {
        let mut next = Vec::new();
        for p in &level {
            let pre = f.preimage(&p.value);
            if pre.non_discrete {
                return Err(Error::NonDiscretePreimage(p.value.to_string()));
            }
            if !pre.exact {
                return Err(Error::InexactPreimage(p.value.to_string()));
            }
            for x in pre.points {
                if seen.insert(key(&x)) {
                    next.push(QPoint { value: x, source: p.source, depth });
                }
            }
        }
        depth_reached = depth;
        if next.is_empty() {
            status = QStatus::Complete;
            break;
        }
        points.extend(next.iter().cloned());
        if points.len() > size_cap {
            break;
        }
        level = next;
    }
    points.sort_by(|a, b| a.value.compare(&b.value));
    Ok(QSet { points, depth_reached, status })
}

/// Connected components `J_1, …, J_m` of `(0, 1) \ Q` with `f(J_ℓ) ⊂ J_{τ(ℓ)}`
/// and `J_ℓ ⊂ I_{η(ℓ)}`. Interval indices are 0-based; digits are 1-based.
#[derive(Clone, Debug)]
pub struct QuasiPartition<S> {
    /// Interval endpoints: `J_ℓ = (edges[ℓ], edges[ℓ + 1])`.
    edges: Vec<S>,
    tau: Vec<usize>,
    eta: Vec<usize>,
}

impl<S: Scalar> QuasiPartition<S> {
    /// Number of intervals `m`.
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Endpoints `(lo, hi)` of the open interval `J_ℓ`.
    pub fn interval(&self, l: usize) -> (&S, &S) {
        (&self.edges[l], &self.edges[l + 1])
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn eta(&self) -> &[usize] {
        &self.eta
    }

    /// Index of the open interval containing `x`; `None` for `x ∈ {0, 1} ∪ Q`.
    pub fn locate(&self, x: &S) -> Option<usize> {
        let idx = self.edges.partition_point(|e| e.lt(x));
        if idx == 0 || idx == self.edges.len() || self.edges[idx].eq_value(x) {
            return None;
        }
        Some(idx - 1)
    }

    /// `τ`-cycles, each rotated to start at its smallest index, ordered by
    /// that index.
    pub fn tau_cycles(&self) -> Vec<Vec<usize>> {
        let m = self.len();
        // 0 = unvisited, 1 = on current path, 2 = done
        let mut state = vec![0u8; m];
        let mut cycles = Vec::new();
        for start in 0..m {
            let mut path = Vec::new();
            let mut l = start;
            while state[l] == 0 {
                state[l] = 1;
                path.push(l);
                l = self.tau[l];
            }
            if state[l] == 1 {
                let pos = path.iter().position(|&v| v == l).expect("on path");
                let mut cycle = path[pos..].to_vec();
                let min_pos = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
                cycle.rotate_left(min_pos);
                cycles.push(cycle);
            }
            for v in path {
                state[v] = 2;
            }
        }
        cycles.sort_by_key(|c| c[0]);
        cycles
    }

    /// Forward `τ`-orbit of `l`, including `l`.
    pub fn forward_set(&self, l: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        let mut cur = l;
        while set.insert(cur) {
            cur = self.tau[cur];
        }
        set
    }
}

/// Builds the quasi-partition from a complete `Q` and verifies invariance
/// exactly.
pub fn build_partition<S: Scalar>(f: &PiecewiseContraction<S>, q: &QSet<S>) -> Result<QuasiPartition<S>> {
    if q.status != QStatus::Complete {
        return Err(Error::IncompleteQ);
    }
    let mut edges = vec![S::zero()];
    edges.extend(q.points.iter().map(|p| p.value.clone()).filter(|v| v.gt(&S::zero()) && v.lt(&S::one())));
    edges.push(S::one());
    let m = edges.len() - 1;
    let mut partition = QuasiPartition { edges, tau: vec![0; m], eta: vec![0; m] };

    for l in 0..m {
        let (a, b) = (partition.edges[l].clone(), partition.edges[l + 1].clone());
        let d = f.digit(&a.midpoint(&b))?;
        partition.eta[l] = d;
        let phi = f.branch_map(d);
        let image = phi.image(&Interval::raw(a.clone(), b.clone()));
        let target = if image.is_degenerate() {
            partition.locate(image.lo())
        } else {
            partition.locate(&image.midpoint()).filter(|&t| {
                let (lo, hi) = partition.interval(t);
                let lo_ok = image.lo().gt(lo) || (image.lo().eq_value(lo) && !attained_inside(phi, lo, &a, &b));
                let hi_ok = image.hi().lt(hi) || (image.hi().eq_value(hi) && !attained_inside(phi, hi, &a, &b));
                lo_ok && hi_ok
            })
        };
        partition.tau[l] = target.ok_or(Error::PartitionInvarianceViolation(l))?;
    }
    Ok(partition)
}

/// Whether `phi` takes the value `v` somewhere in the open interval `(a, b)`.
fn attained_inside<S: Scalar>(phi: &MapDescriptor<S>, v: &S, a: &S, b: &S) -> bool {
    let pre = phi.preimage(v, &Interval::raw(a.clone(), b.clone()));
    (pre.non_discrete && pre.points.len() >= 2) || pre.points.iter().any(|x| x.gt(a) && x.lt(b))
}

/// One periodic orbit per `τ`-cycle: the fixed point of the branch maps
/// composed along the cycle, followed forward under `f`.
pub fn periodic_orbits<S: Scalar>(
    f: &PiecewiseContraction<S>,
    partition: &QuasiPartition<S>,
) -> Result<Vec<PeriodicOrbit<S>>> {
    let mut orbits: Vec<PeriodicOrbit<S>> = Vec::new();
    for cycle in partition.tau_cycles() {
        let word: Vec<usize> = cycle.iter().map(|&l| partition.eta[l]).collect();
        let psi = compose_word(f.ifs().maps(), &word).expect("cycles are non-empty");
        let z = psi.fixed_point()?;
        if partition.locate(&z) != Some(cycle[0]) {
            return Err(Error::Inconsistent(format!(
                "fixed point {z} of the cycle through J_{} lies outside it",
                cycle[0] + 1
            )));
        }
        let mut points = Vec::with_capacity(cycle.len());
        let mut x = z;
        for _ in 0..cycle.len() {
            let next = f.eval(&x)?;
            points.push(x);
            x = next;
        }
        let orbit = PeriodicOrbit { points, period: cycle.len(), word, home_cycle: cycle };
        if !orbits.iter().any(|o| o.same_points(&orbit)) {
            orbits.push(orbit);
        }
    }
    Ok(orbits)
}

/// The periodic orbit `ω_f(x)`.
///
/// Iterates `x` until it enters some `J_ℓ`, then follows `τ` to its cycle.
/// Orbits that stay inside the finite set `{0} ∪ Q` close on their own.
pub fn omega_limit<S: Scalar>(
    f: &PiecewiseContraction<S>,
    x: &S,
    partition: &QuasiPartition<S>,
    orbits: &[PeriodicOrbit<S>],
    max_iter: usize,
) -> Result<PeriodicOrbit<S>> {
    let mut visited: Vec<S> = Vec::new();
    let mut y = x.clone();
    for _ in 0..max_iter {
        if let Some(l) = partition.locate(&y) {
            let reach = partition.forward_set(l);
            return orbits
                .iter()
                .find(|o| o.home_cycle.iter().any(|c| reach.contains(c)))
                .cloned()
                .ok_or_else(|| Error::Inconsistent(format!("no periodic orbit attracts J_{}", l + 1)));
        }
        if let Some(pos) = visited.iter().position(|v| v.eq_value(&y)) {
            let cycle = &visited[pos..];
            let word = cycle.iter().map(|p| f.digit(p)).collect::<Result<Vec<_>>>()?;
            return Ok(PeriodicOrbit { points: cycle.to_vec(), period: cycle.len(), word, home_cycle: Vec::new() });
        }
        visited.push(y.clone());
        y = f.eval(&y)?;
    }
    Err(Error::IterationCap(max_iter))
}

/// Adjacency intervals, the `≡` classes on `𝒫′ = {F_1, G_1, …, F_{n−1}, G_{n−1}}`
/// and the orbit-to-class assignment.
#[derive(Clone, Debug)]
pub struct EquivalenceClasses {
    /// `F_0`: the interval with left endpoint 0.
    pub f0: usize,
    /// `G_n`: the interval with right endpoint 1.
    pub gn: usize,
    /// `(F_i, G_i)` for `i = 1..n−1`: the intervals ending and starting at `x_i`.
    pub adjacent: Vec<(usize, usize)>,
    /// Distinct members of `𝒫′`, ascending.
    pub members: Vec<usize>,
    /// Classes as sorted member lists, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Breakpoint indices (1-based) sorted by `min Q_i`.
    pub permutation: Vec<usize>,
    /// Class index of each periodic orbit, in the order the orbits were given.
    pub orbit_class: Vec<usize>,
}

impl EquivalenceClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Groups `𝒫′` by intersecting forward `τ`-orbits and checks
/// `#orbits ≤ #classes ≤ n`.
pub fn equivalence_classes<S: Scalar>(
    f: &PiecewiseContraction<S>,
    q: &QSet<S>,
    partition: &QuasiPartition<S>,
    orbits: &[PeriodicOrbit<S>],
) -> Result<EquivalenceClasses> {
    let n = f.n();
    let m = partition.len();
    let mut adjacent = Vec::with_capacity(n - 1);
    for x in f.breakpoints().points() {
        let idx = partition.edges.partition_point(|e| e.lt(x));
        if idx == 0 || idx >= partition.edges.len() - 1 || !partition.edges[idx].eq_value(x) {
            return Err(Error::Inconsistent(format!("breakpoint {x} is not a partition endpoint")));
        }
        adjacent.push((idx - 1, idx));
    }
    let mut members: Vec<usize> = adjacent.iter().flat_map(|&(a, b)| [a, b]).collect();
    members.sort_unstable();
    members.dedup();

    let reach: Vec<BTreeSet<usize>> = members.iter().map(|&c| partition.forward_set(c)).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if !reach[i].is_disjoint(&reach[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    for i in 0..members.len() {
        let r = find(&mut parent, i);
        let c = *root_class.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(members[i]);
    }

    let mut permutation: Vec<usize> = (1..n).collect();
    let mins: Vec<Option<S>> = (1..n)
        .map(|i| q.of_breakpoint(i).into_iter().reduce(|a, b| a.min_of(&b)))
        .collect();
    permutation.sort_by(|&i, &j| match (&mins[i - 1], &mins[j - 1]) {
        (Some(a), Some(b)) => a.compare(b),
        _ => i.cmp(&j),
    });

    let mut orbit_class = Vec::with_capacity(orbits.len());
    for (k, orbit) in orbits.iter().enumerate() {
        let class = classes.iter().position(|members_of| {
            members_of.iter().any(|&c| {
                let idx = members.iter().position(|&v| v == c).expect("member");
                orbit.home_cycle.iter().any(|h| reach[idx].contains(h))
            })
        });
        match class {
            Some(c) => orbit_class.push(c),
            None => {
                return Err(Error::BoundViolation(format!("periodic orbit {} meets no class of 𝒫′", k + 1)))
            }
        }
    }

    if classes.len() > n {
        return Err(Error::BoundViolation(format!("{} equivalence classes > n = {n}", classes.len())));
    }
    if orbits.len() > classes.len() {
        return Err(Error::BoundViolation(format!(
            "{} periodic orbits > {} equivalence classes",
            orbits.len(),
            classes.len()
        )));
    }
    let distinct: BTreeSet<usize> = orbit_class.iter().copied().collect();
    if distinct.len() != orbit_class.len() {
        return Err(Error::BoundViolation("two periodic orbits share an equivalence class".into()));
    }

    Ok(EquivalenceClasses { f0: 0, gn: m - 1, adjacent, members, classes, permutation, orbit_class })
}

/// Everything derived from a complete `Q`.
#[derive(Clone, Debug)]
pub struct Analysis<S> {
    pub q: QSet<S>,
    pub partition: QuasiPartition<S>,
    pub orbits: Vec<PeriodicOrbit<S>>,
    pub classes: EquivalenceClasses,
}

/// `compute_q`, `build_partition`, `periodic_orbits` and
/// `equivalence_classes` in sequence.
pub fn analyze<S: Scalar>(f: &PiecewiseContraction<S>, depth_cap: usize, size_cap: usize) -> Result<Analysis<S>> {
    let q = compute_q(f, depth_cap, size_cap)?;
    let partition = build_partition(f, &q)?;
    let orbits = periodic_orbits(f, &partition)?;
    let classes = equivalence_classes(f, &q, &partition, &orbits)?;
    Ok(Analysis { q, partition, orbits, classes })
}
