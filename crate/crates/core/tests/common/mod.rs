#![allow(dead_code)]

use num::BigInt;
use pcw::{Breakpoints, IteratedFunctionSystem, MapDescriptor, PiecewiseContraction, Rational};
use proptest::prelude::*;
use proptest::sample::subsequence;

pub const DEN: i64 = 1024;

pub fn r(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A dyadic point of `[0, 1]` with denominator `2^20`.
pub fn unit_point() -> impl Strategy<Value = Rational> {
    (0i64..=(1 << 20)).prop_map(|k| r(k, 1 << 20))
}

/// A point of `[0, 1)`.
pub fn half_open_point() -> impl Strategy<Value = Rational> {
    (0i64..(1 << 20)).prop_map(|k| r(k, 1 << 20))
}

/// Affine contraction of `[0, 1]` into `(0, 1)` with `|slope| ≤ max_slope/DEN`.
pub fn affine(max_slope: i64) -> impl Strategy<Value = MapDescriptor<Rational>> {
    (-max_slope..=max_slope)
        .prop_flat_map(|s| {
            let (lo, hi) = if s >= 0 { (1, DEN - 1 - s) } else { (1 - s, DEN - 1) };
            (Just(s), lo..=hi)
        })
        .prop_map(|(s, b)| MapDescriptor::affine(r(s, DEN), r(b, DEN)).unwrap())
}

pub fn quadratic() -> impl Strategy<Value = MapDescriptor<Rational>> {
    (-8i64..=8, -16i64..=16, 25i64..=32)
        .prop_filter_map("not monotone", |(a, b, c)| MapDescriptor::quadratic(r(a, 64), r(b, 64), r(c, 64)).ok())
}

pub fn any_map() -> impl Strategy<Value = MapDescriptor<Rational>> {
    let base = prop_oneof![affine(900), quadratic()];
    prop_oneof![
        3 => base.clone(),
        1 => (base, 0i64..512, 512i64..=1024)
            .prop_map(|(m, lo, hi)| MapDescriptor::clamped(m, r(lo, 1024), r(hi, 1024)).unwrap()),
    ]
}

/// `n − 1` sorted breakpoints on a grid of step `1/128`, gaps at least `1/64`.
pub fn breakpoints(n: usize) -> impl Strategy<Value = Breakpoints<Rational>> {
    let grid: Vec<i64> = (1..64).map(|k| 2 * k).collect();
    subsequence(grid, n - 1)
        .prop_filter("gap", |v| v.windows(2).all(|w| w[1] - w[0] >= 2))
        .prop_map(|v| Breakpoints::new(v.into_iter().map(|k| r(k, 128)).collect()).unwrap())
}

pub fn ifs(n: usize, max_slope: i64) -> impl Strategy<Value = IteratedFunctionSystem<Rational>> {
    proptest::collection::vec(affine(max_slope), n).prop_map(|maps| IteratedFunctionSystem::new(maps).unwrap())
}

pub fn pc(n: usize, max_slope: i64) -> impl Strategy<Value = PiecewiseContraction<Rational>> {
    (ifs(n, max_slope), breakpoints(n)).prop_map(|(ifs, bp)| PiecewiseContraction::new(ifs, bp).unwrap())
}

pub fn pc_any_n(max_slope: i64) -> impl Strategy<Value = PiecewiseContraction<Rational>> {
    (2usize..=4).prop_flat_map(move |n| pc(n, max_slope))
}
