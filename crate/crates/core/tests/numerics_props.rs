mod common;

use common::r;
use pcw::{Interval, IntervalSet, Rational, Scalar};
use proptest::prelude::*;

fn raw_intervals() -> impl Strategy<Value = Vec<Interval<Rational>>> {
    proptest::collection::vec((0i64..=64, 0i64..=16), 0..12).prop_map(|v| {
        v.into_iter()
            .map(|(a, len)| Interval::new(r(a, 64), r((a + len).min(64), 64)).unwrap())
            .collect()
    })
}

fn overlap(a: &Interval<Rational>, b: &Interval<Rational>) -> Rational {
    let lo = a.lo().max_of(b.lo());
    let hi = a.hi().min_of(b.hi());
    if lo < hi {
        hi - lo
    } else {
        Rational::zero()
    }
}

proptest! {
    #[test]
    fn normalize_is_idempotent_and_order_insensitive(mut ivs in raw_intervals(), seed in any::<u64>()) {
        let a = IntervalSet::normalize(ivs.clone());
        let again = IntervalSet::normalize(a.components().to_vec());
        prop_assert_eq!(&a, &again);
        // deterministic shuffle
        let len = ivs.len();
        if len > 1 {
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ivs.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        prop_assert_eq!(a, IntervalSet::normalize(ivs));
    }

    #[test]
    fn normalized_components_are_sorted_and_separated(ivs in raw_intervals()) {
        let a = IntervalSet::normalize(ivs.clone());
        for w in a.components().windows(2) {
            prop_assert!(w[0].hi() < w[1].lo());
        }
        for iv in &ivs {
            prop_assert!(a.contains(iv.lo()) && a.contains(iv.hi()) && a.contains(&iv.midpoint()));
        }
    }

    #[test]
    fn union_measure_is_inclusion_exclusion(xs in raw_intervals(), ys in raw_intervals()) {
        let a = IntervalSet::normalize(xs);
        let b = IntervalSet::normalize(ys);
        let u = a.union(&b);
        let mut shared = Rational::zero();
        for p in a.components() {
            for q in b.components() {
                shared += overlap(p, q);
            }
        }
        let sum = a.measure() + b.measure();
        prop_assert!(u.measure() <= sum);
        prop_assert_eq!(u.measure(), sum.clone() - shared.clone());
        prop_assert_eq!(u.measure() == sum, shared.is_zero_value());
        prop_assert!(a.is_subset_of(&u) && b.is_subset_of(&u));
    }

    #[test]
    fn mul_add_is_exact(a in (-64i64..=64, 1i64..=96), x in (-200i64..=200, 1i64..=300), b in (-64i64..=64, 1i64..=96)) {
        let (a, x, b) = (r(a.0, a.1), r(x.0, x.1), r(b.0, b.1));
        let got = Rational::mul_add(&a, &x, &b);
        let want = a * x + b;
        prop_assert_eq!((got.numer(), got.denom()), (want.numer(), want.denom()));
    }

    #[test]
    fn sum_values_is_exact(terms in proptest::collection::vec((-50i64..=50, 1i64..=64), 0..20)) {
        let vals: Vec<Rational> = terms.iter().map(|&(n, d)| r(n, d)).collect();
        let want = vals.iter().fold(Rational::zero(), |acc, v| acc + v);
        let got = Rational::sum_values(vals);
        prop_assert_eq!((got.numer(), got.denom()), (want.numer(), want.denom()));
    }
}
