mod common;

use common::{breakpoints, ifs, r, unit_point};
use pcw::{IteratedFunctionSystem, PiecewiseContraction, Rational, Scalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn attractor_sets_nest_and_stay_small((n, system) in (2usize..=4).prop_flat_map(|n| (Just(n), ifs(n, 900)))) {
        let aks = system.ak_sequence(6);
        for (k, pair) in aks.windows(2).enumerate() {
            prop_assert!(pair[1].is_subset_of(&pair[0]));
            prop_assert!(pair[1].len() as u64 <= (n as u64).pow(k as u32 + 1));
        }
        if let Some(rho) = system.highly_contractive_bound() {
            for pair in aks.windows(2) {
                prop_assert!(pair[1].measure() <= rho.clone() * pair[0].measure());
            }
        }
    }

    #[test]
    fn highly_contractive_instances_decay(system in ifs(2, 200)) {
        let rho = system.highly_contractive_bound();
        prop_assert!(rho.is_some());
        let rho = rho.unwrap();
        let aks = system.ak_sequence(8);
        for pair in aks.windows(2) {
            prop_assert!(pair[1].measure() <= rho.clone() * pair[0].measure());
        }
    }

    #[test]
    fn compositions_are_nested_evaluations(system in ifs(3, 900), k in 0usize..=4, x in unit_point()) {
        let family = system.compositions(k, 1000).unwrap();
        prop_assert_eq!(family.len(), 3usize.pow(k as u32));
        for c in &family.members {
            let mut y = x.clone();
            for &d in &c.word {
                y = system.maps()[d - 1].eval(&y).unwrap();
            }
            prop_assert_eq!(c.eval(&x).unwrap(), y);
        }
    }

    #[test]
    fn capped_system_induces_same_map(
        system in ifs(3, 460),
        bp in breakpoints(3),
        shifts in proptest::collection::vec(-99i64..=99, 2),
        xs in proptest::collection::vec(common::half_open_point(), 50),
    ) {
        let plan = system.cap(&bp).unwrap();
        let rho = plan.capped.highly_contractive_bound();
        prop_assert!(rho.is_some() && rho.unwrap() < Rational::one());
        let y: Vec<Rational> = bp
            .points()
            .iter()
            .zip(&shifts)
            .map(|(x, &s)| x.clone() + plan.delta.clone() * r(s, 100))
            .collect();
        let y = pcw::Breakpoints::new(y).unwrap();
        prop_assert!(plan.neighbourhood_contains(&y));
        let original = PiecewiseContraction::new(system.clone(), y.clone()).unwrap();
        let capped = PiecewiseContraction::new(plan.capped.clone(), y).unwrap();
        for x in &xs {
            prop_assert_eq!(original.eval(x).unwrap(), capped.eval(x).unwrap());
        }
    }
}

#[test]
fn single_map_is_rejected() {
    let m = pcw::MapDescriptor::affine(r(1, 2), r(1, 4)).unwrap();
    assert!(IteratedFunctionSystem::new(vec![m]).is_err());
}
