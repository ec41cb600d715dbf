mod support;

use intsys::relation::union;
use intsys::simulation::{
    check_simulation, compose, find_violation, greatest_simulation, refine_once,
    synthesize_strategy,
};
use intsys::{InteractionSystem, Relation, SimulationStrategy, Token};
use proptest::prelude::*;
use rand::Rng;
use support::gen::{rng, system};
use support::oracle::{greatest_by_subsets, is_simulation};

/// A relation containing each pair of `S1 × S2` with probability 1/2.
fn random_relation(seed: u64, w1: &InteractionSystem, w2: &InteractionSystem) -> Relation {
    let mut r = rng(seed);
    Relation::total(w1.state_list(), w2.state_list())
        .iter()
        .filter(|_| r.gen_bool(0.5))
        .cloned()
        .collect()
}

/// The largest simulation inside `r`.
fn shrink(w1: &InteractionSystem, w2: &InteractionSystem, mut r: Relation) -> Relation {
    loop {
        let next = refine_once(w1, w2, &r).unwrap();
        if next == r {
            return r;
        }
        r = next;
    }
}

fn greatest_strategy(w1: &InteractionSystem, w2: &InteractionSystem) -> SimulationStrategy {
    let g = greatest_simulation(w1, w2).unwrap();
    synthesize_strategy(w1, w2, &g)
        .unwrap()
        .strategy()
        .expect("the greatest simulation is a simulation")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn check_agrees_with_the_literal_definition(a: u64, b: u64, c: u64) {
        let (w1, w2) = (system(a), system(b));
        let r = random_relation(c, &w1, &w2);
        let expected = is_simulation(&w1, &w2, &r);
        prop_assert_eq!(check_simulation(&w1, &w2, &r).unwrap(), expected);
        prop_assert_eq!(find_violation(&w1, &w2, &r).unwrap().is_none(), expected);
        let synth = synthesize_strategy(&w1, &w2, &r).unwrap();
        match synth.strategy() {
            Some(x) => {
                prop_assert!(expected);
                prop_assert!(x.verify(&w1, &w2).is_ok());
                prop_assert_eq!(x.relation, r);
            }
            None => prop_assert!(!expected),
        }
    }

    #[test]
    fn greatest_matches_subset_enumeration(a: u64, b: u64) {
        let (w1, w2) = (system(a), system(b));
        let g = greatest_simulation(&w1, &w2).unwrap();
        prop_assert_eq!(&g, &greatest_by_subsets(&w1, &w2));
        prop_assert_eq!(refine_once(&w1, &w2, &g).unwrap(), g);
    }

    #[test]
    fn every_simulation_lies_below_the_greatest(a: u64, b: u64, c: u64) {
        let (w1, w2) = (system(a), system(b));
        let r = shrink(&w1, &w2, random_relation(c, &w1, &w2));
        prop_assert!(is_simulation(&w1, &w2, &r));
        prop_assert!(r.is_subset(&greatest_simulation(&w1, &w2).unwrap()));
    }

    #[test]
    fn unions_of_simulations_are_simulations(a: u64, b: u64, c: u64, d: u64) {
        let (w1, w2) = (system(a), system(b));
        let r1 = shrink(&w1, &w2, random_relation(c, &w1, &w2));
        let r2 = shrink(&w1, &w2, random_relation(d, &w1, &w2));
        prop_assert!(check_simulation(&w1, &w2, &union(&[r1, r2])).unwrap());
    }

    #[test]
    fn composition_is_a_category(a: u64, b: u64, c: u64, d: u64) {
        let ws = [system(a), system(b), system(c), system(d)];
        let x = greatest_strategy(&ws[0], &ws[1]);
        let y = greatest_strategy(&ws[1], &ws[2]);
        let z = greatest_strategy(&ws[2], &ws[3]);
        let id0 = SimulationStrategy::copycat(&ws[0]).unwrap();
        let id1 = SimulationStrategy::copycat(&ws[1]).unwrap();
        prop_assert_eq!(&compose(&x, &id0).unwrap().relation, &x.relation);
        prop_assert_eq!(&compose(&id1, &x).unwrap().relation, &x.relation);
        let yx = compose(&y, &x).unwrap();
        prop_assert!(yx.verify(&ws[0], &ws[2]).is_ok());
        let left = compose(&z, &yx).unwrap();
        let right = compose(&compose(&z, &y).unwrap(), &x).unwrap();
        prop_assert_eq!(&left.relation, &right.relation);
        prop_assert!(left.verify(&ws[0], &ws[3]).is_ok());
        prop_assert!(right.verify(&ws[0], &ws[3]).is_ok());
    }
}

#[test]
fn copycat_is_a_simulation_on_every_fixture() {
    for name in intsys::fixtures::FIXTURE_NAMES {
        let w = intsys::fixtures::by_name(name).unwrap();
        let id = Relation::identity(w.state_list());
        assert!(is_simulation(&w, &w, &id), "{name}");
        assert!(SimulationStrategy::copycat(&w).unwrap().verify(&w, &w).is_ok());
    }
}

#[test]
fn skip_simulates_into_abort_only_vacuously() {
    let (skip, abort) = (intsys::fixtures::skip(), intsys::fixtures::abort());
    let r: Relation = [(Token::star(), Token::star())].into_iter().collect();
    assert!(!check_simulation(&skip, &abort, &r).unwrap());
    assert!(check_simulation(&abort, &skip, &r).unwrap());
    assert!(check_simulation(&skip, &abort, &Relation::empty()).unwrap());
}
