mod common;

use proptest::prelude::*;
use symcret::oracle::{
    check_property_one, check_property_two, replay_property_two_witness, violating_runs_by_execution, OracleQuery,
};
use symcret::concretize::memoryless_controller;
use symcret::relations::{check_asr, maximal_interface, RelationKind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn property_two_search_matches_execution(seed in any::<u64>(), m in 0usize..4, h in 1usize..6) {
        let (s1, s2, r) = common::pair(seed, common::mode(m));
        prop_assume!(check_asr(&s1, &s2, &r).unwrap().holds);
        let iface = maximal_interface(&s1, &s2, &r, RelationKind::Asr).unwrap();
        let mut rng = common::rng(seed ^ 0xC0FFEE);
        let c2 = common::controller(&mut rng, &s2);
        let q = OracleQuery::with_horizon(h);
        let v = check_property_two(&s1, &s2, &r, &iface, &c2, &q).unwrap();
        let bad = violating_runs_by_execution(&s1, &s2, &r, &iface, &c2, &q).unwrap();
        prop_assert_eq!(v.holds, bad.is_empty());
        if let Some(w) = &v.witness {
            prop_assert!(replay_property_two_witness(&s1, &s2, &r, &iface, &c2, w).unwrap());
            prop_assert!(w.concrete.is_trajectory_of(&s1));
            prop_assert!(w.concrete.states.iter().zip(&w.quantization).all(|(x1, x2)| r.contains(x1, x2)));
        }
        // a violation found within h steps persists for longer horizons
        let longer = check_property_two(&s1, &s2, &r, &iface, &c2, &OracleQuery::with_horizon(h + 2)).unwrap();
        prop_assert!(v.holds || !longer.holds);
    }

    #[test]
    fn property_one_is_monotone_in_horizon(seed in any::<u64>(), m in 0usize..4, h in 1usize..5) {
        let (s1, s2, r) = common::pair(seed, common::mode(m));
        prop_assume!(check_asr(&s1, &s2, &r).unwrap().holds);
        let iface = maximal_interface(&s1, &s2, &r, RelationKind::Asr).unwrap();
        let mut rng = common::rng(seed.rotate_right(9));
        let c2 = common::controller(&mut rng, &s2);
        let c1 = memoryless_controller(&c2, &r, &iface).unwrap();
        let short = check_property_one(&s1, &s2, &r, &c1, &c2, &OracleQuery::with_horizon(h)).unwrap();
        let long = check_property_one(&s1, &s2, &r, &c1, &c2, &OracleQuery::with_horizon(h + 2)).unwrap();
        prop_assert!(short.holds || !long.holds);
        if let Some(w) = long.witness {
            prop_assert!(w.is_trajectory_of(&s1));
            prop_assert!(w.len() <= h + 2);
        }
    }
}
