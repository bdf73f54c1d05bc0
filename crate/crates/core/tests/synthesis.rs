mod common;

use proptest::prelude::*;
use symcret::synthesis::{enumerate_controllers, solve_reach_avoid, synthesize_reach_avoid};
use symcret::system::default_horizon;
use symcret::{FiniteTransitionSystem, ReachAvoidSpec, StateSet};

fn spec_for(sys: &FiniteTransitionSystem, seed: u64) -> ReachAvoidSpec {
    let mut rng = common::rng(seed);
    let target = common::subset(&mut rng, sys.states());
    let obstacle = common::subset(&mut rng, sys.states()).difference(&target).cloned().collect();
    ReachAvoidSpec::new(sys.states().clone(), target, obstacle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn winning_region_is_sound(seed in any::<u64>()) {
        let sys = common::system(seed);
        let spec = spec_for(&sys, !seed);
        let sol = solve_reach_avoid(&sys, &spec).unwrap();
        prop_assert!(spec.target.is_subset(&sol.winning));
        prop_assert!(sol.winning.is_disjoint(&spec.obstacle));
        let dom: StateSet = sol.controller.domain().cloned().collect();
        prop_assert_eq!(&dom, &sol.winning.difference(&spec.target).cloned().collect::<StateSet>());
        // rank strictly decreases along every controlled transition
        for (x, us) in sol.controller.iter() {
            for u in us {
                for n in sys.post(x, u) {
                    prop_assert!(sol.rank[n] < sol.rank[x]);
                }
            }
        }
        let closed = sys.controlled(&sol.controller).unwrap();
        let from_winning = ReachAvoidSpec::new(sol.winning.clone(), spec.target.clone(), spec.obstacle.clone());
        prop_assert!(closed.check_spec(&from_winning, default_horizon(&sys)).unwrap().holds);
        // losing states: no controller at all wins from them
        for x in sys.states().difference(&sol.winning) {
            let one = ReachAvoidSpec::new([x.clone()].into_iter().collect(), spec.target.clone(), spec.obstacle.clone());
            let best = enumerate_controllers(&sys, sys.states(), 100_000).unwrap().any(|c| {
                sys.controlled(&c).unwrap().check_spec(&one, default_horizon(&sys)).unwrap().holds
            });
            prop_assert!(!best, "{x} is losing but some controller wins");
        }
    }

    #[test]
    fn monotone_in_target_antitone_in_obstacle(seed in any::<u64>()) {
        let sys = common::system(seed);
        let spec = spec_for(&sys, seed.rotate_left(13));
        let base = solve_reach_avoid(&sys, &spec).unwrap();
        let mut rng = common::rng(seed ^ 77);
        let free: StateSet = sys.states().difference(&spec.obstacle).cloned().collect();
        let more_target: StateSet = spec.target.union(&common::subset(&mut rng, &free)).cloned().collect();
        let bigger = solve_reach_avoid(&sys, &ReachAvoidSpec::new(spec.initial.clone(), more_target, spec.obstacle.clone())).unwrap();
        prop_assert!(base.winning.is_subset(&bigger.winning));
        let open: StateSet = sys.states().difference(&spec.target).cloned().collect();
        let more_obstacle: StateSet = spec.obstacle.union(&common::subset(&mut rng, &open)).cloned().collect();
        let smaller = solve_reach_avoid(&sys, &ReachAvoidSpec::new(spec.initial.clone(), spec.target.clone(), more_obstacle)).unwrap();
        prop_assert!(smaller.winning.is_subset(&base.winning));
    }

    #[test]
    fn ranks_are_bounded(seed in any::<u64>()) {
        let sys = common::system(seed);
        let spec = spec_for(&sys, seed.wrapping_add(5));
        let sol = solve_reach_avoid(&sys, &spec).unwrap();
        prop_assert!(sol.rank.values().all(|&r| r <= sys.states().len()));
        prop_assert_eq!(sol.rank.len(), sol.winning.len());
        let verdict = synthesize_reach_avoid(&sys, &spec).unwrap();
        prop_assert_eq!(verdict.is_solved(), spec.initial.is_subset(&sol.winning));
    }

    #[test]
    fn enumeration_counts_match(seed in any::<u64>()) {
        let sys = common::system(seed);
        let all: Vec<_> = enumerate_controllers(&sys, sys.states(), 100_000).unwrap().collect();
        let expected: u128 = sys.states().iter().map(|x| (1u128 << sys.rows(x).count()) - 1).product();
        prop_assert_eq!(all.len() as u128, expected);
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
    }
}
