//! Bounded brute-force checks of the two closed-loop properties.
//!
//! Property one: every concrete closed-loop state sequence has an
//! `R`-related abstract closed-loop sequence. Property two: every
//! quantization of every run of the memoryless loop is an abstract
//! closed-loop sequence.

mod crosscheck;
pub mod generate;
mod property;

pub use crosscheck::{crosscheck_theorems, trial_seed, CrosscheckReport, FailureBundle, CONTROLLER_BUDGET, THREADS_ENV};
pub use property::{
    check_property_one, check_property_two, check_property_two_all_controllers, check_property_two_pointwise,
    default_oracle_horizon, replay_property_two_witness, violating_runs_by_execution, AllControllersVerdict,
    OracleQuery, PropertyOneVerdict, PropertyTwoVerdict, PropertyTwoWitness,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concretize::memoryless_controller;
    use crate::fixtures;
    use crate::relations::{maximal_interface, Relation, RelationKind};
    use crate::system::{states, Controller, State, StateSet, Trajectory};

    fn one() -> OracleQuery {
        OracleQuery {
            initial: Some(states(["1"])),
            horizon: Some(6),
        }
    }

    #[test]
    fn property_one_on_fig5() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let c1 = memoryless_controller(&fig.c2_alpha, &fig.r, &i).unwrap();
        let v = check_property_one(&fig.s1, &fig.s2, &fig.r, &c1, &fig.c2_alpha, &one()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap(), Trajectory::parse("1 2 3", "0 1").unwrap());

        let v = check_property_one(&fig.s1, &fig.s2, &fig.r, &fig.c1_prime, &fig.c2_alpha, &one()).unwrap();
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn property_one_trivial_case() {
        let fig = fixtures::fig5();
        let empty = Controller::default();
        let v = check_property_one(&fig.s1, &fig.s2, &fig.r, &empty, &fig.c2_alpha, &OracleQuery::default()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn property_two_on_fig5() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let v = check_property_two(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_alpha, &one()).unwrap();
        let w = v.witness.expect("refuted");
        assert_eq!(w.concrete.states, vec![State::new("1"), State::new("2"), State::new("3")]);
        assert_eq!(w.quantization, vec![State::new("a"), State::new("c"), State::new("d")]);
        assert_eq!(w.violation_step, 0);
        assert!(replay_property_two_witness(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_alpha, &w).unwrap());

        assert!(check_property_two(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_beta, &one()).unwrap().holds);
        let all = OracleQuery::with_horizon(6);
        assert!(check_property_two(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_beta, &all).unwrap().holds);
    }

    #[test]
    fn property_two_after_extension() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2_prime, &fig.r, RelationKind::Mcr).unwrap();
        let v = check_property_two(&fig.s1, &fig.s2_prime, &fig.r, &i, &fig.c2_alpha, &OracleQuery::default()).unwrap();
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn pointwise_reading_is_stronger() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2_prime, &fig.r, RelationKind::Mcr).unwrap();
        let v = check_property_two_pointwise(&fig.s1, &fig.s2_prime, &fig.r, &i, &fig.c2_alpha, &one()).unwrap();
        let w = v.witness.expect("refuted");
        assert_eq!(w.quantization, vec![State::new("a"), State::new("b"), State::new("d")]);
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        assert!(check_property_two_pointwise(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_beta, &one()).unwrap().holds);
    }

    #[test]
    fn empty_initial_set_holds() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let q = OracleQuery {
            initial: Some(StateSet::new()),
            horizon: None,
        };
        assert!(check_property_two(&fig.s1, &fig.s2, &fig.r, &i, &fig.c2_alpha, &q).unwrap().holds);
    }

    #[test]
    fn search_agrees_with_execution() {
        let fig = fixtures::fig5();
        for (s2, kind) in [(&fig.s2, RelationKind::Asr), (&fig.s2_prime, RelationKind::Mcr)] {
            let i = maximal_interface(&fig.s1, s2, &fig.r, kind).unwrap();
            for c2 in [&fig.c2_alpha, &fig.c2_beta] {
                let q = OracleQuery::with_horizon(6);
                let verdict = check_property_two(&fig.s1, s2, &fig.r, &i, c2, &q).unwrap();
                let bad = violating_runs_by_execution(&fig.s1, s2, &fig.r, &i, c2, &q).unwrap();
                assert_eq!(verdict.holds, bad.is_empty());
            }
        }
    }

    #[test]
    fn all_controllers_on_fig5() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let v = check_property_two_all_controllers(&fig.s1, &fig.s2, &fig.r, &i, &OracleQuery::default(), 100).unwrap();
        assert!(!v.holds);
        let c = v.witness_controller.unwrap();
        assert_eq!(c.get(&State::new("a")), Some(&crate::system::inputs(["α"])));

        let i = maximal_interface(&fig.s1, &fig.s2_prime, &fig.r, RelationKind::Mcr).unwrap();
        let v = check_property_two_all_controllers(&fig.s1, &fig.s2_prime, &fig.r, &i, &OracleQuery::default(), 100)
            .unwrap();
        assert!(v.holds);
        assert_eq!(v.controllers_checked, 3);

        let id = Relation::identity(fig.s1.states());
        let i = maximal_interface(&fig.s1, &fig.s1, &id, RelationKind::Mcr).unwrap();
        assert!(check_property_two_all_controllers(&fig.s1, &fig.s1, &id, &i, &OracleQuery::default(), 100)
            .unwrap()
            .holds);
    }
}
