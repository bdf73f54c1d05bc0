#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcret::oracle::generate::{random_abstraction, random_system, AbstractionMode, GeneratorConfig};
use symcret::{Controller, FiniteTransitionSystem, InputSet, Relation, StateSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn system(seed: u64) -> FiniteTransitionSystem {
    random_system(&mut rng(seed), "p", &GeneratorConfig::default())
}

pub fn pair(seed: u64, mode: AbstractionMode) -> (FiniteTransitionSystem, FiniteTransitionSystem, Relation) {
    let mut rng = rng(seed);
    let cfg = GeneratorConfig::default();
    let s1 = random_system(&mut rng, "p", &cfg);
    let (s2, r) = random_abstraction(&mut rng, &s1, "q", mode, &cfg);
    (s1, s2, r)
}

pub fn mode(i: usize) -> AbstractionMode {
    AbstractionMode::ALL[i % AbstractionMode::ALL.len()]
}

pub fn subset<R: Rng>(rng: &mut R, xs: &StateSet) -> StateSet {
    xs.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect()
}

/// A random partial controller choosing a non-empty subset of available
/// inputs at each state of a random domain.
pub fn controller<R: Rng>(rng: &mut R, sys: &FiniteTransitionSystem) -> Controller {
    let mut choices = std::collections::BTreeMap::new();
    for x in sys.states() {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let available: Vec<_> = sys.rows(x).map(|(u, _)| u.clone()).collect();
        let mut pick: InputSet = available.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if pick.is_empty() {
            pick.insert(available.choose(rng).unwrap().clone());
        }
        choices.insert(x.clone(), pick);
    }
    Controller::new(choices).unwrap()
}
