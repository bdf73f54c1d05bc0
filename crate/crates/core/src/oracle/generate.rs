//! Random strict, non-blocking instances for the theorem suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::relations::Relation;
use crate::system::{FiniteTransitionSystem, Input, State, StateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbstractionMode {
    /// Rows drawn independently of the concrete system.
    Random,
    /// One related successor per concrete successor: ASR by construction.
    Alternating,
    /// Every related successor: MCR by construction.
    Complete,
    /// `Complete`, then a few transitions dropped.
    Mutated,
}

impl AbstractionMode {
    pub const ALL: [AbstractionMode; 4] = [
        AbstractionMode::Random,
        AbstractionMode::Alternating,
        AbstractionMode::Complete,
        AbstractionMode::Mutated,
    ];
}

#[derive(Clone, Copy, Debug)]
pub struct GeneratorConfig {
    pub max_states: usize,
    pub max_inputs: usize,
    /// Probability that a relation gets overlapping cells.
    pub overlap: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_states: 5,
            max_inputs: 3,
            overlap: 0.25,
        }
    }
}

fn ids<T: From<String>>(prefix: &str, n: usize) -> Vec<T> {
    (0..n).map(|i| T::from(format!("{prefix}{i}"))).collect()
}

/// Inputs share names across systems (`u0`, `u1`, …) so feedback
/// refinement can hold.
pub fn random_system<R: Rng>(rng: &mut R, prefix: &str, cfg: &GeneratorConfig) -> FiniteTransitionSystem {
    let n = rng.gen_range(1..=cfg.max_states);
    let m = rng.gen_range(1..=cfg.max_inputs);
    let xs: Vec<State> = ids(prefix, n);
    let us: Vec<Input> = ids("u", m);
    let mut rows = BTreeMap::new();
    for x in &xs {
        for u in &us {
            if rng.gen_bool(0.6) {
                rows.insert((x.clone(), u.clone()), random_subset(rng, &xs));
            }
        }
        if !us.iter().any(|u| rows.contains_key(&(x.clone(), u.clone()))) {
            let u = us.choose(rng).unwrap().clone();
            rows.insert((x.clone(), u), random_subset(rng, &xs));
        }
    }
    FiniteTransitionSystem::from_parts(xs.into_iter().collect(), us.into_iter().collect(), rows)
        .expect("generated ids are valid")
}

/// One or two elements.
fn random_subset<R: Rng>(rng: &mut R, xs: &[State]) -> StateSet {
    let k = if xs.len() > 1 && rng.gen_bool(0.3) { 2 } else { 1 };
    xs.choose_multiple(rng, k).cloned().collect()
}

/// A strict relation: every concrete state gets one cell, and with
/// probability `cfg.overlap` some states get a second.
pub fn random_relation<R: Rng>(
    rng: &mut R,
    s1: &FiniteTransitionSystem,
    codomain: &StateSet,
    cfg: &GeneratorConfig,
) -> Relation {
    let targets: Vec<State> = codomain.iter().cloned().collect();
    let overlapping = targets.len() > 1 && rng.gen_bool(cfg.overlap);
    let mut pairs = Vec::new();
    for x in s1.states() {
        pairs.push((x.clone(), targets.choose(rng).unwrap().clone()));
        if overlapping && rng.gen_bool(0.5) {
            pairs.push((x.clone(), targets.choose(rng).unwrap().clone()));
        }
    }
    Relation::new(s1.states().clone(), codomain.clone(), pairs).expect("generated pairs are in range")
}

/// An abstraction of `s1` under a fresh relation.
pub fn random_abstraction<R: Rng>(
    rng: &mut R,
    s1: &FiniteTransitionSystem,
    prefix: &str,
    mode: AbstractionMode,
    cfg: &GeneratorConfig,
) -> (FiniteTransitionSystem, Relation) {
    let n = rng.gen_range(1..=cfg.max_states);
    let m = rng.gen_range(1..=cfg.max_inputs);
    let xs: Vec<State> = ids(prefix, n);
    let us: Vec<Input> = ids("u", m);
    let codomain: StateSet = xs.iter().cloned().collect();
    let r = random_relation(rng, s1, &codomain, cfg);

    let mut rows: BTreeMap<(State, Input), StateSet> = BTreeMap::new();
    for x2 in &xs {
        let available: Vec<Input> = us.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let available = if available.is_empty() {
            vec![us.choose(rng).unwrap().clone()]
        } else {
            available
        };
        for u2 in available {
            let mut succ = StateSet::new();
            if mode == AbstractionMode::Random || r.preimage(x2).is_empty() {
                succ = random_subset(rng, &xs);
            } else {
                for x1 in r.preimage(x2) {
                    let u1s: Vec<&Input> = s1.rows(x1).map(|(u, _)| u).collect();
                    let u1 = *u1s.choose(rng).expect("non-blocking");
                    for x1n in s1.post(x1, u1) {
                        let cells: Vec<&State> = r.image(x1n).iter().collect();
                        match mode {
                            AbstractionMode::Alternating => {
                                succ.insert((*cells.choose(rng).unwrap()).clone());
                            }
                            _ => succ.extend(cells.into_iter().cloned()),
                        }
                    }
                }
                if mode == AbstractionMode::Mutated && succ.len() > 1 && rng.gen_bool(0.5) {
                    let drop = succ.iter().collect::<Vec<_>>().choose(rng).map(|x| (*x).clone());
                    if let Some(d) = drop {
                        succ.remove(&d);
                    }
                }
            }
            rows.insert((x2.clone(), u2), succ);
        }
    }
    let s2 = FiniteTransitionSystem::from_parts(codomain, us.into_iter().collect(), rows)
        .expect("generated ids are valid");
    (s2, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{check_asr, check_mcr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_well_formed() {
        let cfg = GeneratorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..200 {
            let s1 = random_system(&mut rng, "p", &cfg);
            assert!(s1.is_non_blocking());
            let mode = AbstractionMode::ALL[i % 4];
            let (s2, r) = random_abstraction(&mut rng, &s1, "q", mode, &cfg);
            assert!(s2.is_non_blocking());
            assert!(r.is_strict());
            match mode {
                AbstractionMode::Alternating => assert!(check_asr(&s1, &s2, &r).unwrap().holds),
                AbstractionMode::Complete => assert!(check_mcr(&s1, &s2, &r).unwrap().holds),
                _ => {}
            }
        }
    }
}
