//! Reach-avoid synthesis on finite, possibly non-deterministic systems.
//!
//! A non-deterministic row `F(x, u)` is a forward hyperarc with tail `x` and
//! heads `F(x, u)`; a state wins if some hyperarc leaving it has all its heads
//! winning. The winning region is the least fixed point of the controllable
//! predecessor, and the iteration index at which a state enters it is its
//! rank (an upper bound on the steps needed to reach the target).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Controller, FiniteTransitionSystem, Input, InputSet, ReachAvoidSpec, State, StateSet};

/// `{x ∈ safe | ∃u ∈ U(x): ∅ ≠ F(x, u) ⊆ target}`.
pub fn controllable_predecessor(
    sys: &FiniteTransitionSystem,
    safe: &StateSet,
    target: &StateSet,
) -> StateSet {
    safe.iter()
        .filter(|x| sys.rows(x).any(|(_, succ)| succ.is_subset(target)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub winning: StateSet,
    /// Defined exactly on `winning \ target`.
    pub controller: Controller,
    pub rank: BTreeMap<State, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Synthesis {
    Solved(SynthesisResult),
    /// Some initial states are outside the winning region.
    Unsolvable {
        losing: StateSet,
        fixed_point: SynthesisResult,
    },
}

impl Synthesis {
    pub fn solution(&self) -> Option<&SynthesisResult> {
        match self {
            Synthesis::Solved(r) => Some(r),
            Synthesis::Unsolvable { .. } => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Synthesis::Solved(_))
    }

    pub fn fixed_point(&self) -> &SynthesisResult {
        match self {
            Synthesis::Solved(r) | Synthesis::Unsolvable { fixed_point: r, .. } => r,
        }
    }
}

/// Computes the winning region, ranks and the maximally permissive
/// rank-decreasing controller regardless of the initial set.
pub fn solve_reach_avoid(sys: &FiniteTransitionSystem, spec: &ReachAvoidSpec) -> Result<SynthesisResult> {
    spec.validate_for(sys)?;
    if let Some(x) = spec.target.intersection(&spec.obstacle).next() {
        return Err(Error::TargetObstacleOverlap(x.clone()));
    }
    let safe: StateSet = sys.states().difference(&spec.obstacle).cloned().collect();

    let mut winning = spec.target.clone();
    let mut rank: BTreeMap<State, usize> = winning.iter().map(|x| (x.clone(), 0)).collect();
    for step in 1.. {
        let fresh: Vec<State> = controllable_predecessor(sys, &safe, &winning)
            .into_iter()
            .filter(|x| !winning.contains(x))
            .collect();
        if fresh.is_empty() {
            break;
        }
        for x in fresh {
            rank.insert(x.clone(), step);
            winning.insert(x);
        }
    }

    let mut choices: BTreeMap<State, InputSet> = BTreeMap::new();
    for x in winning.difference(&spec.target) {
        let own = rank[x];
        let choice: InputSet = sys
            .rows(x)
            .filter(|(_, succ)| succ.iter().all(|n| rank.get(n).is_some_and(|&r| r < own)))
            .map(|(u, _)| u.clone())
            .collect();
        debug_assert!(!choice.is_empty());
        choices.insert(x.clone(), choice);
    }

    Ok(SynthesisResult {
        winning,
        controller: Controller::new(choices)?,
        rank,
    })
}

pub fn synthesize_reach_avoid(sys: &FiniteTransitionSystem, spec: &ReachAvoidSpec) -> Result<Synthesis> {
    let result = solve_reach_avoid(sys, spec)?;
    let losing: StateSet = spec.initial.difference(&result.winning).cloned().collect();
    Ok(if losing.is_empty() {
        Synthesis::Solved(result)
    } else {
        Synthesis::Unsolvable {
            losing,
            fixed_point: result,
        }
    })
}

impl SynthesisResult {
    /// True if `ctrl`, run from `initial` until the target, only visits
    /// winning states and only uses inputs this controller also allows.
    pub fn admits(
        &self,
        sys: &FiniteTransitionSystem,
        ctrl: &Controller,
        initial: &StateSet,
        target: &StateSet,
    ) -> bool {
        let mut seen = StateSet::new();
        let mut stack: Vec<State> = initial.iter().cloned().collect();
        while let Some(x) = stack.pop() {
            if !seen.insert(x.clone()) || target.contains(&x) {
                continue;
            }
            let (Some(sub), Some(sup)) = (ctrl.get(&x), self.controller.get(&x)) else {
                return false;
            };
            if !sub.is_subset(sup) {
                return false;
            }
            for u in sub {
                stack.extend(sys.post(&x, u).iter().cloned());
            }
        }
        true
    }
}

/// Every static controller assigning each domain state a non-empty subset
/// of its available inputs. Subsets are bitmasks over the sorted available
/// inputs, counted in odometer order with the last domain state fastest.
pub struct ControllerEnumeration {
    domain: Vec<(State, Vec<Input>)>,
    masks: Vec<u64>,
    done: bool,
}

impl ControllerEnumeration {
    pub fn total(&self) -> u128 {
        count_controllers(&self.domain)
    }
}

fn count_controllers(domain: &[(State, Vec<Input>)]) -> u128 {
    domain.iter().fold(1u128, |acc, (_, us)| {
        let options = if us.len() >= 127 {
            u128::MAX
        } else {
            (1u128 << us.len()) - 1
        };
        acc.saturating_mul(options)
    })
}

impl Iterator for ControllerEnumeration {
    type Item = Controller;

    fn next(&mut self) -> Option<Controller> {
        if self.done {
            return None;
        }
        let choices: BTreeMap<State, InputSet> = self
            .domain
            .iter()
            .zip(&self.masks)
            .map(|((x, us), &mask)| {
                let set = us
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, u)| u.clone())
                    .collect();
                (x.clone(), set)
            })
            .collect();

        self.done = true;
        for (i, mask) in self.masks.iter_mut().enumerate().rev() {
            let full = (1u64 << self.domain[i].1.len()) - 1;
            if *mask < full {
                *mask += 1;
                self.done = false;
                break;
            }
            *mask = 1;
        }
        Some(Controller::new(choices).expect("masks are non-zero"))
    }
}

pub fn enumerate_controllers(
    sys: &FiniteTransitionSystem,
    domain: &StateSet,
    budget: u128,
) -> Result<ControllerEnumeration> {
    let mut entries = Vec::new();
    for x in domain {
        let available: Vec<Input> = sys.available_inputs(x)?.into_iter().collect();
        entries.push((x.clone(), available));
    }
    let needed = count_controllers(&entries);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if entries.iter().any(|(_, us)| us.len() > 63) {
        return Err(Error::BudgetExceeded {
            needed: u128::MAX,
            budget,
        });
    }
    let done = needed == 0;
    Ok(ControllerEnumeration {
        masks: vec![1; entries.len()],
        domain: entries,
        done,
    })
}
