//! Finite transition control systems, static controllers, bounded behaviors
//! and reach-avoid specifications.
//!
//! A system is a triple of states, inputs and a set-valued transition map.
//! The map is total in principle; rows that are not stored are empty, which
//! means the input is unavailable at that state. Identifiers are opaque
//! strings ordered lexicographically, so every iteration and every witness
//! below is reproducible.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                $name(Arc::from(name.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(Arc::from(s))
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

identifier!(
    /// Opaque state identifier.
    State
);
identifier!(
    /// Opaque input identifier.
    Input
);

pub type StateSet = BTreeSet<State>;
pub type InputSet = BTreeSet<Input>;

static NO_STATES: StateSet = BTreeSet::new();
static NO_INPUTS: InputSet = BTreeSet::new();

fn check_identifier(id: &str) -> Result<()> {
    if id.is_empty() || id.contains('|') {
        return Err(Error::InvalidIdentifier(id.to_owned()));
    }
    Ok(())
}

/// Builds a state set from anything string-like.
pub fn states<I, S>(items: I) -> StateSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items.into_iter().map(State::new).collect()
}

/// Builds an input set from anything string-like.
pub fn inputs<I, S>(items: I) -> InputSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items.into_iter().map(Input::new).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTransitionSystem {
    states: StateSet,
    inputs: InputSet,
    trans: BTreeMap<State, BTreeMap<Input, StateSet>>,
}

#[derive(Clone, Debug, Default)]
pub struct SystemBuilder {
    states: Vec<String>,
    inputs: Vec<String>,
    rows: Vec<(String, String, Vec<String>)>,
}

impl SystemBuilder {
    pub fn states<I, S>(mut self, items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.states
            .extend(items.into_iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn inputs<I, S>(mut self, items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.inputs
            .extend(items.into_iter().map(|s| s.as_ref().to_owned()));
        self
    }

    /// Adds successors to the row `(x, u)`. Repeated calls accumulate.
    pub fn transition<I, S>(mut self, x: &str, u: &str, successors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.rows.push((
            x.to_owned(),
            u.to_owned(),
            successors
                .into_iter()
                .map(|s| s.as_ref().to_owned())
                .collect(),
        ));
        self
    }

    pub fn build(self) -> Result<FiniteTransitionSystem> {
        for id in self.states.iter().chain(&self.inputs) {
            check_identifier(id)?;
        }
        let mut sys = FiniteTransitionSystem {
            states: states(&self.states),
            inputs: inputs(&self.inputs),
            trans: BTreeMap::new(),
        };
        for (x, u, succ) in self.rows {
            let succ = states(&succ);
            sys.insert_row(State::from(x), Input::from(u), succ)?;
        }
        Ok(sys)
    }
}

impl FiniteTransitionSystem {
    pub fn builder() -> SystemBuilder {
        SystemBuilder::default()
    }

    /// Assembles a system from already-typed parts, validating membership.
    pub fn from_parts(
        states: StateSet,
        inputs: InputSet,
        rows: impl IntoIterator<Item = ((State, Input), StateSet)>,
    ) -> Result<Self> {
        for id in states.iter().map(State::as_str).chain(inputs.iter().map(Input::as_str)) {
            check_identifier(id)?;
        }
        let mut sys = FiniteTransitionSystem {
            states,
            inputs,
            trans: BTreeMap::new(),
        };
        for ((x, u), succ) in rows {
            sys.insert_row(x, u, succ)?;
        }
        Ok(sys)
    }

    fn insert_row(&mut self, x: State, u: Input, succ: StateSet) -> Result<()> {
        self.require_state(&x)?;
        if !self.inputs.contains(&u) {
            return Err(Error::UnknownInput(u));
        }
        if let Some(bad) = succ.iter().find(|s| !self.states.contains(*s)) {
            return Err(Error::UnknownState(bad.clone()));
        }
        if succ.is_empty() {
            return Ok(());
        }
        self.trans
            .entry(x)
            .or_default()
            .entry(u)
            .or_default()
            .extend(succ);
        Ok(())
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn inputs(&self) -> &InputSet {
        &self.inputs
    }

    pub fn contains_state(&self, x: &str) -> bool {
        self.states.contains(x)
    }

    pub(crate) fn require_state(&self, x: &State) -> Result<()> {
        if self.states.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownState(x.clone()))
        }
    }

    /// `F(x, u)`; empty when the input is unavailable or the pair is unknown.
    pub fn post(&self, x: &State, u: &Input) -> &StateSet {
        self.trans
            .get(x)
            .and_then(|row| row.get(u))
            .unwrap_or(&NO_STATES)
    }

    /// Non-empty rows leaving `x`, ordered by input.
    pub fn rows(&self, x: &State) -> impl Iterator<Item = (&Input, &StateSet)> {
        self.trans.get(x).into_iter().flat_map(|row| row.iter())
    }

    /// Every non-empty row of the transition map.
    pub fn transitions(&self) -> impl Iterator<Item = (&State, &Input, &StateSet)> {
        self.trans
            .iter()
            .flat_map(|(x, row)| row.iter().map(move |(u, s)| (x, u, s)))
    }

    /// `U(x) = { u | F(x, u) ≠ ∅ }`.
    pub fn available_inputs(&self, x: &State) -> Result<InputSet> {
        self.require_state(x)?;
        Ok(self
            .trans
            .get(x)
            .map(|row| row.keys().cloned().collect())
            .unwrap_or_default())
    }

    pub(crate) fn available(&self, x: &State) -> impl Iterator<Item = &Input> {
        self.trans.get(x).into_iter().flat_map(|row| row.keys())
    }

    pub(crate) fn is_available(&self, x: &State, u: &Input) -> bool {
        !self.post(x, u).is_empty()
    }

    pub fn is_non_blocking(&self) -> bool {
        self.states.iter().all(|x| self.trans.contains_key(x))
    }

    /// States with no available input.
    pub fn blocking_states(&self) -> impl Iterator<Item = &State> {
        self.states.iter().filter(|x| !self.trans.contains_key(*x))
    }

    pub fn is_deterministic(&self) -> bool {
        self.transitions().all(|(_, _, succ)| succ.len() <= 1)
    }

    /// Successors of `x` under any of the given inputs.
    pub fn post_under<'a>(&'a self, x: &State, us: impl IntoIterator<Item = &'a Input>) -> StateSet {
        let mut out = StateSet::new();
        for u in us {
            out.extend(self.post(x, u).iter().cloned());
        }
        out
    }

    /// `C × S`: keeps `F(x, u)` exactly when `u ∈ C(x)`. States outside the
    /// controller's domain get no transitions.
    pub fn controlled(&self, ctrl: &Controller) -> Result<FiniteTransitionSystem> {
        ctrl.validate_for(self)?;
        let mut trans = BTreeMap::new();
        for (x, choice) in ctrl.iter() {
            let row: BTreeMap<Input, StateSet> = choice
                .iter()
                .map(|u| (u.clone(), self.post(x, u).clone()))
                .collect();
            trans.insert(x.clone(), row);
        }
        Ok(FiniteTransitionSystem {
            states: self.states.clone(),
            inputs: self.inputs.clone(),
            trans,
        })
    }

    /// The identity controller: every available input at every state.
    pub fn full_controller(&self) -> Controller {
        Controller {
            choices: self
                .trans
                .iter()
                .map(|(x, row)| (x.clone(), row.keys().cloned().collect()))
                .collect(),
        }
    }

    /// All trajectories of length at most `horizon` starting in `from`.
    pub fn bounded_behavior(&self, from: &StateSet, horizon: usize) -> Result<BTreeSet<Trajectory>> {
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<Trajectory> = Vec::new();
        for x in from {
            self.require_state(x)?;
            stack.push(Trajectory::start(x.clone()));
        }
        while let Some(traj) = stack.pop() {
            if traj.len() < horizon {
                let last = traj.last().clone();
                for (u, succ) in self.rows(&last) {
                    for next in succ {
                        let mut t = traj.clone();
                        t.push(u.clone(), next.clone());
                        stack.push(t);
                    }
                }
            }
            out.insert(traj);
        }
        Ok(out)
    }

    /// Decides the bounded reach-avoid specification. A trajectory from the
    /// initial set violates it if it touches an obstacle before the target,
    /// or ends (maximal, or at the horizon) without reaching the target.
    pub fn check_spec(&self, spec: &ReachAvoidSpec, horizon: usize) -> Result<SpecVerdict> {
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        spec.validate_for(self)?;
        let mut memo: HashMap<(State, usize), bool> = HashMap::new();
        for x0 in &spec.initial {
            if self.violates(spec, x0, 1, horizon, &mut memo) {
                let witness = self.spec_witness(spec, x0, horizon, &mut memo);
                return Ok(SpecVerdict {
                    holds: false,
                    witness: Some(witness),
                });
            }
        }
        Ok(SpecVerdict {
            holds: true,
            witness: None,
        })
    }

    fn sorted_successors(&self, x: &State) -> Vec<(State, Input)> {
        let mut succ: Vec<(State, Input)> = self
            .rows(x)
            .flat_map(|(u, s)| s.iter().map(move |n| (n.clone(), u.clone())))
            .collect();
        succ.sort();
        succ
    }

    fn violates(
        &self,
        spec: &ReachAvoidSpec,
        x: &State,
        len: usize,
        horizon: usize,
        memo: &mut HashMap<(State, usize), bool>,
    ) -> bool {
        if spec.target.contains(x) {
            return false;
        }
        if spec.obstacle.contains(x) || len == horizon {
            return true;
        }
        if let Some(&v) = memo.get(&(x.clone(), len)) {
            return v;
        }
        let succ = self.sorted_successors(x);
        let bad = succ.is_empty()
            || succ
                .iter()
                .any(|(n, _)| self.violates(spec, n, len + 1, horizon, memo));
        memo.insert((x.clone(), len), bad);
        bad
    }

    fn spec_witness(
        &self,
        spec: &ReachAvoidSpec,
        x0: &State,
        horizon: usize,
        memo: &mut HashMap<(State, usize), bool>,
    ) -> Trajectory {
        let mut traj = Trajectory::start(x0.clone());
        loop {
            let x = traj.last().clone();
            if spec.obstacle.contains(&x) || traj.len() == horizon {
                return traj;
            }
            let next = self
                .sorted_successors(&x)
                .into_iter()
                .find(|(n, _)| self.violates(spec, n, traj.len() + 1, horizon, memo));
            match next {
                Some((n, u)) => traj.push(u, n),
                None => return traj,
            }
        }
    }
}

/// A static, set-valued state-feedback controller. It may be partial: states
/// outside its domain have no enabled input.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Controller {
    choices: BTreeMap<State, InputSet>,
}

impl Controller {
    pub fn new(choices: BTreeMap<State, InputSet>) -> Result<Self> {
        if let Some((x, _)) = choices.iter().find(|(_, c)| c.is_empty()) {
            return Err(Error::EmptyChoice(x.clone()));
        }
        Ok(Controller { choices })
    }

    /// Convenience constructor from string pairs, e.g. `[("a", &["α"][..])]`.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a [&'a str])>) -> Result<Self> {
        Controller::new(
            pairs
                .into_iter()
                .map(|(x, us)| (State::new(x), inputs(us.iter())))
                .collect(),
        )
    }

    pub fn get(&self, x: &State) -> Option<&InputSet> {
        self.choices.get(x)
    }

    pub(crate) fn choice(&self, x: &State) -> &InputSet {
        self.choices.get(x).unwrap_or(&NO_INPUTS)
    }

    pub fn domain(&self) -> impl Iterator<Item = &State> {
        self.choices.keys()
    }

    pub fn is_defined_at(&self, x: &State) -> bool {
        self.choices.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, &InputSet)> {
        self.choices.iter()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn into_map(self) -> BTreeMap<State, InputSet> {
        self.choices
    }

    /// `C(x) ⊆ U(x)` for every state of the domain.
    pub fn validate_for(&self, sys: &FiniteTransitionSystem) -> Result<()> {
        for (x, choice) in &self.choices {
            sys.require_state(x)?;
            for u in choice {
                if !sys.is_available(x, u) {
                    return Err(Error::UnavailableInput {
                        state: x.clone(),
                        input: u.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Pointwise inclusion on this controller's domain.
    pub fn is_refined_by(&self, other: &Controller) -> bool {
        other
            .choices
            .iter()
            .all(|(x, c)| self.choices.get(x).is_some_and(|mine| c.is_subset(mine)))
    }
}

/// A finite trajectory: `T` states and `T − 1` inputs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub inputs: Vec<Input>,
}

impl Trajectory {
    pub fn start(x: State) -> Self {
        Trajectory {
            states: vec![x],
            inputs: Vec::new(),
        }
    }

    pub fn new(states: Vec<State>, inputs: Vec<Input>) -> Result<Self> {
        if states.is_empty() || inputs.len() + 1 != states.len() {
            return Err(Error::Format(format!(
                "trajectory with {} states needs {} inputs, got {}",
                states.len(),
                states.len().saturating_sub(1),
                inputs.len()
            )));
        }
        Ok(Trajectory { states, inputs })
    }

    /// Parses `("1 2 3", "0 1")`-style whitespace separated sequences.
    pub fn parse(states: &str, inputs: &str) -> Result<Self> {
        Trajectory::new(
            states.split_whitespace().map(State::new).collect(),
            inputs.split_whitespace().map(Input::new).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectories are non-empty")
    }

    pub fn push(&mut self, u: Input, x: State) {
        self.inputs.push(u);
        self.states.push(x);
    }

    pub fn is_trajectory_of(&self, sys: &FiniteTransitionSystem) -> bool {
        if self.states.is_empty() || self.inputs.len() + 1 != self.states.len() {
            return false;
        }
        if !sys.contains_state(self.states[0].as_str()) {
            return false;
        }
        self.inputs
            .iter()
            .zip(self.states.windows(2))
            .all(|(u, w)| sys.post(&w[0], u).contains(&w[1]))
    }
}

/// `[initial, target, obstacle]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachAvoidSpec {
    pub initial: StateSet,
    pub target: StateSet,
    pub obstacle: StateSet,
}

impl ReachAvoidSpec {
    pub fn new(initial: StateSet, target: StateSet, obstacle: StateSet) -> Self {
        ReachAvoidSpec {
            initial,
            target,
            obstacle,
        }
    }

    pub fn validate_for(&self, sys: &FiniteTransitionSystem) -> Result<()> {
        for x in self.initial.iter().chain(&self.target).chain(&self.obstacle) {
            sys.require_state(x)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecVerdict {
    pub holds: bool,
    pub witness: Option<Trajectory>,
}

/// Default horizon for spec checks: one more than the number of states.
pub fn default_horizon(sys: &FiniteTransitionSystem) -> usize {
    sys.states().len() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn s(x: &str) -> State {
        State::new(x)
    }

    fn chain3() -> FiniteTransitionSystem {
        FiniteTransitionSystem::builder()
            .states(["x0", "x1", "x2"])
            .inputs(["u"])
            .transition("x0", "u", ["x1"])
            .transition("x1", "u", ["x2"])
            .build()
            .unwrap()
    }

    #[test]
    fn available_inputs_on_fixture() {
        let fig = fixtures::fig5();
        assert_eq!(fig.s1.available_inputs(&s("1")).unwrap(), inputs(["0", "1"]));
        assert_eq!(fig.s2.available_inputs(&s("a")).unwrap(), inputs(["α", "β"]));
        assert!(matches!(
            fig.s1.available_inputs(&s("zz")),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn empty_row_has_no_available_inputs() {
        let sys = FiniteTransitionSystem::builder()
            .states(["x"])
            .inputs(["u"])
            .build()
            .unwrap();
        assert!(sys.available_inputs(&s("x")).unwrap().is_empty());
        assert!(!sys.is_non_blocking());
        assert!(sys.is_deterministic());
    }

    #[test]
    fn blocking_and_determinism() {
        let fig = fixtures::fig5();
        assert!(fig.s1.is_non_blocking());
        assert!(fig.s2.is_deterministic());
        assert!(!fig.s2_prime.is_deterministic());
        let single = FiniteTransitionSystem::builder()
            .states(["x"])
            .inputs(["u"])
            .transition("x", "u", ["x"])
            .build()
            .unwrap();
        assert!(single.is_non_blocking());
    }

    #[test]
    fn builder_rejects_unknown_and_bad_ids() {
        let err = FiniteTransitionSystem::builder()
            .states(["x"])
            .inputs(["u"])
            .transition("x", "u", ["y"])
            .build();
        assert!(matches!(err, Err(Error::UnknownState(_))));
        let err = FiniteTransitionSystem::builder().states(["a|b"]).build();
        assert!(matches!(err, Err(Error::InvalidIdentifier(_))));
    }

    #[test]
    fn controlled_system_restricts_rows() {
        let fig = fixtures::fig5();
        let c = fig.s2.controlled(&fig.c2_alpha).unwrap();
        assert_eq!(c.rows(&s("a")).count(), 1);
        assert_eq!(c.post(&s("a"), &Input::new("α")), &states(["b"]));
        assert!(c.post(&s("a"), &Input::new("β")).is_empty());
        assert_eq!(c.rows(&s("b")).map(|(u, _)| u.as_str()).collect::<Vec<_>>(), ["α"]);

        let full = fig.s1.controlled(&fig.s1.full_controller()).unwrap();
        assert_eq!(full, fig.s1);

        let behavior = fig
            .s1
            .controlled(&fig.c1_prime)
            .unwrap()
            .bounded_behavior(&states(["1"]), 3)
            .unwrap();
        assert!(behavior.contains(&Trajectory::parse("1 2 5", "0 0").unwrap()));
    }

    #[test]
    fn controlled_system_rejects_unavailable_input() {
        let fig = fixtures::fig5();
        let bad = Controller::from_pairs([("3", &["1"][..])]).unwrap();
        assert!(matches!(
            fig.s1.controlled(&bad),
            Err(Error::UnavailableInput { .. })
        ));
        assert!(Controller::from_pairs([("3", &[][..])]).is_err());
    }

    #[test]
    fn bounded_behavior_examples() {
        let fig = fixtures::fig5();
        let b = fig.s1.bounded_behavior(&states(["1"]), 3).unwrap();
        assert!(b.contains(&Trajectory::parse("1 2 3", "0 1").unwrap()));
        assert!(b.contains(&Trajectory::parse("1 2 5", "0 0").unwrap()));
        assert!(b.iter().all(|t| t.is_trajectory_of(&fig.s1)));

        let one = fig.s1.bounded_behavior(&states(["1", "4"]), 1).unwrap();
        assert_eq!(
            one,
            [Trajectory::start(s("1")), Trajectory::start(s("4"))]
                .into_iter()
                .collect()
        );

        let chain = chain3().bounded_behavior(&states(["x0"]), 10).unwrap();
        assert_eq!(chain.len(), 3);
        assert!(matches!(
            chain3().bounded_behavior(&states(["x0"]), 0),
            Err(Error::ZeroHorizon)
        ));
    }

    #[test]
    fn check_spec_examples() {
        let fig = fixtures::fig5();
        let c1_union = Controller::from_pairs([("1", &["0"][..]), ("2", &["0", "1"][..])]).unwrap();
        let v = fig
            .s1
            .controlled(&c1_union)
            .unwrap()
            .check_spec(&fig.sigma1, 6)
            .unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Trajectory::parse("1 2 3", "0 1").unwrap()));

        let tilde = Controller::from_pairs([("1", &["1"][..]), ("4", &["0"][..])]).unwrap();
        let v = fig
            .s1
            .controlled(&tilde)
            .unwrap()
            .check_spec(&fig.sigma1, 6)
            .unwrap();
        assert!(v.holds);

        let vacuous = ReachAvoidSpec::new(StateSet::new(), states(["5"]), states(["3"]));
        assert!(fig.s1.check_spec(&vacuous, 6).unwrap().holds);
    }

    #[test]
    fn check_spec_horizon_exhaustion_is_a_violation() {
        let spec = ReachAvoidSpec::new(states(["x0"]), states(["x2"]), StateSet::new());
        assert!(chain3().check_spec(&spec, 3).unwrap().holds);
        let v = chain3().check_spec(&spec, 2).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().states, vec![s("x0"), s("x1")]);
    }
}
