use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::concretize::{closed_loop_run, memoryless_controller, ClosedLoop, Concretization, LoopPolicy, OnUndefined, Selection};
use crate::error::{Error, Result};
use crate::relations::{Interface, Relation};
use crate::synthesis::enumerate_controllers;
use crate::system::{Controller, FiniteTransitionSystem, Input, State, StateSet, Trajectory};

/// Where the bounded checks start and how far they look.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleQuery {
    /// Concrete start states; all of `X1` when absent.
    pub initial: Option<StateSet>,
    /// Maximum number of states per sequence; `|X1|·|X2| + 1` when absent.
    pub horizon: Option<usize>,
}

impl OracleQuery {
    pub fn with_horizon(horizon: usize) -> Self {
        OracleQuery {
            initial: None,
            horizon: Some(horizon),
        }
    }

    fn resolve(&self, s1: &FiniteTransitionSystem, s2: &FiniteTransitionSystem) -> Result<(StateSet, usize)> {
        let horizon = self.horizon.unwrap_or_else(|| default_oracle_horizon(s1, s2));
        if horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        let initial = match &self.initial {
            Some(set) => {
                for x in set {
                    s1.require_state(x)?;
                }
                set.clone()
            }
            None => s1.states().clone(),
        };
        Ok((initial, horizon))
    }
}

pub fn default_oracle_horizon(s1: &FiniteTransitionSystem, s2: &FiniteTransitionSystem) -> usize {
    s1.states().len() * s2.states().len() + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyOneVerdict {
    pub holds: bool,
    /// A concrete closed-loop sequence with no related abstract one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Trajectory>,
}

fn post_under_controller(sys: &FiniteTransitionSystem, ctrl: &Controller, x: &State) -> StateSet {
    sys.post_under(x, ctrl.choice(x))
}

/// Every state sequence of `C1 × S1` of at most `horizon` states has an
/// `R`-related state sequence of `C2 × S2`.
///
/// The search runs over pairs `(x1, B)` where `B` holds the abstract states
/// that end some matching abstract sequence; a sequence is unmatched as soon
/// as `B` becomes empty.
pub fn check_property_one(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    c1: &Controller,
    c2: &Controller,
    query: &OracleQuery,
) -> Result<PropertyOneVerdict> {
    r.require_between(s1, s2)?;
    c1.validate_for(s1)?;
    c2.validate_for(s2)?;
    let (initial, horizon) = query.resolve(s1, s2)?;

    type Node = (State, StateSet);
    let mut parent: BTreeMap<Node, Option<(Node, Input)>> = BTreeMap::new();
    let mut queue: VecDeque<(Node, usize)> = VecDeque::new();
    let trace = |parent: &BTreeMap<Node, Option<(Node, Input)>>, mut node: Node| {
        let mut states = vec![node.0.clone()];
        let mut inputs = Vec::new();
        while let Some(Some((prev, u))) = parent.get(&node) {
            states.push(prev.0.clone());
            inputs.push(u.clone());
            node = prev.clone();
        }
        states.reverse();
        inputs.reverse();
        Trajectory { states, inputs }
    };

    for x1 in &initial {
        let belief = r.image(x1).clone();
        if belief.is_empty() {
            return Ok(PropertyOneVerdict {
                holds: false,
                witness: Some(Trajectory::start(x1.clone())),
            });
        }
        let node = (x1.clone(), belief);
        if parent.insert(node.clone(), None).is_none() {
            queue.push_back((node, 1));
        }
    }

    while let Some((node, len)) = queue.pop_front() {
        if len >= horizon {
            continue;
        }
        let (x1, belief) = &node;
        let abstract_post: StateSet = belief
            .iter()
            .flat_map(|x2| post_under_controller(s2, c2, x2))
            .collect();
        for u1 in c1.choice(x1) {
            for x1n in s1.post(x1, u1) {
                let next_belief: StateSet = abstract_post.intersection(r.image(x1n)).cloned().collect();
                if next_belief.is_empty() {
                    let mut w = trace(&parent, node.clone());
                    w.push(u1.clone(), x1n.clone());
                    return Ok(PropertyOneVerdict {
                        holds: false,
                        witness: Some(w),
                    });
                }
                let next = (x1n.clone(), next_belief);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((node.clone(), u1.clone())));
                    queue.push_back((next, len + 1));
                }
            }
        }
    }
    Ok(PropertyOneVerdict {
        holds: true,
        witness: None,
    })
}

/// A concrete closed-loop sequence with a quantization that is not an
/// abstract closed-loop sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTwoWitness {
    pub concrete: Trajectory,
    pub quantization: Vec<State>,
    /// Abstract inputs used by the loop; one per concrete input.
    pub abstract_inputs: Vec<Input>,
    /// `quantization[k] → quantization[k + 1]` is not a transition of
    /// `C2 × S2`.
    pub violation_step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTwoVerdict {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PropertyTwoWitness>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Semantics {
    /// The concrete input at each step comes from the quantization chosen
    /// at that step.
    Coupled,
    /// Any input of the static union controller, with every quantization.
    Pointwise,
}

type Pair = (State, State);
/// `(u2, u1)` that led to a pair; `u2` is absent in pointwise mode.
type Edge = (Option<Input>, Input);

struct TwoSearch<'a> {
    s1: &'a FiniteTransitionSystem,
    s2: &'a FiniteTransitionSystem,
    r: &'a Relation,
    iface: &'a Interface,
    c2: &'a Controller,
    c1: Option<Controller>,
    semantics: Semantics,
}

impl TwoSearch<'_> {
    /// Successor edges of a pair, in lexicographic order.
    fn edges(&self, x1: &State, x2: &State) -> Result<Vec<(Edge, State, State)>> {
        let mut out = Vec::new();
        let mut push = |u2: Option<Input>, u1: &Input| {
            for x1n in self.s1.post(x1, u1) {
                for x2n in self.r.image(x1n) {
                    out.push(((u2.clone(), u1.clone()), x1n.clone(), x2n.clone()));
                }
            }
        };
        match self.semantics {
            Semantics::Coupled => {
                for u2 in self.c2.choice(x2) {
                    let entry = self.iface.get(x1, x2, u2).ok_or_else(|| Error::InterfaceIncomplete {
                        x1: x1.clone(),
                        x2: x2.clone(),
                        u2: u2.clone(),
                    })?;
                    for u1 in entry {
                        push(Some(u2.clone()), u1);
                    }
                }
            }
            Semantics::Pointwise => {
                let c1 = self.c1.as_ref().expect("pointwise search has C1");
                for u1 in c1.choice(x1) {
                    push(None, u1);
                }
            }
        }
        Ok(out)
    }

    fn abstract_ok(&self, x2: &State, x2n: &State) -> bool {
        post_under_controller(self.s2, self.c2, x2).contains(x2n)
    }

    fn run(&self, initial: &StateSet, horizon: usize) -> Result<PropertyTwoVerdict> {
        let mut parent: BTreeMap<Pair, Option<(Pair, Edge)>> = BTreeMap::new();
        let mut queue: VecDeque<(Pair, usize)> = VecDeque::new();
        for x1 in initial {
            for x2 in self.r.image(x1) {
                let p = (x1.clone(), x2.clone());
                parent.insert(p.clone(), None);
                queue.push_back((p, 1));
            }
        }
        while let Some((pair, len)) = queue.pop_front() {
            if len >= horizon {
                continue;
            }
            for (edge, x1n, x2n) in self.edges(&pair.0, &pair.1)? {
                if !self.abstract_ok(&pair.1, &x2n) {
                    let mut path = self.path_to(&parent, &pair);
                    let step = path.len() - 1;
                    path.push((Some(edge), (x1n, x2n)));
                    self.extend(&mut path, horizon)?;
                    return Ok(PropertyTwoVerdict {
                        holds: false,
                        witness: Some(self.witness(path, step)),
                    });
                }
                let next = (x1n, x2n);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((pair.clone(), edge)));
                    queue.push_back((next, len + 1));
                }
            }
        }
        Ok(PropertyTwoVerdict {
            holds: true,
            witness: None,
        })
    }

    fn path_to(&self, parent: &BTreeMap<Pair, Option<(Pair, Edge)>>, end: &Pair) -> Vec<(Option<Edge>, Pair)> {
        let mut rev = Vec::new();
        let mut cur = end.clone();
        loop {
            match parent.get(&cur).cloned().flatten() {
                Some((prev, edge)) => {
                    rev.push((Some(edge), cur));
                    cur = prev;
                }
                None => {
                    rev.push((None, cur));
                    break;
                }
            }
        }
        rev.reverse();
        rev
    }

    /// Continues a witness by smallest choices until the loop stops or the
    /// horizon is reached, so it replays as a complete run.
    fn extend(&self, path: &mut Vec<(Option<Edge>, Pair)>, horizon: usize) -> Result<()> {
        while path.len() < horizon {
            let (x1, x2) = &path.last().unwrap().1;
            let Some((edge, x1n, x2n)) = self.edges(x1, x2)?.into_iter().next() else {
                break;
            };
            path.push((Some(edge), (x1n, x2n)));
        }
        Ok(())
    }

    fn witness(&self, path: Vec<(Option<Edge>, Pair)>, violation_step: usize) -> PropertyTwoWitness {
        let mut concrete = Trajectory::start(path[0].1 .0.clone());
        let mut quantization = vec![path[0].1 .1.clone()];
        let mut abstract_inputs = Vec::new();
        for (edge, (x1, x2)) in path.into_iter().skip(1) {
            let (u2, u1) = edge.expect("non-root edge");
            concrete.push(u1, x1);
            quantization.push(x2);
            abstract_inputs.extend(u2);
        }
        PropertyTwoWitness {
            concrete,
            quantization,
            abstract_inputs,
            violation_step,
        }
    }
}

fn prepare(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    c2: &Controller,
    query: &OracleQuery,
) -> Result<(StateSet, usize, Controller)> {
    r.require_between(s1, s2)?;
    r.require_strict()?;
    c2.validate_for(s2)?;
    iface.validate(s1, s2, r)?;
    let c1 = memoryless_controller(c2, r, iface)?;
    let (initial, horizon) = query.resolve(s1, s2)?;
    Ok((initial, horizon, c1))
}

/// Every quantization of every run of the memoryless loop lies in the
/// behavior of `C2 × S2`.
///
/// The loop quantizes with any `x2 ∈ R(x1)`, applies some `u2 ∈ C2(x2)` and
/// some `u1 ∈ I(x1, x2, u2)`; the concrete input at each step is thus tied
/// to the abstract state the quantizer reported at that step. The search
/// runs over pairs `(x1, x2)` and reports the first violation at minimal
/// depth, extended by smallest choices.
pub fn check_property_two(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    c2: &Controller,
    query: &OracleQuery,
) -> Result<PropertyTwoVerdict> {
    let (initial, horizon, _) = prepare(s1, s2, r, iface, c2, query)?;
    TwoSearch {
        s1,
        s2,
        r,
        iface,
        c2,
        c1: None,
        semantics: Semantics::Coupled,
    }
    .run(&initial, horizon)
}

/// The decoupled reading: runs of the static controller `C1 = C2 ∘_I R`
/// with every pointwise quantization. This is strictly stronger than
/// [`check_property_two`]: a concrete input contributed by one abstract
/// state may be paired with a different quantization of the same state.
pub fn check_property_two_pointwise(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    c2: &Controller,
    query: &OracleQuery,
) -> Result<PropertyTwoVerdict> {
    let (initial, horizon, c1) = prepare(s1, s2, r, iface, c2, query)?;
    TwoSearch {
        s1,
        s2,
        r,
        iface,
        c2,
        c1: Some(c1),
        semantics: Semantics::Pointwise,
    }
    .run(&initial, horizon)
}

/// Replays a witness of [`check_property_two`] through the memoryless
/// executor and confirms the reported abstract step is not a transition of
/// `C2 × S2`.
pub fn replay_property_two_witness(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    c2: &Controller,
    w: &PropertyTwoWitness,
) -> Result<bool> {
    let policy = LoopPolicy {
        quantizer: Selection::Scripted(w.quantization.clone()),
        abstract_input: Selection::Scripted(w.abstract_inputs.clone()),
        concrete_input: Selection::Scripted(w.concrete.inputs.clone()),
        successor: Selection::Scripted(w.concrete.states[1..].to_vec()),
        on_undefined: OnUndefined::Halt,
    };
    let run = closed_loop_run(
        s1,
        ClosedLoop::Memoryless(Concretization::new(c2, r, iface)),
        &w.concrete.states[0],
        w.concrete.len(),
        &policy,
    )?;
    let q = run.abstract_states();
    if run.trajectory() != w.concrete || q != w.quantization {
        return Ok(false);
    }
    let k = w.violation_step;
    Ok(k + 1 < q.len() && !post_under_controller(s2, c2, &q[k]).contains(&q[k + 1]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllControllersVerdict {
    pub holds: bool,
    pub controllers_checked: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_controller: Option<Controller>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PropertyTwoWitness>,
}

/// [`check_property_two`] for every total abstract controller, in
/// enumeration order, stopping at the first violation.
pub fn check_property_two_all_controllers(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    query: &OracleQuery,
    budget: u128,
) -> Result<AllControllersVerdict> {
    r.require_between(s1, s2)?;
    r.require_strict()?;
    iface.validate(s1, s2, r)?;
    let (initial, horizon) = query.resolve(s1, s2)?;
    let domain: StateSet = s2
        .states()
        .iter()
        .filter(|x| s2.rows(x).next().is_some())
        .cloned()
        .collect();
    let mut checked = 0u128;
    for c2 in enumerate_controllers(s2, &domain, budget)? {
        checked += 1;
        let verdict = TwoSearch {
            s1,
            s2,
            r,
            iface,
            c2: &c2,
            c1: None,
            semantics: Semantics::Coupled,
        }
        .run(&initial, horizon)?;
        if !verdict.holds {
            return Ok(AllControllersVerdict {
                holds: false,
                controllers_checked: checked,
                witness_controller: Some(c2),
                witness: verdict.witness,
            });
        }
    }
    Ok(AllControllersVerdict {
        holds: true,
        controllers_checked: checked,
        witness_controller: None,
        witness: None,
    })
}

/// All `(concrete, quantization)` pairs seen in the enumerated memoryless
/// loop tree whose quantization breaks `C2 × S2`; used to cross-validate
/// the search against the executor.
pub fn violating_runs_by_execution(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    iface: &Interface,
    c2: &Controller,
    query: &OracleQuery,
) -> Result<BTreeSet<(Vec<State>, Vec<State>)>> {
    let (initial, horizon) = query.resolve(s1, s2)?;
    let mut bad = BTreeSet::new();
    for x1 in &initial {
        let runs = crate::concretize::closed_loop_tree(
            s1,
            ClosedLoop::Memoryless(Concretization::new(c2, r, iface)),
            x1,
            horizon,
            &LoopPolicy::enumerate_all(),
        )?;
        for run in runs {
            let q = run.abstract_states();
            if q.windows(2).any(|w| !post_under_controller(s2, c2, &w[0]).contains(&w[1])) {
                bad.insert((run.trajectory().states, q));
            }
        }
    }
    Ok(bad)
}
