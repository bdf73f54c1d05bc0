//! Concretizing an abstract controller, and running the resulting loops.
//!
//! Two architectures are supported:
//!
//! * memoryless: at every step the quantizer picks some `x2 ∈ R(x1)`, the
//!   abstract controller picks `u2 ∈ C2(x2)` and the interface picks
//!   `u1 ∈ I(x1, x2, u2)`. Taking the union over all choices gives the
//!   static map `C1(x1) = ⋃_{x2 ∈ R(x1)} I(x1, x2, C2(x2))`.
//! * dynamic: the abstract state is remembered between steps, and the next
//!   abstract state is chosen in `F2(x2, u2) ∩ R(x1')`, which ASR guarantees
//!   to be non-empty.
//!
//! Every free choice is a [`Selection`], so runs replay exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::relations::{Interface, Relation};
use crate::system::{Controller, FiniteTransitionSystem, Input, InputSet, State, StateSet, Trajectory};

/// `C1(x1) = ⋃_{x2 ∈ R(x1)} I(x1, x2, C2(x2))`, defined where `R(x1)` meets
/// the domain of `C2`.
pub fn memoryless_controller(c2: &Controller, r: &Relation, iface: &Interface) -> Result<Controller> {
    r.require_strict()?;
    let mut choices: BTreeMap<State, InputSet> = BTreeMap::new();
    for x1 in r.domain() {
        let defined: Vec<&State> = r.image(x1).iter().filter(|x2| c2.is_defined_at(x2)).collect();
        if defined.is_empty() {
            continue;
        }
        let mut union = InputSet::new();
        for x2 in defined {
            for u2 in c2.choice(x2) {
                let entry = iface.get(x1, x2, u2).ok_or_else(|| Error::InterfaceIncomplete {
                    x1: x1.clone(),
                    x2: x2.clone(),
                    u2: u2.clone(),
                })?;
                union.extend(entry.iter().cloned());
            }
        }
        if union.is_empty() {
            return Err(Error::EmptyConcretization(x1.clone()));
        }
        choices.insert(x1.clone(), union);
    }
    Controller::new(choices)
}

/// The data the loops share: abstract controller, quantizer and interface.
#[derive(Clone, Copy, Debug)]
pub struct Concretization<'a> {
    pub controller: &'a Controller,
    pub relation: &'a Relation,
    pub interface: &'a Interface,
}

impl<'a> Concretization<'a> {
    pub fn new(controller: &'a Controller, relation: &'a Relation, interface: &'a Interface) -> Self {
        Concretization {
            controller,
            relation,
            interface,
        }
    }

    fn interface_entry(&self, x1: &State, x2: &State, u2: &Input) -> Result<&'a InputSet> {
        self.interface
            .get(x1, x2, u2)
            .ok_or_else(|| Error::InterfaceIncomplete {
                x1: x1.clone(),
                x2: x2.clone(),
                u2: u2.clone(),
            })
    }
}

/// How a free choice is resolved.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "script")]
pub enum Selection<T> {
    /// The smallest candidate.
    #[default]
    LexMin,
    /// Every candidate (only meaningful for [`closed_loop_tree`]).
    EnumerateAll,
    /// The given values in order, then the smallest candidate. A scripted
    /// value that is not a candidate is an error.
    Scripted(Vec<T>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnUndefined {
    /// Raise [`Error::ControllerUndefined`].
    #[default]
    Fail,
    /// End the run.
    Halt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopPolicy {
    /// Choice of `x2 ∈ R(x1)` (memoryless) or `x2 ∈ F2 ∩ R(x1)` (dynamic).
    pub quantizer: Selection<State>,
    pub abstract_input: Selection<Input>,
    pub concrete_input: Selection<Input>,
    /// Choice among non-deterministic concrete successors.
    pub successor: Selection<State>,
    pub on_undefined: OnUndefined,
}

impl LoopPolicy {
    pub fn enumerate_all() -> Self {
        LoopPolicy {
            quantizer: Selection::EnumerateAll,
            abstract_input: Selection::EnumerateAll,
            concrete_input: Selection::EnumerateAll,
            successor: Selection::EnumerateAll,
            on_undefined: OnUndefined::Halt,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ClosedLoop<'a> {
    /// A concrete static controller applied directly.
    Static(&'a Controller),
    Memoryless(Concretization<'a>),
    Dynamic {
        concretization: Concretization<'a>,
        abstraction: &'a FiniteTransitionSystem,
    },
}

impl ClosedLoop<'_> {
    fn architecture(&self) -> &'static str {
        match self {
            ClosedLoop::Static(_) => "static",
            ClosedLoop::Memoryless(_) => "memoryless",
            ClosedLoop::Dynamic { .. } => "dynamic",
        }
    }
}

/// The two delay blocks of the dynamic concretizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicState {
    pub x2: State,
    pub u2: Input,
}

fn pick<T: Ord + Clone + std::fmt::Display>(candidates: &BTreeSet<T>, sel: &Selection<T>, cursor: usize) -> Result<T> {
    if let Selection::Scripted(script) = sel {
        if let Some(v) = script.get(cursor) {
            return if candidates.contains(v) {
                Ok(v.clone())
            } else {
                Err(Error::ScriptMismatch(v.to_string()))
            };
        }
    }
    Ok(candidates.first().expect("candidates are non-empty").clone())
}

/// Choices for the first step of the dynamic concretizer:
/// `x2(0) ∈ R(x1_0) ∩ dom(C2)`, then `u2 ∈ C2(x2)`, then `u1 ∈ I(x1, x2, u2)`.
pub fn dynamic_init(conc: &Concretization<'_>, x1_0: &State, policy: &LoopPolicy) -> Result<(DynamicState, Input)> {
    let candidates = init_candidates(conc, x1_0)?;
    let x2 = pick(&candidates, &policy.quantizer, 0)?;
    let u2 = pick(conc.controller.choice(&x2), &policy.abstract_input, 0)?;
    let u1 = pick(conc.interface_entry(x1_0, &x2, &u2)?, &policy.concrete_input, 0)?;
    Ok((DynamicState { x2, u2 }, u1))
}

/// One step: `x2' ∈ F2(x2, u2) ∩ R(x1')`, preferring states where `C2` is
/// defined, then fresh abstract and concrete inputs.
pub fn dynamic_step(
    conc: &Concretization<'_>,
    abstraction: &FiniteTransitionSystem,
    state: &DynamicState,
    x1_next: &State,
    policy: &LoopPolicy,
) -> Result<(DynamicState, Input)> {
    let candidates = step_candidates(conc, abstraction, state, x1_next)?;
    let x2 = pick(&candidates, &policy.quantizer, 0)?;
    let u2 = pick(
        conc.controller
            .get(&x2)
            .ok_or_else(|| Error::ControllerUndefined(x2.clone()))?,
        &policy.abstract_input,
        0,
    )?;
    let u1 = pick(conc.interface_entry(x1_next, &x2, &u2)?, &policy.concrete_input, 0)?;
    Ok((DynamicState { x2, u2 }, u1))
}

fn init_candidates(conc: &Concretization<'_>, x1: &State) -> Result<StateSet> {
    let c: StateSet = conc
        .relation
        .image(x1)
        .iter()
        .filter(|x2| conc.controller.is_defined_at(x2))
        .cloned()
        .collect();
    if c.is_empty() {
        return Err(Error::InitializationFailed(x1.clone()));
    }
    Ok(c)
}

fn step_candidates(
    conc: &Concretization<'_>,
    abstraction: &FiniteTransitionSystem,
    state: &DynamicState,
    x1_next: &State,
) -> Result<StateSet> {
    let meet: StateSet = abstraction
        .post(&state.x2, &state.u2)
        .intersection(conc.relation.image(x1_next))
        .cloned()
        .collect();
    if meet.is_empty() {
        return Err(Error::BrokenCertificate {
            x2: state.x2.clone(),
            u2: state.u2.clone(),
            x1_next: x1_next.clone(),
        });
    }
    let defined: StateSet = meet
        .iter()
        .filter(|x2| conc.controller.is_defined_at(x2))
        .cloned()
        .collect();
    Ok(if defined.is_empty() { meet } else { defined })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStep {
    pub x1: State,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<State>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<Input>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<Input>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "reason", content = "state")]
pub enum RunEnd {
    Horizon,
    /// The controller was undefined at this state and the policy halts.
    Halted(State),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub architecture: String,
    pub steps: Vec<RunStep>,
    pub end: RunEnd,
}

impl Run {
    pub fn trajectory(&self) -> Trajectory {
        Trajectory {
            states: self.steps.iter().map(|s| s.x1.clone()).collect(),
            inputs: self.steps.iter().filter_map(|s| s.u1.clone()).collect(),
        }
    }

    /// Abstract states along the run, where the architecture has them.
    pub fn abstract_states(&self) -> Vec<State> {
        self.steps.iter().filter_map(|s| s.x2.clone()).collect()
    }

    pub fn abstract_inputs(&self) -> Vec<Input> {
        self.steps.iter().filter_map(|s| s.u2.clone()).collect()
    }

    /// Steps as `[x1, x2, u2, u1]` (dynamic) or `[x1, u1]` (otherwise), with
    /// `null` where the run ended before a choice was made.
    pub fn to_trace(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                if self.architecture == "dynamic" {
                    json!([s.x1.as_str(), text(&s.x2), text(&s.u2), text(&s.u1)])
                } else {
                    json!([s.x1.as_str(), text(&s.u1)])
                }
            })
            .collect();
        Value::Array(steps)
    }
}

fn text<T: std::fmt::Display>(v: &Option<T>) -> Value {
    match v {
        Some(v) => Value::String(v.to_string()),
        None => Value::Null,
    }
}

#[derive(Clone, Default)]
struct Cursors {
    quantizer: usize,
    abstract_input: usize,
    concrete_input: usize,
    successor: usize,
}

#[derive(Clone)]
struct Partial {
    steps: Vec<RunStep>,
    memory: Option<DynamicState>,
    cursors: Cursors,
}

fn options<T: Ord + Clone + std::fmt::Display>(
    candidates: &BTreeSet<T>,
    sel: &Selection<T>,
    cursor: &mut usize,
    all: bool,
) -> Result<Vec<T>> {
    if all && matches!(sel, Selection::EnumerateAll) {
        return Ok(candidates.iter().cloned().collect());
    }
    let v = pick(candidates, sel, *cursor)?;
    *cursor += 1;
    Ok(vec![v])
}

struct Executor<'a, 'b> {
    s1: &'a FiniteTransitionSystem,
    mode: ClosedLoop<'a>,
    horizon: usize,
    policy: &'b LoopPolicy,
    all: bool,
}

impl Executor<'_, '_> {
    fn undefined(&self, p: Partial, at: &State, out: &mut Vec<Run>) -> Result<()> {
        match self.policy.on_undefined {
            OnUndefined::Fail => Err(Error::ControllerUndefined(at.clone())),
            OnUndefined::Halt => {
                self.finish(p, RunEnd::Halted(at.clone()), out);
                Ok(())
            }
        }
    }

    fn finish(&self, p: Partial, end: RunEnd, out: &mut Vec<Run>) {
        out.push(Run {
            architecture: self.mode.architecture().to_owned(),
            steps: p.steps,
            end,
        });
    }

    /// Enters `x1`: quantize, then continue with inputs.
    fn arrive(&self, mut p: Partial, x1: State, out: &mut Vec<Run>) -> Result<()> {
        let candidates = match &self.mode {
            ClosedLoop::Static(_) => None,
            ClosedLoop::Memoryless(conc) => {
                let image = conc.relation.image(&x1);
                if image.is_empty() {
                    return Err(Error::NonStrictRelation(x1));
                }
                Some(image.clone())
            }
            ClosedLoop::Dynamic {
                concretization,
                abstraction,
            } => Some(match &p.memory {
                None => init_candidates(concretization, &x1)?,
                Some(mem) => step_candidates(concretization, abstraction, mem, &x1)?,
            }),
        };
        let step = RunStep {
            x1,
            x2: None,
            u2: None,
            u1: None,
        };
        match candidates {
            None => {
                p.steps.push(step);
                self.choose_inputs(p, out)
            }
            Some(candidates) => {
                let mut cursor = p.cursors.quantizer;
                for x2 in options(&candidates, &self.policy.quantizer, &mut cursor, self.all)? {
                    let mut q = p.clone();
                    q.cursors.quantizer = cursor;
                    let mut step = step.clone();
                    step.x2 = Some(x2);
                    q.steps.push(step);
                    self.choose_inputs(q, out)?;
                }
                Ok(())
            }
        }
    }

    fn choose_inputs(&self, p: Partial, out: &mut Vec<Run>) -> Result<()> {
        if p.steps.len() >= self.horizon {
            self.finish(p, RunEnd::Horizon, out);
            return Ok(());
        }
        let last = p.steps.last().expect("arrive pushed a step").clone();
        match &self.mode {
            ClosedLoop::Static(ctrl) => {
                let Some(choice) = ctrl.get(&last.x1) else {
                    return self.undefined(p, &last.x1, out);
                };
                let mut cursor = p.cursors.concrete_input;
                for u1 in options(choice, &self.policy.concrete_input, &mut cursor, self.all)? {
                    let mut q = p.clone();
                    q.cursors.concrete_input = cursor;
                    q.steps.last_mut().unwrap().u1 = Some(u1);
                    self.advance(q, out)?;
                }
                Ok(())
            }
            ClosedLoop::Memoryless(conc) | ClosedLoop::Dynamic { concretization: conc, .. } => {
                let x2 = last.x2.clone().expect("quantized");
                let Some(choice) = conc.controller.get(&x2) else {
                    return self.undefined(p, &x2, out);
                };
                let mut cu = p.cursors.abstract_input;
                for u2 in options(choice, &self.policy.abstract_input, &mut cu, self.all)? {
                    let entry = conc.interface_entry(&last.x1, &x2, &u2)?;
                    let mut ci = p.cursors.concrete_input;
                    for u1 in options(entry, &self.policy.concrete_input, &mut ci, self.all)? {
                        let mut q = p.clone();
                        q.cursors.abstract_input = cu;
                        q.cursors.concrete_input = ci;
                        let s = q.steps.last_mut().unwrap();
                        s.u2 = Some(u2.clone());
                        s.u1 = Some(u1);
                        if matches!(self.mode, ClosedLoop::Dynamic { .. }) {
                            q.memory = Some(DynamicState {
                                x2: x2.clone(),
                                u2: u2.clone(),
                            });
                        }
                        self.advance(q, out)?;
                    }
                }
                Ok(())
            }
        }
    }

    fn advance(&self, p: Partial, out: &mut Vec<Run>) -> Result<()> {
        let last = p.steps.last().unwrap();
        let u1 = last.u1.clone().expect("input chosen");
        let succ = self.s1.post(&last.x1, &u1);
        if succ.is_empty() {
            return Err(Error::UnavailableInput {
                state: last.x1.clone(),
                input: u1,
            });
        }
        let mut cursor = p.cursors.successor;
        for x1 in options(succ, &self.policy.successor, &mut cursor, self.all)? {
            let mut q = p.clone();
            q.cursors.successor = cursor;
            self.arrive(q, x1, out)?;
        }
        Ok(())
    }
}

fn execute(
    s1: &FiniteTransitionSystem,
    mode: ClosedLoop<'_>,
    x1_0: &State,
    horizon: usize,
    policy: &LoopPolicy,
    all: bool,
) -> Result<Vec<Run>> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    s1.require_state(x1_0)?;
    let exec = Executor {
        s1,
        mode,
        horizon,
        policy,
        all,
    };
    let mut out = Vec::new();
    exec.arrive(
        Partial {
            steps: Vec::new(),
            memory: None,
            cursors: Cursors::default(),
        },
        x1_0.clone(),
        &mut out,
    )?;
    Ok(out)
}

/// A single run of at most `horizon` states. `EnumerateAll` selections act
/// like `LexMin` here.
pub fn closed_loop_run(
    s1: &FiniteTransitionSystem,
    mode: ClosedLoop<'_>,
    x1_0: &State,
    horizon: usize,
    policy: &LoopPolicy,
) -> Result<Run> {
    let mut runs = execute(s1, mode, x1_0, horizon, policy, false)?;
    debug_assert_eq!(runs.len(), 1);
    Ok(runs.pop().expect("one run"))
}

/// Every maximal run, branching on each `EnumerateAll` selection.
pub fn closed_loop_tree(
    s1: &FiniteTransitionSystem,
    mode: ClosedLoop<'_>,
    x1_0: &State,
    horizon: usize,
    policy: &LoopPolicy,
) -> Result<Vec<Run>> {
    execute(s1, mode, x1_0, horizon, policy, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::relations::{maximal_interface, RelationKind};
    use crate::system::inputs;

    fn s(x: &str) -> State {
        State::new(x)
    }

    #[test]
    fn fig5_memoryless_values() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let c1 = memoryless_controller(&fig.c2_alpha, &fig.r, &i).unwrap();
        assert_eq!(c1.get(&s("1")), Some(&inputs(["0"])));
        assert_eq!(c1.get(&s("2")), Some(&inputs(["0", "1"])));
        assert!(!c1.is_defined_at(&s("5")));
        c1.validate_for(&fig.s1).unwrap();
    }

    #[test]
    fn frr_concretization_is_composition() {
        let fig = fixtures::fig5();
        let id = Relation::identity(fig.s2.states());
        let i = maximal_interface(&fig.s2, &fig.s2, &id, RelationKind::Frr).unwrap();
        let c1 = memoryless_controller(&fig.c2_beta, &id, &i).unwrap();
        assert_eq!(c1, fig.c2_beta);
    }

    #[test]
    fn memoryless_requires_strictness() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let partial = Relation::from_pairs(&fig.s1, &fig.s2, [("1", "a")]).unwrap();
        assert!(matches!(
            memoryless_controller(&fig.c2_alpha, &partial, &i),
            Err(Error::NonStrictRelation(_))
        ));
    }

    #[test]
    fn scripted_successor_drives_into_the_obstacle() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let c1 = memoryless_controller(&fig.c2_alpha, &fig.r, &i).unwrap();
        let policy = LoopPolicy {
            concrete_input: Selection::Scripted(vec![Input::new("0"), Input::new("1")]),
            ..LoopPolicy::default()
        };
        let run = closed_loop_run(&fig.s1, ClosedLoop::Static(&c1), &s("1"), 3, &policy).unwrap();
        assert_eq!(run.trajectory(), Trajectory::parse("1 2 3", "0 1").unwrap());

        let run = closed_loop_run(&fig.s1, ClosedLoop::Static(&fig.c1_prime), &s("1"), 3, &LoopPolicy::default())
            .unwrap();
        assert_eq!(run.trajectory(), Trajectory::parse("1 2 5", "0 0").unwrap());

        let run = closed_loop_run(&fig.s1, ClosedLoop::Static(&c1), &s("1"), 1, &LoopPolicy::default()).unwrap();
        assert_eq!(run.trajectory(), Trajectory::parse("1", "").unwrap());
        assert_eq!(run.end, RunEnd::Horizon);
    }

    #[test]
    fn undefined_controller_is_reported() {
        let fig = fixtures::fig5();
        let err = closed_loop_run(&fig.s1, ClosedLoop::Static(&fig.c1_prime), &s("1"), 4, &LoopPolicy::default())
            .unwrap_err();
        assert!(matches!(err, Error::ControllerUndefined(x) if x.as_str() == "5"));
        let policy = LoopPolicy {
            on_undefined: OnUndefined::Halt,
            ..LoopPolicy::default()
        };
        let run = closed_loop_run(&fig.s1, ClosedLoop::Static(&fig.c1_prime), &s("1"), 4, &policy).unwrap();
        assert_eq!(run.end, RunEnd::Halted(s("5")));
        assert!(matches!(
            closed_loop_run(&fig.s1, ClosedLoop::Static(&fig.c1_prime), &s("1"), 0, &policy),
            Err(Error::ZeroHorizon)
        ));
    }

    #[test]
    fn dynamic_concretizer_tracks_the_abstraction() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let conc = Concretization::new(&fig.c2_alpha, &fig.r, &i);
        let policy = LoopPolicy::default();
        let (st, u1) = dynamic_init(&conc, &s("1"), &policy).unwrap();
        assert_eq!((st.x2.as_str(), st.u2.as_str(), u1.as_str()), ("a", "α", "0"));
        let (st, u1) = dynamic_step(&conc, &fig.s2, &st, &s("2"), &policy).unwrap();
        assert_eq!((st.x2.as_str(), u1.as_str()), ("b", "0"));

        let run = closed_loop_run(
            &fig.s1,
            ClosedLoop::Dynamic {
                concretization: conc,
                abstraction: &fig.s2,
            },
            &s("1"),
            3,
            &policy,
        )
        .unwrap();
        assert_eq!(run.trajectory(), Trajectory::parse("1 2 5", "0 0").unwrap());
        assert_eq!(run.abstract_states(), vec![s("a"), s("b"), s("f")]);
        let trace = run.to_trace();
        assert_eq!(trace[0], json!(["1", "a", "α", "0"]));
        assert_eq!(trace[2], json!(["5", "f", null, null]));
    }

    #[test]
    fn dynamic_init_with_beta_controller() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let conc = Concretization::new(&fig.c2_beta, &fig.r, &i);
        let (st, u1) = dynamic_init(&conc, &s("1"), &LoopPolicy::default()).unwrap();
        assert_eq!(st.u2.as_str(), "β");
        assert!(i.get(&s("1"), &s("a"), &st.u2).unwrap().contains(&u1));
        assert!(matches!(
            dynamic_init(&conc, &s("3"), &LoopPolicy::default()),
            Err(Error::InitializationFailed(_))
        ));
    }

    #[test]
    fn broken_certificate_is_detected() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let conc = Concretization::new(&fig.c2_alpha, &fig.r, &i);
        let st = DynamicState {
            x2: s("a"),
            u2: Input::new("α"),
        };
        assert!(matches!(
            dynamic_step(&conc, &fig.s2, &st, &s("3"), &LoopPolicy::default()),
            Err(Error::BrokenCertificate { .. })
        ));
    }

    #[test]
    fn tree_enumerates_quantizer_choices() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let conc = Concretization::new(&fig.c2_alpha, &fig.r, &i);
        let runs = closed_loop_tree(&fig.s1, ClosedLoop::Memoryless(conc), &s("1"), 6, &LoopPolicy::enumerate_all())
            .unwrap();
        let quantized: BTreeSet<Vec<State>> = runs.iter().map(Run::abstract_states).collect();
        assert!(quantized.contains(&vec![s("a"), s("c"), s("d")]));
        assert!(quantized.contains(&vec![s("a"), s("b"), s("f")]));
        for run in &runs {
            assert!(run.trajectory().is_trajectory_of(&fig.s1));
        }
    }

    #[test]
    fn scripts_must_match_candidates() {
        let fig = fixtures::fig5();
        let policy = LoopPolicy {
            concrete_input: Selection::Scripted(vec![Input::new("1"), Input::new("1")]),
            ..LoopPolicy::default()
        };
        let err = closed_loop_run(&fig.s1, ClosedLoop::Static(&fig.c1_prime), &s("1"), 3, &policy).unwrap_err();
        assert!(matches!(err, Error::ScriptMismatch(_)));
    }

    #[test]
    fn memoryless_output_is_history_independent() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let first = memoryless_controller(&fig.c2_alpha, &fig.r, &i).unwrap();
        for _ in 0..3 {
            let _ = closed_loop_tree(&fig.s1, ClosedLoop::Static(&first), &s("1"), 5, &LoopPolicy::enumerate_all());
            assert_eq!(memoryless_controller(&fig.c2_alpha, &fig.r, &i).unwrap(), first);
        }
    }
}
