//! Checkers for the three relation kinds, with minimal refutation witnesses.
//!
//! All three share the same shape: for every related pair `(x1, x2)` and
//! every abstract input `u2 ∈ U2(x2)` some concrete input `u1 ∈ U1(x1)` must
//! satisfy a local condition on the successors `F1(x1, u1)`:
//!
//! * ASR: every `x1'` has `R(x1') ∩ F2(x2, u2) ≠ ∅`;
//! * MCR: every `x1'` has `R(x1') ⊆ F2(x2, u2)`;
//! * FRR: inputs are shared (`U2(x2) ⊆ U1(x1)`) and the MCR condition holds
//!   with `u1 = u2`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Relation;
use crate::error::Result;
use crate::system::{FiniteTransitionSystem, Input, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Asr,
    Mcr,
    Frr,
}

impl RelationKind {
    pub const ALL: [RelationKind; 3] = [RelationKind::Asr, RelationKind::Mcr, RelationKind::Frr];

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "asr" => Some(RelationKind::Asr),
            "mcr" => Some(RelationKind::Mcr),
            "frr" => Some(RelationKind::Frr),
            _ => None,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Asr => "ASR",
            RelationKind::Mcr => "MCR",
            RelationKind::Frr => "FRR",
        })
    }
}

/// One refuted concrete input: taking `u1` at `x1` can reach `x1_next`,
/// which either has no related abstract successor (ASR) or is related to
/// `x2_next`, which is not an abstract successor (MCR/FRR).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub u1: Input,
    pub x1_next: State,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2_next: Option<State>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationWitness {
    pub x1: State,
    pub x2: State,
    pub u2: Input,
    /// FRR only: `u2` is available at `x2` but not at `x1`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub input_not_shared: bool,
    /// One entry per refuted concrete input, in input order.
    pub evidence: Vec<Evidence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub kind: RelationKind,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<RelationWitness>,
}

/// Local condition for one tuple `(x1, x2, u1, u2)`. Returns the first
/// violating successor, or `None` when the tuple belongs to the extended
/// relation of `kind`. For FRR the caller pairs `u1 = u2`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn local_violation(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    x1: &State,
    x2: &State,
    u1: &Input,
    u2: &Input,
) -> Option<Evidence> {
    let f2 = s2.post(x2, u2);
    for x1n in s1.post(x1, u1) {
        let related = r.image(x1n);
        match kind {
            RelationKind::Asr => {
                if related.is_disjoint(f2) {
                    return Some(Evidence {
                        u1: u1.clone(),
                        x1_next: x1n.clone(),
                        x2_next: None,
                    });
                }
            }
            RelationKind::Mcr | RelationKind::Frr => {
                if let Some(x2n) = related.iter().find(|x2n| !f2.contains(*x2n)) {
                    return Some(Evidence {
                        u1: u1.clone(),
                        x1_next: x1n.clone(),
                        x2_next: Some(x2n.clone()),
                    });
                }
            }
        }
    }
    None
}

/// Concrete inputs `u1` with `(x1, x2, u1, u2)` in the extended relation.
pub(crate) fn admissible_inputs(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    x1: &State,
    x2: &State,
    u2: &Input,
) -> BTreeSet<Input> {
    match kind {
        RelationKind::Frr => {
            let shared = s2.available(x2).all(|u| s1.is_available(x1, u));
            if shared && local_violation(kind, s1, s2, r, x1, x2, u2, u2).is_none() {
                BTreeSet::from([u2.clone()])
            } else {
                BTreeSet::new()
            }
        }
        _ => s1
            .available(x1)
            .filter(|u1| local_violation(kind, s1, s2, r, x1, x2, u1, u2).is_none())
            .cloned()
            .collect(),
    }
}

fn refute_pair(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    x1: &State,
    x2: &State,
) -> Option<RelationWitness> {
    for u2 in s2.available(x2) {
        let witness = |input_not_shared, evidence| RelationWitness {
            x1: x1.clone(),
            x2: x2.clone(),
            u2: u2.clone(),
            input_not_shared,
            evidence,
        };
        if kind == RelationKind::Frr {
            if !s1.is_available(x1, u2) {
                return Some(witness(true, Vec::new()));
            }
            if let Some(ev) = local_violation(kind, s1, s2, r, x1, x2, u2, u2) {
                return Some(witness(false, vec![ev]));
            }
            continue;
        }
        let mut evidence = Vec::new();
        let mut satisfied = false;
        for u1 in s1.available(x1) {
            match local_violation(kind, s1, s2, r, x1, x2, u1, u2) {
                Some(ev) => evidence.push(ev),
                None => {
                    satisfied = true;
                    break;
                }
            }
        }
        if !satisfied {
            return Some(witness(false, evidence));
        }
    }
    None
}

fn check_inner(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    r.require_between(s1, s2)?;
    let witness = r
        .pairs()
        .find_map(|(x1, x2)| refute_pair(kind, s1, s2, r, x1, x2));
    Ok(RelationVerdict {
        kind,
        holds: witness.is_none(),
        witness,
    })
}

/// Checks `kind` between `s1` and `s2`. MCR and FRR reject non-strict
/// relations; use [`check_unchecked`] to evaluate the bare definition.
pub fn check(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    if kind != RelationKind::Asr {
        r.require_strict()?;
    }
    check_inner(kind, s1, s2, r)
}

/// Evaluates the definition without the strictness precondition.
pub fn check_unchecked(
    kind: RelationKind,
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    check_inner(kind, s1, s2, r)
}

pub fn check_asr(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    check(RelationKind::Asr, s1, s2, r)
}

pub fn check_mcr(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    check(RelationKind::Mcr, s1, s2, r)
}

pub fn check_frr(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<RelationVerdict> {
    check(RelationKind::Frr, s1, s2, r)
}

impl RelationWitness {
    /// Replays the witness against the quantifier form of the definitions,
    /// independently of the checker: true iff it really refutes `kind`.
    pub fn refutes(
        &self,
        kind: RelationKind,
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
        r: &Relation,
    ) -> bool {
        let (x1, x2, u2) = (&self.x1, &self.x2, &self.u2);
        if !r.contains(x1, x2) || s2.post(x2, u2).is_empty() {
            return false;
        }
        let f2 = s2.post(x2, u2);
        let refutes_with = |ev: &Evidence| -> bool {
            if !s1.post(x1, &ev.u1).contains(&ev.x1_next) {
                return false;
            }
            match (kind, &ev.x2_next) {
                (RelationKind::Asr, None) => {
                    // no x2' ∈ F2(x2, u2) with (x1', x2') ∈ R
                    !f2.iter().any(|x2n| r.contains(&ev.x1_next, x2n))
                }
                (RelationKind::Mcr | RelationKind::Frr, Some(x2n)) => {
                    r.contains(&ev.x1_next, x2n) && !f2.contains(x2n)
                }
                _ => false,
            }
        };
        match kind {
            RelationKind::Frr => {
                if self.input_not_shared {
                    s1.post(x1, u2).is_empty()
                } else {
                    self.evidence.len() == 1
                        && &self.evidence[0].u1 == u2
                        && refutes_with(&self.evidence[0])
                }
            }
            _ => s1.inputs().iter().filter(|u1| !s1.post(x1, u1).is_empty()).all(|u1| {
                self.evidence
                    .iter()
                    .any(|ev| &ev.u1 == u1 && refutes_with(ev))
            }),
        }
    }
}
