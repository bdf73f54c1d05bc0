use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::check::{admissible_inputs, check, local_violation};
use super::{Relation, RelationKind};
use crate::error::{Error, Result};
use crate::system::{FiniteTransitionSystem, Input, InputSet, State};

/// The extended relation `R_e ⊆ X1 × X2 × U1 × U2` of a relation kind,
/// materialized on demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedRelation {
    pub kind: RelationKind,
    pub tuples: BTreeSet<(State, State, Input, Input)>,
}

impl ExtendedRelation {
    pub fn compute(
        kind: RelationKind,
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
        r: &Relation,
    ) -> Result<Self> {
        r.require_between(s1, s2)?;
        let mut tuples = BTreeSet::new();
        for (x1, x2) in r.pairs() {
            for u2 in s2.available(x2) {
                for u1 in admissible_inputs(kind, s1, s2, r, x1, x2, u2) {
                    tuples.insert((x1.clone(), x2.clone(), u1, u2.clone()));
                }
            }
        }
        Ok(ExtendedRelation { kind, tuples })
    }

    pub fn contains(&self, x1: &State, x2: &State, u1: &Input, u2: &Input) -> bool {
        self.tuples
            .contains(&(x1.clone(), x2.clone(), u1.clone(), u2.clone()))
    }
}

/// Maps `(x1, x2, u2)` to the admissible concrete inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interface {
    kind: RelationKind,
    table: BTreeMap<(State, State, Input), InputSet>,
}

impl Interface {
    pub fn from_entries(
        kind: RelationKind,
        entries: impl IntoIterator<Item = ((State, State, Input), InputSet)>,
    ) -> Self {
        Interface {
            kind,
            table: entries.into_iter().collect(),
        }
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn get(&self, x1: &State, x2: &State, u2: &Input) -> Option<&InputSet> {
        self.table.get(&(x1.clone(), x2.clone(), u2.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(State, State, Input), &InputSet)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Non-emptiness and subset conditions over every `(x1, x2) ∈ R` and
    /// `u2 ∈ U2(x2)`.
    pub fn validate(
        &self,
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
        r: &Relation,
    ) -> Result<()> {
        r.require_between(s1, s2)?;
        for (x1, x2) in r.pairs() {
            for u2 in s2.available(x2) {
                let invalid = |reason: String| Error::InvalidInterface {
                    x1: x1.clone(),
                    x2: x2.clone(),
                    u2: u2.clone(),
                    reason,
                };
                let entry = self.get(x1, x2, u2).ok_or_else(|| Error::InterfaceIncomplete {
                    x1: x1.clone(),
                    x2: x2.clone(),
                    u2: u2.clone(),
                })?;
                if entry.is_empty() {
                    return Err(invalid("empty entry".into()));
                }
                for u1 in entry {
                    let ok = match self.kind {
                        RelationKind::Frr => {
                            u1 == u2
                                && s2.available(x2).all(|u| s1.is_available(x1, u))
                                && local_violation(self.kind, s1, s2, r, x1, x2, u1, u2).is_none()
                        }
                        _ => {
                            s1.is_available(x1, u1)
                                && local_violation(self.kind, s1, s2, r, x1, x2, u1, u2).is_none()
                        }
                    };
                    if !ok {
                        return Err(invalid(format!(
                            "`{u1}` is outside the {} extended relation",
                            self.kind
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `I(x1, x2, u2) = {u1 | (x1, x2, u1, u2) ∈ R_e}` for a relation that holds.
pub fn maximal_interface(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    kind: RelationKind,
) -> Result<Interface> {
    let verdict = check(kind, s1, s2, r)?;
    if !verdict.holds {
        return Err(Error::RelationRefuted {
            kind,
            verdict: Box::new(verdict),
        });
    }
    let mut table = BTreeMap::new();
    for (x1, x2) in r.pairs() {
        for u2 in s2.available(x2) {
            let entry = admissible_inputs(kind, s1, s2, r, x1, x2, u2);
            debug_assert!(!entry.is_empty());
            table.insert((x1.clone(), x2.clone(), u2.clone()), entry);
        }
    }
    Ok(Interface { kind, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::system::inputs;

    fn key(x1: &str, x2: &str, u2: &str) -> (State, State, Input) {
        (State::new(x1), State::new(x2), Input::new(u2))
    }

    #[test]
    fn fig5_maximal_asr_interface() {
        let fig = fixtures::fig5();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let get = |a, b, c| i.get(&State::new(a), &State::new(b), &Input::new(c)).cloned();
        assert_eq!(get("1", "a", "α"), Some(inputs(["0"])));
        assert_eq!(get("2", "b", "α"), Some(inputs(["0"])));
        assert_eq!(get("2", "c", "α"), Some(inputs(["1"])));
        assert_eq!(get("1", "a", "β"), Some(inputs(["1"])));
        i.validate(&fig.s1, &fig.s2, &fig.r).unwrap();
    }

    #[test]
    fn mcr_interface_requires_mcr() {
        let fig = fixtures::fig5();
        let err = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Mcr).unwrap_err();
        match err {
            Error::RelationRefuted { verdict, .. } => assert!(verdict.witness.is_some()),
            other => panic!("unexpected {other:?}"),
        }
        maximal_interface(&fig.s1, &fig.s2_prime, &fig.r, RelationKind::Mcr).unwrap();
    }

    #[test]
    fn frr_interface_is_the_abstract_input() {
        let fig = fixtures::fig5();
        let id = Relation::identity(fig.s2.states());
        let i = maximal_interface(&fig.s2, &fig.s2, &id, RelationKind::Frr).unwrap();
        assert!(!i.is_empty());
        for ((_, _, u2), entry) in i.entries() {
            assert_eq!(entry, &BTreeSet::from([u2.clone()]));
        }
    }

    #[test]
    fn identity_mcr_interface_contains_the_input() {
        let fig = fixtures::fig5();
        let id = Relation::identity(fig.s1.states());
        let i = maximal_interface(&fig.s1, &fig.s1, &id, RelationKind::Mcr).unwrap();
        for ((_, _, u), entry) in i.entries() {
            assert!(entry.contains(u));
        }
    }

    #[test]
    fn validate_catches_bad_entries() {
        let fig = fixtures::fig5();
        let good = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let mut entries: BTreeMap<_, _> = good.entries().map(|(k, v)| (k.clone(), v.clone())).collect();
        entries.insert(key("1", "a", "α"), inputs(["1"]));
        let bad = Interface::from_entries(RelationKind::Asr, entries.clone());
        assert!(matches!(
            bad.validate(&fig.s1, &fig.s2, &fig.r),
            Err(Error::InvalidInterface { .. })
        ));
        entries.remove(&key("1", "a", "α"));
        let missing = Interface::from_entries(RelationKind::Asr, entries);
        assert!(matches!(
            missing.validate(&fig.s1, &fig.s2, &fig.r),
            Err(Error::InterfaceIncomplete { .. })
        ));
    }

    #[test]
    fn extended_relation_matches_interface() {
        let fig = fixtures::fig5();
        let re = ExtendedRelation::compute(RelationKind::Asr, &fig.s1, &fig.s2, &fig.r).unwrap();
        let i = maximal_interface(&fig.s1, &fig.s2, &fig.r, RelationKind::Asr).unwrap();
        let from_table: usize = i.entries().map(|(_, v)| v.len()).sum();
        assert_eq!(re.tuples.len(), from_table);
        assert!(re.contains(
            &State::new("2"),
            &State::new("c"),
            &Input::new("1"),
            &Input::new("α")
        ));
    }
}
