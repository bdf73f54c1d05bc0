use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::system::{FiniteTransitionSystem, State, StateSet};

static NO_STATES: StateSet = StateSet::new();

/// A binary relation `R ⊆ X1 × X2` together with its two carrier sets.
///
/// Read forwards, `R(x1)` is the quantizer: the abstract states whose cells
/// contain `x1`. Read backwards, `R⁻¹(x2)` is the cell of `x2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    domain: StateSet,
    codomain: StateSet,
    forward: BTreeMap<State, StateSet>,
    inverse: BTreeMap<State, StateSet>,
}

impl Relation {
    pub fn new(
        domain: StateSet,
        codomain: StateSet,
        pairs: impl IntoIterator<Item = (State, State)>,
    ) -> Result<Self> {
        let mut forward: BTreeMap<State, StateSet> = BTreeMap::new();
        let mut inverse: BTreeMap<State, StateSet> = BTreeMap::new();
        for (a, b) in pairs {
            if !domain.contains(&a) {
                return Err(Error::UnknownState(a));
            }
            if !codomain.contains(&b) {
                return Err(Error::UnknownState(b));
            }
            forward.entry(a.clone()).or_default().insert(b.clone());
            inverse.entry(b).or_default().insert(a);
        }
        Ok(Relation {
            domain,
            codomain,
            forward,
            inverse,
        })
    }

    /// Relation between the state sets of two systems.
    pub fn between(
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
        pairs: impl IntoIterator<Item = (State, State)>,
    ) -> Result<Self> {
        Relation::new(s1.states().clone(), s2.states().clone(), pairs)
    }

    /// Like [`Relation::between`], from string pairs.
    pub fn from_pairs<'a>(
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        Relation::between(
            s1,
            s2,
            pairs.into_iter().map(|(a, b)| (State::new(a), State::new(b))),
        )
    }

    pub fn identity(states: &StateSet) -> Self {
        Relation::new(
            states.clone(),
            states.clone(),
            states.iter().map(|x| (x.clone(), x.clone())),
        )
        .expect("diagonal pairs lie in the carrier")
    }

    pub fn domain(&self) -> &StateSet {
        &self.domain
    }

    pub fn codomain(&self) -> &StateSet {
        &self.codomain
    }

    /// `R(x1)`.
    pub fn image(&self, x1: &State) -> &StateSet {
        self.forward.get(x1).unwrap_or(&NO_STATES)
    }

    /// `R⁻¹(x2)`.
    pub fn preimage(&self, x2: &State) -> &StateSet {
        self.inverse.get(x2).unwrap_or(&NO_STATES)
    }

    pub fn image_of<'a>(&self, xs: impl IntoIterator<Item = &'a State>) -> StateSet {
        let mut out = StateSet::new();
        for x in xs {
            out.extend(self.image(x).iter().cloned());
        }
        out
    }

    pub fn preimage_of<'a>(&self, xs: impl IntoIterator<Item = &'a State>) -> StateSet {
        let mut out = StateSet::new();
        for x in xs {
            out.extend(self.preimage(x).iter().cloned());
        }
        out
    }

    pub fn contains(&self, x1: &State, x2: &State) -> bool {
        self.image(x1).contains(x2)
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (&State, &State)> {
        self.forward
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.forward.values().map(StateSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// First domain element with an empty image, if any.
    pub fn uncovered(&self) -> Option<&State> {
        self.domain.iter().find(|x| self.image(x).is_empty())
    }

    /// Every concrete state is related to at least one abstract state.
    pub fn is_strict(&self) -> bool {
        self.uncovered().is_none()
    }

    /// Every concrete state is related to exactly one abstract state.
    pub fn is_single_valued(&self) -> bool {
        self.domain.iter().all(|x| self.image(x).len() == 1)
    }

    pub(crate) fn require_strict(&self) -> Result<()> {
        match self.uncovered() {
            Some(x) => Err(Error::NonStrictRelation(x.clone())),
            None => Ok(()),
        }
    }

    pub(crate) fn require_between(
        &self,
        s1: &FiniteTransitionSystem,
        s2: &FiniteTransitionSystem,
    ) -> Result<()> {
        if &self.domain != s1.states() {
            return Err(Error::DomainMismatch(
                "relation domain differs from the concrete state set".into(),
            ));
        }
        if &self.codomain != s2.states() {
            return Err(Error::DomainMismatch(
                "relation codomain differs from the abstract state set".into(),
            ));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Relation {
        Relation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `R ∘ Q = {(a, c) | ∃b: (a, b) ∈ R ∧ (b, c) ∈ Q}`.
    pub fn compose(&self, q: &Relation) -> Result<Relation> {
        if self.codomain != q.domain {
            return Err(Error::DomainMismatch(
                "codomain of the left relation differs from the domain of the right".into(),
            ));
        }
        let mut pairs = Vec::new();
        for (a, bs) in &self.forward {
            for c in q.image_of(bs) {
                pairs.push((a.clone(), c));
            }
        }
        Relation::new(self.domain.clone(), q.codomain.clone(), pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::system::states;

    #[test]
    fn strictness_and_single_valuedness() {
        let fig = fixtures::fig5();
        assert!(fig.r.is_strict());
        assert!(!fig.r.is_single_valued());
        assert_eq!(fig.r.image(&State::new("2")), &states(["b", "c"]));

        let id = Relation::identity(fig.s1.states());
        assert!(id.is_strict() && id.is_single_valued());

        let empty = Relation::new(fig.s1.states().clone(), fig.s2.states().clone(), []).unwrap();
        assert!(!empty.is_strict());
        assert_eq!(empty.uncovered(), Some(&State::new("1")));
    }

    #[test]
    fn composition_inverse_identity() {
        let fig = fixtures::fig5();
        let id2 = Relation::identity(fig.s2.states());
        assert_eq!(fig.r.compose(&id2).unwrap(), fig.r);
        assert_eq!(fig.r.inverse().inverse(), fig.r);

        let rr = fig.r.compose(&fig.r.inverse()).unwrap();
        let expected: Vec<(&str, &str)> =
            vec![("1", "1"), ("2", "2"), ("3", "3"), ("4", "4"), ("5", "5")];
        let got: Vec<(&str, &str)> = rr.pairs().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        assert_eq!(got, expected);

        assert!(matches!(
            fig.r.compose(&fig.r),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn rejects_unknown_states() {
        let fig = fixtures::fig5();
        assert!(matches!(
            Relation::from_pairs(&fig.s1, &fig.s2, [("1", "z")]),
            Err(Error::UnknownState(_))
        ));
    }
}
