use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::check::{admissible_inputs, check_asr, check_mcr};
use super::{Relation, RelationKind};
use crate::error::{Error, Result};
use crate::system::{FiniteTransitionSystem, Input, ReachAvoidSpec, State, StateSet};

/// Completes an ASR abstraction into an MCR one by adding, to every row
/// `(x2, u2)`, the quantized successors `R(F1(x1, u1))` of every ASR tuple
/// `(x1, x2, u1, u2)`. Available inputs are unchanged.
///
/// The result is checked before returning: `S1 ⪯_R S2'` and `S2 ⪯_Id S2'`
/// must both hold as MCR.
pub fn mcr_extension(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
) -> Result<FiniteTransitionSystem> {
    r.require_strict()?;
    let verdict = check_asr(s1, s2, r)?;
    if !verdict.holds {
        return Err(Error::RelationRefuted {
            kind: RelationKind::Asr,
            verdict: Box::new(verdict),
        });
    }

    let mut rows: BTreeMap<(State, Input), StateSet> = BTreeMap::new();
    for (x2, u2, succ) in s2.transitions() {
        let mut row = succ.clone();
        for x1 in r.preimage(x2) {
            for u1 in admissible_inputs(RelationKind::Asr, s1, s2, r, x1, x2, u2) {
                row.extend(r.image_of(s1.post(x1, &u1)));
            }
        }
        rows.insert((x2.clone(), u2.clone()), row);
    }
    let extended = FiniteTransitionSystem::from_parts(s2.states().clone(), s2.inputs().clone(), rows)?;

    if !check_mcr(s1, &extended, r)?.holds {
        return Err(Error::Postcondition(
            "extension is not MCR-related to the concrete system".into(),
        ));
    }
    if !check_mcr(s2, &extended, &Relation::identity(s2.states()))?.holds {
        return Err(Error::Postcondition(
            "extension is not MCR-related to the original abstraction".into(),
        ));
    }
    Ok(extended)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedSpec {
    pub spec: ReachAvoidSpec,
    pub warnings: Vec<String>,
}

/// Abstract reach-avoid spec for a strict relation:
/// `Q_I = R(X_I)`, `Q_O = R(X_O)` and `Q_T` the abstract states in `R(X_T)`
/// whose whole cell lies in `X_T`, minus `Q_O`.
pub fn translate_spec(spec: &ReachAvoidSpec, r: &Relation) -> Result<TranslatedSpec> {
    r.require_strict()?;
    for x in spec.initial.iter().chain(&spec.target).chain(&spec.obstacle) {
        if !r.domain().contains(x) {
            return Err(Error::UnknownState(x.clone()));
        }
    }
    let initial = r.image_of(&spec.initial);
    let obstacle = r.image_of(&spec.obstacle);
    let target_image = r.image_of(&spec.target);
    let target: StateSet = target_image
        .iter()
        .filter(|q| r.preimage(q).is_subset(&spec.target) && !obstacle.contains(*q))
        .cloned()
        .collect();

    if !(initial.is_superset(&r.image_of(&spec.initial))
        && target.is_subset(&target_image)
        && obstacle.is_superset(&r.image_of(&spec.obstacle)))
    {
        return Err(Error::Postcondition("translated spec breaks containment".into()));
    }

    let mut warnings = Vec::new();
    if target.is_empty() {
        warnings.push("abstract target is empty; synthesis cannot succeed".to_owned());
    }
    Ok(TranslatedSpec {
        spec: ReachAvoidSpec::new(initial, target, obstacle),
        warnings,
    })
}
