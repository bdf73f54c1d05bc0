//! Relations between a concrete and an abstract system.

mod check;
mod extension;
mod interface;
mod relation;

pub use check::{
    check, check_asr, check_frr, check_mcr, check_unchecked, Evidence, RelationKind,
    RelationVerdict, RelationWitness,
};
pub use extension::{mcr_extension, translate_spec, TranslatedSpec};
pub use interface::{maximal_interface, ExtendedRelation, Interface};
pub use relation::Relation;
