//! The two worked examples, shipped as data files.
//!
//! `fig5` is a five-state concrete system with a six-state abstraction whose
//! quantizer is set-valued at state `2`. It is the smallest setting where an
//! ASR abstraction admits an abstract controller whose memoryless
//! concretization fails. `fig8` holds interval covers for the 1-D
//! translation example.

use crate::format::Bundle;
use crate::relations::{mcr_extension, Relation};
use crate::system::{Controller, FiniteTransitionSystem, ReachAvoidSpec};

pub const FIG5_JSON: &str = include_str!("../fixtures/fig5.json");
pub const FIG8_JSON: &str = include_str!("../fixtures/fig8.json");

#[derive(Clone, Debug)]
pub struct Fig5 {
    pub s1: FiniteTransitionSystem,
    pub s2: FiniteTransitionSystem,
    /// MCR-extension of `s2`, computed rather than stored.
    pub s2_prime: FiniteTransitionSystem,
    pub r: Relation,
    pub sigma1: ReachAvoidSpec,
    pub sigma2: ReachAvoidSpec,
    /// `a, b, c ↦ {α}`: solves the abstract problem but its memoryless
    /// concretization can drive `1 → 2 → 3`.
    pub c2_alpha: Controller,
    /// `a ↦ {β}`, `e ↦ {α}`: goes through `e` and concretizes safely.
    pub c2_beta: Controller,
    /// `1, 2 ↦ {0}` on the concrete side.
    pub c1_prime: Controller,
}

pub fn fig5_bundle() -> Bundle {
    Bundle::from_json(FIG5_JSON).expect("bundled fig5 fixture is valid")
}

pub fn fig5() -> Fig5 {
    let b = fig5_bundle();
    let s1 = b.systems["S1"].clone();
    let s2 = b.systems["S2"].clone();
    let r = b.relations["R"].relation.clone();
    let s2_prime = mcr_extension(&s1, &s2, &r).expect("fig5 abstraction is ASR");
    Fig5 {
        s2_prime,
        sigma1: b.specs["sigma1"].spec.clone(),
        sigma2: b.specs["sigma2"].spec.clone(),
        c2_alpha: b.controllers["C2_alpha"].controller.clone(),
        c2_beta: b.controllers["C2_beta"].controller.clone(),
        c1_prime: b.controllers["C1_prime"].controller.clone(),
        s1,
        s2,
        r,
    }
}

pub fn fig8_bundle() -> Bundle {
    Bundle::from_json(FIG8_JSON).expect("bundled fig8 fixture is valid")
}
