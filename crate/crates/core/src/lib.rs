//! Abstraction-based controller concretization for finite transition
//! control systems.
//!
//! The crate checks alternating simulation (ASR), memoryless concretization
//! (MCR) and feedback refinement (FRR) relations between a concrete system
//! and its abstraction, synthesizes reach-avoid controllers on the
//! abstraction, and turns them back into concrete controllers either with a
//! memoryless map `C1 = C2 ∘_I R` or with a dynamic concretizer that tracks
//! the abstract state. Bounded brute-force oracles check the resulting
//! closed loops.
//!
//! ```
//! use symcret::fixtures;
//! use symcret::relations::{check_asr, check_mcr};
//!
//! let fig = fixtures::fig5();
//! assert!(check_asr(&fig.s1, &fig.s2, &fig.r).unwrap().holds);
//! assert!(!check_mcr(&fig.s1, &fig.s2, &fig.r).unwrap().holds);
//! ```

pub mod concretize;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod interval;
pub mod oracle;
pub mod relations;
pub mod scalar;
pub mod synthesis;
pub mod system;

pub use error::{Error, Result};
pub use relations::{Interface, Relation, RelationKind, RelationVerdict};
pub use scalar::Scalar;
pub use system::{
    Controller, FiniteTransitionSystem, Input, InputSet, ReachAvoidSpec, State, StateSet, Trajectory,
};

/// Exact rationals, the default scalar for interval computations.
pub type Rational = num::BigRational;
pub type RationalCell = interval::IntervalCell<Rational>;
pub type RationalMap = interval::AffineMap<Rational>;
pub type RationalCover = interval::CellCover<Rational>;
pub type RationalProblem = interval::CoverProblem<Rational>;
