//! Exterior-calculus engine for evolutionary relations `dψ = ω^p`.
//!
//! The crate builds differential forms over coordinate charts from
//! expression or grid-backed coefficients, measures their commutators
//! (flat and torsionful), locates the loci where a commutator admits null
//! directions, traces the resulting pseudostructures and recovers state
//! functions along them. Everything here is `no_std` + `alloc`; file
//! formats and the command line live in the `evoform` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chart;
pub mod classify;
pub mod connection;
pub mod degeneracy;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod exterior;
pub mod field;
pub mod grid;
pub mod hamilton;
pub mod linalg;
mod math;
pub mod parse;
pub mod sample;

pub use chart::{Chart, Interval};
pub use classify::{classify, CellStatus, ClassificationRecord, ClassificationTable, Interaction};
pub use connection::{covariant_commutator, Connection, Torsion};
pub use degeneracy::{
    cascade_integrate, degeneracy_directions, degeneracy_locus, identical_on_pseudostructure,
    recover_state_function, trace_pseudostructure, CascadeConfig, CascadeOutcome, CascadeReport,
    CascadeStep, Pseudostructure, TraceParams,
};
pub use error::{Error, ParseError, ParseErrorKind};
pub use evolution::{
    build_relation, nonidentity_verdict, state_residual, BalanceCoefficients, BalanceSystem,
    EvolutionaryRelation, StateFunction, StateLabel, Verdict, VerdictRecord,
};
pub use expr::{Expr, Func};
pub use exterior::{
    flat_commutator, is_closed, restricted_closure, ClosureReport, CommutatorField,
    DifferentialForm, MultiIndex,
};
pub use field::ScalarField;
pub use grid::GridSamples;
pub use hamilton::{poincare_check, HamiltonianSystem, PoincareConfig, PoincareReport};
pub use sample::SamplePlan;

pub type Result<T, E = Error> = core::result::Result<T, E>;
