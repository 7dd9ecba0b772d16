//! Encodings of alternating Turing machines into guarded adjacent sentences:
//! the generating maps `λ_i`, binary counters over a unit-bit predicate, the
//! guard-saturating sentences `ζ` and `ε`, a machine simulator, and a checker
//! that model-checks the encoding on the structure built from an accepting
//! run.

mod atm;
mod counters;
mod encode;
mod lambda;

use thiserror::Error;

use crate::semantics::SemanticsError;

pub use atm::{simulate_atm, Atm, Config, ConfigTree, Kind, Side, SimOutcome, Transition, BLANK};
pub use counters::{
    build_counters, check_counters, eq, less, succ, CounterMismatch, Counters, BIT,
};
pub use encode::{
    check_conjuncts, embed_and_expand, encode_atm, inject_faults, size_bound, verify_encoding,
    ConjunctCheck, Encoding, Fault, FaultCheck, VerifyReport, SIZE_FACTOR,
};
pub use lambda::{build_epsilon, build_zeta, closure_covers, closure_w, lambda_apply, lambda_map};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("{0}")]
    Domain(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("simulation: {0}")]
    Simulation(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}
