//! The adjacent fragment of first-order logic.
//!
//! Modules, bottom-up: [`words`] (adjacent walks and primitive generators),
//! [`syntax`] (formulas and fragment classification), [`semantics`] (finite
//! structures), [`types`] (adjacent types and connector-types), [`sat`]
//! (normal forms, variable reduction and the three-variable decider) and
//! [`hardness`] (alternating Turing machine encodings).

pub mod hardness;
pub mod sat;
pub mod semantics;
pub mod syntax;
pub mod types;
pub mod words;
