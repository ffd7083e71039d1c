//! Decision procedures for Beatty sequences over a real quadratic field.
//!
//! Natural numbers are written in the Ostrowski numeration system of a
//! purely periodic quadratic irrational γ; sequences ⌊nα + β⌋ with α, β in
//! Q(γ) are then recognized by finite automata reading (n, ⌊nα + β⌋) in
//! parallel, and first-order statements about them compile to automata.

pub mod automaton;
pub mod basis;
pub mod builders;
pub mod error;
pub mod logic;
pub mod numeration;
pub mod par;
pub mod quadratic;
pub mod tracked;

pub use automaton::{Automaton, BoolOp, SynchronizedRelation};
pub use error::{Error, Result};
pub use numeration::{DigitString, NumerationSystem};
pub use quadratic::{PeriodicCF, QuadraticReal};
