//! Workbench for Parigot-style λμ and the non-deterministic λμ++ calculus:
//! parsing and printing, α-equivalence, the three substitution forms,
//! reduction engines with exhaustive value-set exploration, the two
//! translations between the calculi, and validators for the second-order
//! classical typing systems of both.

pub mod engine;
pub mod gen;
pub mod names;
pub mod programs;
pub mod proofs;
pub mod syntax;
pub mod translate;
pub mod typing;
