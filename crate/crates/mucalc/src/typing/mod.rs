//! Second-order classical typing for both calculi: formulas of second-order
//! predicate logic over the shared first-order signature, explicit
//! derivation trees with a JSON interchange format, validators for the two
//! rule systems, and the derivation transformer that tracks one reduction
//! step (subject reduction made executable).

pub mod derivation;
pub mod fo;
pub mod formula;
pub mod sr;
pub mod validate;

/// Which typing system a derivation claims to live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// The deterministic calculus: sequents `Γ ⊢ t : A , Δ` with named
    /// μ-variables on the right.
    Lmu,
    /// The non-deterministic calculus: sequents `Γ, Δ ⊢′ t : A` where
    /// μ-variables carry negated formulas on the left.
    Mupp,
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            System::Lmu => write!(f, "lmu"),
            System::Mupp => write!(f, "mupp"),
        }
    }
}
