//! Finite interaction systems and simulations, the multiplicative-exponential
//! connectives on them, and a bounded relational model of the simply typed
//! and differential λ-calculus checked against those connectives.
//!
//! Module map:
//!
//! - [`system`], [`relation`], [`simulation`]: interaction systems, relations,
//!   and checking, synthesis, refinement and composition of simulations.
//! - [`connectives`]: `⊥`, `⊗`, `⊸`, multithreading, `!`, the tensor/arrow
//!   adjunction and the comonad structure of `!`.
//! - [`lambda`]: terms, types, parser, typechecker and reduction.
//! - [`semantics`]: points, environments, denotations and the verification
//!   of soundness and invariance by enumeration.
//! - [`cli`]: the `intsys` command line.

pub mod cli;
pub mod connectives;
pub mod fixtures;
pub mod lambda;
pub mod multiset;
pub mod relation;
pub mod semantics;
pub mod simulation;
pub mod system;
pub mod token;

pub use multiset::Multiset;
pub use relation::Relation;
pub use simulation::{SimulationStrategy, Synthesis};
pub use system::{Interaction, InteractionSystem, SystemRef};
pub use token::Token;
