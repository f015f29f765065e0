//! Resolution refutations: checking, regularization over leveled variables,
//! restriction by substitutions, and small reference provers.
//!
//! The central transformation, [`regularize::regularize`], turns a resolution
//! refutation of a formula Γ with height h into a *regular* refutation of the
//! extended formula f(Γ, h), which adds h−1 renamed copies of each variable
//! linked by equivalence 2-clauses. [`restrict::restrict_proof`] maps such a
//! refutation back to Γ through a substitution.

pub mod automate;
pub mod dimacs;
pub mod examples;
pub mod formula;
pub mod oracle;
pub mod paths;
pub mod proof;
pub mod regularize;
pub mod restrict;
pub mod trace;

pub use dimacs::{parse_dimacs, parse_substitution, write_dimacs, write_substitution};
pub use formula::{
    apply_substitution, brute_sat, Clause, CnfFormula, Literal, SatResult, SubstValue,
    Substitution, Variable,
};
pub use proof::{
    height, irregularity_heights, is_regular, prune_to_root, verify_proof, NodeId, Proof,
    ProofBuilder, Regularity,
};
pub use trace::{parse_trace, write_trace};
