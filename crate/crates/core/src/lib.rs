//! Universal cycles on k-subsets built from smaller cycles.
//!
//! The crate provides the cycle algebra (k-sums, weaves, benign
//! partitions), explicit constructions, a backtracking searcher for small
//! base cycles, the assembly pipelines and an independent verifier.

pub mod benign;
pub mod builders;
pub mod cycle;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod search;
pub mod sum;
pub mod verify;
pub mod weave;

pub use cycle::{Alphabet, Cycle, KSetFamily, KString, Multiset, Symbol, SymbolMultiset};
pub use error::{Error, Result};
pub use verify::{is_ucycle, BenignWitness, VerificationReport};
