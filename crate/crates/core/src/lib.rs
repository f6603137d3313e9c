//! Minimal NFA inference from positive and negative examples via SAT.
//!
//! A [`Sample`] of accepted and rejected words is encoded as CNF for a target
//! state count ([`encode`]), solved ([`solver`]), decoded back into an
//! [`Nfa`], and, for the `k+1` encodings, shrunk by one state ([`reduce`]).
//! [`search`] drives this loop to find the smallest consistent automaton.

pub mod cnf;
pub mod encode;
pub mod nfa;
pub mod oracle;
pub mod reduce;
pub mod sample;
pub mod search;
pub mod solver;
pub mod split;

pub use cnf::{Assignment, Cnf, CnfBuilder, Lit, SemVar, VarMap};
pub use encode::{encode, EncodeOptions, Encoding, EncodingStats, ModelKind};
pub use nfa::{Nfa, NfaClass};
pub use reduce::{ReduceError, ReduceOutcome};
pub use sample::{Alphabet, Sample, Symbol, Word};
pub use search::{infer_min_k, InferenceReport, SearchConfig, Strategy};
pub use solver::{Backend, Budget, SolveOutcome, UnknownReason};
pub use split::SplitAssignment;
