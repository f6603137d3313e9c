//! Shrinking a `k+1`-state automaton with a terminal final state to `k`
//! states by choosing a new set of final states.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::nfa::{Nfa, NfaError};
use crate::oracle::{enumerate_final_subsets, MAX_SUBSET_STATES};
use crate::sample::{Sample, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("automaton has {0} state(s); at least 2 are required")]
    TooFewStates(usize),
    #[error("top state {0} is not final")]
    TopNotFinal(usize),
    #[error("top state {0} has outgoing transitions")]
    TopHasOutgoing(usize),
    #[error("state {0} is final but is neither the initial nor the top state")]
    ExtraFinal(usize),
    #[error("automaton is not consistent with the sample")]
    Inconsistent,
    #[error("the empty word is a positive example")]
    EmptyWordPositive,
    #[error("{states} states exceed the enumeration cap of {cap}")]
    CapExceeded { states: usize, cap: usize },
    #[error(transparent)]
    Nfa(#[from] NfaError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// The truncated automaton with `candidate_finals` as its final states.
    Reduced { nfa: Nfa, candidate_finals: BTreeSet<usize> },
    /// Every state is reached by some negative word while positive words
    /// exist.
    FailedEmptyCandidates,
    /// This positive word reaches no candidate state.
    FailedUncovered(Word),
}

impl ReduceOutcome {
    pub fn is_reduced(&self) -> bool {
        matches!(self, ReduceOutcome::Reduced { .. })
    }

    pub fn nfa(&self) -> Option<&Nfa> {
        match self {
            ReduceOutcome::Reduced { nfa, .. } => Some(nfa),
            _ => None,
        }
    }
}

fn check_shape(nfa: &Nfa, sample: &Sample) -> Result<(), ReduceError> {
    let top = nfa.num_states();
    if top < 2 {
        return Err(ReduceError::TooFewStates(top));
    }
    nfa.check_alphabet(sample)?;
    if !nfa.is_final(top) {
        return Err(ReduceError::TopNotFinal(top));
    }
    if nfa.has_outgoing(top) {
        return Err(ReduceError::TopHasOutgoing(top));
    }
    if let Some(&f) = nfa.finals().iter().find(|&&f| f != 1 && f != top) {
        return Err(ReduceError::ExtraFinal(f));
    }
    if sample.has_empty_positive() {
        return Err(ReduceError::EmptyWordPositive);
    }
    if !nfa.consistent(sample)? {
        return Err(ReduceError::Inconsistent);
    }
    Ok(())
}

/// End states of `w` on `nfa`, adding the size of every processed state set
/// to `work`.
fn end_states_counted(nfa: &Nfa, w: &Word, work: &mut usize) -> Vec<bool> {
    let mut cur = vec![false; nfa.num_states() + 1];
    cur[1] = true;
    for &a in w.symbols() {
        *work += cur.iter().filter(|&&b| b).count();
        cur = nfa.step(&cur, a);
    }
    cur
}

/// Like [`reduce_kp1`], also returning the number of single-state image
/// computations performed.
pub fn reduce_kp1_counted(nfa: &Nfa, sample: &Sample) -> Result<(ReduceOutcome, usize), ReduceError> {
    check_shape(nfa, sample)?;
    let truncated = nfa.truncate_last();
    let k = truncated.num_states();
    let mut work = 0;
    let mut candidates: BTreeSet<usize> = (1..=k).collect();
    for w in sample.negative() {
        let ends = end_states_counted(&truncated, w, &mut work);
        candidates.retain(|&s| !ends[s]);
    }
    if candidates.is_empty() && !sample.positive().is_empty() {
        return Ok((ReduceOutcome::FailedEmptyCandidates, work));
    }
    for w in sample.positive() {
        let ends = end_states_counted(&truncated, w, &mut work);
        if !candidates.iter().any(|&s| ends[s]) {
            return Ok((ReduceOutcome::FailedUncovered(w.clone()), work));
        }
    }
    let mut reduced = truncated;
    reduced.set_finals(candidates.iter().copied());
    Ok((ReduceOutcome::Reduced { nfa: reduced, candidate_finals: candidates }, work))
}

/// Removes the top state and makes final every state that no negative word
/// reaches, provided each positive word still reaches one of them.
pub fn reduce_kp1(nfa: &Nfa, sample: &Sample) -> Result<ReduceOutcome, ReduceError> {
    reduce_kp1_counted(nfa, sample).map(|(outcome, _)| outcome)
}

/// [`reduce_kp1`], falling back to trying every final-state subset of the
/// truncated automaton when it fails.
pub fn reduce_or_enumerate(nfa: &Nfa, sample: &Sample, cap: usize) -> Result<ReduceOutcome, ReduceError> {
    let first = reduce_kp1(nfa, sample)?;
    if first.is_reduced() {
        return Ok(first);
    }
    let k = nfa.num_states() - 1;
    if k > cap.min(MAX_SUBSET_STATES) {
        return Err(ReduceError::CapExceeded { states: k, cap: cap.min(MAX_SUBSET_STATES) });
    }
    let truncated = nfa.truncate_last();
    let found = enumerate_final_subsets(&truncated, sample).expect("size and alphabet checked");
    Ok(match found {
        Some(finals) => {
            let mut reduced = truncated;
            reduced.set_finals(finals.iter().copied());
            ReduceOutcome::Reduced { nfa: reduced, candidate_finals: finals }
        }
        None => first,
    })
}

pub const DEFAULT_ENUMERATION_CAP: usize = 12;
