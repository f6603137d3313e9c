//! Exhaustive search over all small automata. Exponential; meant for
//! producing ground truth on tiny samples.
//!
//! Automata are enumerated as bitmasks: transition `(i, a, j)` is bit
//! `a*k^2 + (i-1)*k + (j-1)` of the transition mask and state `i` is bit `i-1`
//! of the final mask. Simulation here is self-contained and does not go
//! through [`Nfa::accepts`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::nfa::Nfa;
use crate::sample::{Sample, Symbol, Word};

/// Largest `n*k^2 + k` the enumeration accepts.
pub const MAX_BITS: usize = 24;
/// Largest automaton whose final subsets are enumerated.
pub const MAX_SUBSET_STATES: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration too large: {alphabet_size}*{k}^2+{k} exceeds {MAX_BITS} bits")]
    TooLarge { alphabet_size: usize, k: usize },
    #[error("{states} states exceed the final-subset cap of {cap}")]
    TooManyStates { states: usize, cap: usize },
    #[error("automaton alphabet has {nfa} symbols, sample has {sample}")]
    AlphabetMismatch { nfa: usize, sample: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Smallest consistent size up to the search limit.
    pub k_min: Option<usize>,
    pub witness: Option<Nfa>,
    /// Transition masks plus final masks examined.
    pub states_explored: u64,
}

/// Largest `k` allowed for an alphabet of the given size.
pub fn max_feasible_k(alphabet_size: usize) -> usize {
    (1..).take_while(|&k| alphabet_size * k * k + k <= MAX_BITS).last().unwrap_or(0)
}

pub fn check_guard(alphabet_size: usize, k_max: usize) -> Result<(), OracleError> {
    if alphabet_size * k_max * k_max + k_max > MAX_BITS {
        return Err(OracleError::TooLarge { alphabet_size, k: k_max });
    }
    Ok(())
}

/// Prefix tree of the sample: node 0 is the empty word, every other node is
/// one symbol away from its parent (parents precede children).
struct Tree {
    steps: Vec<(usize, Symbol)>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl Tree {
    fn new(sample: &Sample) -> Tree {
        let mut nodes: Vec<Word> = vec![Word::empty()];
        let mut steps = vec![(0, Symbol(0))];
        let mut all: BTreeSet<Word> = BTreeSet::new();
        for w in sample.words() {
            for l in 1..=w.len() {
                all.insert(w.prefix(l));
            }
        }
        // Shortlex order puts every parent before its children.
        for p in &all {
            let parent = p.prefix(p.len() - 1);
            let pi = nodes.iter().position(|n| *n == parent).expect("parent listed");
            steps.push((pi, p.last().unwrap()));
            nodes.push(p.clone());
        }
        let index = |w: &Word| nodes.iter().position(|n| n == w).unwrap();
        Tree {
            steps,
            pos: sample.positive().iter().map(index).collect(),
            neg: sample.negative().iter().map(index).collect(),
        }
    }

    /// End-state masks of every node under the successor table `succ[a][i]`.
    fn run(&self, succ: &[Vec<u32>], ends: &mut Vec<u32>) {
        ends.clear();
        ends.push(1);
        for &(parent, a) in &self.steps[1..] {
            let mut cur = ends[parent];
            let mut next = 0u32;
            while cur != 0 {
                let i = cur.trailing_zeros() as usize;
                cur &= cur - 1;
                next |= succ[a.index()][i];
            }
            ends.push(next);
        }
    }
}

fn successor_table(mask: u64, k: usize, n: usize) -> Vec<Vec<u32>> {
    let mut succ = vec![vec![0u32; k]; n];
    for (a, row) in succ.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            let base = a * k * k + i * k;
            *cell = ((mask >> base) & ((1u64 << k) - 1)) as u32;
        }
    }
    succ
}

fn build_nfa(mask: u64, finals: u32, k: usize, n: usize) -> Nfa {
    let mut nfa = Nfa::new(k, n);
    for a in 0..n {
        for i in 1..=k {
            for j in 1..=k {
                if mask >> (a * k * k + (i - 1) * k + (j - 1)) & 1 == 1 {
                    nfa.add_transition(i, Symbol(a as u32), j);
                }
            }
        }
    }
    nfa.set_finals((1..=k).filter(|&s| finals >> (s - 1) & 1 == 1));
    nfa
}

/// Visits every consistent `(transitions, finals)` pair with `k` states in
/// enumeration order until `visit` returns false. Returns the number of
/// masks examined.
fn for_each_consistent<F>(sample: &Sample, k: usize, mut visit: F) -> u64
where
    F: FnMut(u64, u32) -> bool,
{
    let n = sample.alphabet_size();
    let tree = Tree::new(sample);
    let bits = n * k * k;
    let full: u32 = (1u32 << k) - 1;
    let mut ends = Vec::new();
    let mut explored = 0u64;
    for mask in 0..(1u64 << bits) {
        explored += 1;
        tree.run(&successor_table(mask, k, n), &mut ends);
        let blocked = tree.neg.iter().fold(0u32, |acc, &w| acc | ends[w]);
        let allowed = full & !blocked;
        if tree.pos.iter().any(|&w| ends[w] & allowed == 0) {
            continue;
        }
        for finals in (0..=full).rev() {
            explored += 1;
            if finals & blocked != 0 {
                continue;
            }
            if tree.pos.iter().all(|&w| ends[w] & finals != 0) && !visit(mask, finals) {
                return explored;
            }
        }
    }
    explored
}

/// Smallest `k <= k_max` admitting a consistent automaton, with the first
/// one found in enumeration order.
pub fn brute_min_k(sample: &Sample, k_max: usize) -> Result<OracleResult, OracleError> {
    let n = sample.alphabet_size();
    check_guard(n, k_max)?;
    let mut explored = 0;
    for k in 1..=k_max {
        let mut found = None;
        explored += for_each_consistent(sample, k, |mask, finals| {
            found = Some((mask, finals));
            false
        });
        if let Some((mask, finals)) = found {
            return Ok(OracleResult {
                k_min: Some(k),
                witness: Some(build_nfa(mask, finals, k, n)),
                states_explored: explored,
            });
        }
    }
    Ok(OracleResult { k_min: None, witness: None, states_explored: explored })
}

/// Consistent `k`-state automata in enumeration order, keeping every
/// `stride`-th one, at most `limit` in total.
pub fn consistent_nfas(sample: &Sample, k: usize, stride: usize, limit: usize) -> Result<Vec<Nfa>, OracleError> {
    let n = sample.alphabet_size();
    check_guard(n, k)?;
    let stride = stride.max(1);
    let mut out = Vec::new();
    let mut seen = 0usize;
    if limit == 0 {
        return Ok(out);
    }
    for_each_consistent(sample, k, |mask, finals| {
        if seen.is_multiple_of(stride) {
            out.push(build_nfa(mask, finals, k, n));
        }
        seen += 1;
        out.len() < limit
    });
    Ok(out)
}

/// First final-state set (largest first, then by ascending mask) that makes
/// the automaton consistent with the sample. Existing finals are ignored.
pub fn enumerate_final_subsets(nfa: &Nfa, sample: &Sample) -> Result<Option<BTreeSet<usize>>, OracleError> {
    let k = nfa.num_states();
    if k > MAX_SUBSET_STATES {
        return Err(OracleError::TooManyStates { states: k, cap: MAX_SUBSET_STATES });
    }
    if nfa.alphabet_size() != sample.alphabet_size() {
        return Err(OracleError::AlphabetMismatch { nfa: nfa.alphabet_size(), sample: sample.alphabet_size() });
    }
    let mut succ = vec![vec![0u32; k]; nfa.alphabet_size()];
    for (i, a, j) in nfa.transitions() {
        succ[a.index()][i - 1] |= 1 << (j - 1);
    }
    let tree = Tree::new(sample);
    let mut ends = Vec::new();
    tree.run(&succ, &mut ends);
    let full: u32 = (1u32 << k) - 1;
    let mut order: Vec<u32> = (0..=full).collect();
    order.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    let hit = order.into_iter().find(|&f| {
        tree.pos.iter().all(|&w| ends[w] & f != 0) && tree.neg.iter().all(|&w| ends[w] & f == 0)
    });
    Ok(hit.map(|f| (1..=k).filter(|&s| f >> (s - 1) & 1 == 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_sample() -> Sample {
        Sample::from_strs("ab", &["a", "ab", "abba", "baa"], &["aab", "b", "ba", "bab"]).unwrap()
    }

    #[test]
    fn guard() {
        assert_eq!(max_feasible_k(1), 4);
        assert_eq!(max_feasible_k(2), 3);
        assert_eq!(max_feasible_k(3), 2);
        assert!(brute_min_k(&running_sample(), 4).is_err());
    }

    #[test]
    fn running_sample_needs_three_states() {
        let s = running_sample();
        let r = brute_min_k(&s, 3).unwrap();
        assert_eq!(r.k_min, Some(3));
        let w = r.witness.unwrap();
        assert_eq!(w.num_states(), 3);
        assert!(w.consistent(&s).unwrap());
    }

    #[test]
    fn empty_word_alone_needs_one_state() {
        let s = Sample::from_strs("a", &[""], &[]).unwrap();
        let r = brute_min_k(&s, 2).unwrap();
        assert_eq!(r.k_min, Some(1));
        assert!(r.witness.unwrap().is_final(1));
    }

    #[test]
    fn second_sample_needs_three_states() {
        let s = Sample::from_strs("ab", &["", "ab", "abba", "baa"], &["aa", "aab", "b", "bab"]).unwrap();
        let r = brute_min_k(&s, 3).unwrap();
        assert_eq!(r.k_min, Some(3));
        assert!(r.witness.unwrap().consistent(&s).unwrap());
    }

    #[test]
    fn unsolvable_within_limit() {
        let s = running_sample();
        let r = brute_min_k(&s, 2).unwrap();
        assert_eq!(r.k_min, None);
        assert!(r.witness.is_none());
        assert!(r.states_explored >= (1 << 2) + (1 << 8));
    }

    #[test]
    fn enumerated_automata_are_consistent_and_distinct() {
        let s = Sample::from_strs("ab", &["a", "ab"], &["b", ""]).unwrap();
        let all = consistent_nfas(&s, 2, 1, usize::MAX).unwrap();
        assert!(!all.is_empty());
        for a in &all {
            assert!(a.consistent(&s).unwrap());
        }
        let distinct: BTreeSet<_> = all.iter().map(|a| format!("{a:?}")).collect();
        assert_eq!(distinct.len(), all.len());
        let strided = consistent_nfas(&s, 2, 3, 5).unwrap();
        assert_eq!(strided.len(), 5.min(all.len().div_ceil(3)));
        assert_eq!(strided[1], all[3]);
    }

    #[test]
    fn final_subset_search() {
        let s = running_sample();
        let w = brute_min_k(&s, 3).unwrap().witness.unwrap();
        let finals = enumerate_final_subsets(&w, &s).unwrap().unwrap();
        assert!(finals.is_superset(w.finals()));

        let mut all_final = Nfa::new(1, 1);
        all_final.add_transition(1, Symbol(0), 1);
        let s = Sample::from_strs("a", &["a", "aa"], &[]).unwrap();
        assert_eq!(enumerate_final_subsets(&all_final, &s).unwrap(), Some(BTreeSet::from([1])));
        let s = Sample::from_strs("a", &["a"], &["aa"]).unwrap();
        assert_eq!(enumerate_final_subsets(&all_final, &s).unwrap(), None);
    }
}
