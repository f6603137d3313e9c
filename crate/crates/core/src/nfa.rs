//! Nondeterministic automata over symbol indices. States are numbered `1..=k`
//! and state 1 is always initial.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::sample::{suffixes, Alphabet, Sample, Symbol, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NfaError {
    #[error("alphabet size mismatch: automaton has {nfa}, sample has {sample}")]
    AlphabetMismatch { nfa: usize, sample: usize },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Transitions are kept as sorted target sets per `(state, symbol)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nfa {
    num_states: usize,
    alphabet_size: usize,
    delta: Vec<BTreeSet<usize>>,
    finals: BTreeSet<usize>,
}

/// First rejected positive word and first accepted negative word.
pub type FirstFailures = (Option<Word>, Option<Word>);

/// Membership flags for the nested families of single-final automata.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NfaClass {
    pub in_f2: bool,
    pub in_f3: bool,
    pub in_f4: bool,
}

impl Nfa {
    pub fn new(num_states: usize, alphabet_size: usize) -> Self {
        assert!(num_states >= 1, "an automaton needs at least one state");
        Nfa {
            num_states,
            alphabet_size,
            delta: vec![BTreeSet::new(); num_states * alphabet_size],
            finals: BTreeSet::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn slot(&self, from: usize, a: Symbol) -> usize {
        assert!((1..=self.num_states).contains(&from), "state {from} out of range");
        assert!(a.index() < self.alphabet_size, "symbol {} out of range", a.0);
        (from - 1) * self.alphabet_size + a.index()
    }

    pub fn add_transition(&mut self, from: usize, a: Symbol, to: usize) -> bool {
        assert!((1..=self.num_states).contains(&to), "state {to} out of range");
        let s = self.slot(from, a);
        self.delta[s].insert(to)
    }

    pub fn remove_transition(&mut self, from: usize, a: Symbol, to: usize) -> bool {
        let s = self.slot(from, a);
        self.delta[s].remove(&to)
    }

    pub fn has_transition(&self, from: usize, a: Symbol, to: usize) -> bool {
        self.delta[self.slot(from, a)].contains(&to)
    }

    pub fn targets(&self, from: usize, a: Symbol) -> &BTreeSet<usize> {
        &self.delta[self.slot(from, a)]
    }

    /// All transitions as `(from, symbol, to)`, ordered by source, symbol, target.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, usize)> + '_ {
        (1..=self.num_states).flat_map(move |i| {
            (0..self.alphabet_size).flat_map(move |a| {
                let sym = Symbol(a as u32);
                self.targets(i, sym).iter().map(move |&j| (i, sym, j))
            })
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(BTreeSet::len).sum()
    }

    pub fn set_final(&mut self, state: usize, is_final: bool) {
        assert!((1..=self.num_states).contains(&state), "state {state} out of range");
        if is_final {
            self.finals.insert(state);
        } else {
            self.finals.remove(&state);
        }
    }

    pub fn set_finals<I: IntoIterator<Item = usize>>(&mut self, finals: I) {
        self.finals.clear();
        for f in finals {
            self.set_final(f, true);
        }
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals.contains(&state)
    }

    pub fn has_outgoing(&self, state: usize) -> bool {
        (0..self.alphabet_size).any(|a| !self.targets(state, Symbol(a as u32)).is_empty())
    }

    /// One-symbol image of a state set (indexed by state, slot 0 unused).
    pub fn step(&self, current: &[bool], a: Symbol) -> Vec<bool> {
        let mut next = vec![false; self.num_states + 1];
        for (i, _) in current.iter().enumerate().skip(1).filter(|(_, &on)| on) {
            for &j in self.targets(i, a) {
                next[j] = true;
            }
        }
        next
    }

    /// States reachable from state 1 by reading `word`.
    pub fn end_states(&self, word: &Word) -> BTreeSet<usize> {
        let mut cur = vec![false; self.num_states + 1];
        cur[1] = true;
        for &a in word.symbols() {
            cur = self.step(&cur, a);
        }
        (1..=self.num_states).filter(|&i| cur[i]).collect()
    }

    pub fn accepts(&self, word: &Word) -> bool {
        self.end_states(word).iter().any(|s| self.finals.contains(s))
    }

    pub fn check_alphabet(&self, sample: &Sample) -> Result<(), NfaError> {
        if self.alphabet_size != sample.alphabet_size() {
            return Err(NfaError::AlphabetMismatch {
                nfa: self.alphabet_size,
                sample: sample.alphabet_size(),
            });
        }
        Ok(())
    }

    pub fn consistent(&self, sample: &Sample) -> Result<bool, NfaError> {
        Ok(self.first_failures(sample)?.is_none())
    }

    /// First rejected positive word and first accepted negative word, if any.
    pub fn first_failures(&self, sample: &Sample) -> Result<Option<FirstFailures>, NfaError> {
        self.check_alphabet(sample)?;
        let bad_pos = sample.positive().iter().find(|w| !self.accepts(w)).cloned();
        let bad_neg = sample.negative().iter().find(|w| self.accepts(w)).cloned();
        if bad_pos.is_none() && bad_neg.is_none() {
            Ok(None)
        } else {
            Ok(Some((bad_pos, bad_neg)))
        }
    }

    /// Adds a terminal final state `k+1` that duplicates every transition into
    /// a final state. State 1 stays final as well when it was final.
    pub fn augment_plus_one(&self) -> Nfa {
        let k = self.num_states;
        let mut out = Nfa::new(k + 1, self.alphabet_size);
        for (i, a, j) in self.transitions() {
            out.add_transition(i, a, j);
            if self.finals.contains(&j) {
                out.add_transition(i, a, k + 1);
            }
        }
        out.set_final(k + 1, true);
        if self.finals.contains(&1) {
            out.set_final(1, true);
        }
        out
    }

    /// Membership in the nested families, for an automaton whose size is the
    /// augmented `k+1`.
    pub fn classify(&self, sample: &Sample) -> NfaClass {
        let top = self.num_states;
        let in_f2 = self.finals.len() == 1;
        let in_f3 = in_f2 && self.finals.contains(&top) && !self.has_outgoing(top);
        let in_f4 = in_f3 && {
            let last_symbols: BTreeSet<Symbol> = suffixes(sample.positive().iter())
                .into_iter()
                .filter(|u| u.len() == 1)
                .map(|u| u.symbols()[0])
                .collect();
            last_symbols.iter().all(|&u| {
                (1..top).all(|i| {
                    !self.has_transition(i, u, top)
                        || self.targets(i, u).iter().any(|&j| j < top)
                })
            })
        };
        NfaClass { in_f2, in_f3, in_f4 }
    }

    /// Swaps the unique final state with the highest-numbered state. Returns
    /// `None` when there is not exactly one final state, or when that state is
    /// the initial state of a multi-state automaton.
    pub fn relabel_final_last(&self) -> Option<Nfa> {
        if self.finals.len() != 1 {
            return None;
        }
        let f = *self.finals.iter().next().unwrap();
        let top = self.num_states;
        if f == top {
            return Some(self.clone());
        }
        if f == 1 {
            return None;
        }
        let map = |s: usize| {
            if s == f {
                top
            } else if s == top {
                f
            } else {
                s
            }
        };
        let mut out = Nfa::new(top, self.alphabet_size);
        for (i, a, j) in self.transitions() {
            out.add_transition(map(i), a, map(j));
        }
        out.set_final(top, true);
        Some(out)
    }

    /// Drops the highest-numbered state with all transitions into it.
    /// Final states other than the dropped one are kept.
    pub fn truncate_last(&self) -> Nfa {
        assert!(self.num_states >= 2, "cannot truncate a one-state automaton");
        let k = self.num_states - 1;
        let mut out = Nfa::new(k, self.alphabet_size);
        for (i, a, j) in self.transitions() {
            if i <= k && j <= k {
                out.add_transition(i, a, j);
            }
        }
        out.set_finals(self.finals.iter().copied().filter(|&f| f <= k));
        out
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for i in 1..=self.num_states {
            let shape = if self.is_final(i) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{i} [shape={shape}];");
        }
        out.push_str("  start -> q1;\n");
        let mut edges: BTreeMap<(usize, usize), Vec<char>> = BTreeMap::new();
        for (i, a, j) in self.transitions() {
            edges.entry((i, j)).or_default().push(alphabet.letter(a));
        }
        for ((i, j), labels) in edges {
            let label: Vec<String> = labels.iter().map(char::to_string).collect();
            let _ = writeln!(out, "  q{i} -> q{j} [label=\"{}\"];", label.join(","));
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text exchange format: `states`, `alphabet`, `finals`, `trans` lines.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("states {}\nalphabet {}\nfinals", self.num_states, alphabet);
        for f in &self.finals {
            let _ = write!(out, " {f}");
        }
        out.push('\n');
        for (i, a, j) in self.transitions() {
            let _ = writeln!(out, "trans {} {i} {j}", alphabet.letter(a));
        }
        out
    }

    pub fn parse(text: &str) -> Result<(Nfa, Alphabet), NfaError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let syntax = |line: usize, msg: &str| NfaError::Syntax { line, msg: msg.to_string() };

        let (ln, l) = lines.next().ok_or_else(|| syntax(0, "empty input"))?;
        let k: usize = l
            .strip_prefix("states")
            .and_then(|r| r.trim().parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| syntax(ln, "expected `states <k>` with k >= 1"))?;

        let (ln, l) = lines.next().ok_or_else(|| syntax(ln, "missing alphabet line"))?;
        let letters = l
            .strip_prefix("alphabet")
            .ok_or_else(|| syntax(ln, "expected `alphabet <letters>`"))?;
        let alphabet = Alphabet::parse(letters).map_err(|e| syntax(ln, &e.to_string()))?;

        let (ln, l) = lines.next().ok_or_else(|| syntax(ln, "missing finals line"))?;
        let rest = l
            .strip_prefix("finals")
            .ok_or_else(|| syntax(ln, "expected `finals <states...>`"))?;
        let mut nfa = Nfa::new(k, alphabet.len());
        let state = |tok: &str, line: usize| -> Result<usize, NfaError> {
            tok.parse::<usize>()
                .ok()
                .filter(|s| (1..=k).contains(s))
                .ok_or_else(|| syntax(line, &format!("bad state {tok:?}")))
        };
        for tok in rest.split_whitespace() {
            nfa.set_final(state(tok, ln)?, true);
        }

        for (ln, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "trans" {
                return Err(syntax(ln, "expected `trans <letter> <from> <to>`"));
            }
            let mut chars = toks[1].chars();
            let sym = match (chars.next(), chars.next()) {
                (Some(c), None) => alphabet
                    .symbol(c)
                    .ok_or_else(|| syntax(ln, &format!("letter {c:?} not in alphabet")))?,
                _ => return Err(syntax(ln, "transition label must be one letter")),
            };
            nfa.add_transition(state(toks[2], ln)?, sym, state(toks[3], ln)?);
        }
        Ok((nfa, alphabet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_sample() -> Sample {
        Sample::from_strs("ab", &["a", "ab", "abba", "baa"], &["aab", "b", "ba", "bab"]).unwrap()
    }

    /// A minimal 3-state automaton for the running sample, final state 2.
    fn running_nfa() -> Nfa {
        let (a, b) = (Symbol(0), Symbol(1));
        let mut n = Nfa::new(3, 2);
        n.add_transition(1, a, 2);
        n.add_transition(3, a, 1);
        n.add_transition(1, b, 3);
        n.add_transition(2, b, 1);
        n.add_transition(2, b, 2);
        n.set_final(2, true);
        n
    }

    /// Explicit path enumeration: independent of the set-propagation route.
    fn accepts_by_paths(n: &Nfa, w: &Word) -> bool {
        fn go(n: &Nfa, state: usize, rest: &[Symbol]) -> bool {
            match rest.split_first() {
                None => n.is_final(state),
                Some((&a, tail)) => n.targets(state, a).iter().any(|&j| go(n, j, tail)),
            }
        }
        go(n, 1, w.symbols())
    }

    fn all_words(n: usize, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for a in 0..n {
                    let mut v = w.symbols().to_vec();
                    v.push(Symbol(a as u32));
                    next.push(Word::from(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn trivial_acceptance() {
        let mut n = Nfa::new(1, 2);
        assert!(!n.accepts(&Word::empty()));
        n.set_final(1, true);
        assert!(n.accepts(&Word::empty()));
        assert!(!n.accepts(&Word::from_indices([0])));
    }

    #[test]
    fn reference_automata_fit_sample() {
        let s = running_sample();
        assert!(running_nfa().consistent(&s).unwrap());
        let aug = running_nfa().augment_plus_one();
        for w in s.positive() {
            assert!(aug.accepts(w));
        }
        for w in s.negative() {
            assert!(!aug.accepts(w));
        }
    }

    #[test]
    fn universal_automaton_is_inconsistent() {
        let mut n = Nfa::new(1, 2);
        n.add_transition(1, Symbol(0), 1);
        n.add_transition(1, Symbol(1), 1);
        n.set_final(1, true);
        assert!(!n.consistent(&running_sample()).unwrap());
        let other = Sample::from_strs("abc", &["a"], &[]).unwrap();
        assert!(matches!(n.consistent(&other), Err(NfaError::AlphabetMismatch { .. })));
    }

    #[test]
    fn augmentation_duplicates_final_transitions() {
        let (a, b) = (Symbol(0), Symbol(1));
        let aug = running_nfa().augment_plus_one();
        assert_eq!(aug.num_states(), 4);
        assert!(aug.has_transition(1, a, 4));
        assert!(aug.has_transition(2, b, 4));
        assert_eq!(aug.num_transitions(), 7);
        assert_eq!(aug.finals().iter().copied().collect::<Vec<_>>(), [4]);
        assert!(!aug.has_outgoing(4));
        assert!(aug.classify(&running_sample()).in_f4);
    }

    #[test]
    fn augmentation_without_finals() {
        let mut n = Nfa::new(2, 1);
        n.add_transition(1, Symbol(0), 2);
        let aug = n.augment_plus_one();
        assert_eq!(aug.num_transitions(), 1);
        assert_eq!(aug.finals().iter().copied().collect::<Vec<_>>(), [3]);
    }

    #[test]
    fn augmentation_keeps_initial_final_for_empty_word() {
        let mut n = running_nfa();
        n.set_final(1, true);
        let aug = n.augment_plus_one();
        assert_eq!(aug.finals().iter().copied().collect::<Vec<_>>(), [1, 4]);
        assert!(aug.accepts(&Word::empty()));
    }

    #[test]
    fn classification_flags() {
        let s = running_sample();
        let mut two = running_nfa();
        two.set_final(3, true);
        assert_eq!(two.classify(&s), NfaClass::default());

        // Extra b-transition from 1 to 2 keeps the single terminal final state.
        let mut terminal = running_nfa().augment_plus_one();
        terminal.add_transition(1, Symbol(1), 2);
        assert!(terminal.consistent(&s).unwrap());
        let c = terminal.classify(&s);
        assert!(c.in_f2 && c.in_f3);

        // Incoming transition to the final state without a clone.
        let mut no_clone = Nfa::new(2, 2);
        no_clone.add_transition(1, Symbol(0), 2);
        no_clone.set_final(2, true);
        let s2 = Sample::from_strs("ab", &["a"], &["b"]).unwrap();
        let c = no_clone.classify(&s2);
        assert!(c.in_f3 && !c.in_f4);
    }

    #[test]
    fn relabeling_moves_final_to_top() {
        let n = running_nfa();
        let r = n.relabel_final_last().unwrap();
        assert_eq!(r.finals().iter().copied().collect::<Vec<_>>(), [3]);
        assert!(r.consistent(&running_sample()).unwrap());
        let mut init_final = Nfa::new(2, 1);
        init_final.set_final(1, true);
        assert!(init_final.relabel_final_last().is_none());
    }

    #[test]
    fn dot_rendering() {
        let alpha = Alphabet::parse("ab").unwrap();
        let one = Nfa::new(1, 2).to_dot(&alpha);
        assert_eq!(one.matches("[shape=circle]").count(), 1);
        assert!(one.contains("start -> q1"));

        let mut n = Nfa::new(2, 2);
        n.add_transition(1, Symbol(0), 2);
        n.set_final(2, true);
        let dot = n.to_dot(&alpha);
        assert!(dot.contains("q1 -> q2 [label=\"a\"]"));
        assert!(dot.contains("q2 [shape=doublecircle]"));
        n.add_transition(1, Symbol(1), 2);
        assert!(n.to_dot(&alpha).contains("q1 -> q2 [label=\"a,b\"]"));
    }

    #[test]
    fn exchange_format_round_trip() {
        let alpha = Alphabet::parse("ab").unwrap();
        let n = running_nfa();
        let text = n.render(&alpha);
        assert!(text.starts_with("states 3\nalphabet ab\nfinals 2\ntrans a 1 2\n"));
        let (back, alpha2) = Nfa::parse(&text).unwrap();
        assert_eq!(back, n);
        assert_eq!(alpha2, alpha);
        assert!(Nfa::parse("states 2\nalphabet ab\nfinals 3\n").is_err());
        assert!(Nfa::parse("states 2\nalphabet ab\nfinals\ntrans c 1 2\n").is_err());
    }

    /// Exhaustive for k <= 2; for k = 3 a fixed stride through the 2^18
    /// transition masks.
    #[test]
    fn set_simulation_agrees_with_path_enumeration() {
        let words = all_words(2, 4);
        for k in 1..=3usize {
            let bits = 2 * k * k;
            let total: u64 = 1 << bits;
            let stride = if k <= 2 { 1 } else { 997 };
            let mut mask = 0u64;
            while mask < total {
                let mut n = Nfa::new(k, 2);
                for bit in 0..bits {
                    if mask >> bit & 1 == 1 {
                        let a = bit / (k * k);
                        let i = bit % (k * k) / k + 1;
                        let j = bit % k + 1;
                        n.add_transition(i, Symbol(a as u32), j);
                    }
                }
                for fmask in 0..(1u32 << k) {
                    n.set_finals((1..=k).filter(|s| fmask >> (s - 1) & 1 == 1));
                    for w in &words {
                        assert_eq!(n.accepts(w), accepts_by_paths(&n, w));
                    }
                }
                mask += stride;
            }
        }
    }
}
