//! Samples of positive and negative words, their prefix/suffix closures and
//! the prefix-tree upper bound.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nfa::Nfa;

/// Token used for the empty word in every text format.
pub const EPSILON_TOKEN: &str = "<eps>";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("word {0:?} is both positive and negative")]
    Contradiction(String),
    #[error("symbol {symbol:?} on line {line} is not in the alphabet")]
    UnknownSymbol { line: usize, symbol: char },
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("cannot draw {requested} distinct words: only {available} exist")]
    Infeasible { requested: usize, available: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over symbol indices. Ordered by length first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(it: I) -> Self {
        Word(it.into_iter().map(Symbol).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    /// The first `len` symbols.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// Everything from position `start` on.
    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Non-empty prefixes, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (1..=self.len()).map(move |l| self.prefix(l))
    }

    /// Non-empty suffixes, shortest first.
    pub fn suffixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.len()).rev().map(move |s| self.suffix_from(s))
    }

    pub fn has_suffix(&self, suffix: &Word) -> bool {
        self.0.ends_with(&suffix.0)
    }

    pub fn has_prefix(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

/// Display letters for symbol indices. Order defines the indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self, SampleError> {
        if letters.is_empty() {
            return Err(SampleError::Alphabet("alphabet is empty".into()));
        }
        let mut seen = HashSet::new();
        for &c in &letters {
            if c.is_whitespace() || c == '#' {
                return Err(SampleError::Alphabet(format!("letter {c:?} is reserved")));
            }
            if !seen.insert(c) {
                return Err(SampleError::Alphabet(format!("letter {c:?} repeated")));
            }
        }
        Ok(Alphabet(letters))
    }

    /// `a`, `b`, `c`, ... then digits and upper-case letters.
    pub fn standard(size: usize) -> Result<Self, SampleError> {
        let pool: Vec<char> = ('a'..='z').chain('0'..='9').chain('A'..='Z').collect();
        if size == 0 || size > pool.len() {
            return Err(SampleError::Alphabet(format!(
                "standard alphabets have 1..={} letters",
                pool.len()
            )));
        }
        Ok(Alphabet(pool[..size].to_vec()))
    }

    pub fn parse(text: &str) -> Result<Self, SampleError> {
        Alphabet::new(text.trim().chars().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter(&self, s: Symbol) -> char {
        self.0[s.index()]
    }

    pub fn symbol(&self, c: char) -> Option<Symbol> {
        self.0.iter().position(|&l| l == c).map(|i| Symbol(i as u32))
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    /// Renders a word, using the epsilon token for the empty word.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            EPSILON_TOKEN.to_string()
        } else {
            w.symbols().iter().map(|&s| self.letter(s)).collect()
        }
    }

    /// Parses a word token; on failure returns the offending character.
    pub fn parse_word(&self, token: &str) -> Result<Word, char> {
        if token == EPSILON_TOKEN {
            return Ok(Word::empty());
        }
        token
            .chars()
            .map(|c| self.symbol(c).ok_or(c))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    /// Parses a word written with this alphabet; panics on unknown letters.
    /// Intended for fixtures.
    pub fn word(&self, token: &str) -> Word {
        self.parse_word(token)
            .unwrap_or_else(|c| panic!("letter {c:?} not in alphabet"))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    alphabet: Alphabet,
    pos: BTreeSet<Word>,
    neg: BTreeSet<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleStats {
    /// Total length of all words.
    pub sigma: usize,
    pub num_prefixes: usize,
    pub num_suffixes: usize,
    pub pta_states: usize,
}

impl Sample {
    pub fn new<P, N>(alphabet: Alphabet, pos: P, neg: N) -> Result<Self, SampleError>
    where
        P: IntoIterator<Item = Word>,
        N: IntoIterator<Item = Word>,
    {
        let pos: BTreeSet<Word> = pos.into_iter().collect();
        let neg: BTreeSet<Word> = neg.into_iter().collect();
        for w in pos.iter().chain(neg.iter()) {
            if let Some(&s) = w.symbols().iter().find(|s| s.index() >= alphabet.len()) {
                return Err(SampleError::Alphabet(format!(
                    "symbol index {} outside alphabet of size {}",
                    s.0,
                    alphabet.len()
                )));
            }
        }
        if let Some(w) = pos.intersection(&neg).next() {
            return Err(SampleError::Contradiction(alphabet.render(w)));
        }
        Ok(Sample { alphabet, pos, neg })
    }

    /// Builds a sample from letter strings; `""` or `"<eps>"` is the empty word.
    pub fn from_strs(letters: &str, pos: &[&str], neg: &[&str]) -> Result<Self, SampleError> {
        let alphabet = Alphabet::parse(letters)?;
        let conv = |ws: &[&str]| -> Result<Vec<Word>, SampleError> {
            ws.iter()
                .map(|t| {
                    let t = if t.is_empty() { EPSILON_TOKEN } else { t };
                    alphabet
                        .parse_word(t)
                        .map_err(|symbol| SampleError::UnknownSymbol { line: 0, symbol })
                })
                .collect()
        };
        let p = conv(pos)?;
        let n = conv(neg)?;
        Sample::new(alphabet, p, n)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn positive(&self) -> &BTreeSet<Word> {
        &self.pos
    }

    pub fn negative(&self) -> &BTreeSet<Word> {
        &self.neg
    }

    /// Positive words then negative words, each class in canonical order.
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.pos.iter().chain(self.neg.iter())
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_positive(&self, w: &Word) -> bool {
        self.pos.contains(w)
    }

    pub fn has_empty_positive(&self) -> bool {
        self.pos.contains(&Word::empty())
    }

    pub fn has_empty_negative(&self) -> bool {
        self.neg.contains(&Word::empty())
    }

    pub fn sigma(&self) -> usize {
        self.words().map(Word::len).sum()
    }

    pub fn prefixes(&self) -> BTreeSet<Word> {
        prefixes(self.words())
    }

    pub fn suffixes(&self) -> BTreeSet<Word> {
        suffixes(self.words())
    }

    pub fn pta_size(&self) -> usize {
        1 + prefixes(self.pos.iter()).len()
    }

    /// The prefix tree acceptor of the positive words: state 1 is λ and every
    /// non-empty positive prefix gets its own state in canonical order.
    pub fn pta(&self) -> Nfa {
        let prefs: Vec<Word> = prefixes(self.pos.iter()).into_iter().collect();
        let state_of = |w: &Word| -> usize {
            if w.is_empty() {
                1
            } else {
                2 + prefs.binary_search(w).expect("prefix present")
            }
        };
        let mut nfa = Nfa::new(prefs.len() + 1, self.alphabet_size());
        for p in &prefs {
            let parent = p.prefix(p.len() - 1);
            nfa.add_transition(state_of(&parent), p.last().unwrap(), state_of(p));
        }
        for w in &self.pos {
            nfa.set_final(state_of(w), true);
        }
        nfa
    }

    pub fn stats(&self) -> SampleStats {
        SampleStats {
            sigma: self.sigma(),
            num_prefixes: self.prefixes().len(),
            num_suffixes: self.suffixes().len(),
            pta_states: self.pta_size(),
        }
    }

    /// Same sample with every word reversed.
    pub fn reversed(&self) -> Sample {
        Sample {
            alphabet: self.alphabet.clone(),
            pos: self.pos.iter().map(Word::reversed).collect(),
            neg: self.neg.iter().map(Word::reversed).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, SampleError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(alpha) = &alphabet else {
                let rest = line.strip_prefix("alphabet:").ok_or_else(|| SampleError::Syntax {
                    line: line_no,
                    msg: "expected `alphabet: <letters>` header".into(),
                })?;
                alphabet = Some(Alphabet::parse(rest).map_err(|e| SampleError::Syntax {
                    line: line_no,
                    msg: e.to_string(),
                })?);
                continue;
            };
            let mut parts = line.split_whitespace();
            let class = parts.next().unwrap();
            let token = parts.next().ok_or_else(|| SampleError::Syntax {
                line: line_no,
                msg: "missing word (use <eps> for the empty word)".into(),
            })?;
            if parts.next().is_some() {
                return Err(SampleError::Syntax {
                    line: line_no,
                    msg: "trailing tokens after word".into(),
                });
            }
            let word = alpha
                .parse_word(token)
                .map_err(|symbol| SampleError::UnknownSymbol { line: line_no, symbol })?;
            match class {
                "+" => pos.push(word),
                "-" => neg.push(word),
                other => {
                    return Err(SampleError::Syntax {
                        line: line_no,
                        msg: format!("expected `+` or `-`, found {other:?}"),
                    })
                }
            }
        }
        let alphabet = alphabet.ok_or(SampleError::Syntax {
            line: 0,
            msg: "missing alphabet header".into(),
        })?;
        Sample::new(alphabet, pos, neg)
    }

    pub fn render(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.alphabet);
        for w in &self.pos {
            out.push_str(&format!("+ {}\n", self.alphabet.render(w)));
        }
        for w in &self.neg {
            out.push_str(&format!("- {}\n", self.alphabet.render(w)));
        }
        out
    }
}

/// Union of non-empty prefixes, in canonical order.
pub fn prefixes<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> BTreeSet<Word> {
    words.into_iter().flat_map(|w| w.prefixes()).collect()
}

/// Union of non-empty suffixes, in canonical order.
pub fn suffixes<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> BTreeSet<Word> {
    words.into_iter().flat_map(|w| w.suffixes()).collect()
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub alphabet_size: usize,
    pub num_pos: usize,
    pub num_neg: usize,
    pub max_len: usize,
    pub seed: u64,
    pub allow_empty_positive: bool,
}

impl GenParams {
    pub fn new(alphabet_size: usize, num_pos: usize, num_neg: usize, max_len: usize, seed: u64) -> Self {
        GenParams {
            alphabet_size,
            num_pos,
            num_neg,
            max_len,
            seed,
            allow_empty_positive: false,
        }
    }
}

const ENUMERATE_LIMIT: usize = 1 << 16;

/// Number of words of length at most `max_len`, saturating.
fn count_words(n: usize, max_len: usize) -> usize {
    let mut total: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(n);
    }
    total
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word((0..len).map(|_| Symbol(rng.gen_range(0..n) as u32)).collect())
}

/// Draws a random sample with disjoint classes; reproducible for a fixed seed.
pub fn gen_random_sample(params: &GenParams) -> Result<Sample, SampleError> {
    let alphabet = Alphabet::standard(params.alphabet_size)?;
    let n = params.alphabet_size;
    let available = count_words(n, params.max_len);
    let requested = params.num_pos + params.num_neg;
    let pos_available = if params.allow_empty_positive { available } else { available - 1 };
    if requested > available || params.num_pos > pos_available {
        return Err(SampleError::Infeasible { requested, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();

    if available <= ENUMERATE_LIMIT {
        let mut pool: Vec<Word> = Vec::with_capacity(available);
        let mut layer = vec![Word::empty()];
        for _ in 0..=params.max_len {
            let mut next = Vec::new();
            for w in &layer {
                for s in 0..n {
                    let mut v = w.0.clone();
                    v.push(Symbol(s as u32));
                    next.push(Word(v));
                }
            }
            pool.append(&mut layer);
            layer = next;
        }
        pool.shuffle(&mut rng);
        let mut rest = Vec::new();
        for w in pool {
            if pos.len() < params.num_pos && (params.allow_empty_positive || !w.is_empty()) {
                pos.insert(w);
            } else {
                rest.push(w);
            }
        }
        neg.extend(rest.into_iter().take(params.num_neg));
    } else {
        let mut seen = HashSet::new();
        let max_attempts = 1000 * (requested + 1);
        let mut attempts = 0;
        while pos.len() < params.num_pos || neg.len() < params.num_neg {
            attempts += 1;
            if attempts > max_attempts {
                return Err(SampleError::Infeasible { requested, available });
            }
            let w = random_word(&mut rng, n, params.max_len);
            if !seen.insert(w.clone()) {
                continue;
            }
            if pos.len() < params.num_pos && (params.allow_empty_positive || !w.is_empty()) {
                pos.insert(w);
            } else if neg.len() < params.num_neg {
                neg.insert(w);
            }
        }
    }
    Sample::new(alphabet, pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_sample() -> Sample {
        Sample::from_strs("ab", &["a", "ab", "abba", "baa"], &["aab", "b", "ba", "bab"]).unwrap()
    }

    fn render_all(s: &Sample, ws: &BTreeSet<Word>) -> Vec<String> {
        ws.iter().map(|w| s.alphabet().render(w)).collect()
    }

    #[test]
    fn parses_running_sample() {
        let text = "alphabet: ab\n+ a\n+ ab\n+ abba\n+ baa\n- aab\n- b\n- ba\n- bab\n";
        let s = Sample::parse(text).unwrap();
        assert_eq!(s.positive().len(), 4);
        assert_eq!(s.negative().len(), 4);
        assert_eq!(s, running_sample());
    }

    #[test]
    fn epsilon_and_comments() {
        let s = Sample::parse("# header comment\nalphabet: ab\n# c\n+ <eps>\n+ a\n+ a\n").unwrap();
        assert!(s.has_empty_positive());
        assert_eq!(s.positive().len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Sample::parse("alphabet: ab\n+ a\n- a\n"),
            Err(SampleError::Contradiction(_))
        ));
        assert_eq!(
            Sample::parse("alphabet: ab\n+ a\n+ ac\n"),
            Err(SampleError::UnknownSymbol { line: 3, symbol: 'c' })
        );
        assert!(matches!(
            Sample::parse("alphabet: ab\n* a\n"),
            Err(SampleError::Syntax { line: 2, .. })
        ));
        assert!(matches!(Sample::parse("+ a\n"), Err(SampleError::Syntax { line: 1, .. })));
        assert!(matches!(Sample::parse("alphabet: aa\n"), Err(SampleError::Syntax { .. })));
    }

    #[test]
    fn prefix_and_suffix_sets() {
        let s = Sample::from_strs("ab", &["ab"], &[]).unwrap();
        assert_eq!(render_all(&s, &s.prefixes()), ["a", "ab"]);
        assert_eq!(render_all(&s, &s.suffixes()), ["b", "ab"]);

        let s = Sample::from_strs("ab", &["abba"], &[]).unwrap();
        assert_eq!(render_all(&s, &s.suffixes()), ["a", "ba", "bba", "abba"]);

        let s = Sample::from_strs("ab", &[""], &[]).unwrap();
        assert!(s.prefixes().is_empty());
    }

    /// Brute-force closure: every (start, end) slice anchored at one end.
    fn oracle_closure(s: &Sample, anchored_start: bool) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for w in s.words() {
            let txt = s.alphabet().render(w);
            if w.is_empty() {
                continue;
            }
            for l in 1..=txt.len() {
                let piece = if anchored_start { &txt[..l] } else { &txt[txt.len() - l..] };
                if !out.iter().any(|x| x == piece) {
                    out.push(piece.to_string());
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    #[test]
    fn running_sample_closures_match_enumeration() {
        let s = running_sample();
        let prefs = render_all(&s, &s.prefixes());
        assert_eq!(prefs, oracle_closure(&s, true));
        assert_eq!(prefs, ["a", "b", "aa", "ab", "ba", "aab", "abb", "baa", "bab", "abba"]);
        let sufs = render_all(&s, &s.suffixes());
        assert_eq!(sufs, oracle_closure(&s, false));
        assert_eq!(sufs, ["a", "b", "aa", "ab", "ba", "aab", "baa", "bab", "bba", "abba"]);
    }

    #[test]
    fn pta_bound() {
        assert_eq!(running_sample().pta_size(), 8);
        assert_eq!(Sample::from_strs("ab", &[""], &[]).unwrap().pta_size(), 1);
        assert_eq!(Sample::from_strs("ab", &[], &["a"]).unwrap().pta_size(), 1);
        let s = running_sample();
        let pta = s.pta();
        assert_eq!(pta.num_states(), 8);
        assert!(pta.consistent(&s).unwrap());
    }

    #[test]
    fn stats_running_sample() {
        let st = running_sample().stats();
        assert_eq!(st, SampleStats { sigma: 19, num_prefixes: 10, num_suffixes: 10, pta_states: 8 });
    }

    #[test]
    fn generator_is_reproducible_and_disjoint() {
        let p = GenParams::new(2, 4, 4, 4, 1);
        let a = gen_random_sample(&p).unwrap();
        let b = gen_random_sample(&p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.positive().len(), 4);
        assert_eq!(a.negative().len(), 4);
        assert!(!a.has_empty_positive());

        let u = gen_random_sample(&GenParams::new(1, 2, 2, 3, 7)).unwrap();
        assert_eq!(u.alphabet_size(), 1);
        assert_eq!(u.len(), 4);
    }

    #[test]
    fn generator_rejects_infeasible() {
        assert_eq!(
            gen_random_sample(&GenParams::new(2, 20, 20, 2, 0)),
            Err(SampleError::Infeasible { requested: 40, available: 7 })
        );
    }

    #[test]
    fn generator_large_space_uses_rejection() {
        let s = gen_random_sample(&GenParams::new(3, 30, 30, 20, 9)).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(s, gen_random_sample(&GenParams::new(3, 30, 30, 20, 9)).unwrap());
    }
}
