//! Word decompositions `w = uv` for the hybrid models.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sample::{prefixes, suffixes, Alphabet, Sample, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("split has no cut for word {0:?}")]
    MissingWord(String),
    #[error("cut {cut} is out of range for word {word:?}")]
    CutOutOfRange { word: String, cut: usize },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Cut position per sample word: `u = w[..cut]`, `v = w[cut..]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitAssignment {
    cuts: BTreeMap<Word, usize>,
}

impl SplitAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every word kept whole as a prefix (`cut = |w|`).
    pub fn all_prefix(sample: &Sample) -> Self {
        SplitAssignment { cuts: sample.words().map(|w| (w.clone(), w.len())).collect() }
    }

    /// Every word kept whole as a suffix (`cut = 0`).
    pub fn all_suffix(sample: &Sample) -> Self {
        SplitAssignment { cuts: sample.words().map(|w| (w.clone(), 0)).collect() }
    }

    pub fn set(&mut self, word: Word, cut: usize) {
        assert!(cut <= word.len(), "cut beyond word length");
        self.cuts.insert(word, cut);
    }

    pub fn cut(&self, w: &Word) -> Option<usize> {
        self.cuts.get(w).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, usize)> {
        self.cuts.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Checks that every sample word has an in-range cut.
    pub fn validate(&self, sample: &Sample) -> Result<(), SplitError> {
        for w in sample.words() {
            match self.cut(w) {
                None => return Err(SplitError::MissingWord(sample.alphabet().render(w))),
                Some(c) if c > w.len() => {
                    return Err(SplitError::CutOutOfRange {
                        word: sample.alphabet().render(w),
                        cut: c,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// `(u, v)` parts for `w`, if the word is covered.
    pub fn parts(&self, w: &Word) -> Option<(Word, Word)> {
        self.cut(w).map(|c| (w.prefix(c), w.suffix_from(c)))
    }

    /// Mirror image: cuts for the reversed words.
    pub fn reversed(&self) -> SplitAssignment {
        SplitAssignment {
            cuts: self.cuts.iter().map(|(w, &c)| (w.reversed(), w.len() - c)).collect(),
        }
    }

    /// One `<word> <cut>` line per word.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for (w, c) in &self.cuts {
            let _ = writeln!(out, "{} {c}", alphabet.render(w));
        }
        out
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, SplitError> {
        let mut split = SplitAssignment::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| SplitError::Syntax { line: n + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [word, cut] = toks.as_slice() else {
                return Err(err("expected `<word> <cut>`".into()));
            };
            let w = alphabet
                .parse_word(word)
                .map_err(|c| err(format!("letter {c:?} not in alphabet")))?;
            let c: usize = cut.parse().map_err(|_| err(format!("bad cut {cut:?}")))?;
            if c > w.len() {
                return Err(SplitError::CutOutOfRange { word: word.to_string(), cut: c });
            }
            split.cuts.insert(w, c);
        }
        Ok(split)
    }
}

/// `|Pref(S_u)| + k * |Suf(S_v)|`.
pub fn fitness(sample: &Sample, split: &SplitAssignment, k: usize) -> usize {
    let (us, vs): (Vec<Word>, Vec<Word>) = sample
        .words()
        .map(|w| split.parts(w).expect("split covers the sample"))
        .unzip();
    prefixes(us.iter()).len() + k * suffixes(vs.iter()).len()
}

/// Uniform cut per word.
pub fn random_split(sample: &Sample, seed: u64) -> SplitAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = SplitAssignment::new();
    for w in sample.words() {
        let c = rng.gen_range(0..=w.len());
        split.set(w.clone(), c);
    }
    split
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Anchor {
    Prefix,
    Suffix,
}

/// Greedy cover of the sample by the highest-scoring anchored factors, where a
/// factor `u` scores `|u| * |Omega(u)|` and `Omega(u)` counts the sample words
/// that start (or end) with it.
fn best_cover(sample: &Sample, anchor: Anchor) -> SplitAssignment {
    let words: Vec<&Word> = sample.words().collect();
    let candidates = match anchor {
        Anchor::Prefix => sample.prefixes(),
        Anchor::Suffix => sample.suffixes(),
    };
    let matches = |w: &Word, u: &Word| match anchor {
        Anchor::Prefix => w.has_prefix(u),
        Anchor::Suffix => w.has_suffix(u),
    };
    // Ties: longer first, then lexicographic reading away from the anchor's
    // far end (plain order for suffixes, reversed order for prefixes).
    let tie_key = |u: &Word| match anchor {
        Anchor::Prefix => u.reversed(),
        Anchor::Suffix => u.clone(),
    };
    let mut scored: Vec<(usize, Word)> = candidates
        .into_iter()
        .map(|u| {
            let omega = words.iter().filter(|w| matches(w, &u)).count();
            (u.len() * omega, u)
        })
        .collect();
    scored.sort_by(|(sa, ua), (sb, ub)| {
        sb.cmp(sa)
            .then(ub.len().cmp(&ua.len()))
            .then_with(|| tie_key(ua).symbols().cmp(tie_key(ub).symbols()))
    });

    let mut split = SplitAssignment::new();
    for w in &words {
        if w.is_empty() {
            split.set((*w).clone(), 0);
        }
    }
    for (_, u) in &scored {
        if split.len() == words.len() {
            break;
        }
        for w in &words {
            if split.cut(w).is_none() && matches(w, u) {
                let c = match anchor {
                    Anchor::Prefix => u.len(),
                    Anchor::Suffix => w.len() - u.len(),
                };
                split.set((*w).clone(), c);
            }
        }
    }
    split
}

pub fn best_suffix_split(sample: &Sample) -> SplitAssignment {
    best_cover(sample, Anchor::Suffix)
}

pub fn best_prefix_split(sample: &Sample) -> SplitAssignment {
    best_cover(sample, Anchor::Prefix)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlsInit {
    Random,
    BestPrefix,
    BestSuffix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IlsParams {
    pub max_iters: usize,
    pub seed: u64,
    pub init: IlsInit,
}

impl IlsParams {
    /// Ten iterations per sample word.
    pub fn default_for(sample: &Sample, seed: u64, init: IlsInit) -> Self {
        IlsParams { max_iters: 10 * sample.len(), seed, init }
    }
}

/// Roulette weight of each word: `0.75/|S| + 0.25 * |w| / sum |w_i|`.
pub fn roulette_weights(sample: &Sample) -> Vec<f64> {
    let n = sample.len() as f64;
    let sigma = sample.sigma() as f64;
    sample
        .words()
        .map(|w| {
            let len_part = if sigma > 0.0 { 0.25 * w.len() as f64 / sigma } else { 0.0 };
            0.75 / n + len_part
        })
        .collect()
}

/// Prefix/suffix reference counts of the current decomposition.
struct Closure {
    pref: HashMap<Word, usize>,
    suf: HashMap<Word, usize>,
    k: usize,
}

impl Closure {
    fn fitness(&self) -> usize {
        self.pref.len() + self.k * self.suf.len()
    }

    fn apply(&mut self, w: &Word, cut: usize, add: bool) {
        let bump = |map: &mut HashMap<Word, usize>, key: Word| {
            if add {
                *map.entry(key).or_insert(0) += 1;
            } else if let Some(c) = map.get_mut(&key) {
                *c -= 1;
                if *c == 0 {
                    map.remove(&key);
                }
            }
        };
        for l in 1..=cut {
            bump(&mut self.pref, w.prefix(l));
        }
        for s in cut..w.len() {
            bump(&mut self.suf, w.suffix_from(s));
        }
    }

    /// Best cut for `w` against the closure of all other words; ties go to
    /// the smallest cut.
    fn best_cut(&self, w: &Word) -> usize {
        let len = w.len();
        let mut new_pref = vec![0usize; len + 1];
        for c in 1..=len {
            new_pref[c] = new_pref[c - 1] + usize::from(!self.pref.contains_key(&w.prefix(c)));
        }
        let mut new_suf = vec![0usize; len + 1];
        for c in (0..len).rev() {
            new_suf[c] = new_suf[c + 1] + usize::from(!self.suf.contains_key(&w.suffix_from(c)));
        }
        (0..=len)
            .min_by_key(|&c| (new_pref[c] + self.k * new_suf[c], c))
            .unwrap_or(0)
    }
}

/// Iterated local search over cut positions. Returns the split and the
/// fitness after each iteration (first entry: the initial split).
pub fn ils_split_traced(sample: &Sample, k: usize, params: &IlsParams) -> (SplitAssignment, Vec<usize>) {
    let mut split = match params.init {
        IlsInit::Random => random_split(sample, params.seed),
        IlsInit::BestPrefix => best_prefix_split(sample),
        IlsInit::BestSuffix => best_suffix_split(sample),
    };
    let words: Vec<Word> = sample.words().cloned().collect();
    let mut closure = Closure { pref: HashMap::new(), suf: HashMap::new(), k };
    for w in &words {
        closure.apply(w, split.cut(w).unwrap(), true);
    }
    let mut trace = vec![closure.fitness()];
    if words.is_empty() || params.max_iters == 0 {
        return (split, trace);
    }
    let wheel = WeightedIndex::new(roulette_weights(sample)).expect("positive weights");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    for _ in 0..params.max_iters {
        let w = &words[wheel.sample(&mut rng)];
        let old = split.cut(w).unwrap();
        closure.apply(w, old, false);
        let best = closure.best_cut(w);
        closure.apply(w, best, true);
        split.set(w.clone(), best);
        trace.push(closure.fitness());
    }
    (split, trace)
}

pub fn ils_split(sample: &Sample, k: usize, params: &IlsParams) -> SplitAssignment {
    ils_split_traced(sample, k, params).0
}
