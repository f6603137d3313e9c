//! SAT models for "is there an NFA of this size consistent with the sample".
//!
//! Every model is built by one generic routine over a per-word cut `w = uv`:
//! the prefix model cuts every word at its end, the suffix model at its start,
//! and the hybrid models use an explicit [`SplitAssignment`]. Path variables
//! are allocated for the prefixes of the `u` parts (`p[u,i]`: state `i` is
//! reachable from state 1 by reading `u`) and for the suffixes of the `v`
//! parts (`s[v,i,j]`: state `j` is reachable from `i` by reading `v`).
//!
//! The `(k+1)` models describe automata with `k+1` states in which `k+1` is the
//! only final state and has no outgoing transitions. They drop the final-state
//! variables and reduce the suffix paths to a single fixed end point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cnf::{Assignment, Cnf, CnfBuilder, CnfError, Lit, SemVar, VarMap};
use crate::nfa::Nfa;
use crate::sample::{prefixes, suffixes, Sample, Symbol, Word};
use crate::split::{SplitAssignment, SplitError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("the (k+1) models require the empty word not to be positive")]
    EmptyWordPositive,
    #[error("k must be at least 1")]
    ZeroStates,
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("assignment does not satisfy the formula")]
    NotAModel,
    #[error("decoded automaton is inconsistent with the sample (encoding bug)")]
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    PrefixK,
    SuffixK,
    HybridK(SplitAssignment),
    PrefixKp1,
    SuffixKp1,
    HybridKp1(SplitAssignment),
    PrefixKp1Refined,
}

impl ModelKind {
    pub fn is_plus_one(&self) -> bool {
        matches!(
            self,
            ModelKind::PrefixKp1 | ModelKind::SuffixKp1 | ModelKind::HybridKp1(_) | ModelKind::PrefixKp1Refined
        )
    }

    pub fn is_refined(&self) -> bool {
        matches!(self, ModelKind::PrefixKp1Refined)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::PrefixK => "prefix-k",
            ModelKind::SuffixK => "suffix-k",
            ModelKind::HybridK(_) => "hybrid-k",
            ModelKind::PrefixKp1 => "prefix-k+1",
            ModelKind::SuffixKp1 => "suffix-k+1",
            ModelKind::HybridKp1(_) => "hybrid-k+1",
            ModelKind::PrefixKp1Refined => "prefix-k+1-refined",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Emit the clone clauses: every transition into the final state of a
    /// `(k+1)` model has a twin into some other state.
    pub clone_f4: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { clone_f4: true }
    }
}

/// Clause-group labels used in [`EncodingStats`].
pub mod group {
    pub const LAMBDA: &str = "lambda";
    pub const PREF1: &str = "pref1";
    pub const PREF2: &str = "pref2";
    pub const SUF1: &str = "suf1";
    pub const SUF2: &str = "suf2";
    pub const POSITIVE: &str = "positive";
    pub const NEGATIVE: &str = "negative";
    pub const CLONE: &str = "clone";
    pub const REF1: &str = "ref1";
    pub const REF2: &str = "ref2";
    pub const REF3: &str = "ref3";
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub cnf: Cnf,
    pub varmap: VarMap,
    pub kind: ModelKind,
    /// Number of automaton states the instance describes.
    pub k_target: usize,
    pub options: EncodeOptions,
    sample: Sample,
    groups: Vec<&'static str>,
    prefixes: Vec<Word>,
    suffixes: Vec<Word>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroupStats {
    pub clauses: usize,
    pub literals: usize,
    pub min_len: usize,
    pub max_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingStats {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub vars_by_kind: BTreeMap<&'static str, usize>,
    pub clauses_by_group: BTreeMap<&'static str, GroupStats>,
}

impl EncodingStats {
    pub fn vars(&self, kind: &str) -> usize {
        self.vars_by_kind.get(kind).copied().unwrap_or(0)
    }

    pub fn group(&self, name: &str) -> GroupStats {
        self.clauses_by_group.get(name).copied().unwrap_or_default()
    }
}

impl Encoding {
    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    /// Group label of each clause, parallel to `cnf.clauses()`.
    pub fn clause_groups(&self) -> &[&'static str] {
        &self.groups
    }

    /// Prefix table indexed by the `prefix` field of `SemVar::PathP`.
    pub fn prefix_table(&self) -> &[Word] {
        &self.prefixes
    }

    /// Suffix table indexed by the `suffix` field of `SemVar::PathS`.
    pub fn suffix_table(&self) -> &[Word] {
        &self.suffixes
    }

    pub fn stats(&self) -> EncodingStats {
        let mut vars_by_kind: BTreeMap<&'static str, usize> =
            ["delta", "final", "pfinal", "pathp", "paths", "aux"].iter().map(|&k| (k, 0)).collect();
        for (_, v) in self.varmap.iter() {
            *vars_by_kind.entry(v.kind()).or_insert(0) += 1;
        }
        let mut clauses_by_group: BTreeMap<&'static str, GroupStats> = BTreeMap::new();
        for (clause, g) in self.cnf.clauses().iter().zip(&self.groups) {
            let e = clauses_by_group.entry(g).or_insert(GroupStats {
                min_len: usize::MAX,
                ..Default::default()
            });
            e.clauses += 1;
            e.literals += clause.len();
            e.min_len = e.min_len.min(clause.len());
            e.max_len = e.max_len.max(clause.len());
        }
        EncodingStats {
            num_vars: self.cnf.num_vars() as usize,
            num_clauses: self.cnf.num_clauses(),
            vars_by_kind,
            clauses_by_group,
        }
    }

    /// Turns a model into an automaton and checks it against the sample.
    pub fn decode(&self, assignment: &Assignment) -> Result<Nfa, DecodeError> {
        if assignment.num_vars() < self.cnf.num_vars() || !self.cnf.eval(assignment) {
            return Err(DecodeError::NotAModel);
        }
        let nfa = decode_varmap(&self.varmap, assignment, self.k_target, self.sample.alphabet_size());
        if !nfa.consistent(&self.sample).unwrap_or(false) {
            return Err(DecodeError::Inconsistent);
        }
        Ok(nfa)
    }

    /// States whose candidate-final variable is true (refined model only).
    pub fn decode_pfinals(&self, assignment: &Assignment) -> BTreeSet<usize> {
        self.varmap
            .iter()
            .filter_map(|(idx, v)| match v {
                SemVar::PFinal(i) if assignment.value(idx) => Some(*i),
                _ => None,
            })
            .collect()
    }
}

/// Builds an automaton from transition and final-state variables. Without
/// final-state variables the highest state is the single final state.
pub fn decode_varmap(varmap: &VarMap, assignment: &Assignment, states: usize, alphabet_size: usize) -> Nfa {
    let mut nfa = Nfa::new(states, alphabet_size);
    let mut has_final_vars = false;
    for (idx, v) in varmap.iter() {
        match *v {
            SemVar::Delta { sym, from, to } if assignment.value(idx) => {
                nfa.add_transition(from, sym, to);
            }
            SemVar::Final(i) => {
                has_final_vars = true;
                if assignment.value(idx) {
                    nfa.set_final(i, true);
                }
            }
            _ => {}
        }
    }
    if !has_final_vars {
        nfa.set_final(states, true);
    }
    nfa
}

/// Number of states implied by a variable map's transition variables.
pub fn varmap_states(varmap: &VarMap) -> usize {
    varmap
        .iter()
        .filter_map(|(_, v)| match *v {
            SemVar::Delta { from, to, .. } => Some(from.max(to)),
            SemVar::Final(i) => Some(i),
            _ => None,
        })
        .max()
        .unwrap_or(1)
}

struct Builder {
    b: CnfBuilder,
    n: usize,
    /// Size of the `k` automaton (sources of all transitions).
    k: usize,
    /// Number of states of the instance: `k` or `k+1`.
    states: usize,
    plus_one: bool,
    pref_ids: BTreeMap<Word, usize>,
    suf_ids: BTreeMap<Word, usize>,
}

impl Builder {
    fn sources(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.k
    }

    fn delta(&self, a: Symbol, i: usize, j: usize) -> Lit {
        self.b.lit(SemVar::Delta { sym: a, from: i, to: j })
    }

    fn fin(&self, i: usize) -> Lit {
        self.b.lit(SemVar::Final(i))
    }

    fn p(&self, u: &Word, i: usize) -> Lit {
        self.b.lit(SemVar::PathP { prefix: self.pref_ids[u], state: i })
    }

    fn s(&self, v: &Word, i: usize, j: usize) -> Lit {
        self.b.lit(SemVar::PathS { suffix: self.suf_ids[v], from: i, to: j })
    }

    /// End points of the suffix paths of interest.
    fn suffix_ends(&self) -> Vec<usize> {
        if self.plus_one {
            vec![self.states]
        } else {
            (1..=self.k).collect()
        }
    }

    fn alloc(&mut self, refined: bool) -> Result<(), EncodeError> {
        for a in 0..self.n {
            for i in self.sources() {
                for j in 1..=self.states {
                    self.b.new_var(SemVar::Delta { sym: Symbol(a as u32), from: i, to: j })?;
                }
            }
        }
        if !self.plus_one {
            for i in 1..=self.k {
                self.b.new_var(SemVar::Final(i))?;
            }
        }
        if refined {
            for i in 1..=self.k {
                self.b.new_var(SemVar::PFinal(i))?;
            }
        }
        for &id in self.pref_ids.values() {
            for i in 1..=self.states {
                self.b.new_var(SemVar::PathP { prefix: id, state: i })?;
            }
        }
        let ends = self.suffix_ends();
        for &id in self.suf_ids.values() {
            for i in self.sources() {
                for &j in &ends {
                    self.b.new_var(SemVar::PathS { suffix: id, from: i, to: j })?;
                }
            }
        }
        Ok(())
    }

    fn emit_prefix_paths(&mut self) -> Result<(), EncodeError> {
        let prefs: Vec<Word> = self.pref_ids.keys().cloned().collect();
        for w in &prefs {
            let a = w.last().unwrap();
            if w.len() == 1 {
                self.b.group(group::PREF1);
                for i in 1..=self.states {
                    let (p, d) = (self.p(w, i), self.delta(a, 1, i));
                    self.b.add_iff(p, d);
                }
            } else {
                self.b.group(group::PREF2);
                let v = w.prefix(w.len() - 1);
                for i in 1..=self.states {
                    let pairs: Vec<(Lit, Lit)> =
                        self.sources().map(|j| (self.p(&v, j), self.delta(a, j, i))).collect();
                    let x = self.p(w, i);
                    self.b.add_iff_or_of_pairs(x, &pairs)?;
                }
            }
        }
        Ok(())
    }

    fn emit_suffix_paths(&mut self) -> Result<(), EncodeError> {
        let sufs: Vec<Word> = self.suf_ids.keys().cloned().collect();
        let ends = self.suffix_ends();
        for w in &sufs {
            let a = w.first().unwrap();
            if w.len() == 1 {
                self.b.group(group::SUF1);
                for i in self.sources() {
                    for &j in &ends {
                        let (s, d) = (self.s(w, i, j), self.delta(a, i, j));
                        self.b.add_iff(s, d);
                    }
                }
            } else {
                self.b.group(group::SUF2);
                let v = w.suffix_from(1);
                for i in self.sources() {
                    for &j in &ends {
                        let pairs: Vec<(Lit, Lit)> =
                            self.sources().map(|l| (self.delta(a, i, l), self.s(&v, l, j))).collect();
                        let x = self.s(w, i, j);
                        self.b.add_iff_or_of_pairs(x, &pairs)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Conjunctions whose disjunction says "`w = uv` ends in a final state".
    fn acceptance_terms(&self, u: &Word, v: &Word) -> Vec<Vec<Lit>> {
        let top = self.states;
        match (u.is_empty(), v.is_empty(), self.plus_one) {
            (_, true, false) => (1..=self.k).map(|i| vec![self.p(u, i), self.fin(i)]).collect(),
            (true, false, false) => (1..=self.k).map(|i| vec![self.s(v, 1, i), self.fin(i)]).collect(),
            (false, false, false) => {
                let mut terms = Vec::new();
                for i in 1..=self.k {
                    for j in 1..=self.k {
                        terms.push(vec![self.p(u, j), self.s(v, j, i), self.fin(i)]);
                    }
                }
                terms
            }
            (_, true, true) => vec![vec![self.p(u, top)]],
            (true, false, true) => vec![vec![self.s(v, 1, top)]],
            (false, false, true) => {
                (1..=self.k).map(|j| vec![self.p(u, j), self.s(v, j, top)]).collect()
            }
        }
    }

    fn emit_word(&mut self, w: &Word, cut: usize, positive: bool) -> Result<(), EncodeError> {
        if w.is_empty() {
            return Ok(());
        }
        let (u, v) = (w.prefix(cut), w.suffix_from(cut));
        let terms = self.acceptance_terms(&u, &v);
        if positive {
            self.b.group(group::POSITIVE);
            if let [single] = terms.as_slice() {
                if single.len() == 1 {
                    self.b.add(single.clone());
                    return Ok(());
                }
            }
            self.b.add_or_of_ands(&terms)?;
        } else {
            self.b.group(group::NEGATIVE);
            for t in terms {
                self.b.add(t.into_iter().map(|l| !l).collect());
            }
        }
        Ok(())
    }

    fn emit_clones(&mut self, sample: &Sample) {
        self.b.group(group::CLONE);
        let top = self.states;
        let last_symbols: BTreeSet<Symbol> =
            sample.positive().iter().filter_map(Word::last).collect();
        for &u in &last_symbols {
            for i in self.sources() {
                let mut clause = vec![!self.delta(u, i, top)];
                clause.extend(self.sources().map(|j| self.delta(u, i, j)));
                self.b.add(clause);
            }
        }
    }

    fn emit_refinements(&mut self, sample: &Sample) {
        let pf = |b: &Builder, i: usize| b.b.lit(SemVar::PFinal(i));
        self.b.group(group::REF1);
        if sample.has_empty_negative() {
            let f1 = pf(self, 1);
            self.b.add(vec![!f1]);
        }
        for w in sample.negative().iter().filter(|w| !w.is_empty()) {
            for i in 1..=self.k {
                let clause = vec![!self.p(w, i), !pf(self, i)];
                self.b.add(clause);
            }
        }
        self.b.group(group::REF2);
        let top = self.states;
        for i in 1..=self.k {
            let mut terms = Vec::new();
            for w in sample.positive() {
                let a = w.last().unwrap();
                let v = w.prefix(w.len() - 1);
                if v.is_empty() {
                    terms.push(vec![self.delta(a, 1, i), self.delta(a, 1, top)]);
                } else {
                    for j in self.sources() {
                        terms.push(vec![self.p(&v, j), self.delta(a, j, i), self.delta(a, j, top)]);
                    }
                }
            }
            let guard = pf(self, i);
            self.b.add_implies_or_of_ands(guard, &terms);
        }
        self.b.group(group::REF3);
        for w in sample.positive() {
            let terms: Vec<Vec<Lit>> = (1..=self.k).map(|i| vec![self.p(w, i), pf(self, i)]).collect();
            if !terms.is_empty() {
                self.b.add_or_of_ands(&terms).expect("non-empty");
            }
        }
    }
}

fn index_table(words: BTreeSet<Word>) -> BTreeMap<Word, usize> {
    words.into_iter().enumerate().map(|(i, w)| (w, i)).collect()
}

/// Builds any model kind for a `k`-state automaton (for the `(k+1)` kinds the
/// instance has `k+1` states).
pub fn encode(sample: &Sample, kind: &ModelKind, k: usize, options: EncodeOptions) -> Result<Encoding, EncodeError> {
    if k == 0 {
        return Err(EncodeError::ZeroStates);
    }
    let plus_one = kind.is_plus_one();
    if plus_one && sample.has_empty_positive() {
        return Err(EncodeError::EmptyWordPositive);
    }
    let split = match kind {
        ModelKind::PrefixK | ModelKind::PrefixKp1 | ModelKind::PrefixKp1Refined => {
            SplitAssignment::all_prefix(sample)
        }
        ModelKind::SuffixK | ModelKind::SuffixKp1 => SplitAssignment::all_suffix(sample),
        ModelKind::HybridK(s) | ModelKind::HybridKp1(s) => {
            s.validate(sample)?;
            s.clone()
        }
    };
    let (us, vs): (Vec<Word>, Vec<Word>) = sample.words().map(|w| split.parts(w).unwrap()).unzip();
    let pref_set = prefixes(us.iter());
    let options = EncodeOptions { clone_f4: options.clone_f4 || kind.is_refined() };

    let mut bld = Builder {
        b: CnfBuilder::new(),
        n: sample.alphabet_size(),
        k,
        states: if plus_one { k + 1 } else { k },
        plus_one,
        pref_ids: index_table(pref_set),
        suf_ids: index_table(suffixes(vs.iter())),
    };
    bld.alloc(kind.is_refined())?;

    if !plus_one {
        bld.b.group(group::LAMBDA);
        if sample.has_empty_positive() {
            let f = bld.fin(1);
            bld.b.add(vec![f]);
        }
        if sample.has_empty_negative() {
            let f = bld.fin(1);
            bld.b.add(vec![!f]);
        }
    }
    bld.emit_prefix_paths()?;
    bld.emit_suffix_paths()?;
    for w in sample.positive() {
        bld.emit_word(w, split.cut(w).unwrap(), true)?;
    }
    for w in sample.negative() {
        bld.emit_word(w, split.cut(w).unwrap(), false)?;
    }
    if plus_one && options.clone_f4 {
        bld.emit_clones(sample);
    }
    if kind.is_refined() {
        bld.emit_refinements(sample);
    }

    let Builder { b, pref_ids, suf_ids, states, .. } = bld;
    let (cnf, varmap, groups) = b.finish();
    Ok(Encoding {
        cnf,
        varmap,
        kind: kind.clone(),
        k_target: states,
        options,
        sample: sample.clone(),
        groups,
        prefixes: pref_ids.into_keys().collect(),
        suffixes: suf_ids.into_keys().collect(),
    })
}

pub fn encode_prefix_k(sample: &Sample, k: usize) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::PrefixK, k, EncodeOptions::default())
}

pub fn encode_suffix_k(sample: &Sample, k: usize) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::SuffixK, k, EncodeOptions::default())
}

pub fn encode_hybrid_k(sample: &Sample, k: usize, split: &SplitAssignment) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::HybridK(split.clone()), k, EncodeOptions::default())
}

pub fn encode_prefix_kp1(sample: &Sample, k: usize, options: EncodeOptions) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::PrefixKp1, k, options)
}

pub fn encode_suffix_kp1(sample: &Sample, k: usize, options: EncodeOptions) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::SuffixKp1, k, options)
}

pub fn encode_hybrid_kp1(
    sample: &Sample,
    k: usize,
    split: &SplitAssignment,
    options: EncodeOptions,
) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::HybridKp1(split.clone()), k, options)
}

pub fn encode_prefix_kp1_refined(sample: &Sample, k: usize) -> Result<Encoding, EncodeError> {
    encode(sample, &ModelKind::PrefixKp1Refined, k, EncodeOptions::default())
}
