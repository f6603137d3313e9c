//! Minimal-size search: probes increasing state counts, moving a lower and an
//! upper bound until they meet.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::encode::{encode, EncodeOptions, Encoding, ModelKind};
use crate::nfa::Nfa;
use crate::reduce::{reduce_kp1, reduce_or_enumerate, ReduceOutcome, DEFAULT_ENUMERATION_CAP};
use crate::sample::Sample;
use crate::solver::{solve, Backend, Budget, SolveOutcome};
use crate::split::{best_prefix_split, best_suffix_split, ils_split, IlsInit, IlsParams};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("the (k+1) strategies cannot handle the empty word as a positive example")]
    EmptyWordPositive,
    #[error("the refined model exists only for the prefix family with --plus-one")]
    RefinedNeedsPrefixPlusOne,
}

/// How hybrid models choose their per-word cuts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitChoice {
    Ils { init: IlsInit, seed: u64, iters: Option<usize> },
    BestPrefix,
    BestSuffix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Prefix,
    Suffix,
    Hybrid(SplitChoice),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub family: Family,
    pub plus_one: bool,
    pub refined: bool,
    pub options: EncodeOptions,
}

impl Strategy {
    pub fn new(family: Family, plus_one: bool, refined: bool) -> Result<Self, SearchError> {
        if refined && !(plus_one && family == Family::Prefix) {
            return Err(SearchError::RefinedNeedsPrefixPlusOne);
        }
        Ok(Strategy { family, plus_one, refined, options: EncodeOptions::default() })
    }

    pub fn prefix_k() -> Self {
        Strategy::new(Family::Prefix, false, false).unwrap()
    }

    pub fn refined() -> Self {
        Strategy::new(Family::Prefix, true, true).unwrap()
    }

    /// Concrete model for target size `k`. Hybrid splits are optimised for
    /// the instance's state count.
    pub fn model_kind(&self, sample: &Sample, k: usize) -> ModelKind {
        let states = if self.plus_one { k + 1 } else { k };
        match (self.family, self.plus_one) {
            (Family::Prefix, false) => ModelKind::PrefixK,
            (Family::Prefix, true) if self.refined => ModelKind::PrefixKp1Refined,
            (Family::Prefix, true) => ModelKind::PrefixKp1,
            (Family::Suffix, false) => ModelKind::SuffixK,
            (Family::Suffix, true) => ModelKind::SuffixKp1,
            (Family::Hybrid(choice), plus_one) => {
                let split = match choice {
                    SplitChoice::Ils { init, seed, iters } => {
                        let mut params = IlsParams::default_for(sample, seed, init);
                        if let Some(it) = iters {
                            params.max_iters = it;
                        }
                        ils_split(sample, states, &params)
                    }
                    SplitChoice::BestPrefix => best_prefix_split(sample),
                    SplitChoice::BestSuffix => best_suffix_split(sample),
                };
                if plus_one {
                    ModelKind::HybridKp1(split)
                } else {
                    ModelKind::HybridK(split)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    Solved(SolveOutcome),
    /// Encoding or decoding failed; the message says why.
    Error(String),
}

impl ProbeOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            ProbeOutcome::Solved(o) => o.status(),
            ProbeOutcome::Error(_) => "ERROR",
        }
    }
}

/// One solver call.
#[derive(Clone, Debug)]
pub struct ProbeRecord {
    /// Target size being decided.
    pub k: usize,
    /// States in the encoded automaton (`k+1` for the `(k+1)` models).
    pub states: usize,
    pub kind: &'static str,
    pub outcome: ProbeOutcome,
    pub vars: usize,
    pub clauses: usize,
    pub seconds: f64,
    /// Decoded automaton on SAT.
    pub nfa: Option<Nfa>,
    /// Candidate final states on a SAT refined probe.
    pub pfinals: Option<Vec<usize>>,
}

impl ProbeRecord {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, ProbeOutcome::Solved(SolveOutcome::Sat(_)))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self.outcome, ProbeOutcome::Solved(SolveOutcome::Unsat))
    }
}

/// Encodes, solves and decodes a single instance. Failures end up in the
/// record.
pub fn probe(sample: &Sample, kind: &ModelKind, k: usize, budget: &Budget, backend: &Backend) -> ProbeRecord {
    probe_with(sample, kind, k, EncodeOptions::default(), budget, backend, &mut |_| Ok(()))
}

fn probe_with(
    sample: &Sample,
    kind: &ModelKind,
    k: usize,
    options: EncodeOptions,
    budget: &Budget,
    backend: &Backend,
    sink: &mut dyn FnMut(&Encoding) -> Result<(), String>,
) -> ProbeRecord {
    let start = Instant::now();
    let mut rec = ProbeRecord {
        k,
        states: if kind.is_plus_one() { k + 1 } else { k },
        kind: kind.name(),
        outcome: ProbeOutcome::Error(String::new()),
        vars: 0,
        clauses: 0,
        seconds: 0.0,
        nfa: None,
        pfinals: None,
    };
    let enc = match encode(sample, kind, k, options) {
        Ok(e) => e,
        Err(e) => {
            rec.outcome = ProbeOutcome::Error(e.to_string());
            return rec;
        }
    };
    rec.vars = enc.cnf.num_vars() as usize;
    rec.clauses = enc.cnf.num_clauses();
    if let Err(msg) = sink(&enc) {
        rec.outcome = ProbeOutcome::Error(msg);
        return rec;
    }
    let out = solve(&enc.cnf, budget, backend);
    if let SolveOutcome::Sat(a) = &out {
        match enc.decode(a) {
            Ok(nfa) => rec.nfa = Some(nfa),
            Err(e) => {
                rec.outcome = ProbeOutcome::Error(e.to_string());
                rec.seconds = start.elapsed().as_secs_f64();
                return rec;
            }
        }
        if kind.is_refined() {
            rec.pfinals = Some(enc.decode_pfinals(a).into_iter().collect());
        }
    }
    rec.outcome = ProbeOutcome::Solved(out);
    rec.seconds = start.elapsed().as_secs_f64();
    rec
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub probe_budget: Budget,
    pub total_time: Option<Duration>,
    pub bisect: bool,
    /// Probes run concurrently per round (1 = sequential).
    pub jobs: usize,
    pub backend: Backend,
    pub enumeration_cap: usize,
    /// Directory receiving `<kind>-k<k>.cnf` and `.varmap` for every probe.
    pub emit_dir: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            probe_budget: Budget::unlimited(),
            total_time: None,
            bisect: false,
            jobs: 1,
            backend: Backend::Embedded,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            emit_dir: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InferenceReport {
    pub strategy: String,
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub probes: Vec<ProbeRecord>,
    /// Bound changes and reduction results, in order.
    pub events: Vec<String>,
    /// Smallest automaton found.
    pub result: Option<(usize, Nfa)>,
    pub total_seconds: f64,
    /// The overall time budget ran out before the bounds met.
    pub exhausted: bool,
}

impl InferenceReport {
    /// Bounds met, so the result is minimal.
    pub fn is_minimal(&self) -> bool {
        self.result.is_some() && self.lower_bound == self.upper_bound
    }

    pub fn k_min(&self) -> Option<usize> {
        self.is_minimal().then_some(self.upper_bound)
    }

    pub const TABLE_HEADER: &'static str = "k\tstates\tkind\toutcome\tvars\tclauses\tseconds";

    /// One tab-separated row per probe. Without `timings` the seconds column
    /// is `-`, which keeps the table reproducible.
    pub fn table(&self, timings: bool) -> String {
        let mut out = String::from(Self::TABLE_HEADER);
        out.push('\n');
        for p in &self.probes {
            let secs = if timings { format!("{:.3}", p.seconds) } else { "-".into() };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.k,
                p.states,
                p.kind,
                p.outcome.status(),
                p.vars,
                p.clauses,
                secs
            );
        }
        out
    }

    pub fn render(&self, timings: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "strategy: {}", self.strategy);
        for e in &self.events {
            let _ = writeln!(out, "event: {e}");
        }
        let _ = writeln!(out, "lower_bound: {}", self.lower_bound);
        let _ = writeln!(out, "upper_bound: {}", self.upper_bound);
        match &self.result {
            Some((k, _)) if self.is_minimal() => {
                let _ = writeln!(out, "result: k_min={k}");
            }
            Some((k, _)) => {
                let _ = writeln!(out, "result: k={k} (not proven minimal)");
            }
            None => {
                let _ = writeln!(out, "result: none");
            }
        }
        if self.exhausted {
            let _ = writeln!(out, "budget: exhausted");
        }
        if timings {
            let _ = writeln!(out, "total_seconds: {:.3}", self.total_seconds);
        }
        out.push('\n');
        out.push_str(&self.table(timings));
        out
    }
}

/// Result of deciding one target size, possibly over several probes.
enum Verdict {
    Found(Nfa),
    /// No automaton of the target size.
    None,
    /// Only an automaton with one extra state was found.
    Larger(Nfa),
    Unknown,
}

struct Step {
    k: usize,
    probes: Vec<ProbeRecord>,
    events: Vec<String>,
    verdict: Verdict,
}

struct Driver<'a> {
    sample: &'a Sample,
    strategy: &'a Strategy,
    config: &'a SearchConfig,
    deadline: Option<Instant>,
}

impl Driver<'_> {
    fn budget(&self) -> Budget {
        self.config.probe_budget.capped_by(self.deadline)
    }

    fn run_probe(&self, kind: &ModelKind, k: usize, events: &mut Vec<String>) -> ProbeRecord {
        let dir = self.config.emit_dir.clone();
        let mut sink = |enc: &Encoding| -> Result<(), String> {
            let Some(dir) = &dir else { return Ok(()) };
            let stem = dir.join(format!("{}-k{}", enc.kind.name(), k));
            fs::write(stem.with_extension("cnf"), enc.cnf.to_dimacs())
                .and_then(|_| fs::write(stem.with_extension("varmap"), enc.varmap.render()))
                .map_err(|e| format!("cannot write {}: {e}", stem.display()))
        };
        let rec = probe_with(
            self.sample,
            kind,
            k,
            self.strategy.options,
            &self.budget(),
            &self.config.backend,
            &mut sink,
        );
        if let ProbeOutcome::Error(msg) = &rec.outcome {
            events.push(format!("probe {} k={k} failed: {msg}", rec.kind));
        }
        rec
    }

    fn step(&self, k: usize) -> Step {
        let mut events = Vec::new();
        let mut probes = Vec::new();
        let kind = self.strategy.model_kind(self.sample, k);
        let rec = self.run_probe(&kind, k, &mut events);
        let sat_nfa = rec.nfa.clone();
        let status = (rec.is_sat(), rec.is_unsat());
        probes.push(rec);
        let verdict = match status {
            (false, true) => Verdict::None,
            (false, false) => Verdict::Unknown,
            (true, _) if !self.strategy.plus_one => Verdict::Found(sat_nfa.unwrap()),
            (true, _) => {
                let nfa = sat_nfa.unwrap();
                match self.reduce(&nfa, k, kind.is_refined(), &mut events) {
                    Some(reduced) => Verdict::Found(reduced),
                    None if kind.is_refined() => {
                        events.push(format!("k={k}: refined solution did not reduce (internal error)"));
                        Verdict::Larger(nfa)
                    }
                    None => {
                        events.push(format!("k={k}: re-probing with the refined model"));
                        let refined = self.run_probe(&ModelKind::PrefixKp1Refined, k, &mut events);
                        let rnfa = refined.nfa.clone();
                        let unsat = refined.is_unsat();
                        probes.push(refined);
                        match rnfa {
                            Some(r) => match self.reduce(&r, k, true, &mut events) {
                                Some(reduced) => Verdict::Found(reduced),
                                None => Verdict::Larger(nfa),
                            },
                            None if unsat => Verdict::None,
                            None => Verdict::Larger(nfa),
                        }
                    }
                }
            }
        };
        Step { k, probes, events, verdict }
    }

    fn reduce(&self, nfa: &Nfa, k: usize, refined: bool, events: &mut Vec<String>) -> Option<Nfa> {
        let first = match reduce_kp1(nfa, self.sample) {
            Ok(o) => o,
            Err(e) => {
                events.push(format!("k={k}: reduction rejected the automaton: {e}"));
                return None;
            }
        };
        let outcome = if first.is_reduced() || refined {
            first
        } else {
            events.push(format!("k={k}: reduction failed ({}), trying all final sets", describe(&first, self.sample)));
            match reduce_or_enumerate(nfa, self.sample, self.config.enumeration_cap) {
                Ok(o) => o,
                Err(e) => {
                    events.push(format!("k={k}: enumeration skipped: {e}"));
                    first
                }
            }
        };
        events.push(format!("k={k}: reduction {}", describe(&outcome, self.sample)));
        match outcome {
            ReduceOutcome::Reduced { nfa, .. } => Some(nfa),
            _ => None,
        }
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

fn describe(outcome: &ReduceOutcome, sample: &Sample) -> String {
    match outcome {
        ReduceOutcome::Reduced { candidate_finals, .. } => {
            let set: Vec<String> = candidate_finals.iter().map(|s| s.to_string()).collect();
            format!("succeeded, finals {{{}}}", set.join(","))
        }
        ReduceOutcome::FailedEmptyCandidates => "failed: no candidate final state".into(),
        ReduceOutcome::FailedUncovered(w) => {
            format!("failed: {} reaches no candidate", sample.alphabet().render(w))
        }
    }
}

/// Bounds before any probe: `[1, |PTA|]`, with 2 as the lower bound when the
/// empty word is negative and some word is positive.
pub fn initial_bounds(sample: &Sample) -> (usize, usize) {
    let lb = if sample.has_empty_negative() && !sample.positive().is_empty() { 2 } else { 1 };
    (lb, sample.pta_size().max(lb))
}

pub fn strategy_name(strategy: &Strategy) -> String {
    let family = match strategy.family {
        Family::Prefix => "prefix".to_string(),
        Family::Suffix => "suffix".to_string(),
        Family::Hybrid(SplitChoice::Ils { init, seed, iters }) => {
            let init = match init {
                IlsInit::Random => "random",
                IlsInit::BestPrefix => "bestpre",
                IlsInit::BestSuffix => "bestsuf",
            };
            match iters {
                Some(it) => format!("hybrid-ils(init={init},seed={seed},iters={it})"),
                None => format!("hybrid-ils(init={init},seed={seed})"),
            }
        }
        Family::Hybrid(SplitChoice::BestPrefix) => "hybrid-bestpre".into(),
        Family::Hybrid(SplitChoice::BestSuffix) => "hybrid-bestsuf".into(),
    };
    let mut name = family;
    if strategy.plus_one {
        name.push_str(" +1");
    }
    if strategy.refined {
        name.push_str(" refined");
    }
    if strategy.plus_one && !strategy.options.clone_f4 {
        name.push_str(" no-clone");
    }
    name
}

/// Finds the smallest consistent automaton the strategy can certify.
pub fn infer_min_k(sample: &Sample, strategy: &Strategy, config: &SearchConfig) -> Result<InferenceReport, SearchError> {
    if strategy.plus_one && sample.has_empty_positive() {
        return Err(SearchError::EmptyWordPositive);
    }
    let start = Instant::now();
    let driver = Driver { sample, strategy, config, deadline: config.total_time.map(|t| start + t) };
    let (mut lb, mut ub) = initial_bounds(sample);
    let mut report = InferenceReport {
        strategy: strategy_name(strategy),
        lower_bound: lb,
        upper_bound: ub,
        probes: Vec::new(),
        events: vec![format!("initial bounds [{lb}, {ub}]")],
        result: None,
        total_seconds: 0.0,
        exhausted: false,
    };
    // Best automaton known so far, sized `ub`.
    let mut best: Option<Nfa> = Some(sample.pta());

    if config.bisect {
        while lb < ub {
            if driver.out_of_time() {
                report.exhausted = true;
                break;
            }
            let mid = lb + (ub - lb) / 2;
            let step = driver.step(mid);
            report.probes.extend(step.probes);
            report.events.extend(step.events);
            match step.verdict {
                Verdict::Found(nfa) => {
                    ub = mid;
                    best = Some(nfa);
                    report.events.push(format!("k={mid}: found, upper bound {ub}"));
                }
                Verdict::None => {
                    lb = mid + 1;
                    report.events.push(format!("k={mid}: none, lower bound {lb}"));
                }
                Verdict::Larger(nfa) if mid + 1 < ub => {
                    ub = mid + 1;
                    best = Some(nfa);
                    report.events.push(format!("k={mid}: {} states certified, upper bound {ub}", mid + 1));
                }
                Verdict::Larger(_) | Verdict::Unknown => {
                    report.events.push(format!("k={mid}: undecided, stopping"));
                    break;
                }
            }
        }
    } else {
        // Once a target stays undecided the lower bound is frozen.
        let mut lb_frozen = false;
        let mut k = lb;
        'scan: while k < ub {
            if driver.out_of_time() {
                report.exhausted = true;
                break;
            }
            let batch: Vec<usize> = (k..ub).take(config.jobs.max(1)).collect();
            let steps: Vec<Step> = if batch.len() == 1 {
                vec![driver.step(k)]
            } else {
                let driver = &driver;
                thread::scope(|scope| {
                    let handles: Vec<_> = batch.iter().map(|&t| scope.spawn(move || driver.step(t))).collect();
                    handles.into_iter().map(|h| h.join().expect("probe thread panicked")).collect()
                })
            };
            for step in steps {
                let t = step.k;
                report.probes.extend(step.probes);
                report.events.extend(step.events);
                match step.verdict {
                    Verdict::Found(nfa) => {
                        ub = t;
                        best = Some(nfa);
                        report.events.push(format!("k={t}: found, upper bound {ub}"));
                        break 'scan;
                    }
                    Verdict::None if !lb_frozen => {
                        lb = t + 1;
                        report.events.push(format!("k={t}: none, lower bound {lb}"));
                    }
                    Verdict::None => report.events.push(format!("k={t}: none")),
                    Verdict::Larger(nfa) => {
                        if t + 1 < ub {
                            ub = t + 1;
                            best = Some(nfa);
                            report.events.push(format!("k={t}: {} states certified, upper bound {ub}", t + 1));
                        }
                        lb_frozen = true;
                    }
                    Verdict::Unknown => {
                        lb_frozen = true;
                        report.events.push(format!("k={t}: undecided"));
                    }
                }
            }
            k = batch.last().unwrap() + 1;
        }
    }
    if report.exhausted {
        report.events.push("overall budget exhausted".into());
    }
    report.lower_bound = lb;
    report.upper_bound = ub;
    report.result = best.map(|nfa| (ub, nfa));
    report.total_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_sample() -> Sample {
        Sample::from_strs("ab", &["a", "ab", "abba", "baa"], &["aab", "b", "ba", "bab"]).unwrap()
    }

    #[test]
    fn refined_strategy_on_running_sample() {
        let s = running_sample();
        let r = infer_min_k(&s, &Strategy::refined(), &SearchConfig::default()).unwrap();
        assert_eq!(r.k_min(), Some(3));
        let outcomes: Vec<(usize, &str)> = r.probes.iter().map(|p| (p.k, p.outcome.status())).collect();
        assert_eq!(outcomes, [(1, "UNSAT"), (2, "UNSAT"), (3, "SAT")]);
        let (_, nfa) = r.result.unwrap();
        assert_eq!(nfa.num_states(), 3);
        assert!(nfa.consistent(&s).unwrap());
    }

    #[test]
    fn negative_empty_word_needs_two_states() {
        let s = Sample::from_strs("a", &["a"], &[""]).unwrap();
        assert_eq!(initial_bounds(&s), (2, 2));
        for strategy in [Strategy::prefix_k(), Strategy::refined()] {
            let r = infer_min_k(&s, &strategy, &SearchConfig::default()).unwrap();
            assert_eq!(r.k_min(), Some(2));
        }
        // Same sample with an extra positive so that the bounds do not meet
        // immediately.
        let s = Sample::from_strs("ab", &["a", "ab"], &[""]).unwrap();
        let r = infer_min_k(&s, &Strategy::refined(), &SearchConfig::default()).unwrap();
        assert_eq!(r.k_min(), Some(2));
        assert_eq!(r.probes[0].k, 2);
    }

    #[test]
    fn empty_positive_word_with_k_model() {
        let s = Sample::from_strs("a", &[""], &[]).unwrap();
        let r = infer_min_k(&s, &Strategy::prefix_k(), &SearchConfig::default()).unwrap();
        assert_eq!(r.k_min(), Some(1));
        assert!(r.result.unwrap().1.is_final(1));
        assert_eq!(
            infer_min_k(&s, &Strategy::refined(), &SearchConfig::default()).unwrap_err(),
            SearchError::EmptyWordPositive
        );
    }

    #[test]
    fn probe_rows() {
        let s = running_sample();
        let rec = probe(&s, &ModelKind::PrefixK, 3, &Budget::unlimited(), &Backend::Embedded);
        assert!(rec.is_sat());
        let stats = encode(&s, &ModelKind::PrefixK, 3, EncodeOptions::default()).unwrap().stats();
        assert_eq!((rec.vars, rec.clauses), (stats.num_vars, stats.num_clauses));

        let rec = probe(&s, &ModelKind::PrefixKp1Refined, 2, &Budget::unlimited(), &Backend::Embedded);
        assert!(rec.is_unsat());
        assert_eq!(rec.states, 3);

        let rec = probe(&s, &ModelKind::PrefixK, 3, &Budget::seconds(0.0), &Backend::Embedded);
        assert_eq!(rec.outcome.status(), "UNKNOWN");
    }

    #[test]
    fn plus_one_strategy_reprobes_with_refined_model() {
        let s = running_sample();
        let strategy = Strategy::new(Family::Prefix, true, false).unwrap();
        let r = infer_min_k(&s, &strategy, &SearchConfig::default()).unwrap();
        assert_eq!(r.k_min(), Some(3));
        let kinds: Vec<(usize, &str, &str)> =
            r.probes.iter().map(|p| (p.k, p.kind, p.outcome.status())).collect();
        assert_eq!(kinds[0], (1, "prefix-k+1", "UNSAT"));
        assert!(kinds.contains(&(2, "prefix-k+1-refined", "UNSAT")));
    }

    #[test]
    fn exhausted_budget_keeps_honest_bounds() {
        let s = running_sample();
        let config = SearchConfig { total_time: Some(Duration::ZERO), ..Default::default() };
        let r = infer_min_k(&s, &Strategy::prefix_k(), &config).unwrap();
        assert!(r.exhausted);
        assert_eq!((r.lower_bound, r.upper_bound), initial_bounds(&s));
        assert!(!r.is_minimal());
        assert!(r.result.unwrap().1.consistent(&s).unwrap());
    }

    #[test]
    fn unknown_probes_freeze_the_lower_bound() {
        let s = running_sample();
        let config = SearchConfig { probe_budget: Budget::seconds(0.0), ..Default::default() };
        let r = infer_min_k(&s, &Strategy::prefix_k(), &config).unwrap();
        assert_eq!(r.lower_bound, 1);
        assert!(r.probes.iter().all(|p| p.outcome.status() == "UNKNOWN"));
        assert_eq!(r.probes.len(), initial_bounds(&s).1 - 1);
    }

    #[test]
    fn bisection_and_jobs_agree_with_linear_scan() {
        let s = running_sample();
        for config in [
            SearchConfig { bisect: true, ..Default::default() },
            SearchConfig { jobs: 3, ..Default::default() },
        ] {
            for strategy in [Strategy::prefix_k(), Strategy::refined()] {
                let r = infer_min_k(&s, &strategy, &config).unwrap();
                assert_eq!(r.k_min(), Some(3), "{config:?}");
            }
        }
    }

    #[test]
    fn report_table_is_stable_without_timings() {
        let s = running_sample();
        let a = infer_min_k(&s, &Strategy::refined(), &SearchConfig::default()).unwrap();
        let b = infer_min_k(&s, &Strategy::refined(), &SearchConfig::default()).unwrap();
        assert_eq!(a.render(false), b.render(false));
        let table = a.table(false);
        assert!(table.starts_with("k\tstates\tkind\toutcome\tvars\tclauses\tseconds\n"));
        assert!(table.lines().skip(1).all(|l| l.ends_with("\t-")));
        assert!(a.render(true).contains("total_seconds"));
    }
}
