use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};

use nfasat::encode::{decode_varmap, encode as build, varmap_states, EncodeOptions, ModelKind};
use nfasat::oracle::brute_min_k;
use nfasat::reduce::{reduce_kp1, reduce_or_enumerate, ReduceOutcome};
use nfasat::sample::{gen_random_sample, GenParams};
use nfasat::search::{infer_min_k, Family, SearchConfig, SplitChoice, Strategy};
use nfasat::solver::{solve as run_solver, Backend, Budget, SolveOutcome, UnknownReason};
use nfasat::split::{
    best_prefix_split, best_suffix_split, fitness, ils_split, random_split, IlsInit, IlsParams, SplitAssignment,
};
use nfasat::{Alphabet, Cnf, Nfa, Sample, VarMap};

use crate::{InitArg, ModelArgs, ModelFamily, SolverArgs, SplitMethod, EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_sample(path: &Path) -> Result<Sample> {
    Sample::parse(&read(path)?).with_context(|| format!("in sample {}", path.display()))
}

fn read_nfa(path: &Path) -> Result<(Nfa, Alphabet)> {
    Nfa::parse(&read(path)?).with_context(|| format!("in automaton {}", path.display()))
}

fn ils_init(arg: InitArg) -> IlsInit {
    match arg {
        InitArg::Random => IlsInit::Random,
        InitArg::Bestpre => IlsInit::BestPrefix,
        InitArg::Bestsuf => IlsInit::BestSuffix,
    }
}

fn strategy(args: &ModelArgs) -> Result<Strategy> {
    let family = match args.model {
        ModelFamily::Prefix => Family::Prefix,
        ModelFamily::Suffix => Family::Suffix,
        ModelFamily::HybridIls => {
            Family::Hybrid(SplitChoice::Ils { init: ils_init(args.ils_init), seed: args.seed, iters: args.iters })
        }
        ModelFamily::HybridBestpre => Family::Hybrid(SplitChoice::BestPrefix),
        ModelFamily::HybridBestsuf => Family::Hybrid(SplitChoice::BestSuffix),
    };
    let mut s = Strategy::new(family, args.plus_one || args.refined, args.refined)?;
    s.options = EncodeOptions { clone_f4: !args.no_clone };
    Ok(s)
}

fn backend(args: &SolverArgs) -> Backend {
    match &args.solver_cmd {
        Some(cmd) => Backend::External(cmd.clone()),
        None => Backend::Embedded,
    }
}

pub struct InferOpts {
    pub sample: PathBuf,
    pub model: ModelArgs,
    pub solver: SolverArgs,
    pub probe_timeout: Option<f64>,
    pub total_timeout: Option<f64>,
    pub bisect: bool,
    pub jobs: usize,
    pub emit_dot: Option<PathBuf>,
    pub emit_nfa: Option<PathBuf>,
    pub emit_report: Option<PathBuf>,
    pub emit_cnf: Option<PathBuf>,
    pub timings: bool,
}

fn seconds(arg: Option<f64>, flag: &str) -> Result<Option<Duration>> {
    match arg {
        Some(s) if !(s >= 0.0 && s.is_finite()) => bail!("{flag} must be a non-negative number of seconds"),
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

pub fn infer(opts: InferOpts) -> Result<u8> {
    let sample = read_sample(&opts.sample)?;
    let strategy = strategy(&opts.model)?;
    if let Some(dir) = &opts.emit_cnf {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let config = SearchConfig {
        probe_budget: Budget { wall_time: seconds(opts.probe_timeout, "--probe-timeout")?, conflicts: None },
        total_time: seconds(opts.total_timeout, "--total-timeout")?,
        bisect: opts.bisect,
        jobs: opts.jobs.max(1),
        backend: backend(&opts.solver),
        emit_dir: opts.emit_cnf.clone(),
        ..SearchConfig::default()
    };
    let report = infer_min_k(&sample, &strategy, &config)?;
    for e in &report.events {
        eprintln!("{e}");
    }
    if opts.timings {
        eprintln!("total {:.3}s", report.total_seconds);
    }
    if let Some(path) = &opts.emit_report {
        write(path, &report.render(opts.timings))?;
    }
    let alphabet = sample.alphabet();
    match &report.result {
        Some((k, nfa)) => {
            if report.is_minimal() {
                println!("k_min={k}");
            } else {
                println!("k={k} bounds=[{},{}]", report.lower_bound, report.upper_bound);
            }
            let dot = nfa.to_dot(alphabet);
            print!("{dot}");
            if let Some(path) = &opts.emit_dot {
                write(path, &dot)?;
            }
            if let Some(path) = &opts.emit_nfa {
                write(path, &nfa.render(alphabet))?;
            }
        }
        None => println!("no result bounds=[{},{}]", report.lower_bound, report.upper_bound),
    }
    Ok(if report.is_minimal() { EXIT_OK } else { EXIT_BUDGET })
}

fn model_kind(sample: &Sample, args: &ModelArgs, k: usize, split_file: Option<&Path>) -> Result<ModelKind> {
    let strategy = strategy(args)?;
    let Some(path) = split_file else {
        return Ok(strategy.model_kind(sample, k));
    };
    if strategy.refined {
        bail!("--split-file cannot be combined with --refined");
    }
    let split = SplitAssignment::parse(&read(path)?, sample.alphabet())
        .with_context(|| format!("in split file {}", path.display()))?;
    split.validate(sample)?;
    Ok(if strategy.plus_one { ModelKind::HybridKp1(split) } else { ModelKind::HybridK(split) })
}

const STATS_HEADER: &str = "kind\tk\tstates\tvars\tclauses";

pub fn encode(
    sample_path: &Path,
    args: &ModelArgs,
    k: usize,
    split_file: Option<&Path>,
    out: &Path,
    groups: bool,
) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    let kind = model_kind(&sample, args, k, split_file)?;
    let enc = build(&sample, &kind, k, EncodeOptions { clone_f4: !args.no_clone })?;
    let stem = out.as_os_str().to_owned();
    let with_ext = |ext: &str| {
        let mut p = stem.clone();
        p.push(ext);
        PathBuf::from(p)
    };
    write(&with_ext(".cnf"), &enc.cnf.to_dimacs())?;
    write(&with_ext(".varmap"), &enc.varmap.render())?;
    let stats = enc.stats();
    println!("{STATS_HEADER}");
    println!("{}\t{}\t{}\t{}\t{}", kind.name(), k, enc.k_target, stats.num_vars, stats.num_clauses);
    if groups {
        print!("{}", group_table(&stats));
    }
    Ok(EXIT_OK)
}

fn group_table(stats: &nfasat::EncodingStats) -> String {
    let mut out = String::from("group\tclauses\tliterals\tmin_len\tmax_len\n");
    for (name, g) in &stats.clauses_by_group {
        let _ = writeln!(out, "{name}\t{}\t{}\t{}\t{}", g.clauses, g.literals, g.min_len, g.max_len);
    }
    for (kind, n) in &stats.vars_by_kind {
        let _ = writeln!(out, "vars\t{kind}\t{n}");
    }
    out
}

pub fn solve(
    cnf_path: &Path,
    solver: &SolverArgs,
    timeout: Option<f64>,
    conflicts: Option<u64>,
    varmap: Option<&Path>,
    sample: Option<&Path>,
) -> Result<u8> {
    let cnf = Cnf::parse_dimacs(&read(cnf_path)?).with_context(|| format!("in {}", cnf_path.display()))?;
    let budget = Budget { wall_time: seconds(timeout, "--timeout")?, conflicts };
    match run_solver(&cnf, &budget, &backend(solver)) {
        SolveOutcome::Sat(a) => {
            println!("s SATISFIABLE");
            println!("{}", a.to_v_line());
            if let Some(vm) = varmap {
                let vm = VarMap::parse(&read(vm)?).with_context(|| format!("in {}", vm.display()))?;
                let alphabet = match sample {
                    Some(p) => read_sample(p)?.alphabet().clone(),
                    None => {
                        let n = vm
                            .iter()
                            .filter_map(|(_, v)| match v {
                                nfasat::SemVar::Delta { sym, .. } => Some(sym.index() + 1),
                                _ => None,
                            })
                            .max()
                            .unwrap_or(1);
                        Alphabet::standard(n)?
                    }
                };
                let nfa = decode_varmap(&vm, &a, varmap_states(&vm), alphabet.len());
                for line in nfa.render(&alphabet).lines() {
                    println!("c {line}");
                }
            }
            Ok(EXIT_OK)
        }
        SolveOutcome::Unsat => {
            println!("s UNSATISFIABLE");
            Ok(EXIT_NEGATIVE)
        }
        SolveOutcome::Unknown(reason) => {
            println!("s UNKNOWN");
            if let UnknownReason::ExternalFailure(msg) = reason {
                eprintln!("external solver failed: {msg}");
            }
            Ok(EXIT_BUDGET)
        }
    }
}

pub fn reduce(nfa_path: &Path, sample_path: &Path, enumerate: bool, cap: usize, emit: Option<&Path>) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    let (nfa, _) = read_nfa(nfa_path)?;
    let outcome = if enumerate { reduce_or_enumerate(&nfa, &sample, cap)? } else { reduce_kp1(&nfa, &sample)? };
    let alphabet = sample.alphabet();
    match outcome {
        ReduceOutcome::Reduced { nfa, candidate_finals } => {
            let finals: Vec<String> = candidate_finals.iter().map(|s| s.to_string()).collect();
            println!("reduced candidates={{{}}}", finals.join(","));
            print!("{}", nfa.render(alphabet));
            print!("{}", nfa.to_dot(alphabet));
            if let Some(p) = emit {
                write(p, &nfa.render(alphabet))?;
            }
            Ok(EXIT_OK)
        }
        ReduceOutcome::FailedEmptyCandidates => {
            println!("failed empty-candidates");
            Ok(EXIT_NEGATIVE)
        }
        ReduceOutcome::FailedUncovered(w) => {
            println!("failed uncovered {}", alphabet.render(&w));
            Ok(EXIT_NEGATIVE)
        }
    }
}

pub fn check(nfa_path: &Path, sample_path: &Path) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    let (nfa, _) = read_nfa(nfa_path)?;
    let alphabet = sample.alphabet();
    let class = nfa.classify(&sample);
    let yn = |b: bool| if b { "yes" } else { "no" };
    let failures = nfa.first_failures(&sample)?;
    match &failures {
        None => println!("consistent"),
        Some((pos, neg)) => {
            println!("inconsistent");
            if let Some(w) = pos {
                println!("positive rejected: {}", alphabet.render(w));
            }
            if let Some(w) = neg {
                println!("negative accepted: {}", alphabet.render(w));
            }
        }
    }
    println!("F2={} F3={} F4={}", yn(class.in_f2), yn(class.in_f3), yn(class.in_f4));
    Ok(if failures.is_none() { EXIT_OK } else { EXIT_NEGATIVE })
}

pub fn split(
    sample_path: &Path,
    method: SplitMethod,
    init: InitArg,
    k: usize,
    seed: u64,
    iters: Option<usize>,
    out: Option<&Path>,
) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    let split = match method {
        SplitMethod::Ils => {
            let mut params = IlsParams::default_for(&sample, seed, ils_init(init));
            if let Some(it) = iters {
                params.max_iters = it;
            }
            ils_split(&sample, k, &params)
        }
        SplitMethod::Bestpre => best_prefix_split(&sample),
        SplitMethod::Bestsuf => best_suffix_split(&sample),
        SplitMethod::Random => random_split(&sample, seed),
    };
    let text = split.render(sample.alphabet());
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    println!("fitness {}", fitness(&sample, &split, k));
    Ok(EXIT_OK)
}

pub fn gen(
    alphabet_size: usize,
    pos: usize,
    neg: usize,
    max_len: usize,
    seed: u64,
    allow_empty_positive: bool,
    out: Option<&Path>,
) -> Result<u8> {
    let mut params = GenParams::new(alphabet_size, pos, neg, max_len, seed);
    params.allow_empty_positive = allow_empty_positive;
    let text = gen_random_sample(&params)?.render();
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

pub fn oracle(sample_path: &Path, k_max: usize) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    eprintln!("warning: exhaustive search, exponential in alphabet size and k");
    let r = brute_min_k(&sample, k_max)?;
    eprintln!("explored {}", r.states_explored);
    match (r.k_min, r.witness) {
        (Some(k), Some(nfa)) => {
            println!("k_min={k}");
            print!("{}", nfa.render(sample.alphabet()));
            Ok(EXIT_OK)
        }
        _ => {
            println!("none up to k={k_max}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

pub fn stats(sample_path: &Path, args: &ModelArgs, k: Option<usize>) -> Result<u8> {
    let sample = read_sample(sample_path)?;
    let st = sample.stats();
    println!("words\tsigma\tprefixes\tsuffixes\tpta_states");
    println!("{}\t{}\t{}\t{}\t{}", sample.len(), st.sigma, st.num_prefixes, st.num_suffixes, st.pta_states);
    if let Some(k) = k {
        let kind = model_kind(&sample, args, k, None)?;
        let enc = build(&sample, &kind, k, EncodeOptions { clone_f4: !args.no_clone })?;
        let stats = enc.stats();
        println!("{STATS_HEADER}");
        println!("{}\t{}\t{}\t{}\t{}", kind.name(), k, enc.k_target, stats.num_vars, stats.num_clauses);
        print!("{}", group_table(&stats));
    }
    Ok(EXIT_OK)
}
