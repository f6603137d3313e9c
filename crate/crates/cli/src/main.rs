mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status: the run worked and produced a positive answer.
pub const EXIT_OK: u8 = 0;
/// The run worked; the answer is negative (UNSAT, failed reduction, inconsistent).
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "nfasat", version, about = "Minimal NFA inference from labelled words via SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelFamily {
    Prefix,
    Suffix,
    HybridIls,
    HybridBestpre,
    HybridBestsuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Bestpre,
    Bestsuf,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "prefix")]
    pub model: ModelFamily,
    /// Starting split for hybrid-ils.
    #[arg(long, value_enum, default_value = "random")]
    pub ils_init: InitArg,
    /// Use the (k+1)-state encodings followed by state reduction.
    #[arg(long)]
    pub plus_one: bool,
    /// Use the refined (k+1) prefix model (implies --plus-one).
    #[arg(long)]
    pub refined: bool,
    /// Leave out the clone clauses of the (k+1) models.
    #[arg(long)]
    pub no_clone: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local-search iterations (default: 10 per sample word).
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// External solver command; the DIMACS path is appended as the last argument.
    #[arg(long)]
    pub solver_cmd: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find the smallest consistent NFA for a sample.
    Infer {
        sample: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Seconds allowed per solver call.
        #[arg(long)]
        probe_timeout: Option<f64>,
        /// Seconds allowed for the whole search.
        #[arg(long)]
        total_timeout: Option<f64>,
        /// Binary search between the bounds instead of scanning upward.
        #[arg(long)]
        bisect: bool,
        /// Sizes probed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        /// Write the resulting automaton in exchange format.
        #[arg(long)]
        emit_nfa: Option<PathBuf>,
        #[arg(long)]
        emit_report: Option<PathBuf>,
        /// Directory receiving the DIMACS file and variable map of every probe.
        #[arg(long)]
        emit_cnf: Option<PathBuf>,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Write the CNF instance for one size.
    Encode {
        sample: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        /// Cut positions for hybrid models (overrides --model's split).
        #[arg(long)]
        split_file: Option<PathBuf>,
        /// Output stem: writes <out>.cnf and <out>.varmap.
        #[arg(short, long)]
        out: PathBuf,
        /// Also print clause counts per constraint group.
        #[arg(long)]
        groups: bool,
    },
    /// Solve a DIMACS file.
    Solve {
        cnf: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        conflicts: Option<u64>,
        /// Variable map used to print the automaton of a model.
        #[arg(long)]
        varmap: Option<PathBuf>,
        /// Alphabet source for printing the automaton.
        #[arg(long, requires = "varmap")]
        sample: Option<PathBuf>,
    },
    /// Shrink a (k+1)-state automaton with a terminal final state to k states.
    Reduce {
        nfa: PathBuf,
        sample: PathBuf,
        /// Fall back to trying every final-state subset.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = nfasat::reduce::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[arg(long)]
        emit_nfa: Option<PathBuf>,
    },
    /// Check an automaton against a sample.
    Check { nfa: PathBuf, sample: PathBuf },
    /// Compute a prefix/suffix split of the sample words.
    Split {
        sample: PathBuf,
        #[arg(long, value_enum, default_value = "ils")]
        method: SplitMethod,
        #[arg(long, value_enum, default_value = "random")]
        ils_init: InitArg,
        /// State count used in the fitness.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate a random sample.
    Gen {
        #[arg(long, default_value_t = 2)]
        alphabet_size: usize,
        #[arg(long)]
        pos: usize,
        #[arg(long)]
        neg: usize,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        allow_empty_positive: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive minimum search. Exponential; for tiny samples only.
    Oracle {
        sample: PathBuf,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
    },
    /// Sample statistics, and encoding statistics when --k is given.
    Stats {
        sample: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitMethod {
    Ils,
    Bestpre,
    Bestsuf,
    Random,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Infer {
            sample,
            model,
            solver,
            probe_timeout,
            total_timeout,
            bisect,
            jobs,
            emit_dot,
            emit_nfa,
            emit_report,
            emit_cnf,
            timings,
        } => commands::infer(commands::InferOpts {
            sample,
            model,
            solver,
            probe_timeout,
            total_timeout,
            bisect,
            jobs,
            emit_dot,
            emit_nfa,
            emit_report,
            emit_cnf,
            timings,
        }),
        Command::Encode { sample, model, k, split_file, out, groups } => {
            commands::encode(&sample, &model, k, split_file.as_deref(), &out, groups)
        }
        Command::Solve { cnf, solver, timeout, conflicts, varmap, sample } => {
            commands::solve(&cnf, &solver, timeout, conflicts, varmap.as_deref(), sample.as_deref())
        }
        Command::Reduce { nfa, sample, enumerate, cap, emit_nfa } => {
            commands::reduce(&nfa, &sample, enumerate, cap, emit_nfa.as_deref())
        }
        Command::Check { nfa, sample } => commands::check(&nfa, &sample),
        Command::Split { sample, method, ils_init, k, seed, iters, out } => {
            commands::split(&sample, method, ils_init, k, seed, iters, out.as_deref())
        }
        Command::Gen { alphabet_size, pos, neg, max_len, seed, allow_empty_positive, out } => {
            commands::gen(alphabet_size, pos, neg, max_len, seed, allow_empty_positive, out.as_deref())
        }
        Command::Oracle { sample, k_max } => commands::oracle(&sample, k_max),
        Command::Stats { sample, model, k } => commands::stats(&sample, &model, k),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
