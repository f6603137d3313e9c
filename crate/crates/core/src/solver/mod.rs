//! Satisfiability backends: an embedded CDCL engine and an adapter for
//! external solvers speaking the SAT-competition output format.

mod cdcl;

use std::fmt;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::cnf::{parse_dimacs_result, Assignment, Cnf, DimacsResult};

/// Resource limits for one solve call. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub wall_time: Option<Duration>,
    pub conflicts: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn seconds(secs: f64) -> Self {
        Budget { wall_time: Some(Duration::from_secs_f64(secs.max(0.0))), conflicts: None }
    }

    pub fn with_conflicts(mut self, conflicts: u64) -> Self {
        self.conflicts = Some(conflicts);
        self
    }

    /// The tighter of `self` and whatever time remains before `deadline`.
    pub fn capped_by(self, deadline: Option<Instant>) -> Self {
        let Some(deadline) = deadline else { return self };
        let left = deadline.saturating_duration_since(Instant::now());
        Budget {
            wall_time: Some(self.wall_time.map_or(left, |w| w.min(left))),
            conflicts: self.conflicts,
        }
    }

    fn deadline_from(&self, start: Instant) -> Option<Instant> {
        self.wall_time.map(|w| start + w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    ExternalFailure(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::ExternalFailure(msg) => write!(f, "external failure: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A model that has been checked against the formula.
    Sat(Assignment),
    Unsat,
    Unknown(UnknownReason),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, SolveOutcome::Unknown(_))
    }

    /// Short status word used in reports: `SAT`, `UNSAT` or `UNKNOWN`.
    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::Sat(_) => "SAT",
            SolveOutcome::Unsat => "UNSAT",
            SolveOutcome::Unknown(_) => "UNKNOWN",
        }
    }
}

/// Which backend `solve` dispatches to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Embedded,
    /// Command line of an external solver; the DIMACS path is appended.
    External(String),
}

pub fn solve(cnf: &Cnf, budget: &Budget, backend: &Backend) -> SolveOutcome {
    match backend {
        Backend::Embedded => solve_embedded(cnf, budget),
        Backend::External(cmd) => solve_external(cnf, budget, cmd),
    }
}

pub fn solve_embedded(cnf: &Cnf, budget: &Budget) -> SolveOutcome {
    let start = Instant::now();
    if budget.wall_time == Some(Duration::ZERO) || budget.conflicts == Some(0) {
        return SolveOutcome::Unknown(UnknownReason::Timeout);
    }
    let limits = cdcl::Limits { deadline: budget.deadline_from(start), max_conflicts: budget.conflicts };
    let mut solver = cdcl::Solver::new(cnf);
    match solver.solve(&limits) {
        cdcl::Status::Sat(model) => {
            assert!(cnf.eval(&model), "embedded solver produced a non-model");
            SolveOutcome::Sat(model)
        }
        cdcl::Status::Unsat => SolveOutcome::Unsat,
        cdcl::Status::Exhausted => SolveOutcome::Unknown(UnknownReason::Timeout),
    }
}

fn external_failure(msg: impl Into<String>) -> SolveOutcome {
    SolveOutcome::Unknown(UnknownReason::ExternalFailure(msg.into()))
}

/// Runs `command <dimacs-file>` and reads `s`/`v` lines from its standard
/// output. The process is killed when the wall-time budget runs out.
pub fn solve_external(cnf: &Cnf, budget: &Budget, command: &str) -> SolveOutcome {
    let start = Instant::now();
    if budget.wall_time == Some(Duration::ZERO) {
        return SolveOutcome::Unknown(UnknownReason::Timeout);
    }
    let mut parts = command.split_whitespace();
    let Some(program) = parts.next() else {
        return external_failure("empty solver command");
    };
    let mut file = match tempfile::Builder::new().suffix(".cnf").tempfile() {
        Ok(f) => f,
        Err(e) => return external_failure(format!("cannot create DIMACS file: {e}")),
    };
    if let Err(e) = file.write_all(cnf.to_dimacs().as_bytes()).and_then(|_| file.flush()) {
        return external_failure(format!("cannot write DIMACS file: {e}"));
    }
    let mut child = match Command::new(program)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return external_failure(format!("cannot start {program:?}: {e}")),
    };
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut buf = String::new();
        stdout.read_to_string(&mut buf).map(|_| buf)
    });
    let deadline = budget.deadline_from(start);
    let timed_out = loop {
        match child.try_wait() {
            Ok(Some(_)) => break false,
            Ok(None) => {}
            Err(e) => {
                let _ = child.kill();
                let _ = child.wait();
                return external_failure(format!("waiting for solver: {e}"));
            }
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break true;
        }
        thread::sleep(Duration::from_millis(2));
    };
    if timed_out {
        // A grandchild may still hold the pipe open; leave the reader detached.
        drop(reader);
        return SolveOutcome::Unknown(UnknownReason::Timeout);
    }
    let output = reader.join().ok().and_then(|r| r.ok());
    let Some(output) = output else {
        return external_failure("unreadable solver output");
    };
    match parse_dimacs_result(&output, cnf.num_vars()) {
        Ok(DimacsResult::Sat(model)) => {
            if cnf.eval(&model) {
                SolveOutcome::Sat(model)
            } else {
                external_failure("reported model does not satisfy the formula")
            }
        }
        Ok(DimacsResult::Unsat) => SolveOutcome::Unsat,
        Ok(DimacsResult::Unknown) => SolveOutcome::Unknown(UnknownReason::Timeout),
        Err(e) => external_failure(e.to_string()),
    }
}
