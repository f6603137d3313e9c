//! Clause database, semantic variable map, Tseitin helpers and DIMACS I/O.

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;

use thiserror::Error;

use crate::sample::Symbol;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("semantic variable {0} allocated twice")]
    DuplicateVar(SemVar),
    #[error("Tseitin disjunction needs at least one term")]
    EmptyDisjunction,
    #[error("malformed solver output: {0}")]
    MalformedResult(String),
    #[error("malformed DIMACS: {0}")]
    MalformedDimacs(String),
    #[error("malformed variable map line {line}: {msg}")]
    MalformedVarMap { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    var: u32,
    negated: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Lit {
        assert!(var >= 1, "variables are numbered from 1");
        Lit { var, negated: false }
    }

    pub fn neg(var: u32) -> Lit {
        Lit { negated: true, ..Lit::pos(var) }
    }

    pub fn from_dimacs(code: i64) -> Option<Lit> {
        let var = u32::try_from(code.unsigned_abs()).ok().filter(|&v| v >= 1)?;
        Some(if code < 0 { Lit::neg(var) } else { Lit::pos(var) })
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit { var: self.var, negated: !self.negated }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Meaning of a solver variable. States are 1-based; `prefix`/`suffix` are
/// ids into the encoding's canonical prefix and suffix tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemVar {
    Delta { sym: Symbol, from: usize, to: usize },
    Final(usize),
    PFinal(usize),
    PathP { prefix: usize, state: usize },
    PathS { suffix: usize, from: usize, to: usize },
    Aux(u32),
}

impl SemVar {
    pub fn kind(&self) -> &'static str {
        match self {
            SemVar::Delta { .. } => "delta",
            SemVar::Final(_) => "final",
            SemVar::PFinal(_) => "pfinal",
            SemVar::PathP { .. } => "pathp",
            SemVar::PathS { .. } => "paths",
            SemVar::Aux(_) => "aux",
        }
    }
}

impl fmt::Display for SemVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SemVar::Delta { sym, from, to } => write!(f, "delta {} {from} {to}", sym.0),
            SemVar::Final(i) => write!(f, "final {i}"),
            SemVar::PFinal(i) => write!(f, "pfinal {i}"),
            SemVar::PathP { prefix, state } => write!(f, "pathp {prefix} {state}"),
            SemVar::PathS { suffix, from, to } => write!(f, "paths {suffix} {from} {to}"),
            SemVar::Aux(t) => write!(f, "aux {t}"),
        }
    }
}

impl std::str::FromStr for SemVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let nums: Vec<usize> = toks
            .iter()
            .skip(1)
            .map(|t| t.parse::<usize>().map_err(|_| format!("bad number {t:?}")))
            .collect::<Result<_, _>>()?;
        let kind = toks.first().copied().unwrap_or("");
        match (kind, nums.as_slice()) {
            ("delta", &[a, i, j]) => Ok(SemVar::Delta { sym: Symbol(a as u32), from: i, to: j }),
            ("final", &[i]) => Ok(SemVar::Final(i)),
            ("pfinal", &[i]) => Ok(SemVar::PFinal(i)),
            ("pathp", &[p, i]) => Ok(SemVar::PathP { prefix: p, state: i }),
            ("paths", &[s, i, j]) => Ok(SemVar::PathS { suffix: s, from: i, to: j }),
            ("aux", &[t]) => Ok(SemVar::Aux(t as u32)),
            _ => Err(format!("unknown variable {s:?}")),
        }
    }
}

/// Injective map from semantic variables to dense indices `1..=len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    index: HashMap<SemVar, u32>,
    by_index: Vec<SemVar>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    pub fn get(&self, v: &SemVar) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn sem(&self, var: u32) -> Option<&SemVar> {
        self.by_index.get((var as usize).checked_sub(1)?)
    }

    /// `(index, semantic variable)` in allocation order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &SemVar)> {
        self.by_index.iter().enumerate().map(|(i, v)| (i as u32 + 1, v))
    }

    /// Fresh consecutive index for `v`.
    pub fn new_var(&mut self, v: SemVar) -> Result<u32, CnfError> {
        if self.index.contains_key(&v) {
            return Err(CnfError::DuplicateVar(v));
        }
        self.by_index.push(v);
        let idx = self.by_index.len() as u32;
        self.index.insert(v, idx);
        Ok(idx)
    }

    /// Sidecar text: one `<kind> <args...> -> <index>` line per variable.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.iter() {
            out.push_str(&format!("{v} -> {i}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<VarMap, CnfError> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| CnfError::MalformedVarMap { line: n + 1, msg };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
            let v: SemVar = lhs.trim().parse().map_err(err)?;
            let idx: u32 = rhs
                .trim()
                .parse()
                .map_err(|_| CnfError::MalformedVarMap { line: n + 1, msg: "bad index".into() })?;
            pairs.push((idx, v));
        }
        pairs.sort_by_key(|&(i, _)| i);
        let mut map = VarMap::new();
        for (expected, (idx, v)) in (1u32..).zip(pairs) {
            if idx != expected {
                return Err(CnfError::MalformedVarMap {
                    line: 0,
                    msg: format!("indices are not dense: expected {expected}, found {idx}"),
                });
            }
            map.new_var(v)?;
        }
        Ok(map)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(num_vars: u32) -> Self {
        Cnf { num_vars, clauses: Vec::new() }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Raises the declared variable count (never lowers it).
    pub fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        assert!(!clause.is_empty(), "empty clauses are not representable");
        debug_assert!(
            !clause.iter().any(|&l| clause.contains(&!l)),
            "tautological clause {clause:?}"
        );
        for l in &clause {
            self.num_vars = self.num_vars.max(l.var());
        }
        self.clauses.push(clause);
    }

    pub fn eval(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assignment.lit(l)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<Cnf, CnfError> {
        let mut declared: Option<(u32, usize)> = None;
        let mut cnf = Cnf::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match toks.as_slice() {
                    ["cnf", v, c] => {
                        let v = v.parse().map_err(|_| CnfError::MalformedDimacs(line.into()))?;
                        let c = c.parse().map_err(|_| CnfError::MalformedDimacs(line.into()))?;
                        declared = Some((v, c));
                    }
                    _ => return Err(CnfError::MalformedDimacs(format!("bad header {line:?}"))),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let code: i64 = tok
                    .parse()
                    .map_err(|_| CnfError::MalformedDimacs(format!("bad literal {tok:?}")))?;
                if code == 0 {
                    if current.is_empty() {
                        return Err(CnfError::MalformedDimacs("empty clause".into()));
                    }
                    cnf.add_clause(std::mem::take(&mut current));
                } else {
                    current.push(
                        Lit::from_dimacs(code)
                            .ok_or_else(|| CnfError::MalformedDimacs(format!("bad literal {tok:?}")))?,
                    );
                }
            }
        }
        if !current.is_empty() {
            cnf.add_clause(current);
        }
        let (v, c) = declared.ok_or_else(|| CnfError::MalformedDimacs("missing header".into()))?;
        if cnf.num_vars > v {
            return Err(CnfError::MalformedDimacs(format!(
                "literal beyond declared {v} variables"
            )));
        }
        if cnf.clauses.len() != c {
            return Err(CnfError::MalformedDimacs(format!(
                "header declares {c} clauses, found {}",
                cnf.clauses.len()
            )));
        }
        cnf.num_vars = v;
        Ok(cnf)
    }
}

/// Total truth assignment over `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn all_false(num_vars: u32) -> Self {
        Assignment(vec![false; num_vars as usize + 1])
    }

    pub fn from_values(values: &[bool]) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(false);
        v.extend_from_slice(values);
        Assignment(v)
    }

    pub fn num_vars(&self) -> u32 {
        (self.0.len() - 1) as u32
    }

    pub fn value(&self, var: u32) -> bool {
        self.0[var as usize]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.0[var as usize] = value;
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.value(l.var()) != l.is_negated()
    }

    pub fn to_v_line(&self) -> String {
        let mut out = String::from("v");
        for var in 1..=self.num_vars() {
            let l = if self.value(var) { Lit::pos(var) } else { Lit::neg(var) };
            out.push_str(&format!(" {l}"));
        }
        out.push_str(" 0");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DimacsResult {
    Sat(Assignment),
    Unsat,
    Unknown,
}

/// Reads SAT-competition output (`s` and `v` lines). Variables the solver
/// leaves out of its `v` lines default to false.
pub fn parse_dimacs_result(text: &str, num_vars: u32) -> Result<DimacsResult, CnfError> {
    let mut status: Option<&str> = None;
    let mut assignment = Assignment::all_false(num_vars);
    let mut saw_values = false;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let st = rest.trim();
            if status.is_some_and(|s| s != st) {
                return Err(CnfError::MalformedResult("conflicting status lines".into()));
            }
            status = Some(st);
        } else if let Some(rest) = line.strip_prefix('v') {
            saw_values = true;
            for tok in rest.split_whitespace() {
                let code: i64 = tok
                    .parse()
                    .map_err(|_| CnfError::MalformedResult(format!("bad value token {tok:?}")))?;
                if code == 0 {
                    continue;
                }
                let lit = Lit::from_dimacs(code)
                    .filter(|l| l.var() <= num_vars)
                    .ok_or_else(|| CnfError::MalformedResult(format!("variable {code} out of range")))?;
                assignment.set(lit.var(), !lit.is_negated());
            }
        }
    }
    match status {
        Some("SATISFIABLE") => {
            if !saw_values && num_vars > 0 {
                return Err(CnfError::MalformedResult("SATISFIABLE without values".into()));
            }
            Ok(DimacsResult::Sat(assignment))
        }
        Some("UNSATISFIABLE") => Ok(DimacsResult::Unsat),
        Some("UNKNOWN") => Ok(DimacsResult::Unknown),
        Some(other) => Err(CnfError::MalformedResult(format!("unknown status {other:?}"))),
        None => Err(CnfError::MalformedResult("no status line".into())),
    }
}

/// Clause builder that owns the variable map and counts clauses per group.
#[derive(Clone, Debug, Default)]
pub struct CnfBuilder {
    pub cnf: Cnf,
    pub varmap: VarMap,
    groups: Vec<&'static str>,
    current: &'static str,
    next_aux: u32,
}

impl CnfBuilder {
    pub fn new() -> Self {
        CnfBuilder { current: "misc", ..Default::default() }
    }

    pub fn new_var(&mut self, v: SemVar) -> Result<u32, CnfError> {
        let idx = self.varmap.new_var(v)?;
        self.cnf.reserve_vars(idx);
        Ok(idx)
    }

    /// Literal of an already allocated variable.
    pub fn lit(&self, v: SemVar) -> Lit {
        Lit::pos(
            self.varmap
                .get(&v)
                .unwrap_or_else(|| panic!("variable {v} was never allocated")),
        )
    }

    pub fn try_lit(&self, v: SemVar) -> Option<Lit> {
        self.varmap.get(&v).map(Lit::pos)
    }

    pub fn fresh_aux(&mut self) -> Lit {
        let tag = self.next_aux;
        self.next_aux += 1;
        Lit::pos(self.new_var(SemVar::Aux(tag)).expect("aux tags are unique"))
    }

    /// Group label attached to the clauses emitted from now on.
    pub fn group(&mut self, name: &'static str) {
        self.current = name;
    }

    pub fn add(&mut self, clause: Vec<Lit>) {
        self.cnf.add_clause(clause);
        self.groups.push(self.current);
    }

    pub fn add_iff(&mut self, a: Lit, b: Lit) {
        self.add(vec![!a, b]);
        self.add(vec![a, !b]);
    }

    /// Auxiliary `y` with `y <-> (l_1 & ... & l_m)`.
    pub fn and_gate(&mut self, lits: &[Lit]) -> Lit {
        let y = self.fresh_aux();
        for &l in lits {
            self.add(vec![!y, l]);
        }
        let mut big = vec![y];
        big.extend(lits.iter().map(|&l| !l));
        self.add(big);
        y
    }

    /// `x <-> OR_l (a_l & b_l)`: one auxiliary per pair.
    pub fn add_iff_or_of_pairs(&mut self, x: Lit, pairs: &[(Lit, Lit)]) -> Result<(), CnfError> {
        let conjunctions: Vec<Vec<Lit>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        self.add_iff_or_of_ands(x, &conjunctions)
    }

    pub fn add_iff_or_of_ands(&mut self, x: Lit, terms: &[Vec<Lit>]) -> Result<(), CnfError> {
        if terms.is_empty() {
            return Err(CnfError::EmptyDisjunction);
        }
        let ys: Vec<Lit> = terms.iter().map(|t| self.and_gate(t)).collect();
        let mut big = vec![!x];
        big.extend(ys.iter().copied());
        self.add(big);
        for &y in &ys {
            self.add(vec![x, !y]);
        }
        Ok(())
    }

    /// `OR_l (conjunction_l)` as a single clause over auxiliaries.
    pub fn add_or_of_ands(&mut self, terms: &[Vec<Lit>]) -> Result<(), CnfError> {
        if terms.is_empty() {
            return Err(CnfError::EmptyDisjunction);
        }
        let ys: Vec<Lit> = terms.iter().map(|t| self.and_gate(t)).collect();
        self.add(ys);
        Ok(())
    }

    /// `guard -> OR_l (conjunction_l)`. With no terms this is the unit `!guard`.
    pub fn add_implies_or_of_ands(&mut self, guard: Lit, terms: &[Vec<Lit>]) {
        let ys: Vec<Lit> = terms.iter().map(|t| self.and_gate(t)).collect();
        let mut big = vec![!guard];
        big.extend(ys);
        self.add(big);
    }

    pub fn finish(self) -> (Cnf, VarMap, Vec<&'static str>) {
        (self.cnf, self.varmap, self.groups)
    }
}
