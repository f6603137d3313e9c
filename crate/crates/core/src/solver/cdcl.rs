//! Conflict-driven clause learning over two watched literals.
//!
//! Branching uses activities initialised from occurrence counts and bumped on
//! conflicts; decisions try the positive phase first and then reuse the last
//! assigned phase. Restarts follow the Luby sequence.

use std::time::Instant;

use crate::cnf::{Assignment, Cnf};

/// Internal literal code: `2 * var + negated`, variables from 0.
type L = u32;

fn code(var: usize, negated: bool) -> L {
    (var as u32) << 1 | negated as u32
}

fn var_of(l: L) -> usize {
    (l >> 1) as usize
}

fn neg(l: L) -> L {
    l ^ 1
}

const UNASSIGNED: u8 = 2;
const CHECK_EVERY: u64 = 2048;
const RESTART_UNIT: u64 = 100;

pub(crate) enum Status {
    Sat(Assignment),
    Unsat,
    Exhausted,
}

pub(crate) struct Limits {
    pub deadline: Option<Instant>,
    pub max_conflicts: Option<u64>,
}

struct Heap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl Heap {
    fn new(n: usize) -> Self {
        Heap { heap: Vec::with_capacity(n), pos: vec![None; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }
}

pub(crate) struct Solver {
    clauses: Vec<Vec<L>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    bump: f64,
    heap: Heap,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    propagations: u64,
    pub conflicts: u64,
    root_conflict: bool,
}

impl Solver {
    pub fn new(cnf: &Cnf) -> Solver {
        let n = cnf.num_vars() as usize;
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            level: vec![0; n],
            reason: vec![None; n],
            phase: vec![true; n],
            activity: vec![0.0; n],
            bump: 1.0,
            heap: Heap::new(n),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            propagations: 0,
            conflicts: 0,
            root_conflict: false,
        };
        for clause in cnf.clauses() {
            for l in clause {
                s.activity[l.var() as usize - 1] += 1.0;
            }
        }
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        for clause in cnf.clauses() {
            let mut lits: Vec<L> = clause
                .iter()
                .map(|l| code(l.var() as usize - 1, l.is_negated()))
                .collect();
            lits.sort_unstable();
            lits.dedup();
            if lits.windows(2).any(|w| w[0] == neg(w[1])) {
                continue;
            }
            s.add_root_clause(lits);
        }
        s
    }

    fn lit_value(&self, l: L) -> u8 {
        let v = self.value[var_of(l)];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ (l & 1) as u8
        }
    }

    fn add_root_clause(&mut self, lits: Vec<L>) {
        if self.root_conflict {
            return;
        }
        match lits.len() {
            0 => self.root_conflict = true,
            1 => match self.lit_value(lits[0]) {
                0 => self.root_conflict = true,
                1 => {}
                _ => self.assign(lits[0], None),
            },
            _ => {
                let ci = self.clauses.len();
                self.watches[lits[0] as usize].push(ci);
                self.watches[lits[1] as usize].push(ci);
                self.clauses.push(lits);
            }
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn assign(&mut self, l: L, reason: Option<usize>) {
        let v = var_of(l);
        self.value[v] = (l & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns the index of a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.value[var_of(first)];
                    if v == UNASSIGNED { UNASSIGNED } else { v ^ (first & 1) as u8 }
                };
                if first_val == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[var_of(l)];
                    let lv = if v == UNASSIGNED { UNASSIGNED } else { v ^ (l & 1) as u8 };
                    if lv != 0 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.assign(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.bump;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<L>, usize) {
        let mut learnt: Vec<L> = vec![0];
        let mut counter = 0;
        let mut p: Option<L> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let clause = self.clauses[confl].clone();
            for &q in clause.iter().skip(usize::from(p.is_some())) {
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[var_of(lit)] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = neg(lit);
                break;
            }
            confl = self.reason[var_of(lit)].expect("implied literal has a reason");
        }
        for &l in &learnt[1..] {
            self.seen[var_of(l)] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[var_of(learnt[i])] > self.level[var_of(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[var_of(learnt[1])];
        }
        self.bump /= 0.95;
        (learnt, back)
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level];
        for idx in (keep..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = var_of(l);
            self.phase[v] = l & 1 == 0;
            self.value[v] = UNASSIGNED;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level);
        self.qhead = keep;
    }

    fn pick_branch(&mut self) -> Option<L> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNASSIGNED {
                return Some(code(v, !self.phase[v]));
            }
        }
        None
    }

    fn model(&self) -> Assignment {
        let values: Vec<bool> = self.value.iter().map(|&v| v == 1).collect();
        Assignment::from_values(&values)
    }

    fn out_of_budget(&self, limits: &Limits) -> bool {
        if limits.max_conflicts.is_some_and(|m| self.conflicts >= m) {
            return true;
        }
        limits.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn solve(&mut self, limits: &Limits) -> Status {
        if self.root_conflict {
            return Status::Unsat;
        }
        if self.out_of_budget(limits) {
            return Status::Exhausted;
        }
        let mut luby_index = 0u32;
        let mut restart_at = self.conflicts + RESTART_UNIT * luby(luby_index);
        let mut next_check = self.propagations + CHECK_EVERY;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                if self.decision_level() == 0 {
                    return Status::Unsat;
                }
                let (learnt, back) = self.analyze(confl);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], None);
                } else {
                    let ci = self.clauses.len();
                    self.watches[learnt[0] as usize].push(ci);
                    self.watches[learnt[1] as usize].push(ci);
                    let asserting = learnt[0];
                    self.clauses.push(learnt);
                    self.assign(asserting, Some(ci));
                }
                if limits.max_conflicts.is_some_and(|m| self.conflicts >= m) {
                    return Status::Exhausted;
                }
                continue;
            }
            if self.propagations >= next_check {
                next_check = self.propagations + CHECK_EVERY;
                if self.out_of_budget(limits) {
                    return Status::Exhausted;
                }
            }
            if self.conflicts >= restart_at {
                luby_index += 1;
                restart_at = self.conflicts + RESTART_UNIT * luby(luby_index);
                self.backtrack(0);
            }
            match self.pick_branch() {
                None => return Status::Sat(self.model()),
                Some(l) => {
                    self.trail_lim.push(self.trail.len());
                    self.assign(l, None);
                }
            }
        }
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != u64::from(i) {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    1 << seq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn heap_orders_by_activity() {
        let act = vec![1.0, 5.0, 3.0, 5.0];
        let mut h = Heap::new(4);
        for v in 0..4 {
            h.insert(v, &act);
        }
        let order: Vec<usize> = std::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, [1, 3, 2, 0]);
    }
}
