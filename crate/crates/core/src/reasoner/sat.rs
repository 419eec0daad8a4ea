//! DPLL with two watched literals, unit propagation and chronological
//! backtracking.

use std::time::Instant;

/// Signed literal over variables `1..=n`: `v` or `-v`.
pub type Lit = i32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    /// The deadline passed before a decision.
    Exhausted,
}

fn code(l: Lit) -> usize {
    let v = l.unsigned_abs() as usize;
    2 * v + usize::from(l < 0)
}

struct Decision {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
}

struct Solver<'a> {
    clauses: &'a mut [Vec<Lit>],
    /// Clause indices watching each literal code.
    watches: Vec<Vec<usize>>,
    /// 0 unassigned, 1 true, -1 false; indexed by variable.
    value: Vec<i8>,
    trail: Vec<Lit>,
    head: usize,
    decisions: Vec<Decision>,
    order: Vec<u32>,
    deadline: Option<Instant>,
    ticks: u32,
}

impl Solver<'_> {
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.unsigned_abs() as usize] = if l < 0 { -1 } else { 1 };
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.head = self.head.min(len);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            let fc = code(falsified);
            let mut watching = std::mem::take(&mut self.watches[fc]);
            let mut i = 0;
            let mut ok = true;
            while i < watching.len() {
                let ci = watching[i];
                // Keep the falsified watch in slot 1.
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let replacement = (2..self.clauses[ci].len()).find(|&k| self.lit_value(self.clauses[ci][k]) != -1);
                if let Some(k) = replacement {
                    self.clauses[ci].swap(1, k);
                    let nl = self.clauses[ci][1];
                    self.watches[code(nl)].push(ci);
                    watching.swap_remove(i);
                    continue;
                }
                match self.lit_value(first) {
                    0 => {
                        self.assign(first);
                        i += 1;
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            self.watches[fc] = watching;
            if !ok {
                return false;
            }
        }
        true
    }

    fn out_of_time(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        match self.deadline {
            Some(d) if self.ticks.is_multiple_of(256) => Instant::now() >= d,
            _ => false,
        }
    }

    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            self.undo_to(d.trail_len);
            if !d.flipped {
                self.decisions.push(Decision {
                    trail_len: d.trail_len,
                    lit: -d.lit,
                    flipped: true,
                });
                self.assign(-d.lit);
                return true;
            }
        }
        false
    }

    fn solve(&mut self) -> SatResult {
        loop {
            if self.out_of_time() {
                return SatResult::Exhausted;
            }
            if !self.propagate() {
                if !self.backtrack() {
                    return SatResult::Unsat;
                }
                continue;
            }
            let next = self.order.iter().copied().find(|&v| self.value[v as usize] == 0);
            match next {
                None => return SatResult::Sat,
                Some(v) => {
                    let lit = -(v as Lit);
                    self.decisions.push(Decision {
                        trail_len: self.trail.len(),
                        lit,
                        flipped: false,
                    });
                    self.assign(lit);
                }
            }
        }
    }
}

/// Decides satisfiability of CNF over variables `1..=num_vars`. Clauses must
/// be free of duplicate literals. Branching is on the most frequent variable,
/// trying false first.
pub fn solve(num_vars: usize, clauses: &[Vec<Lit>], deadline: Option<Instant>) -> SatResult {
    let mut clauses: Vec<Vec<Lit>> = clauses.to_vec();
    let mut value = vec![0i8; num_vars + 1];
    let mut trail = Vec::new();
    let mut freq = vec![0usize; num_vars + 1];
    let mut units = Vec::new();
    for c in &clauses {
        if c.is_empty() {
            return SatResult::Unsat;
        }
        for l in c {
            freq[l.unsigned_abs() as usize] += 1;
        }
        if c.len() == 1 {
            units.push(c[0]);
        }
    }
    for l in units {
        let v = l.unsigned_abs() as usize;
        let want = if l < 0 { -1 } else { 1 };
        if value[v] == -want {
            return SatResult::Unsat;
        }
        if value[v] == 0 {
            value[v] = want;
            trail.push(l);
        }
    }
    let mut watches = vec![Vec::new(); 2 * num_vars + 2];
    for (i, c) in clauses.iter().enumerate() {
        if c.len() >= 2 {
            watches[code(c[0])].push(i);
            watches[code(c[1])].push(i);
        }
    }
    let mut order: Vec<u32> = (1..=num_vars as u32).collect();
    order.sort_by(|a, b| freq[*b as usize].cmp(&freq[*a as usize]).then(a.cmp(b)));
    let mut s = Solver {
        clauses: &mut clauses,
        watches,
        value,
        trail,
        head: 0,
        decisions: Vec::new(),
        order,
        deadline,
        ticks: 0,
    };
    s.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: usize, clauses: &[Vec<Lit>]) -> bool {
        (0u32..1 << n).any(|m| {
            clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let bit = m >> (l.unsigned_abs() - 1) & 1 == 1;
                    if l > 0 {
                        bit
                    } else {
                        !bit
                    }
                })
            })
        })
    }

    #[test]
    fn small_cases() {
        assert_eq!(solve(1, &[vec![1], vec![-1]], None), SatResult::Unsat);
        assert_eq!(solve(2, &[vec![1, 2], vec![-1]], None), SatResult::Sat);
        assert_eq!(solve(0, &[], None), SatResult::Sat);
        assert_eq!(solve(1, &[vec![]], None), SatResult::Unsat);
        let php = vec![
            vec![1, 2],
            vec![3, 4],
            vec![5, 6],
            vec![-1, -3],
            vec![-1, -5],
            vec![-3, -5],
            vec![-2, -4],
            vec![-2, -6],
            vec![-4, -6],
        ];
        assert_eq!(solve(6, &php, None), SatResult::Unsat);
    }

    #[test]
    fn agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.random_range(1..=8usize);
            let m = rng.random_range(1..=30usize);
            let clauses: Vec<Vec<Lit>> = (0..m)
                .map(|_| {
                    let mut c: Vec<Lit> = Vec::new();
                    for _ in 0..rng.random_range(1..=3) {
                        let v = rng.random_range(1..=n) as Lit;
                        let l = if rng.random_bool(0.5) { v } else { -v };
                        if !c.contains(&l) {
                            c.push(l);
                        }
                    }
                    c
                })
                .collect();
            let expected = brute(n, &clauses);
            assert_eq!(solve(n, &clauses, None) == SatResult::Sat, expected, "{clauses:?}");
        }
    }
}
