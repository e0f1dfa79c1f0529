//! Chronological DPLL with unit propagation over occurrence lists.
//!
//! Used for projected enumeration (the exhaustive backend) and as the
//! reference solver behind `xorcount solve`. No clause learning.

use crate::dimacs::CnfFormula;
use crate::error::{Error, Result};
use crate::gf2hash::Assignment;

use super::xor::DEFAULT_XOR_CHUNK;

struct Frame {
    lit: i32,
    trail_len: usize,
    flipped: bool,
}

pub struct Search {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    occurs: Vec<Vec<u32>>,
    value: Vec<i8>,
    trail: Vec<i32>,
    qhead: usize,
    frames: Vec<Frame>,
    trivially_unsat: bool,
    pub conflicts: u64,
}

#[inline]
fn lit_index(l: i32) -> usize {
    (l.unsigned_abs() as usize) * 2 + (l < 0) as usize
}

impl Search {
    /// XOR lines are expanded with the default chunk; auxiliaries extend `num_vars`.
    pub fn new(formula: &CnfFormula) -> Result<Self> {
        let plain = if formula.xors.is_empty() {
            formula.clone()
        } else {
            formula.expand_xors(DEFAULT_XOR_CHUNK)?
        };
        let num_vars = plain.num_vars as usize;
        let mut occurs = vec![Vec::new(); 2 * num_vars + 2];
        let mut trivially_unsat = false;
        for (ci, c) in plain.clauses.iter().enumerate() {
            if c.is_empty() {
                trivially_unsat = true;
            }
            for &l in c {
                occurs[lit_index(l)].push(ci as u32);
            }
        }
        Ok(Search {
            num_vars,
            clauses: plain.clauses,
            occurs,
            value: vec![0; num_vars + 1],
            trail: Vec::new(),
            qhead: 0,
            frames: Vec::new(),
            trivially_unsat,
            conflicts: 0,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Unit clauses are seeded here so a restart needs no special casing.
    fn seed_units(&mut self) -> bool {
        for ci in 0..self.clauses.len() {
            if self.clauses[ci].len() == 1 {
                let l = self.clauses[ci][0];
                match self.lit_value(l) {
                    1 => {}
                    -1 => return false,
                    _ => self.assign(l),
                }
            }
        }
        true
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let l = self.trail[self.qhead];
            self.qhead += 1;
            let idx = lit_index(-l);
            for k in 0..self.occurs[idx].len() {
                let ci = self.occurs[idx][k] as usize;
                let mut unassigned = 0;
                let mut last = 0;
                let mut satisfied = false;
                for &q in &self.clauses[ci] {
                    match self.lit_value(q) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            unassigned += 1;
                            last = q;
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match unassigned {
                    0 => {
                        self.conflicts += 1;
                        return false;
                    }
                    1 => self.assign(last),
                    _ => {}
                }
            }
        }
        true
    }

    /// Pops frames until one can be flipped. Frames for which `skip` holds are
    /// discarded without flipping. Returns false when the search is exhausted.
    fn backtrack(&mut self, skip: impl Fn(i32) -> bool) -> bool {
        while let Some(frame) = self.frames.pop() {
            self.undo_to(frame.trail_len);
            if !frame.flipped && !skip(frame.lit) {
                self.frames.push(Frame {
                    lit: -frame.lit,
                    trail_len: frame.trail_len,
                    flipped: true,
                });
                self.assign(-frame.lit);
                return true;
            }
        }
        false
    }

    fn decide(&mut self, v: usize) {
        let lit = -(v as i32);
        self.frames.push(Frame {
            lit,
            trail_len: self.trail.len(),
            flipped: false,
        });
        self.assign(lit);
    }

    fn reset(&mut self) -> bool {
        self.frames.clear();
        self.undo_to(0);
        !self.trivially_unsat && self.seed_units()
    }

    /// A satisfying assignment, indexed by variable (entry 0 unused).
    pub fn solve(&mut self) -> Option<Vec<bool>> {
        if !self.reset() {
            return None;
        }
        let mut cursor = 1usize;
        loop {
            if !self.propagate() {
                if !self.backtrack(|_| false) {
                    return None;
                }
                cursor = 1;
                continue;
            }
            while cursor <= self.num_vars && self.value[cursor] != 0 {
                cursor += 1;
            }
            if cursor > self.num_vars {
                return Some(self.value.iter().map(|&v| v > 0).collect());
            }
            self.decide(cursor);
        }
    }

    /// Distinct restrictions of the models to variables `1..=n`, in no fixed
    /// order. Fails once more than `limit` have been found.
    pub fn enumerate_projected(&mut self, n: usize, limit: usize) -> Result<Vec<Assignment>> {
        if n > self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                actual: n,
            });
        }
        let mut out = Vec::new();
        if !self.reset() {
            return Ok(out);
        }
        let is_aux = move |l: i32| l.unsigned_abs() as usize > n;
        let mut cursor = 1usize;
        loop {
            if !self.propagate() {
                if !self.backtrack(|_| false) {
                    return Ok(out);
                }
                cursor = 1;
                continue;
            }
            while cursor <= self.num_vars && self.value[cursor] != 0 {
                cursor += 1;
            }
            if cursor > self.num_vars {
                if out.len() == limit {
                    return Err(Error::Capacity(format!(
                        "more than {limit} projected solutions"
                    )));
                }
                let mut x = Assignment::zeros(n);
                for j in 0..n {
                    x.set(j, self.value[j + 1] > 0);
                }
                out.push(x);
                // the projection is fixed once an auxiliary is decided, so the
                // next distinct restriction must flip a projection decision
                if !self.backtrack(is_aux) {
                    return Ok(out);
                }
                cursor = 1;
                continue;
            }
            self.decide(cursor);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimacs::parse;

    #[test]
    fn solves_small() {
        let f = parse("p cnf 3 3\n1 2 0\n-1 3 0\n-3 0\n").unwrap();
        let model = Search::new(&f).unwrap().solve().unwrap();
        assert!(f.eval(|v| model[v as usize]));
        let g = parse("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert!(Search::new(&g).unwrap().solve().is_none());
    }

    #[test]
    fn projected_enumeration_matches_brute_force() {
        // x3 = x1 xor x2 through an auxiliary chain, projected onto x1..x3
        let f = parse("p cnf 4 1\nx1 2 -3 0\n4 -4 0\n").unwrap();
        let mut got: Vec<String> = Search::new(&f)
            .unwrap()
            .enumerate_projected(3, 100)
            .unwrap()
            .iter()
            .map(|a| a.to_bit_string())
            .collect();
        got.sort();
        let mut want: Vec<String> = (0u64..8)
            .filter(|x| (x & 1) ^ ((x >> 1) & 1) == (x >> 2) & 1)
            .map(|x| Assignment::from_u64(3, x).to_bit_string())
            .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_limit() {
        let f = parse("p cnf 4 0\n").unwrap();
        assert!(Search::new(&f).unwrap().enumerate_projected(4, 15).is_err());
        assert_eq!(
            Search::new(&f)
                .unwrap()
                .enumerate_projected(4, 16)
                .unwrap()
                .len(),
            16
        );
    }
}
