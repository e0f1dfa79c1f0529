use crate::dimacs::CnfFormula;
use crate::error::{Error, Result};
use crate::gf2hash::ParityHash;

/// Terms folded per sub-XOR when a solver needs plain CNF.
pub const DEFAULT_XOR_CHUNK: usize = 6;

/// Hands out fresh variables above a fixed watermark.
#[derive(Debug, Clone)]
pub struct VarAllocator {
    last: u32,
}

impl VarAllocator {
    pub fn new(last_used: u32) -> Self {
        VarAllocator { last: last_used }
    }

    pub fn fresh(&mut self) -> i32 {
        self.last += 1;
        self.last as i32
    }

    pub fn last(&self) -> u32 {
        self.last
    }
}

/// Direct CNF of `l_1 ⊕ ... ⊕ l_s = parity`: one clause per falsifying assignment.
fn direct_xor(lits: &[i32], parity: bool, out: &mut Vec<Vec<i32>>) {
    let s = lits.len();
    if s == 0 {
        if parity {
            out.push(Vec::new());
        }
        return;
    }
    for mask in 0u64..(1u64 << s) {
        // the clause with negated positions `mask` excludes the assignment
        // making exactly those literals true; keep it when that parity is wrong
        if ((mask.count_ones() & 1) == 1) != parity {
            out.push(
                lits.iter()
                    .enumerate()
                    .map(|(k, &l)| if (mask >> k) & 1 == 1 { -l } else { l })
                    .collect(),
            );
        }
    }
}

/// CNF encoding of `⊕ support = rhs`.
///
/// While more than `chunk` terms remain, the first `chunk` are folded into a
/// fresh auxiliary (a sub-XOR of arity `chunk + 1`); the last sub-XOR holds at
/// most `chunk` terms. A support of size `t >= 2` therefore yields
/// `ceil((t-1)/(chunk-1))` sub-XORs, each of arity `s` contributing `2^(s-1)`
/// clauses. An empty support with `rhs = true` is the empty clause.
pub fn xor_to_cnf(
    support: &[i32],
    rhs: bool,
    chunk: usize,
    fresh: &mut VarAllocator,
) -> Result<Vec<Vec<i32>>> {
    if chunk < 2 {
        return Err(Error::param(format!(
            "xor chunk must be at least 2, got {chunk}"
        )));
    }
    if chunk > 20 {
        return Err(Error::param(format!(
            "xor chunk {chunk} would emit 2^{chunk} clauses per sub-xor"
        )));
    }
    let mut clauses = Vec::new();
    let mut terms: Vec<i32> = support.to_vec();
    while terms.len() > chunk {
        let aux = fresh.fresh();
        let mut group: Vec<i32> = terms.drain(..chunk).collect();
        group.push(aux);
        direct_xor(&group, false, &mut clauses);
        terms.insert(0, aux);
    }
    direct_xor(&terms, rhs, &mut clauses);
    Ok(clauses)
}

/// Number of sub-XORs [`xor_to_cnf`] produces for a support of size `t`.
pub fn xor_chunk_count(t: usize, chunk: usize) -> usize {
    match t {
        0 => 0,
        1 => 1,
        _ => (t - 1).div_ceil(chunk - 1),
    }
}

/// Appends the rows of `h` to `formula`. Column `j` of `h` is variable `j + 1`;
/// original clauses and numbering are untouched, auxiliaries come after
/// `formula.num_vars`.
pub fn conjoin(
    formula: &CnfFormula,
    h: &ParityHash,
    native_xor: bool,
    chunk: usize,
) -> Result<CnfFormula> {
    if h.n() > formula.num_vars as usize {
        return Err(Error::Dimension {
            expected: formula.num_vars as usize,
            actual: h.n(),
        });
    }
    let mut out = formula.clone();
    for i in 0..h.m() {
        let support: Vec<i32> = h.support(i).into_iter().map(|j| j as i32 + 1).collect();
        if native_xor {
            out.add_xor(&support, h.rhs(i));
        } else {
            let mut alloc = VarAllocator::new(out.num_vars);
            let clauses = xor_to_cnf(&support, h.rhs(i), chunk, &mut alloc)?;
            out.num_vars = out.num_vars.max(alloc.last());
            for c in clauses {
                out.add_clause(&c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn satisfies(clauses: &[Vec<i32>], value: impl Fn(u32) -> bool) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|&l| value(l.unsigned_abs()) == (l > 0)))
    }

    #[test]
    fn empty_support() {
        let mut a = VarAllocator::new(0);
        assert_eq!(
            xor_to_cnf(&[], true, 4, &mut a).unwrap(),
            vec![Vec::<i32>::new()]
        );
        assert!(xor_to_cnf(&[], false, 4, &mut a).unwrap().is_empty());
    }

    #[test]
    fn equivalence() {
        let mut a = VarAllocator::new(2);
        let c = xor_to_cnf(&[1, 2], false, 4, &mut a).unwrap();
        assert_eq!(c, vec![vec![-1, 2], vec![1, -2]]);
    }

    #[test]
    fn chunk_below_two_rejected() {
        let mut a = VarAllocator::new(3);
        assert!(xor_to_cnf(&[1, 2, 3], true, 1, &mut a).is_err());
    }

    #[test]
    fn projection_matches_parity() {
        for chunk in 2..=6 {
            for t in 0..=8usize {
                for rhs in [false, true] {
                    let support: Vec<i32> = (1..=t as i32).collect();
                    let mut alloc = VarAllocator::new(t as u32);
                    let clauses = xor_to_cnf(&support, rhs, chunk, &mut alloc).unwrap();
                    let aux = (alloc.last() as usize) - t;
                    for x in 0u32..(1 << t) {
                        let parity = x.count_ones() % 2 == 1;
                        let extends = (0u32..(1 << aux)).any(|y| {
                            satisfies(&clauses, |v| {
                                let v = v as usize - 1;
                                if v < t {
                                    (x >> v) & 1 == 1
                                } else {
                                    (y >> (v - t)) & 1 == 1
                                }
                            })
                        });
                        assert_eq!(
                            extends,
                            parity == rhs,
                            "chunk {chunk} t {t} rhs {rhs} x {x:b}"
                        );
                    }
                    if t >= 2 {
                        assert_eq!(aux + 1, xor_chunk_count(t, chunk));
                    }
                }
            }
        }
    }
}
