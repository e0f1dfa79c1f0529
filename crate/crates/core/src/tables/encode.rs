//! Propositional encoding of a table: cell bit-vectors, adder trees for the
//! marginals, and upper clamps on each cell.

use serde::{Deserialize, Serialize};

use super::ContingencyTableSpec;
use crate::dimacs::CnfFormula;
use crate::error::Result;
use crate::gf2hash::{sample_hash, Assignment, HashParams, ParityHash};

/// Cell bits occupy variables `1..=num_cell_bits()`, least significant bit
/// first within a cell, cells in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEncoding {
    pub rows: usize,
    pub cols: usize,
    /// Bits per cell, 0 for structural zeros.
    pub widths: Vec<u32>,
    /// Variable of each cell's lowest bit; meaningless when the width is 0.
    pub first_var: Vec<u32>,
}

impl CellEncoding {
    /// `bit_length(min(R_i, C_j))`, at least 1; binary cells always take 1 bit.
    pub fn new(spec: &ContingencyTableSpec) -> Self {
        let (r, c) = (spec.rows, spec.cols);
        let mut widths = vec![0u32; r * c];
        let mut first_var = vec![0u32; r * c];
        let mut next = 1u32;
        for i in 0..r {
            for j in 0..c {
                let k = i * c + j;
                if spec.is_zero(i, j) {
                    continue;
                }
                let w = if spec.binary {
                    1
                } else {
                    let m = spec.row_marginals[i].min(spec.col_marginals[j]);
                    (64 - m.leading_zeros()).max(1)
                };
                widths[k] = w;
                first_var[k] = next;
                next += w;
            }
        }
        CellEncoding {
            rows: r,
            cols: c,
            widths,
            first_var,
        }
    }

    pub fn num_cell_bits(&self) -> usize {
        self.widths.iter().map(|&w| w as usize).sum()
    }

    fn cell_lits(&self, k: usize) -> Vec<Bit> {
        (0..self.widths[k])
            .map(|b| Bit::Lit((self.first_var[k] + b) as i32))
            .collect()
    }

    /// The cell-bit assignment of a row-major table.
    pub fn assignment_of(&self, cells: &[u64]) -> Assignment {
        let mut x = Assignment::zeros(self.num_cell_bits());
        for (k, &v) in cells.iter().enumerate() {
            for b in 0..self.widths[k] {
                x.set((self.first_var[k] + b) as usize - 1, (v >> b) & 1 == 1);
            }
        }
        x
    }

    /// Inverse of [`assignment_of`](Self::assignment_of).
    pub fn decode(&self, x: &Assignment) -> Vec<u64> {
        (0..self.widths.len())
            .map(|k| {
                (0..self.widths[k])
                    .filter(|&b| x.get((self.first_var[k] + b) as usize - 1))
                    .map(|b| 1u64 << b)
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EncodedTable {
    pub formula: CnfFormula,
    pub encoding: CellEncoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bit {
    Const(bool),
    Lit(i32),
}

struct Circuit {
    f: CnfFormula,
}

impl Circuit {
    fn xor2(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), Bit::Const(y)) => Bit::Const(x ^ y),
            (Bit::Const(false), o) | (o, Bit::Const(false)) => o,
            (Bit::Const(true), Bit::Lit(l)) | (Bit::Lit(l), Bit::Const(true)) => Bit::Lit(-l),
            (Bit::Lit(x), Bit::Lit(y)) => {
                let s = self.f.fresh_var();
                self.f.add_clause(&[-s, x, y]);
                self.f.add_clause(&[-s, -x, -y]);
                self.f.add_clause(&[s, -x, y]);
                self.f.add_clause(&[s, x, -y]);
                Bit::Lit(s)
            }
        }
    }

    fn and2(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::Const(false),
            (Bit::Const(true), o) | (o, Bit::Const(true)) => o,
            (Bit::Lit(x), Bit::Lit(y)) => {
                let s = self.f.fresh_var();
                self.f.add_clause(&[-s, x]);
                self.f.add_clause(&[-s, y]);
                self.f.add_clause(&[s, -x, -y]);
                Bit::Lit(s)
            }
        }
    }

    fn or2(&mut self, a: Bit, b: Bit) -> Bit {
        let neg = |v: Bit| match v {
            Bit::Const(c) => Bit::Const(!c),
            Bit::Lit(l) => Bit::Lit(-l),
        };
        let n = self.and2(neg(a), neg(b));
        neg(n)
    }

    fn maj3(&mut self, a: Bit, b: Bit, c: Bit) -> Bit {
        match (a, b, c) {
            (Bit::Const(k), x, y) | (x, Bit::Const(k), y) | (x, y, Bit::Const(k)) => {
                if k {
                    self.or2(x, y)
                } else {
                    self.and2(x, y)
                }
            }
            (Bit::Lit(x), Bit::Lit(y), Bit::Lit(z)) => {
                let s = self.f.fresh_var();
                self.f.add_clause(&[-s, x, y]);
                self.f.add_clause(&[-s, x, z]);
                self.f.add_clause(&[-s, y, z]);
                self.f.add_clause(&[s, -x, -y]);
                self.f.add_clause(&[s, -x, -z]);
                self.f.add_clause(&[s, -y, -z]);
                Bit::Lit(s)
            }
        }
    }

    /// Ripple-carry sum, one bit wider than the longer operand.
    fn add(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        let w = a.len().max(b.len());
        let get = |v: &[Bit], i: usize| v.get(i).copied().unwrap_or(Bit::Const(false));
        let mut carry = Bit::Const(false);
        let mut out = Vec::with_capacity(w + 1);
        for i in 0..w {
            let (x, y) = (get(a, i), get(b, i));
            let t = self.xor2(x, y);
            out.push(self.xor2(t, carry));
            carry = self.maj3(x, y, carry);
        }
        out.push(carry);
        while out.len() > 1 && out.last() == Some(&Bit::Const(false)) {
            out.pop();
        }
        out
    }

    /// Balanced reduction of the operands into one sum.
    fn sum(&mut self, mut terms: Vec<Vec<Bit>>) -> Vec<Bit> {
        if terms.is_empty() {
            return vec![Bit::Const(false)];
        }
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(self.add(&a, &b)),
                    None => next.push(a),
                }
            }
            terms = next;
        }
        terms.pop().unwrap()
    }

    fn assert_bit(&mut self, b: Bit, value: bool) {
        match b {
            Bit::Const(c) if c == value => {}
            Bit::Const(_) => self.f.add_contradiction(),
            Bit::Lit(l) => self.f.add_clause(&[if value { l } else { -l }]),
        }
    }

    fn assert_equals(&mut self, bits: &[Bit], k: u64) {
        if bits.len() < 64 && k >> bits.len() != 0 {
            self.f.add_contradiction();
            return;
        }
        for (p, &b) in bits.iter().enumerate() {
            self.assert_bit(b, p < 64 && (k >> p) & 1 == 1);
        }
    }

    /// `bits <= k` as one clause per zero bit of `k`.
    fn assert_at_most(&mut self, bits: &[i32], k: u64) {
        for p in 0..bits.len() {
            if (k >> p) & 1 == 1 {
                continue;
            }
            let mut clause = vec![-bits[p]];
            clause.extend(
                (p + 1..bits.len())
                    .filter(|&q| (k >> q) & 1 == 1)
                    .map(|q| -bits[q]),
            );
            self.f.add_clause(&clause);
        }
    }
}

/// Cell bits first, then adder auxiliaries; models projected onto the cell
/// bits are in bijection with the tables.
pub fn encode_to_cnf(spec: &ContingencyTableSpec) -> Result<EncodedTable> {
    spec.check()?;
    let encoding = CellEncoding::new(spec);
    let mut circ = Circuit {
        f: CnfFormula::new(encoding.num_cell_bits() as u32),
    };
    let (r, c) = (spec.rows, spec.cols);
    for i in 0..r {
        for j in 0..c {
            let k = i * c + j;
            let w = encoding.widths[k];
            if w == 0 {
                continue;
            }
            let cap = spec.cell_cap(i, j);
            if w >= 64 || cap < (1u64 << w) - 1 {
                let lits: Vec<i32> = (0..w).map(|b| (encoding.first_var[k] + b) as i32).collect();
                circ.assert_at_most(&lits, cap);
            }
        }
    }
    for i in 0..r {
        let terms = (0..c)
            .map(|j| encoding.cell_lits(i * c + j))
            .filter(|t| !t.is_empty())
            .collect();
        let s = circ.sum(terms);
        circ.assert_equals(&s, spec.row_marginals[i]);
    }
    for j in 0..c {
        let terms = (0..r)
            .map(|i| encoding.cell_lits(i * c + j))
            .filter(|t| !t.is_empty())
            .collect();
        let s = circ.sum(terms);
        circ.assert_equals(&s, spec.col_marginals[j]);
    }
    Ok(EncodedTable {
        formula: circ.f,
        encoding,
    })
}

/// A hash whose columns are exactly the cell bits.
pub fn hash_over_cells(encoded: &EncodedTable, m: usize, f: f64, seed: u64) -> Result<ParityHash> {
    sample_hash(&HashParams::new(
        encoded.encoding.num_cell_bits(),
        m,
        f,
        seed,
    )?)
}
