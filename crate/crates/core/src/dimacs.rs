//! DIMACS CNF with extended XOR lines.
//!
//! XOR lines follow the CryptoMiniSat dialect: `x1 2 3 0` asserts
//! `x1 ⊕ x2 ⊕ x3 = 1`. Every negated literal flips the right-hand side, so
//! `x-1 2 3 0` asserts parity 0. Emission writes XORs with positive literals
//! and negates the first one when the required parity is 0. A space after the
//! `x` is accepted on input.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{xor_to_cnf, VarAllocator, DEFAULT_XOR_CHUNK};

/// `vars` (1-based) XOR to `rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct XorConstraint {
    pub vars: Vec<u32>,
    pub rhs: bool,
}

impl XorConstraint {
    /// Cancels repeated variables (`x ⊕ x = 0`) and folds negations into `rhs`.
    pub fn from_literals(lits: &[i32], rhs: bool) -> Self {
        let mut rhs = rhs;
        let mut vars: Vec<u32> = Vec::with_capacity(lits.len());
        for &l in lits {
            if l < 0 {
                rhs = !rhs;
            }
            let v = l.unsigned_abs();
            if let Some(pos) = vars.iter().position(|&u| u == v) {
                vars.remove(pos);
            } else {
                vars.push(v);
            }
        }
        XorConstraint { vars, rhs }
    }

    pub fn eval(&self, value: impl Fn(u32) -> bool) -> bool {
        self.vars.iter().fold(false, |acc, &v| acc ^ value(v)) == self.rhs
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub xors: Vec<XorConstraint>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            ..Default::default()
        }
    }

    pub fn fresh_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    /// Adds a clause with duplicate literals removed. An empty clause is
    /// replaced by an equivalent contradiction on a fresh variable.
    pub fn add_clause(&mut self, lits: &[i32]) {
        let mut clause: Vec<i32> = Vec::with_capacity(lits.len());
        for &l in lits {
            assert!(l != 0, "literal 0 inside a clause");
            self.num_vars = self.num_vars.max(l.unsigned_abs());
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        if clause.is_empty() {
            self.add_contradiction();
        } else {
            self.clauses.push(clause);
        }
    }

    pub fn add_contradiction(&mut self) {
        let v = self.fresh_var();
        self.clauses.push(vec![v]);
        self.clauses.push(vec![-v]);
    }

    /// Adds a normalized XOR. An empty XOR with parity 1 becomes a contradiction.
    pub fn add_xor(&mut self, lits: &[i32], rhs: bool) {
        let x = XorConstraint::from_literals(lits, rhs);
        for &v in &x.vars {
            self.num_vars = self.num_vars.max(v);
        }
        if x.vars.is_empty() {
            if x.rhs {
                self.add_contradiction();
            }
        } else {
            self.xors.push(x);
        }
    }

    /// Truth value of every clause and XOR under `value(var)`.
    pub fn eval(&self, value: impl Fn(u32) -> bool) -> bool {
        let lit = |l: i32| value(l.unsigned_abs()) == (l > 0);
        self.clauses.iter().all(|c| c.iter().any(|&l| lit(l)))
            && self.xors.iter().all(|x| x.eval(&value))
    }

    /// Replaces every XOR by its chunked CNF expansion on fresh variables.
    pub fn expand_xors(&self, chunk: usize) -> Result<CnfFormula> {
        let mut out = CnfFormula {
            num_vars: self.num_vars,
            clauses: self.clauses.clone(),
            xors: Vec::new(),
        };
        for x in &self.xors {
            let lits: Vec<i32> = x.vars.iter().map(|&v| v as i32).collect();
            let mut alloc = VarAllocator::new(out.num_vars);
            let clauses = xor_to_cnf(&lits, x.rhs, chunk, &mut alloc)?;
            out.num_vars = out.num_vars.max(alloc.last());
            for clause in clauses {
                out.add_clause(&clause);
            }
        }
        Ok(out)
    }
}

/// Parsed formula plus non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct ParsedCnf {
    pub formula: CnfFormula,
    pub warnings: Vec<String>,
}

pub fn parse(text: &str) -> Result<CnfFormula> {
    Ok(parse_with_warnings(text)?.formula)
}

pub fn parse_with_warnings(text: &str) -> Result<ParsedCnf> {
    let mut header: Option<(u32, usize)> = None;
    let mut formula = CnfFormula::default();
    let mut warnings = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    let mut pending_line = 0;

    let literal = |tok: &str, line: usize, num_vars: u32| -> Result<i32> {
        let l: i64 = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad literal {tok:?}"),
        })?;
        if l.unsigned_abs() > num_vars as u64 {
            return Err(Error::Parse {
                line,
                msg: format!("literal {l} outside 1..={num_vars}"),
            });
        }
        Ok(l as i32)
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "duplicate header".into(),
                });
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse {
                line: line_no,
                msg: format!("malformed header {line:?}"),
            };
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(bad());
            }
            let vars: u32 = toks[2].parse().map_err(|_| bad())?;
            let clauses: usize = toks[3].parse().map_err(|_| bad())?;
            header = Some((vars, clauses));
            formula.num_vars = vars;
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause before header".into(),
            });
        };
        if let Some(rest) = line.strip_prefix('x') {
            if !pending.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "xor line inside an unterminated clause".into(),
                });
            }
            let mut lits = Vec::new();
            let mut closed = false;
            for tok in rest.split_whitespace() {
                if closed {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "tokens after terminating 0".into(),
                    });
                }
                let l = literal(tok, line_no, num_vars)?;
                if l == 0 {
                    closed = true;
                } else {
                    lits.push(l);
                }
            }
            if !closed {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "xor line without terminating 0".into(),
                });
            }
            if lits.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "zero-width xor".into(),
                });
            }
            let x = XorConstraint::from_literals(&lits, true);
            if x.vars.is_empty() {
                if x.rhs {
                    warnings.push(format!("line {line_no}: xor cancels to 0 = 1"));
                    formula.add_contradiction();
                }
            } else {
                formula.xors.push(x);
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let l = literal(tok, line_no, num_vars)?;
            if l == 0 {
                if pending.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "zero-width clause".into(),
                    });
                }
                let mut clause = Vec::with_capacity(pending.len());
                for l in pending.drain(..) {
                    if !clause.contains(&l) {
                        clause.push(l);
                    }
                }
                formula.clauses.push(clause);
            } else {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.push(l);
            }
        }
    }
    let Some((_, declared)) = header else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        });
    };
    if !pending.is_empty() {
        return Err(Error::Parse {
            line: pending_line,
            msg: "clause without terminating 0".into(),
        });
    }
    let found = formula.clauses.len() + formula.xors.len();
    if found != declared {
        warnings.push(format!("header declares {declared} clauses, found {found}"));
    }
    Ok(ParsedCnf { formula, warnings })
}

/// Canonical text: header, clauses in order, then XOR lines (native) or their
/// expansion with the default chunk size.
pub fn emit(formula: &CnfFormula, native_xor: bool) -> Result<String> {
    emit_with_chunk(formula, native_xor, DEFAULT_XOR_CHUNK)
}

pub fn emit_with_chunk(formula: &CnfFormula, native_xor: bool, chunk: usize) -> Result<String> {
    if !native_xor && !formula.xors.is_empty() {
        return emit_with_chunk(&formula.expand_xors(chunk)?, true, chunk);
    }
    let mut out = String::new();
    let count = formula.clauses.len() + formula.xors.len();
    writeln!(out, "p cnf {} {}", formula.num_vars, count).unwrap();
    for clause in &formula.clauses {
        for l in clause {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    for x in &formula.xors {
        out.push('x');
        for (k, v) in x.vars.iter().enumerate() {
            if k == 0 && !x.rhs {
                write!(out, "-{v} ").unwrap();
            } else {
                write!(out, "{v} ").unwrap();
            }
        }
        out.push_str("0\n");
    }
    Ok(out)
}
