//! Contingency tables with fixed marginals as counting problems.

mod count;
mod encode;
mod summary;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use count::{brute_force_count, brute_force_count_with, enumerate_tables, CountLimits};
pub use encode::{encode_to_cnf, hash_over_cells, CellEncoding, EncodedTable};
pub use summary::{write_summary_csv, SummaryRow};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTableSpec {
    pub rows: usize,
    pub cols: usize,
    pub row_marginals: Vec<u64>,
    pub col_marginals: Vec<u64>,
    pub binary: bool,
    /// Cells forced to 0, as 0-based `(row, col)`.
    pub structural_zeros: BTreeSet<(usize, usize)>,
}

impl ContingencyTableSpec {
    pub fn new(row_marginals: Vec<u64>, col_marginals: Vec<u64>, binary: bool) -> Result<Self> {
        if row_marginals.is_empty() || col_marginals.is_empty() {
            return Err(Error::param(
                "a table needs at least one row and one column",
            ));
        }
        Ok(ContingencyTableSpec {
            rows: row_marginals.len(),
            cols: col_marginals.len(),
            row_marginals,
            col_marginals,
            binary,
            structural_zeros: BTreeSet::new(),
        })
    }

    /// `n x n` binary blocked matrix with marginals `{1, n-1, ..., n-1}`;
    /// it has `1 + (n-1)^2` completions.
    pub fn synth(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("synth needs n >= 2, got {n}")));
        }
        let mut m = vec![n as u64 - 1; n];
        m[0] = 1;
        Self::new(m.clone(), m, true)
    }

    pub fn with_zero(mut self, i: usize, j: usize) -> Result<Self> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::param(format!(
                "structural zero ({i}, {j}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        self.structural_zeros.insert((i, j));
        Ok(self)
    }

    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.structural_zeros.contains(&(i, j))
    }

    /// Largest value cell `(i, j)` can take.
    pub fn cell_cap(&self, i: usize, j: usize) -> u64 {
        if self.is_zero(i, j) {
            return 0;
        }
        let m = self.row_marginals[i].min(self.col_marginals[j]);
        if self.binary {
            m.min(1)
        } else {
            m
        }
    }

    pub fn transpose(&self) -> Self {
        ContingencyTableSpec {
            rows: self.cols,
            cols: self.rows,
            row_marginals: self.col_marginals.clone(),
            col_marginals: self.row_marginals.clone(),
            binary: self.binary,
            structural_zeros: self.structural_zeros.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// Conditions under which the count is 0 for a trivial reason.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let (sr, sc): (u64, u64) = (
            self.row_marginals.iter().sum(),
            self.col_marginals.iter().sum(),
        );
        if sr != sc {
            w.push(format!(
                "row marginals sum to {sr} but column marginals to {sc}; no table exists"
            ));
        }
        if self.binary {
            if let Some(i) = self
                .row_marginals
                .iter()
                .position(|&r| r > self.cols as u64)
            {
                w.push(format!(
                    "binary row {i} marginal exceeds {} columns",
                    self.cols
                ));
            }
            if let Some(j) = self
                .col_marginals
                .iter()
                .position(|&c| c > self.rows as u64)
            {
                w.push(format!(
                    "binary column {j} marginal exceeds {} rows",
                    self.rows
                ));
            }
        }
        w
    }

    fn check(&self) -> Result<()> {
        if self.row_marginals.len() != self.rows || self.col_marginals.len() != self.cols {
            return Err(Error::param(
                "marginal lengths disagree with the table shape",
            ));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::param(
                "a table needs at least one row and one column",
            ));
        }
        if let Some(&(i, j)) = self
            .structural_zeros
            .iter()
            .find(|&&(i, j)| i >= self.rows || j >= self.cols)
        {
            return Err(Error::param(format!(
                "structural zero ({i}, {j}) outside the table"
            )));
        }
        Ok(())
    }

    /// Line format: `rows r cols c`, `R: ...`, `C: ...`, `binary: 0|1`,
    /// `Z: i j` per structural zero (0-based). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut shape = None;
        let mut rows_m = None;
        let mut cols_m = None;
        let mut binary = false;
        let mut zeros = BTreeSet::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: k + 1, msg };
            let nums = |s: &str| -> Result<Vec<u64>> {
                s.split_whitespace()
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|_| err(format!("expected a nonnegative integer, got {t:?}")))
                    })
                    .collect()
            };
            if let Some(rest) = line.strip_prefix("rows") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match toks.as_slice() {
                    [r, "cols", c] => {
                        let r = r
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad row count {r:?}")))?;
                        let c = c
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad column count {c:?}")))?;
                        shape = Some((r, c));
                    }
                    _ => return Err(err("expected 'rows <r> cols <c>'".into())),
                }
            } else if let Some(rest) = line.strip_prefix("R:") {
                rows_m = Some(nums(rest)?);
            } else if let Some(rest) = line.strip_prefix("C:") {
                cols_m = Some(nums(rest)?);
            } else if let Some(rest) = line.strip_prefix("binary:") {
                binary = match rest.trim() {
                    "0" => false,
                    "1" => true,
                    other => return Err(err(format!("binary must be 0 or 1, got {other:?}"))),
                };
            } else if let Some(rest) = line.strip_prefix("Z:") {
                let v = nums(rest)?;
                if v.len() != 2 {
                    return Err(err("expected 'Z: <row> <col>'".into()));
                }
                zeros.insert((v[0] as usize, v[1] as usize));
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing {what}"),
        };
        let (rows, cols) = shape.ok_or_else(|| missing("'rows r cols c' line"))?;
        let row_marginals = rows_m.ok_or_else(|| missing("'R:' line"))?;
        let col_marginals = cols_m.ok_or_else(|| missing("'C:' line"))?;
        if row_marginals.len() != rows || col_marginals.len() != cols {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "shape {rows}x{cols} but {} row and {} column marginals",
                    row_marginals.len(),
                    col_marginals.len()
                ),
            });
        }
        let spec = ContingencyTableSpec {
            rows,
            cols,
            row_marginals,
            col_marginals,
            binary,
            structural_zeros: zeros,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        let mut s = format!(
            "rows {} cols {}\nR: {}\nC: {}\nbinary: {}\n",
            self.rows,
            self.cols,
            join(&self.row_marginals),
            join(&self.col_marginals),
            self.binary as u8
        );
        for (i, j) in &self.structural_zeros {
            let _ = writeln!(s, "Z: {i} {j}");
        }
        s
    }
}
