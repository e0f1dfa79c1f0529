use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::ContingencyTableSpec;
use crate::error::{Error, Result};

/// Search-size limits for the exact counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountLimits {
    pub max_cells: usize,
    /// Composition-search nodes visited before giving up.
    pub max_nodes: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        CountLimits {
            max_cells: 64,
            max_nodes: 1_000_000_000,
        }
    }
}

impl CountLimits {
    /// For large but heavily constrained tables such as `synth(20)`.
    pub fn relaxed() -> Self {
        CountLimits {
            max_cells: 4096,
            max_nodes: 10_000_000_000,
        }
    }
}

struct Walker<'a> {
    spec: &'a ContingencyTableSpec,
    caps: Vec<u64>,
    /// `col_slack[i][j]`: total capacity of column `j` over rows `i..`.
    col_slack: Vec<Vec<u64>>,
    /// Sum of row marginals over rows `i..`.
    rows_left: Vec<u64>,
    nodes: u64,
    limit: u64,
}

impl<'a> Walker<'a> {
    fn new(spec: &'a ContingencyTableSpec, limits: &CountLimits) -> Result<Self> {
        spec.check()?;
        let cells = spec.rows * spec.cols;
        if cells > limits.max_cells {
            return Err(Error::Capacity(format!(
                "{}x{} = {cells} cells exceeds the limit of {}",
                spec.rows, spec.cols, limits.max_cells
            )));
        }
        let (r, c) = (spec.rows, spec.cols);
        let mut caps = vec![0; r * c];
        for i in 0..r {
            for j in 0..c {
                caps[i * c + j] = spec.cell_cap(i, j);
            }
        }
        let mut col_slack = vec![vec![0u64; c]; r + 1];
        let mut rows_left = vec![0u64; r + 1];
        for i in (0..r).rev() {
            for j in 0..c {
                col_slack[i][j] = col_slack[i + 1][j] + caps[i * c + j];
            }
            rows_left[i] = rows_left[i + 1] + spec.row_marginals[i];
        }
        Ok(Walker {
            spec,
            caps,
            col_slack,
            rows_left,
            nodes: 0,
            limit: limits.max_nodes,
        })
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Capacity(format!(
                "search exceeded {} nodes; raise the node limit",
                self.limit
            )));
        }
        Ok(())
    }

    /// Column demands left after rows `..i` can still be met by rows `i..`.
    fn feasible(&self, i: usize, colrem: &[u64]) -> bool {
        colrem.iter().sum::<u64>() == self.rows_left[i]
            && colrem.iter().zip(&self.col_slack[i]).all(|(d, s)| d <= s)
    }

    /// Calls `visit` with every way to fill row `i` given column demands `colrem`.
    fn row_fillings(
        &mut self,
        i: usize,
        colrem: &[u64],
        visit: &mut dyn FnMut(&mut Self, &[u64]) -> Result<()>,
    ) -> Result<()> {
        let c = self.spec.cols;
        let bound: Vec<u64> = (0..c)
            .map(|j| self.caps[i * c + j].min(colrem[j]))
            .collect();
        let mut suffix = vec![0u64; c + 1];
        for j in (0..c).rev() {
            suffix[j] = suffix[j + 1] + bound[j];
        }
        let mut row = vec![0u64; c];
        self.fill(
            0,
            self.spec.row_marginals[i],
            &bound,
            &suffix,
            &mut row,
            visit,
        )
    }

    fn fill(
        &mut self,
        j: usize,
        left: u64,
        bound: &[u64],
        suffix: &[u64],
        row: &mut Vec<u64>,
        visit: &mut dyn FnMut(&mut Self, &[u64]) -> Result<()>,
    ) -> Result<()> {
        self.tick()?;
        if left > suffix[j] {
            return Ok(());
        }
        if j == bound.len() {
            return visit(self, row);
        }
        // smallest value leaving enough room for the remaining cells
        let lo = left.saturating_sub(suffix[j + 1]);
        for v in lo..=bound[j].min(left) {
            row[j] = v;
            self.fill(j + 1, left - v, bound, suffix, row, visit)?;
        }
        row[j] = 0;
        Ok(())
    }

    fn count(
        &mut self,
        i: usize,
        colrem: Vec<u64>,
        memo: &mut HashMap<(usize, Vec<u64>), BigUint>,
    ) -> Result<BigUint> {
        if i == self.spec.rows {
            return Ok(if colrem.iter().all(|&d| d == 0) {
                BigUint::one()
            } else {
                BigUint::zero()
            });
        }
        if let Some(v) = memo.get(&(i, colrem.clone())) {
            return Ok(v.clone());
        }
        let mut total = BigUint::zero();
        let mut children = Vec::new();
        self.row_fillings(i, &colrem, &mut |w, row| {
            let next: Vec<u64> = colrem.iter().zip(row).map(|(d, v)| d - v).collect();
            if w.feasible(i + 1, &next) {
                children.push(next);
            }
            Ok(())
        })?;
        for next in children {
            total += self.count(i + 1, next, memo)?;
        }
        memo.insert((i, colrem), total.clone());
        Ok(total)
    }

    fn enumerate(
        &mut self,
        i: usize,
        colrem: &[u64],
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        max: usize,
    ) -> Result<()> {
        if i == self.spec.rows {
            if colrem.iter().all(|&d| d == 0) {
                if out.len() == max {
                    return Err(Error::Capacity(format!("more than {max} tables")));
                }
                out.push(prefix.clone());
            }
            return Ok(());
        }
        let mut rows = Vec::new();
        self.row_fillings(i, colrem, &mut |w, row| {
            let next: Vec<u64> = colrem.iter().zip(row).map(|(d, v)| d - v).collect();
            if w.feasible(i + 1, &next) {
                rows.push(row.to_vec());
            }
            Ok(())
        })?;
        for row in rows {
            let next: Vec<u64> = colrem.iter().zip(&row).map(|(d, v)| d - v).collect();
            prefix.extend_from_slice(&row);
            self.enumerate(i + 1, &next, prefix, out, max)?;
            prefix.truncate(prefix.len() - row.len());
        }
        Ok(())
    }
}

/// Exact number of tables with the given marginals and zeros, under default limits.
pub fn brute_force_count(spec: &ContingencyTableSpec) -> Result<BigUint> {
    brute_force_count_with(spec, &CountLimits::default())
}

/// Row-by-row enumeration of marginal compositions, memoized on the
/// remaining column demands.
pub fn brute_force_count_with(
    spec: &ContingencyTableSpec,
    limits: &CountLimits,
) -> Result<BigUint> {
    let mut w = Walker::new(spec, limits)?;
    let colrem = spec.col_marginals.clone();
    if !w.feasible(0, &colrem) {
        return Ok(BigUint::zero());
    }
    w.count(0, colrem, &mut HashMap::new())
}

/// Every table, row-major, failing once more than `max_tables` exist.
pub fn enumerate_tables(
    spec: &ContingencyTableSpec,
    limits: &CountLimits,
    max_tables: usize,
) -> Result<Vec<Vec<u64>>> {
    let mut w = Walker::new(spec, limits)?;
    let colrem = spec.col_marginals.clone();
    let mut out = Vec::new();
    if w.feasible(0, &colrem) {
        w.enumerate(0, &colrem, &mut Vec::new(), &mut out, max_tables)?;
    }
    Ok(out)
}
