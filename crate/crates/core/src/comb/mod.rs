//! Closed-form combinatorics of sparse parity hashing.
//!
//! Everything here is a deterministic function of `(n, m, q, f)`:
//! binomial prefix sums, the radius `w*`, the average collision bound
//! `epsilon`, the variance bound `v(q)`, the upper-bound threshold
//! `U(n, m, f)`, and the minimum sufficient density.
//!
//! Probability-scale quantities are carried as [`LogNum`]; set sizes and
//! binomial prefix sums are exact [`BigUint`]s.

mod density;
mod lognum;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use density::{
    asymptotic_density, min_density_for_slack, min_density_fstar, AsymptoticRegime,
    DensityCertificate, FSTAR_TOLERANCE,
};
pub use lognum::LogNum;

/// Relative slack applied when comparing the two sides of the `U(n,m,f)`
/// predicate. The comparison is between sums of rounded terms, so ties that
/// hold exactly over the reals would otherwise be decided by rounding noise.
pub const PREDICATE_RTOL: f64 = 1e-12;

/// `ln C(n, w)`.
///
/// Exact integer arithmetic for `n <= 60`, log-gamma beyond.
pub fn log_binomial(n: u64, w: u64) -> Result<LogNum> {
    if w > n {
        return Err(Error::Domain(format!("binomial C({n}, {w}) with w > n")));
    }
    if n <= 60 {
        let w = w.min(n - w);
        let mut c: u64 = 1;
        for k in 0..w {
            // c * (n - k) stays below 2^64 for n <= 60
            c = c * (n - k) / (k + 1);
        }
        return Ok(LogNum::from_u64(c));
    }
    use statrs::function::gamma::ln_gamma;
    let ln = ln_gamma(n as f64 + 1.0) - ln_gamma(w as f64 + 1.0) - ln_gamma((n - w) as f64 + 1.0);
    Ok(LogNum::from_ln(ln.max(0.0)))
}

/// `max { w | sum_{j=1}^{w} C(n, j) <= q - 1 }`, with `0` for the empty maximum.
pub fn w_star(n: u64, q: &BigUint) -> u64 {
    if q.is_zero() {
        return 0;
    }
    let budget = q - 1u32;
    let mut c = BigUint::one();
    let mut prefix = BigUint::zero();
    for w in 1..=n {
        c = c * (n - w + 1) / w;
        prefix += &c;
        if prefix > budget {
            return w - 1;
        }
    }
    n
}

/// Exact binomial row `C(n, 0..=n)` with its prefix sums (excluding `j = 0`).
///
/// Independent of `m` and `f`, so it is shared between the families that
/// probe different densities for the same `n`.
#[derive(Debug)]
pub struct BinomialRow {
    n: usize,
    ln_binom: Vec<LogNum>,
    /// `prefix[w] = sum_{j=1}^{w} C(n, j)`
    prefix: Vec<BigUint>,
}

impl BinomialRow {
    pub fn new(n: usize) -> Self {
        let mut ln_binom = Vec::with_capacity(n + 1);
        let mut prefix = Vec::with_capacity(n + 1);
        let mut c = BigUint::one();
        let mut acc = BigUint::zero();
        ln_binom.push(LogNum::ONE);
        prefix.push(BigUint::zero());
        for w in 1..=n {
            c = c * (n - w + 1) / w;
            acc += &c;
            ln_binom.push(LogNum::from_biguint(&c));
            prefix.push(acc.clone());
        }
        BinomialRow {
            n,
            ln_binom,
            prefix,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn binomial(&self, w: usize) -> LogNum {
        self.ln_binom[w]
    }

    pub fn prefix(&self, w: usize) -> &BigUint {
        &self.prefix[w]
    }

    /// Same as [`w_star`], by binary search over the cached prefix sums.
    pub fn w_star(&self, q: &BigUint) -> usize {
        if q.is_zero() {
            return 0;
        }
        let budget = q - 1u32;
        self.prefix.partition_point(|p| *p <= budget) - 1
    }

    /// `r(n, q) = q - 1 - prefix(w*)`.
    pub fn remainder(&self, q: &BigUint, w_star: usize) -> BigUint {
        if q.is_zero() {
            return BigUint::zero();
        }
        q - 1u32 - &self.prefix[w_star]
    }
}

/// Validated arguments of `epsilon(n, m, q, f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonInputs {
    pub n: usize,
    pub m: usize,
    pub q: BigUint,
    pub f: f64,
}

impl EpsilonInputs {
    pub fn new(n: usize, m: usize, q: BigUint, f: f64) -> Result<Self> {
        check_family(n, m, f)?;
        if q < BigUint::from(2u8) || q > (BigUint::one() << n) {
            return Err(Error::param(format!("q must lie in [2, 2^{n}]")));
        }
        Ok(EpsilonInputs { n, m, q, f })
    }
}

fn check_family(n: usize, m: usize, f: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&f) {
        return Err(Error::param(format!("density f = {f} outside [0, 1/2]")));
    }
    if m == 0 || m > n {
        return Err(Error::param(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

/// `epsilon(n, m, q, f)`.
pub fn epsilon(inputs: &EpsilonInputs) -> Result<LogNum> {
    SparseFamily::new(inputs.n, inputs.m, inputs.f)?.epsilon(&inputs.q)
}

/// `v(q)` for the family `(n, m, f)`.
pub fn variance_bound_v(n: usize, m: usize, f: f64, q: &BigUint) -> Result<VarianceBound> {
    SparseFamily::new(n, m, f)?.variance_bound(q)
}

/// `U(n, m, f)`.
pub fn upper_bound_threshold(n: usize, m: usize, f: f64) -> Result<UpperThreshold> {
    Ok(SparseFamily::new(n, m, f)?.upper_threshold())
}

/// Value of `v(q)`, flagged when rounding pushed the bracket below zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBound {
    pub value: LogNum,
    pub clamped: bool,
}

/// Result of the `U(n, m, f)` search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperThreshold {
    /// Smallest `z` meeting the predicate, or `2^n` when none does.
    pub value: BigUint,
    /// No `z <= 2^n` satisfied the predicate.
    pub sentinel: bool,
}

impl UpperThreshold {
    pub fn log2(&self) -> f64 {
        LogNum::from_biguint(&self.value).log2()
    }
}

/// The family `H^f_{m x n}` together with its cached collision terms.
#[derive(Debug, Clone)]
pub struct SparseFamily {
    row: Arc<BinomialRow>,
    m: usize,
    f: f64,
    /// `term[w] = (1 + (1-2f)^w)^m` for `w` in `0..=n+1`
    term: Vec<LogNum>,
    /// `cum[w] = sum_{j=1}^{w} C(n,j) term[j]`
    cum: Vec<LogNum>,
}

impl SparseFamily {
    pub fn new(n: usize, m: usize, f: f64) -> Result<Self> {
        Self::with_row(Arc::new(BinomialRow::new(n)), m, f)
    }

    pub fn with_row(row: Arc<BinomialRow>, m: usize, f: f64) -> Result<Self> {
        let n = row.n();
        check_family(n, m, f)?;
        let x = 1.0 - 2.0 * f;
        let term: Vec<LogNum> = (0..=n + 1)
            .map(|w| {
                let xw = x.powi(w as i32);
                LogNum::from_ln(m as f64 * xw.ln_1p())
            })
            .collect();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(LogNum::ZERO);
        for w in 1..=n {
            let next = cum[w - 1] + row.binomial(w) * term[w];
            cum.push(next);
        }
        Ok(SparseFamily {
            row,
            m,
            f,
            term,
            cum,
        })
    }

    pub fn n(&self) -> usize {
        self.row.n()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn row(&self) -> &Arc<BinomialRow> {
        &self.row
    }

    /// `2^m (q - 1) epsilon(n, m, q, f)`, i.e. the bracketed sum of the
    /// epsilon definition with the `2^-m` factors pulled out.
    pub fn collision_mass(&self, q: &BigUint) -> LogNum {
        let w = self.row.w_star(q);
        let r = self.row.remainder(q, w);
        self.cum[w] + LogNum::from_biguint(&r) * self.term[w + 1]
    }

    pub fn epsilon(&self, q: &BigUint) -> Result<LogNum> {
        if *q < BigUint::from(2u8) {
            return Err(Error::param("epsilon needs q >= 2"));
        }
        let q_minus_1 = LogNum::from_biguint(&(q - 1u32));
        Ok(self.collision_mass(q) / (LogNum::pow2(self.m as f64) * q_minus_1))
    }

    /// `v(q) = (q/2^m)(1 + epsilon (q-1) - q/2^m)`.
    pub fn variance_bound(&self, q: &BigUint) -> Result<VarianceBound> {
        if q.is_zero() || *q > (BigUint::one() << self.n()) {
            return Err(Error::param(format!("v(q) needs 1 <= q <= 2^{}", self.n())));
        }
        let two_m = LogNum::pow2(self.m as f64);
        let qn = LogNum::from_biguint(q);
        // 2^m (1 + eps(q-1) - q/2^m) = 2^m + mass - q
        let (bracket, clamped) = (two_m + self.collision_mass(q)).saturating_sub(qn);
        Ok(VarianceBound {
            value: qn * bracket / (two_m * two_m),
            clamped,
        })
    }

    /// `z^2 / v(z)`, increasing in `z`.
    pub fn shatter_ratio(&self, z: &BigUint) -> Result<LogNum> {
        let v = self.variance_bound(z)?;
        let zn = LogNum::from_biguint(z);
        Ok(zn * zn / v.value)
    }

    /// `1 / (1 + 2^{2m} v(z) / z^2) >= 3/4`, rearranged to `3 (2^m + mass(z)) <= 4 z`.
    pub fn upper_predicate(&self, z: &BigUint) -> bool {
        if z.is_zero() {
            return false;
        }
        let lhs = LogNum::from_f64(3.0) * (LogNum::pow2(self.m as f64) + self.collision_mass(z));
        let rhs = LogNum::from_f64(4.0) * LogNum::from_biguint(z);
        lhs.ln() <= rhs.ln() + PREDICATE_RTOL
    }

    /// `U(n, m, f)` by doubling then bisection; monotone because `z^2/v(z)` increases.
    pub fn upper_threshold(&self) -> UpperThreshold {
        let cap = BigUint::one() << self.n();
        let mut hi = BigUint::one();
        while !self.upper_predicate(&hi) {
            if hi >= cap {
                return UpperThreshold {
                    value: cap,
                    sentinel: true,
                };
            }
            hi = (&hi << 1u32).min(cap.clone());
        }
        // predicate false at lo (or lo = 0), true at hi
        let mut lo = &hi >> 1u32;
        if lo == hi {
            lo = BigUint::zero();
        }
        while &lo + 1u32 < hi {
            let mid = (&lo + &hi) >> 1u32;
            if self.upper_predicate(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        UpperThreshold {
            value: hi,
            sentinel: false,
        }
    }
}
