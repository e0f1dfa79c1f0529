//! Nonnegative reals carried as natural logarithms.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A nonnegative real number stored as its natural logarithm.
///
/// Zero is represented exactly (as `ln = -inf`). Addition is log-sum-exp,
/// multiplication and division are addition and subtraction of logarithms,
/// so values far outside the `f64` range (e.g. `C(576, 288)`) stay finite.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogNum {
    ln: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogNum = LogNum { ln: 0.0 };

    /// Wraps a natural logarithm. `-inf` is the exact zero.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogNum from NaN logarithm");
        LogNum { ln }
    }

    pub fn from_log2(log2: f64) -> Self {
        Self::from_ln(log2 * std::f64::consts::LN_2)
    }

    /// `2^k`.
    pub fn pow2(k: f64) -> Self {
        Self::from_log2(k)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogNum requires a nonnegative value, got {x}");
        LogNum { ln: x.ln() }
    }

    pub fn from_u64(x: u64) -> Self {
        Self::from_f64(x as f64)
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        if x.is_zero() {
            return Self::ZERO;
        }
        let bits = x.bits();
        if bits <= 1000 {
            if let Some(v) = x.to_f64() {
                if v.is_finite() {
                    return Self::from_f64(v);
                }
            }
        }
        // keep the leading 64 bits and account for the shift separately
        let shift = bits - 64;
        let top = (x >> shift).to_u64().expect("leading 64 bits fit");
        LogNum {
            ln: (top as f64).ln() + shift as f64 * std::f64::consts::LN_2,
        }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log2(self) -> f64 {
        self.ln / std::f64::consts::LN_2
    }

    /// Linear value; overflows to `inf` or underflows to `0` outside the `f64` range.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// `self^k` for real `k`; `0^0 = 1`.
    pub fn powf(self, k: f64) -> Self {
        if k == 0.0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return if k > 0.0 {
                Self::ZERO
            } else {
                LogNum { ln: f64::INFINITY }
            };
        }
        LogNum { ln: self.ln * k }
    }

    /// `self - other`, or `None` when the difference would be negative.
    ///
    /// Differences below one ulp of `self` collapse to zero.
    pub fn checked_sub(self, other: LogNum) -> Option<LogNum> {
        if other.is_zero() {
            return Some(self);
        }
        match other.ln.partial_cmp(&self.ln) {
            Some(Ordering::Greater) => None,
            Some(Ordering::Equal) => Some(Self::ZERO),
            _ => {
                let d = -(other.ln - self.ln).exp_m1();
                Some(LogNum {
                    ln: self.ln + d.ln(),
                })
            }
        }
    }

    /// `max(self - other, 0)` together with a flag telling whether clamping happened.
    pub fn saturating_sub(self, other: LogNum) -> (LogNum, bool) {
        match self.checked_sub(other) {
            Some(v) => (v, false),
            None => (Self::ZERO, true),
        }
    }

    /// Relative difference of the linear values, `|a - b| / max(a, b)`.
    pub fn rel_diff(self, other: LogNum) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let (hi, lo) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        -(lo.ln - hi.ln).exp_m1()
    }
}

impl Default for LogNum {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogNum(ln={})", self.ln)
    }
}

impl fmt::Display for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && (v == 0.0 || v.abs() >= 1e-300) {
            write!(f, "{v:.6e}")
        } else {
            write!(f, "exp({:.6})", self.ln)
        }
    }
}

impl PartialOrd for LogNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl Add for LogNum {
    type Output = LogNum;

    fn add(self, rhs: LogNum) -> LogNum {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if hi == f64::INFINITY {
            return LogNum { ln: hi };
        }
        LogNum {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }
}

impl Mul for LogNum {
    type Output = LogNum;

    fn mul(self, rhs: LogNum) -> LogNum {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogNum {
            ln: self.ln + rhs.ln,
        }
    }
}

impl Div for LogNum {
    type Output = LogNum;

    fn div(self, rhs: LogNum) -> LogNum {
        assert!(!rhs.is_zero(), "LogNum division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogNum {
            ln: self.ln - rhs.ln,
        }
    }
}

impl Sum for LogNum {
    /// Max-shifted log-sum-exp over all terms.
    fn sum<I: Iterator<Item = LogNum>>(iter: I) -> LogNum {
        let terms: Vec<f64> = iter.filter(|t| !t.is_zero()).map(|t| t.ln).collect();
        let Some(max) = terms.iter().copied().reduce(f64::max) else {
            return LogNum::ZERO;
        };
        if max == f64::INFINITY {
            return LogNum { ln: max };
        }
        let s: f64 = terms.iter().map(|&l| (l - max).exp()).sum();
        LogNum { ln: max + s.ln() }
    }
}
