use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{BinomialRow, LogNum, SparseFamily};
use crate::error::{Error, Result};

/// Width of the final bisection bracket for `f*`.
pub const FSTAR_TOLERANCE: f64 = 1e-5;

/// Minimum density meeting the shattering condition
/// `epsilon(n, m, q, f) <= (mu/(delta-1) + mu - 1) / (q - 1)`, `mu = q / 2^m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub f_star: f64,
    pub n: usize,
    pub m: usize,
    /// Set-size hypothesis, decimal.
    pub q: String,
    /// `log2(q) - m`
    pub c: f64,
    pub delta: f64,
    pub mu: LogNum,
    /// Right-hand side of the condition.
    pub threshold: LogNum,
    /// `epsilon` at `f_star`.
    pub condition_value: LogNum,
    /// Largest density known to violate the condition, if any was probed.
    pub bracket_lo: Option<f64>,
    /// Smallest density known to satisfy it (equals `f_star` when met).
    pub bracket_hi: f64,
    pub tolerance: f64,
    /// The condition fails even at `f = 1/2`; `f_star` is then reported as 1/2.
    pub unmet_at_half: bool,
    pub warnings: Vec<String>,
}

/// `f*` for `q = 2^(m+c)`, the form used when sizing SPARSE-COUNT levels.
pub fn min_density_for_slack(n: usize, m: usize, c: u32, delta: f64) -> Result<DensityCertificate> {
    let q = BigUint::one() << (m + c as usize);
    min_density_fstar(n, m, &q, delta)
}

/// Bisection over `f in [0, 1/2]`; `epsilon` is nonincreasing in `f`.
pub fn min_density_fstar(
    n: usize,
    m: usize,
    q: &BigUint,
    delta: f64,
) -> Result<DensityCertificate> {
    if !(delta > 2.0) || !delta.is_finite() {
        return Err(Error::param(format!("delta must exceed 2, got {delta}")));
    }
    if *q < BigUint::from(2u8) {
        return Err(Error::param("q must be at least 2"));
    }
    // q up to 2^(n+c) is allowed here: the condition is evaluated on the
    // hypothesis size, and the family only needs 1 <= m <= n.
    let row = Arc::new(BinomialRow::new(n));
    let family = |f: f64| SparseFamily::with_row(row.clone(), m, f);
    family(0.5)?;

    let mut warnings = Vec::new();
    let two_m = LogNum::pow2(m as f64);
    let qn = LogNum::from_biguint(q);
    let mu = qn / two_m;
    if mu < LogNum::ONE {
        warnings.push(format!(
            "mu = q/2^m = {} < 1; the condition is unlikely to hold",
            mu
        ));
    }
    let q_minus_1 = LogNum::from_biguint(&(q - 1u32));
    // mu/(delta-1) + mu - 1, possibly negative
    let (rhs_num, negative) = (mu / LogNum::from_f64(delta - 1.0) + mu).saturating_sub(LogNum::ONE);
    let threshold = if negative {
        LogNum::ZERO
    } else {
        rhs_num / q_minus_1
    };
    // compare collision mass against 2^m (q-1) threshold to avoid an extra division
    let mass_cap = two_m * rhs_num;

    let holds = |f: f64| -> Result<bool> {
        if negative {
            return Ok(false);
        }
        Ok(family(f)?.collision_mass(q) <= mass_cap)
    };
    let eps_at = |f: f64| -> Result<LogNum> { family(f)?.epsilon(q) };

    let c = qn.log2() - m as f64;
    let mut cert = DensityCertificate {
        f_star: 0.5,
        n,
        m,
        q: q.to_string(),
        c,
        delta,
        mu,
        threshold,
        condition_value: eps_at(0.5)?,
        bracket_lo: None,
        bracket_hi: 0.5,
        tolerance: FSTAR_TOLERANCE,
        unmet_at_half: false,
        warnings,
    };

    if !holds(0.5)? {
        cert.unmet_at_half = true;
        cert.warnings.push("condition unmet at f = 1/2".into());
        return Ok(cert);
    }
    if holds(0.0)? {
        cert.f_star = 0.0;
        cert.bracket_hi = 0.0;
        cert.condition_value = eps_at(0.0)?;
        return Ok(cert);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > FSTAR_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    cert.f_star = hi;
    cert.bracket_lo = Some(lo);
    cert.bracket_hi = hi;
    cert.condition_value = eps_at(hi)?;
    Ok(cert)
}

/// Regimes of the asymptotic minimum-density bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticRegime {
    /// Necessary density for any `m >= M_kappa`: `ln m / (kappa m)`.
    Lower { kappa: f64 },
    /// Sufficient density when `m = alpha n`: `(3.6 - 1.25 log2 alpha) ln m / m`.
    Linear { alpha: f64 },
    /// Sufficient density when `m = alpha n^beta`: `kappa (1-beta)/(2 beta) ln^2 m / m`.
    Sublinear { beta: f64, kappa: f64 },
}

/// Closed-form asymptotic density for `m` constraints. Natural logarithms throughout.
pub fn asymptotic_density(regime: AsymptoticRegime, m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::param(format!(
            "asymptotic formulas need m > 1, got {m}"
        )));
    }
    let lm = m.ln();
    match regime {
        AsymptoticRegime::Lower { kappa } => {
            if !(kappa > 1.0) {
                return Err(Error::param(format!("kappa must exceed 1, got {kappa}")));
            }
            Ok(lm / (kappa * m))
        }
        AsymptoticRegime::Linear { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::param(format!(
                    "alpha must lie in (0, 1], got {alpha}"
                )));
            }
            Ok((3.6 - 1.25 * alpha.log2()) * lm / m)
        }
        AsymptoticRegime::Sublinear { beta, kappa } => {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
            }
            if !(kappa > 1.0) {
                return Err(Error::param(format!("kappa must exceed 1, got {kappa}")));
            }
            Ok(kappa * (1.0 - beta) / (2.0 * beta) * lm * lm / m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_delta() {
        assert!(min_density_for_slack(20, 5, 2, 2.0).is_err());
        assert!(min_density_for_slack(20, 5, 2, 1.5).is_err());
    }

    #[test]
    fn huge_slack_gives_sparse_density() {
        let cert = min_density_for_slack(60, 4, 40, 2.25).unwrap();
        assert!(cert.f_star < 0.5);
        assert!(!cert.unmet_at_half);
    }

    #[test]
    fn certificate_is_minimal_within_tolerance() {
        let cert = min_density_for_slack(80, 12, 2, 2.25).unwrap();
        let lo = cert.bracket_lo.unwrap();
        assert!(cert.f_star - lo <= FSTAR_TOLERANCE);
        assert!(cert.condition_value <= cert.threshold);
        let q = BigUint::one() << 14u32;
        let below = SparseFamily::new(80, 12, cert.f_star - 1e-4)
            .unwrap()
            .epsilon(&q)
            .unwrap();
        assert!(below > cert.threshold);
    }

    #[test]
    fn asymptotic_examples() {
        let e = std::f64::consts::E;
        let lower = asymptotic_density(AsymptoticRegime::Lower { kappa: 2.0 }, e).unwrap();
        assert!((lower - 1.0 / (2.0 * e)).abs() < 1e-15);
        let lin = asymptotic_density(AsymptoticRegime::Linear { alpha: 1.0 }, e).unwrap();
        assert!((lin - 3.6 / e).abs() < 1e-15);
        let m = 1e4;
        let lo = asymptotic_density(AsymptoticRegime::Lower { kappa: 1.1 }, m).unwrap();
        let hi = asymptotic_density(AsymptoticRegime::Linear { alpha: 0.5 }, m).unwrap();
        assert!(lo < hi);
        assert!(asymptotic_density(AsymptoticRegime::Linear { alpha: 0.0 }, m).is_err());
        assert!(asymptotic_density(
            AsymptoticRegime::Sublinear {
                beta: 1.0,
                kappa: 2.0
            },
            m
        )
        .is_err());
        assert!(asymptotic_density(AsymptoticRegime::Lower { kappa: 1.0 }, m).is_err());
    }
}
