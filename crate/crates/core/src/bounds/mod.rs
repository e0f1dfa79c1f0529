//! Certified bounds on `|S|` from oracle trials, and SPARSE-COUNT.

mod certificate;
mod sparse;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::CertificateDoc;
pub use sparse::{
    pick_promising_m, sparse_count, DensitySchedule, LevelRecord, SparseCountConfig,
    SparseCountResult,
};

use crate::comb::SparseFamily;
use crate::error::{Error, Result};
use crate::gf2hash::{sample_hash, stream_seed, trial_seed, HashParams, ParityHash};
use crate::oracle::{Answer, SurvivorOracle};

/// Per-call execution knobs; they never change results, only how they are computed.
#[derive(Debug, Clone, Default)]
pub struct TrialOptions {
    /// Wall-clock limit for each oracle call.
    pub budget: Option<Duration>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl TrialOptions {
    pub(crate) fn run<T: Send>(&self, work: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(work()),
            Some(j) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build()
                    .map_err(|e| Error::param(format!("cannot build worker pool: {e}")))?;
                Ok(pool.install(work))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: u64,
    pub seed: u64,
    pub answer: Answer,
    pub solver_time_s: f64,
}

/// `Y` successes out of `T` trials at `(m, f)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub n: usize,
    pub m: usize,
    pub f: f64,
    pub trials: usize,
    pub successes: usize,
    pub unknown: usize,
    pub seed: u64,
    pub outcomes: Vec<TrialOutcome>,
    pub wall_time_s: f64,
}

impl SurvivalEstimate {
    pub fn p_est(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Refuses estimates with unknown trials.
    pub fn require_final(&self) -> Result<()> {
        if self.unknown > 0 {
            return Err(Error::Inconclusive {
                unknown: self.unknown,
                trials: self.trials,
            });
        }
        Ok(())
    }
}

/// The hash of trial `k` at `m` constraints. `m = 0` is the trivial hash.
pub fn trial_hash(n: usize, m: usize, f: f64, master: u64, k: u64) -> Result<(ParityHash, u64)> {
    let seed = trial_seed(stream_seed(master, m as u64), k);
    if m == 0 {
        return Ok((ParityHash::trivial(n), seed));
    }
    Ok((sample_hash(&HashParams::new(n, m, f, seed)?)?, seed))
}

/// Runs `trials` independent oracle calls. Outcomes are in index order
/// whatever the scheduling.
pub fn estimate_survival(
    oracle: &dyn SurvivorOracle,
    m: usize,
    f: f64,
    trials: usize,
    seed: u64,
    opts: &TrialOptions,
) -> Result<SurvivalEstimate> {
    if trials == 0 {
        return Err(Error::param("T must be at least 1"));
    }
    let n = oracle.n();
    if m > n {
        return Err(Error::param(format!("m = {m} exceeds n = {n}")));
    }
    if !(0.0..=0.5).contains(&f) {
        return Err(Error::param(format!("f = {f} outside [0, 1/2]")));
    }
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = opts.run(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|k| {
                let (h, s) = trial_hash(n, m, f, seed, k)?;
                let v = oracle.has_survivor(&h, opts.budget)?;
                Ok(TrialOutcome {
                    index: k,
                    seed: s,
                    answer: v.answer,
                    solver_time_s: v.stats.solver_time_s,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let successes = outcomes.iter().filter(|o| o.answer == Answer::Sat).count();
    let unknown = outcomes
        .iter()
        .filter(|o| o.answer == Answer::Unknown)
        .count();
    Ok(SurvivalEstimate {
        n,
        m,
        f,
        trials,
        successes,
        unknown,
        seed,
        outcomes,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `|S| >= 2^m c / (1 + kappa)` unless `p_est < c`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub n: usize,
    pub m: usize,
    pub f: f64,
    pub trials: usize,
    pub successes: usize,
    pub kappa: f64,
    pub c: f64,
    /// `c` was set from the observed `p_est` rather than fixed in advance.
    pub c_from_data: bool,
    /// `None` is the vacuous certificate.
    pub bound_log2: Option<f64>,
    pub confidence: f64,
    /// Number of `m` values the confidence was corrected for (1 = uncorrected).
    pub bonferroni: usize,
    pub seed: u64,
    pub outcomes: Vec<TrialOutcome>,
    pub wall_time_s: f64,
}

impl LowerBoundCertificate {
    pub fn issued(&self) -> bool {
        self.bound_log2.is_some()
    }
}

/// `1 - exp(-kappa^2 c T / ((1 + kappa)(2 + kappa)))`.
pub fn lower_bound_confidence(kappa: f64, c: f64, trials: usize) -> f64 {
    -(-kappa * kappa * c * trials as f64 / ((1.0 + kappa) * (2.0 + kappa))).exp_m1()
}

/// `c = None` takes the observed `p_est`, which is already on the `1/T` grid.
pub fn lower_bound(
    est: &SurvivalEstimate,
    kappa: f64,
    c: Option<f64>,
) -> Result<LowerBoundCertificate> {
    est.require_final()?;
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(format!("kappa must be positive, got {kappa}")));
    }
    let (c, c_from_data) = match c {
        Some(c) if c > 0.0 && c <= 1.0 => (c, false),
        Some(c) => return Err(Error::param(format!("c must lie in (0, 1], got {c}"))),
        // with no successes there is nothing to certify; 1/T keeps c in range
        None => ((est.successes.max(1)) as f64 / est.trials as f64, true),
    };
    let issued = est.successes as f64 >= c * est.trials as f64 - 1e-9;
    Ok(LowerBoundCertificate {
        n: est.n,
        m: est.m,
        f: est.f,
        trials: est.trials,
        successes: est.successes,
        kappa,
        c,
        c_from_data,
        bound_log2: issued.then(|| est.m as f64 + c.log2() - (1.0 + kappa).log2()),
        confidence: lower_bound_confidence(kappa, c, est.trials),
        bonferroni: 1,
        seed: est.seed,
        outcomes: est.outcomes.clone(),
        wall_time_s: est.wall_time_s,
    })
}

/// Best issued lower bound over `m_range`; with `bonferroni` the failure
/// probability is multiplied by the number of `m` tried.
#[allow(clippy::too_many_arguments)]
pub fn best_lower_bound(
    oracle: &dyn SurvivorOracle,
    f: f64,
    m_range: std::ops::RangeInclusive<usize>,
    trials: usize,
    kappa: f64,
    c: Option<f64>,
    seed: u64,
    bonferroni: bool,
    opts: &TrialOptions,
) -> Result<LowerBoundCertificate> {
    let n = oracle.n();
    if m_range.is_empty() || *m_range.start() < 1 || *m_range.end() > n {
        return Err(Error::param(format!(
            "m range {m_range:?} must lie within 1..={n}"
        )));
    }
    let count = m_range.clone().count();
    let mut best: Option<LowerBoundCertificate> = None;
    let mut best_vacuous: Option<LowerBoundCertificate> = None;
    for m in m_range {
        let est = estimate_survival(oracle, m, f, trials, seed, opts)?;
        let cert = lower_bound(&est, kappa, c)?;
        if cert.issued() {
            if best.as_ref().is_none_or(|b| cert.bound_log2 > b.bound_log2) {
                best = Some(cert);
            }
        } else if best_vacuous
            .as_ref()
            .is_none_or(|b| cert.successes > b.successes)
        {
            best_vacuous = Some(cert);
        }
    }
    let mut cert = best.or(best_vacuous).expect("nonempty range");
    if bonferroni && count > 1 {
        cert.confidence = (1.0 - count as f64 * (1.0 - cert.confidence)).max(0.0);
        cert.bonferroni = count;
    }
    Ok(cert)
}

/// `T = ceil(24 ln(1/Delta))` trials for an upper bound at failure probability `Delta`.
pub fn upper_bound_trials(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!(
            "Delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok((24.0 * (1.0 / delta).ln()).ceil() as usize)
}

/// `|S| <= U(n, m, f)` when most hashed cells are empty; otherwise only `|S| <= 2^n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperBoundCertificate {
    pub n: usize,
    pub m: usize,
    pub f: f64,
    pub trials: usize,
    pub delta: f64,
    pub empty_cells: usize,
    pub event_fired: bool,
    /// `U(n, m, f)` in decimal.
    pub threshold: String,
    pub verdict_log2: f64,
    pub confidence: f64,
    pub seed: u64,
    pub outcomes: Vec<TrialOutcome>,
    pub wall_time_s: f64,
}

pub fn upper_bound(
    oracle: &dyn SurvivorOracle,
    m: usize,
    f: f64,
    delta: f64,
    seed: u64,
    opts: &TrialOptions,
) -> Result<UpperBoundCertificate> {
    let trials = upper_bound_trials(delta)?;
    let n = oracle.n();
    let family = SparseFamily::new(n, m, f)?;
    let est = estimate_survival(oracle, m, f, trials, seed, opts)?;
    est.require_final()?;
    let empty = trials - est.successes;
    // strict majority of empty cells
    let fired = 2 * empty > trials;
    let u = family.upper_threshold();
    let verdict_log2 = if fired {
        u.log2().min(n as f64)
    } else {
        n as f64
    };
    Ok(UpperBoundCertificate {
        n,
        m,
        f,
        trials,
        delta,
        empty_cells: empty,
        event_fired: fired,
        threshold: u.value.to_string(),
        verdict_log2,
        confidence: 1.0 - delta,
        seed,
        outcomes: est.outcomes,
        wall_time_s: est.wall_time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2hash::Assignment;
    use crate::oracle::{Backend, CountingProblem};

    fn explicit(n: usize, points: impl IntoIterator<Item = u64>) -> Box<dyn SurvivorOracle> {
        let set = points
            .into_iter()
            .map(|v| Assignment::from_u64(n, v))
            .collect();
        Backend::Auto
            .build(&CountingProblem::explicit(n, set).unwrap())
            .unwrap()
    }

    #[test]
    fn confidence_formula() {
        let c = lower_bound_confidence(1.0, 0.5, 24);
        assert!((c - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!((c - 0.8647).abs() < 1e-4);
    }

    #[test]
    fn lower_bound_arithmetic() {
        let est = SurvivalEstimate {
            n: 20,
            m: 13,
            f: 0.5,
            trials: 10,
            successes: 6,
            unknown: 0,
            seed: 0,
            outcomes: vec![],
            wall_time_s: 0.0,
        };
        let cert = lower_bound(&est, 0.1, Some(0.5)).unwrap();
        assert!((cert.bound_log2.unwrap() - (13.0 - 1.0 - 1.1f64.log2())).abs() < 1e-12);
        assert!((cert.bound_log2.unwrap() - 11.86).abs() < 0.005);
        let vacuous = lower_bound(&est, 0.1, Some(0.7)).unwrap();
        assert!(vacuous.bound_log2.is_none());
        assert_eq!(vacuous.confidence, lower_bound_confidence(0.1, 0.7, 10));
        let data = lower_bound(&est, 0.1, None).unwrap();
        assert!(data.c_from_data && (data.c - 0.6).abs() < 1e-15 && data.issued());
    }

    #[test]
    fn unknowns_block_certificates() {
        let est = SurvivalEstimate {
            n: 4,
            m: 1,
            f: 0.5,
            trials: 3,
            successes: 2,
            unknown: 1,
            seed: 0,
            outcomes: vec![],
            wall_time_s: 0.0,
        };
        assert!(matches!(
            lower_bound(&est, 1.0, None),
            Err(Error::Inconclusive { .. })
        ));
    }

    #[test]
    fn empty_set_never_survives() {
        let o = explicit(6, []);
        let est = estimate_survival(o.as_ref(), 2, 0.3, 50, 1, &TrialOptions::default()).unwrap();
        assert_eq!(est.successes, 0);
    }

    #[test]
    fn full_cube_always_survives_at_half() {
        let o = explicit(8, 0..256);
        for m in 1..=8 {
            let est =
                estimate_survival(o.as_ref(), m, 0.5, 40, 9, &TrialOptions::default()).unwrap();
            // a consistent affine system has a solution; an inconsistent one does not
            assert!(est.successes > 0);
        }
        let est = estimate_survival(o.as_ref(), 0, 0.5, 10, 9, &TrialOptions::default()).unwrap();
        assert_eq!(est.successes, 10);
    }

    #[test]
    fn outcomes_independent_of_worker_count() {
        let o = explicit(10, (0..1024).step_by(7));
        let a = estimate_survival(o.as_ref(), 6, 0.2, 64, 3, &TrialOptions::default()).unwrap();
        let b = estimate_survival(
            o.as_ref(),
            6,
            0.2,
            64,
            3,
            &TrialOptions {
                jobs: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let strip = |e: &SurvivalEstimate| {
            e.outcomes
                .iter()
                .map(|o| (o.index, o.seed, o.answer))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.successes, b.successes);
    }

    #[test]
    fn upper_bound_trial_count() {
        assert_eq!(upper_bound_trials(0.05).unwrap(), 72);
        assert!(upper_bound_trials(1.0).is_err());
    }

    #[test]
    fn full_cube_upper_bound_is_sentinel() {
        let o = explicit(6, 0..64);
        let cert = upper_bound(o.as_ref(), 3, 0.5, 0.1, 5, &TrialOptions::default()).unwrap();
        assert!(!cert.event_fired);
        assert_eq!(cert.verdict_log2, 6.0);
    }

    #[test]
    fn confidence_monotone_in_trials() {
        let mut prev = 0.0;
        for t in 1..200 {
            let c = lower_bound_confidence(0.3, 0.4, t);
            assert!(c >= prev);
            prev = c;
        }
    }
}
