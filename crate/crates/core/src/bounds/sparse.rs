use serde::{Deserialize, Serialize};

use super::{estimate_survival, TrialOptions};
use crate::comb::min_density_for_slack;
use crate::error::{Error, Result};
use crate::oracle::SurvivorOracle;

/// Density used at level `i` of SPARSE-COUNT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensitySchedule {
    Constant(f64),
    /// `levels[i]`; the last entry repeats past the end.
    PerLevel(Vec<f64>),
    /// `f*(n, i, 2^(i+c), delta)`, falling back to 1/2 where the condition is unmet.
    Shattering {
        c: u32,
        delta: f64,
    },
}

impl DensitySchedule {
    pub fn density(&self, n: usize, i: usize) -> Result<f64> {
        let f = match self {
            DensitySchedule::Constant(f) => *f,
            DensitySchedule::PerLevel(v) => *v
                .get(i)
                .or(v.last())
                .ok_or_else(|| Error::param("empty density schedule"))?,
            DensitySchedule::Shattering { c, delta } => {
                if i == 0 {
                    0.5
                } else {
                    min_density_for_slack(n, i, *c, *delta)?.f_star
                }
            }
        };
        if !(0.0..=0.5).contains(&f) {
            return Err(Error::param(format!(
                "schedule density {f} at level {i} outside [0, 1/2]"
            )));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseCountConfig {
    pub delta: f64,
    pub alpha: f64,
    pub schedule: DensitySchedule,
    /// Last level tried; `None` means `n`.
    pub max_i: Option<usize>,
    /// Use `ceil(ln(1/Delta)/alpha)` trials per level, without the `ln n` factor.
    pub drop_log_n: bool,
}

impl SparseCountConfig {
    pub fn new(delta: f64, alpha: f64, schedule: DensitySchedule) -> Self {
        SparseCountConfig {
            delta,
            alpha,
            schedule,
            max_i: None,
            drop_log_n: false,
        }
    }

    /// `T = ceil(ln(1/Delta)/alpha * ln n)`.
    pub fn trials(&self, n: usize) -> Result<usize> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!(
                "Delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::param(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        let base = (1.0 / self.delta).ln() / self.alpha;
        let t = if self.drop_log_n {
            base
        } else {
            base * (n as f64).ln()
        };
        Ok((t.ceil() as usize).max(1))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRecord {
    pub i: usize,
    pub f: f64,
    pub trials: usize,
    pub successes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseCountResult {
    /// `log2 floor(2^(i-1))` for the breaking level `i`; `None` when the very
    /// first level broke, i.e. no solution was witnessed.
    pub log2_estimate: Option<f64>,
    pub break_level: Option<usize>,
    /// No level broke; the estimate is then `n`.
    pub exhausted: bool,
    pub trials_per_level: usize,
    pub levels: Vec<LevelRecord>,
    pub seed: u64,
    pub wall_time_s: f64,
}

/// Adds constraints until at most half of the hashed cells keep a solution.
pub fn sparse_count(
    oracle: &dyn SurvivorOracle,
    config: &SparseCountConfig,
    seed: u64,
    opts: &TrialOptions,
) -> Result<SparseCountResult> {
    let n = oracle.n();
    let trials = config.trials(n)?;
    let max_i = config.max_i.unwrap_or(n);
    if max_i > n {
        return Err(Error::param(format!("max_i = {max_i} exceeds n = {n}")));
    }
    let start = std::time::Instant::now();
    let mut levels = Vec::new();
    for i in 0..=max_i {
        let f = config.schedule.density(n, i)?;
        let est = estimate_survival(oracle, i, f, trials, seed, opts)?;
        est.require_final()?;
        levels.push(LevelRecord {
            i,
            f,
            trials,
            successes: est.successes,
        });
        // median of the indicators below 1: at most half succeeded
        if 2 * est.successes <= trials {
            return Ok(SparseCountResult {
                log2_estimate: (i > 0).then(|| (i - 1) as f64),
                break_level: Some(i),
                exhausted: false,
                trials_per_level: trials,
                levels,
                seed,
                wall_time_s: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(SparseCountResult {
        log2_estimate: Some(n as f64),
        break_level: None,
        exhausted: true,
        trials_per_level: trials,
        levels,
        seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

const PICK_SALT: u64 = 0x7069_636b_5f6d;

/// Coarse scan for the largest `m` whose estimated survival is at least 1/2:
/// doubling from 1, then stepping up from the last good power. Falls back to 1.
pub fn pick_promising_m(
    oracle: &dyn SurvivorOracle,
    f: f64,
    coarse_trials: usize,
    seed: u64,
    opts: &TrialOptions,
) -> Result<usize> {
    if coarse_trials < 3 {
        return Err(Error::param(format!(
            "coarse T must be at least 3, got {coarse_trials}"
        )));
    }
    let n = oracle.n();
    let seed = seed ^ PICK_SALT;
    let good = |m: usize| -> Result<bool> {
        let est = estimate_survival(oracle, m, f, coarse_trials, seed, opts)?;
        est.require_final()?;
        Ok(2 * est.successes >= coarse_trials)
    };
    let mut best = 0usize;
    let mut m = 1usize;
    loop {
        if !good(m)? {
            break;
        }
        best = m;
        if m == n {
            return Ok(n);
        }
        m = (2 * m).min(n);
    }
    let limit = if best == 0 { 0 } else { m - 1 };
    for m in best + 1..=limit {
        if !good(m)? {
            break;
        }
        best = m;
    }
    Ok(best.max(1))
}
