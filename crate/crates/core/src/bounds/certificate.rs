use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{LowerBoundCertificate, SparseCountResult, TrialOutcome, UpperBoundCertificate};

/// Uniform JSON form of every certificate kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    /// `lower`, `upper` or `count`.
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub f: f64,
    #[serde(rename = "T")]
    pub trials: usize,
    pub params: BTreeMap<String, Value>,
    /// `null` for a vacuous lower bound or an empty count.
    pub bound_log2: Option<f64>,
    pub bound_ln: Option<f64>,
    pub confidence: Option<f64>,
    pub seed: u64,
    pub trial_outcomes: Vec<TrialOutcome>,
    pub wall_time_s: f64,
}

impl CertificateDoc {
    /// The document with timing fields zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut d = self.clone();
        d.wall_time_s = 0.0;
        for o in &mut d.trial_outcomes {
            o.solver_time_s = 0.0;
        }
        d
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn ln_of(log2: Option<f64>) -> Option<f64> {
    log2.map(|b| b * std::f64::consts::LN_2)
}

impl From<&LowerBoundCertificate> for CertificateDoc {
    fn from(c: &LowerBoundCertificate) -> Self {
        let mut params = BTreeMap::new();
        params.insert("kappa".into(), json!(c.kappa));
        params.insert("c".into(), json!(c.c));
        params.insert("c_from_data".into(), json!(c.c_from_data));
        params.insert("successes".into(), json!(c.successes));
        params.insert("bonferroni".into(), json!(c.bonferroni));
        CertificateDoc {
            kind: "lower".into(),
            n: c.n,
            m: c.m,
            f: c.f,
            trials: c.trials,
            params,
            bound_log2: c.bound_log2,
            bound_ln: ln_of(c.bound_log2),
            confidence: Some(c.confidence),
            seed: c.seed,
            trial_outcomes: c.outcomes.clone(),
            wall_time_s: c.wall_time_s,
        }
    }
}

impl From<&UpperBoundCertificate> for CertificateDoc {
    fn from(c: &UpperBoundCertificate) -> Self {
        let mut params = BTreeMap::new();
        params.insert("delta".into(), json!(c.delta));
        params.insert("empty_cells".into(), json!(c.empty_cells));
        params.insert("event_fired".into(), json!(c.event_fired));
        params.insert("threshold".into(), json!(c.threshold));
        CertificateDoc {
            kind: "upper".into(),
            n: c.n,
            m: c.m,
            f: c.f,
            trials: c.trials,
            params,
            bound_log2: Some(c.verdict_log2),
            bound_ln: ln_of(Some(c.verdict_log2)),
            confidence: Some(c.confidence),
            seed: c.seed,
            trial_outcomes: c.outcomes.clone(),
            wall_time_s: c.wall_time_s,
        }
    }
}

impl CertificateDoc {
    /// SPARSE-COUNT has no single `m`; the breaking level stands in for it.
    pub fn from_count(r: &SparseCountResult, n: usize, delta: f64, alpha: f64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("delta".into(), json!(delta));
        params.insert("alpha".into(), json!(alpha));
        params.insert("exhausted".into(), json!(r.exhausted));
        params.insert("levels".into(), json!(r.levels));
        let last_f = r.levels.last().map(|l| l.f).unwrap_or(0.5);
        CertificateDoc {
            kind: "count".into(),
            n,
            m: r.break_level.unwrap_or(n),
            f: last_f,
            trials: r.trials_per_level,
            params,
            bound_log2: r.log2_estimate,
            bound_ln: ln_of(r.log2_estimate),
            confidence: Some(1.0 - delta),
            seed: r.seed,
            trial_outcomes: Vec::new(),
            wall_time_s: r.wall_time_s,
        }
    }
}
