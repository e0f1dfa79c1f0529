//! Membership oracles answering "is `S ∩ h⁻¹(0)` nonempty?".

mod external;
mod search;
mod xor;

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use external::{run_external, ExternalSolver, SolverProfile, INPUT_PLACEHOLDER};
pub use search::Search;
pub use xor::{conjoin, xor_chunk_count, xor_to_cnf, VarAllocator, DEFAULT_XOR_CHUNK};

use crate::dimacs::{self, CnfFormula};
use crate::error::{Error, Result};
use crate::gf2hash::{Assignment, ParityHash};
use crate::tables::{self, ContingencyTableSpec, CountLimits, EncodedTable};

/// Hard ceiling on `n` for enumerating a CNF's projected solutions.
pub const EXHAUSTIVE_MAX_VARS: usize = 26;

/// Ceiling on how many solutions the exhaustive backend will hold.
pub const EXHAUSTIVE_MAX_SOLUTIONS: usize = 1 << 26;

#[derive(Debug, Clone)]
pub enum ProblemKind {
    ExplicitSet(Arc<Vec<Assignment>>),
    /// Solutions are models projected onto variables `1..=n`.
    Cnf(CnfFormula),
    Table(Box<TableProblem>),
}

#[derive(Debug, Clone)]
pub struct TableProblem {
    pub spec: ContingencyTableSpec,
    pub encoded: EncodedTable,
}

/// The set `S` a bound is about, with `n` the width hashes range over.
#[derive(Debug, Clone)]
pub struct CountingProblem {
    n: usize,
    kind: ProblemKind,
}

impl CountingProblem {
    /// Duplicates are dropped; every element must have width `n`.
    pub fn explicit(n: usize, mut set: Vec<Assignment>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("explicit set needs n >= 1"));
        }
        if let Some(bad) = set.iter().find(|x| x.width() != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: bad.width(),
            });
        }
        set.sort_by(|a, b| a.words().cmp(b.words()));
        set.dedup();
        Ok(CountingProblem {
            n,
            kind: ProblemKind::ExplicitSet(Arc::new(set)),
        })
    }

    /// Projection onto every variable of the formula.
    pub fn cnf(formula: CnfFormula) -> Result<Self> {
        let n = formula.num_vars as usize;
        Self::cnf_projected(formula, n)
    }

    /// Projection onto variables `1..=n`; the rest are existential.
    pub fn cnf_projected(formula: CnfFormula, n: usize) -> Result<Self> {
        if n == 0 || n > formula.num_vars as usize {
            return Err(Error::param(format!(
                "projection width {n} outside 1..={}",
                formula.num_vars
            )));
        }
        Ok(CountingProblem {
            n,
            kind: ProblemKind::Cnf(formula),
        })
    }

    /// Lowered to CNF; hashes range over cell bits only.
    pub fn table(spec: ContingencyTableSpec) -> Result<Self> {
        let encoded = tables::encode_to_cnf(&spec)?;
        let n = encoded.encoding.num_cell_bits();
        if n == 0 {
            return Err(Error::param("table has no cell bits to hash over"));
        }
        Ok(CountingProblem {
            n,
            kind: ProblemKind::Table(Box::new(TableProblem { spec, encoded })),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    /// The CNF a solver sees, when the problem has one.
    pub fn formula(&self) -> Option<&CnfFormula> {
        match &self.kind {
            ProblemKind::ExplicitSet(_) => None,
            ProblemKind::Cnf(f) => Some(f),
            ProblemKind::Table(t) => Some(&t.encoded.formula),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ProblemKind::ExplicitSet(s) => {
                format!("explicit set of {} points in n = {}", s.len(), self.n)
            }
            ProblemKind::Cnf(f) => format!(
                "cnf with {} vars, {} clauses, {} xors, projected on n = {}",
                f.num_vars,
                f.clauses.len(),
                f.xors.len(),
                self.n
            ),
            ProblemKind::Table(t) => format!(
                "{}x{} table, {} cell bits, {} cnf vars",
                t.spec.rows, t.spec.cols, self.n, t.encoded.formula.num_vars
            ),
        }
    }

    /// Materializes `S`. Table problems go through the table enumerator,
    /// CNF problems through projected search (`n <= 26`).
    pub fn solutions(&self) -> Result<Vec<Assignment>> {
        match &self.kind {
            ProblemKind::ExplicitSet(s) => Ok(s.as_ref().clone()),
            ProblemKind::Cnf(f) => {
                if self.n > EXHAUSTIVE_MAX_VARS {
                    return Err(Error::Capacity(format!(
                        "exhaustive enumeration needs n <= {EXHAUSTIVE_MAX_VARS}, got {}",
                        self.n
                    )));
                }
                Search::new(f)?.enumerate_projected(self.n, EXHAUSTIVE_MAX_SOLUTIONS)
            }
            ProblemKind::Table(t) => {
                let all = tables::enumerate_tables(
                    &t.spec,
                    &CountLimits::relaxed(),
                    EXHAUSTIVE_MAX_SOLUTIONS,
                )?;
                Ok(all
                    .iter()
                    .map(|cells| t.encoded.encoding.assignment_of(cells))
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub solver_time_s: f64,
    pub conflicts: Option<u64>,
}

/// One oracle answer. A witness is present only for `Sat` and has been rechecked.
#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub answer: Answer,
    pub witness: Option<Assignment>,
    pub stats: SolverStats,
    pub diagnostics: Option<String>,
}

impl OracleVerdict {
    pub(crate) fn unknown(stats: SolverStats, diagnostics: String) -> Self {
        OracleVerdict {
            answer: Answer::Unknown,
            witness: None,
            stats,
            diagnostics: Some(diagnostics),
        }
    }
}

/// A backend bound to one problem. Calls are independent and may run concurrently.
pub trait SurvivorOracle: Send + Sync {
    fn n(&self) -> usize;

    fn name(&self) -> &'static str;

    fn has_survivor(&self, h: &ParityHash, budget: Option<Duration>) -> Result<OracleVerdict>;
}

/// Which oracle to bind to a problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// Explicit scan for explicit sets, exhaustive enumeration otherwise.
    Auto,
    Explicit,
    Exhaustive,
    External(ExternalSolver),
}

impl Backend {
    pub fn build(&self, problem: &CountingProblem) -> Result<Box<dyn SurvivorOracle>> {
        match (self, problem.kind()) {
            (Backend::Auto | Backend::Explicit, ProblemKind::ExplicitSet(s)) => {
                Ok(Box::new(ScanOracle {
                    n: problem.n(),
                    points: s.clone(),
                    name: "explicit",
                }))
            }
            (Backend::Explicit, _) => Err(Error::Unsupported(
                "the explicit backend needs an explicit set; use the exhaustive backend".into(),
            )),
            (Backend::Auto | Backend::Exhaustive, _) => Ok(Box::new(ScanOracle {
                n: problem.n(),
                points: Arc::new(problem.solutions()?),
                name: "exhaustive",
            })),
            (Backend::External(solver), _) => {
                let formula = problem.formula().ok_or_else(|| {
                    Error::Unsupported("external solvers need a CNF or table problem".into())
                })?;
                Ok(Box::new(ExternalOracle {
                    n: problem.n(),
                    formula: formula.clone(),
                    solver: solver.clone(),
                }))
            }
        }
    }
}

fn check_width(n: usize, h: &ParityHash) -> Result<()> {
    if h.n() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: h.n(),
        });
    }
    Ok(())
}

struct ScanOracle {
    n: usize,
    points: Arc<Vec<Assignment>>,
    name: &'static str,
}

impl SurvivorOracle for ScanOracle {
    fn n(&self) -> usize {
        self.n
    }

    fn name(&self) -> &'static str {
        self.name
    }

    fn has_survivor(&self, h: &ParityHash, _budget: Option<Duration>) -> Result<OracleVerdict> {
        check_width(self.n, h)?;
        let start = Instant::now();
        let hit = self.points.iter().find(|x| h.maps_words_to_zero(x.words()));
        let stats = SolverStats {
            solver_time_s: start.elapsed().as_secs_f64(),
            conflicts: None,
        };
        Ok(match hit {
            Some(x) => OracleVerdict {
                answer: Answer::Sat,
                witness: Some(x.clone()),
                stats,
                diagnostics: None,
            },
            None => OracleVerdict {
                answer: Answer::Unsat,
                witness: None,
                stats,
                diagnostics: None,
            },
        })
    }
}

struct ExternalOracle {
    n: usize,
    formula: CnfFormula,
    solver: ExternalSolver,
}

impl SurvivorOracle for ExternalOracle {
    fn n(&self) -> usize {
        self.n
    }

    fn name(&self) -> &'static str {
        "external"
    }

    fn has_survivor(&self, h: &ParityHash, budget: Option<Duration>) -> Result<OracleVerdict> {
        check_width(self.n, h)?;
        let conjoined = conjoin(&self.formula, h, self.solver.native_xor, self.solver.chunk)?;
        let text = dimacs::emit(&conjoined, self.solver.native_xor)?;
        let mut verdict = run_external(&text, &self.solver, budget)?;
        if let Some(full) = verdict.witness.take() {
            let mut x = Assignment::zeros(self.n);
            for j in 0..self.n {
                x.set(j, full.get(j));
            }
            if !h.maps_to_zero(&x)? {
                return Err(Error::Integrity(
                    "projected witness is not in h^-1(0)".into(),
                ));
            }
            verdict.witness = Some(x);
        }
        Ok(verdict)
    }
}

/// One-shot query with the automatic backend. Binding an oracle once through
/// [`Backend::build`] is cheaper when many hashes are tried.
pub fn has_survivor(
    problem: &CountingProblem,
    h: &ParityHash,
    budget: Option<Duration>,
) -> Result<OracleVerdict> {
    Backend::Auto.build(problem)?.has_survivor(h, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2hash::{sample_hash, HashParams};

    #[test]
    fn empty_set_is_never_hit() {
        let p = CountingProblem::explicit(5, vec![]).unwrap();
        for seed in 0..20 {
            let h = sample_hash(&HashParams::new(5, 2, 0.5, seed).unwrap()).unwrap();
            assert_eq!(has_survivor(&p, &h, None).unwrap().answer, Answer::Unsat);
        }
    }

    #[test]
    fn zero_hash_hits_any_element() {
        let p = CountingProblem::explicit(3, vec![Assignment::from_u64(3, 5)]).unwrap();
        let h = ParityHash::from_rows(&[vec![false; 3]], &[false]).unwrap();
        let v = has_survivor(&p, &h, None).unwrap();
        assert_eq!(v.answer, Answer::Sat);
        assert_eq!(
            v.witness.unwrap().to_bit_string(),
            Assignment::from_u64(3, 5).to_bit_string()
        );
    }

    #[test]
    fn explicit_dedups_and_checks_width() {
        let x = Assignment::from_u64(4, 3);
        let p = CountingProblem::explicit(4, vec![x.clone(), x.clone()]).unwrap();
        assert_eq!(p.solutions().unwrap().len(), 1);
        assert!(CountingProblem::explicit(5, vec![x]).is_err());
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let p = CountingProblem::explicit(4, vec![Assignment::zeros(4)]).unwrap();
        let h = ParityHash::trivial(5);
        assert!(has_survivor(&p, &h, None).is_err());
    }

    #[test]
    fn exhaustive_matches_scan_on_small_cnf() {
        let f = dimacs::parse("p cnf 4 2\n1 2 0\n-1 3 0\nx1 4 0\n").unwrap();
        let problem = CountingProblem::cnf(f.clone()).unwrap();
        let sols = problem.solutions().unwrap();
        let brute: Vec<Assignment> = (0u64..16)
            .map(|v| Assignment::from_u64(4, v))
            .filter(|x| f.eval(|v| x.get(v as usize - 1)))
            .collect();
        assert_eq!(sols.len(), brute.len());
        let oracle = Backend::Exhaustive.build(&problem).unwrap();
        let explicit = Backend::Explicit
            .build(&CountingProblem::explicit(4, brute).unwrap())
            .unwrap();
        for seed in 0..200 {
            let h = sample_hash(&HashParams::new(4, 1 + (seed as usize % 3), 0.4, seed).unwrap())
                .unwrap();
            assert_eq!(
                oracle.has_survivor(&h, None).unwrap().answer,
                explicit.has_survivor(&h, None).unwrap().answer
            );
        }
    }

    #[test]
    fn cnf_width_cap() {
        let f = CnfFormula::new(27);
        let p = CountingProblem::cnf(f).unwrap();
        assert!(matches!(
            Backend::Exhaustive.build(&p),
            Err(Error::Capacity(_))
        ));
    }
}
