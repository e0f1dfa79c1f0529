use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::{Answer, OracleVerdict, SolverStats};
use crate::dimacs;
use crate::error::{Error, Result};
use crate::gf2hash::Assignment;

/// Placeholder replaced by the instance path in a command template.
pub const INPUT_PLACEHOLDER: &str = "{in}";

/// Exit-code conventions. When set, a solution line whose exit code disagrees
/// is a protocol error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverProfile {
    pub sat_exit: Option<i32>,
    pub unsat_exit: Option<i32>,
}

impl SolverProfile {
    /// The 10/20 convention of SAT competition solvers.
    pub fn competition() -> Self {
        SolverProfile {
            sat_exit: Some(10),
            unsat_exit: Some(20),
        }
    }
}

/// A solver invoked as a subprocess on a DIMACS file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalSolver {
    pub argv: Vec<String>,
    pub profile: SolverProfile,
    /// Emit hash rows as x-lines instead of expanding them.
    pub native_xor: bool,
    pub chunk: usize,
}

impl ExternalSolver {
    /// `template` is split with shell quoting rules; some token must contain `{in}`.
    pub fn from_template(template: &str) -> Result<Self> {
        let argv = shlex::split(template).ok_or_else(|| {
            Error::param(format!("unbalanced quoting in solver command {template:?}"))
        })?;
        if argv.is_empty() {
            return Err(Error::param("empty solver command"));
        }
        if !argv.iter().any(|a| a.contains(INPUT_PLACEHOLDER)) {
            return Err(Error::param(format!(
                "solver command {template:?} lacks the {INPUT_PLACEHOLDER} placeholder"
            )));
        }
        Ok(ExternalSolver {
            argv,
            profile: SolverProfile::default(),
            native_xor: false,
            chunk: super::DEFAULT_XOR_CHUNK,
        })
    }

    pub fn with_profile(mut self, profile: SolverProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_native_xor(mut self, native: bool) -> Self {
        self.native_xor = native;
        self
    }

    pub fn with_chunk(mut self, chunk: usize) -> Self {
        self.chunk = chunk;
        self
    }
}

struct SolverOutput {
    answer: Option<Answer>,
    model: Option<Vec<i32>>,
    conflicts: Option<u64>,
}

fn parse_output(text: &str, num_vars: u32) -> Result<SolverOutput> {
    let mut answer = None;
    let mut model: Option<Vec<i32>> = None;
    let mut conflicts = None;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let a = match rest.trim() {
                "SATISFIABLE" => Answer::Sat,
                "UNSATISFIABLE" => Answer::Unsat,
                "UNKNOWN" | "INDETERMINATE" => Answer::Unknown,
                other => {
                    return Err(Error::Protocol(format!(
                        "unrecognized solution line 's {other}'"
                    )))
                }
            };
            if answer.is_some_and(|prev| prev != a) {
                return Err(Error::Protocol("conflicting solution lines".into()));
            }
            answer = Some(a);
        } else if let Some(rest) = line.strip_prefix('v') {
            let lits = model.get_or_insert_with(Vec::new);
            for tok in rest.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| Error::Protocol(format!("bad model literal {tok:?}")))?;
                if l == 0 {
                    break;
                }
                if l.unsigned_abs() > num_vars {
                    return Err(Error::Protocol(format!(
                        "model literal {l} exceeds {num_vars} variables"
                    )));
                }
                lits.push(l);
            }
        } else if let Some(rest) = line.strip_prefix("c conflicts") {
            conflicts = rest
                .trim_start_matches([' ', ':', '='])
                .split_whitespace()
                .next()
                .and_then(|t| t.parse().ok());
        }
    }
    Ok(SolverOutput {
        answer,
        model,
        conflicts,
    })
}

fn read_back(file: &mut File) -> Result<String> {
    file.seek(SeekFrom::Start(0))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

fn tail(text: &str, lines: usize) -> String {
    let all: Vec<&str> = text.lines().collect();
    all[all.len().saturating_sub(lines)..].join("\n")
}

/// Runs the solver on a serialized DIMACS instance under a wall-clock budget.
///
/// A reported model is checked against the instance; the witness spans every
/// instance variable.
pub fn run_external(
    instance: &str,
    solver: &ExternalSolver,
    budget: Option<Duration>,
) -> Result<OracleVerdict> {
    let formula = dimacs::parse(instance)?;
    let mut input = tempfile::Builder::new()
        .prefix("xorcount-")
        .suffix(".cnf")
        .tempfile()?;
    input.write_all(instance.as_bytes())?;
    input.flush()?;
    let path = input.path().to_string_lossy().into_owned();
    let argv: Vec<String> = solver
        .argv
        .iter()
        .map(|a| a.replace(INPUT_PLACEHOLDER, &path))
        .collect();
    let mut stdout = tempfile::tempfile()?;
    let mut stderr = tempfile::tempfile()?;

    let start = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(stdout.try_clone()?)
        .stderr(stderr.try_clone()?)
        .spawn()
        .map_err(|e| Error::io_at(&argv[0], e))?;
    let status = match budget {
        Some(limit) => child.wait_timeout(limit)?,
        None => Some(child.wait()?),
    };
    let mut stats = SolverStats {
        solver_time_s: 0.0,
        conflicts: None,
    };
    let Some(status) = status else {
        let _ = child.kill();
        let _ = child.wait();
        stats.solver_time_s = start.elapsed().as_secs_f64();
        return Ok(OracleVerdict::unknown(
            stats,
            format!("killed at budget {:?}", budget.unwrap()),
        ));
    };
    stats.solver_time_s = start.elapsed().as_secs_f64();

    let out_text = read_back(&mut stdout)?;
    let parsed = parse_output(&out_text, formula.num_vars)?;
    stats.conflicts = parsed.conflicts;
    let Some(answer) = parsed.answer else {
        let err_text = read_back(&mut stderr)?;
        let diag = format!(
            "exit status {status}, no solution line; stderr: {}",
            tail(&err_text, 5)
        );
        if status.success() {
            return Err(Error::Protocol(diag));
        }
        return Ok(OracleVerdict::unknown(stats, diag));
    };

    let expected_exit = match answer {
        Answer::Sat => solver.profile.sat_exit,
        Answer::Unsat => solver.profile.unsat_exit,
        Answer::Unknown => None,
    };
    if let (Some(want), Some(got)) = (expected_exit, status.code()) {
        if want != got {
            return Err(Error::Protocol(format!(
                "answer {answer:?} with exit code {got}, profile expects {want}"
            )));
        }
    }

    match answer {
        Answer::Unsat => Ok(OracleVerdict {
            answer,
            witness: None,
            stats,
            diagnostics: None,
        }),
        Answer::Unknown => Ok(OracleVerdict::unknown(
            stats,
            "solver reported UNKNOWN".into(),
        )),
        Answer::Sat => {
            let lits = parsed
                .model
                .ok_or_else(|| Error::Protocol("SATISFIABLE without a model".into()))?;
            let mut witness = Assignment::zeros(formula.num_vars as usize);
            for l in lits {
                witness.set(l.unsigned_abs() as usize - 1, l > 0);
            }
            if !formula.eval(|v| witness.get(v as usize - 1)) {
                return Err(Error::Integrity(
                    "solver model falsifies the instance".into(),
                ));
            }
            Ok(OracleVerdict {
                answer,
                witness: Some(witness),
                stats,
                diagnostics: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_needs_placeholder() {
        assert!(ExternalSolver::from_template("minisat").is_err());
        assert!(ExternalSolver::from_template("'unbalanced {in}").is_err());
        let s = ExternalSolver::from_template("solver --flag '{in}'").unwrap();
        assert_eq!(s.argv, vec!["solver", "--flag", "{in}"]);
    }

    #[test]
    fn output_parsing() {
        let out =
            parse_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\nc conflicts : 17\n", 3).unwrap();
        assert_eq!(out.answer, Some(Answer::Sat));
        assert_eq!(out.model, Some(vec![1, -2, 3]));
        assert_eq!(out.conflicts, Some(17));
        assert!(parse_output("s MAYBE\n", 3).is_err());
        assert!(parse_output("s SATISFIABLE\nv 4 0\n", 3).is_err());
        assert!(parse_output("s SATISFIABLE\ns UNSATISFIABLE\n", 3).is_err());
    }
}
