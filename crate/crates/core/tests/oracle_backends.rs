//! The three backends must agree; the external one runs this crate's own
//! `solve` subcommand as the subprocess.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xorcount::dimacs::{self, CnfFormula};
use xorcount::gf2hash::{count_survivors, sample_hash, Assignment, HashParams, ParityHash};
use xorcount::oracle::{
    conjoin, run_external, Answer, Backend, CountingProblem, ExternalSolver, Search, SolverProfile,
    SurvivorOracle,
};
use xorcount::Error;

fn reference_solver() -> ExternalSolver {
    let exe = env!("CARGO_BIN_EXE_xorcount");
    ExternalSolver::from_template(&format!("'{exe}' solve {{in}}"))
        .unwrap()
        .with_profile(SolverProfile::competition())
}

/// `(x1 ∨ x2) ∧ (¬x1 ∨ x3)` with `x1 ⊕ x4 = 1`.
fn small_cnf() -> CnfFormula {
    let mut f = CnfFormula::new(4);
    f.add_clause(&[1, 2]);
    f.add_clause(&[-1, 3]);
    f.add_xor(&[1, 4], true);
    f
}

fn hash_from_bits(n: usize, m: usize, bits: u64) -> ParityHash {
    let rows: Vec<Vec<bool>> = (0..m)
        .map(|i| (0..n).map(|j| bits >> (i * n + j) & 1 == 1).collect())
        .collect();
    let b: Vec<bool> = (0..m).map(|i| bits >> (m * n + i) & 1 == 1).collect();
    ParityHash::from_rows(&rows, &b).unwrap()
}

fn backends(problem: &CountingProblem, external: bool) -> Vec<Box<dyn SurvivorOracle>> {
    let explicit = CountingProblem::explicit(problem.n(), problem.solutions().unwrap()).unwrap();
    let mut out = vec![
        Backend::Explicit.build(&explicit).unwrap(),
        Backend::Exhaustive.build(problem).unwrap(),
    ];
    if external {
        out.push(
            Backend::External(reference_solver())
                .build(problem)
                .unwrap(),
        );
        out.push(
            Backend::External(reference_solver().with_native_xor(true))
                .build(problem)
                .unwrap(),
        );
    }
    out
}

fn answers(oracles: &[Box<dyn SurvivorOracle>], h: &ParityHash) -> Vec<Answer> {
    oracles
        .iter()
        .map(|o| o.has_survivor(h, None).unwrap().answer)
        .collect()
}

#[test]
fn small_cnf_agrees_on_every_tiny_hash() {
    let problem = CountingProblem::cnf(small_cnf()).unwrap();
    let oracles = backends(&problem, true);
    for m in 1..=2usize {
        for bits in 0u64..1 << (4 * m + m) {
            let h = hash_from_bits(4, m, bits);
            let got = answers(&oracles, &h);
            assert!(
                got.windows(2).all(|w| w[0] == w[1]),
                "m={m} bits={bits:b}: {got:?}"
            );
        }
    }
}

#[test]
fn in_process_backends_agree_on_every_tiny_hash() {
    let problem = CountingProblem::cnf(small_cnf()).unwrap();
    let oracles = backends(&problem, false);
    for m in 1..=3usize {
        for bits in 0u64..1 << (4 * m + m) {
            let h = hash_from_bits(4, m, bits);
            let got = answers(&oracles, &h);
            assert_eq!(got[0], got[1], "m={m} bits={bits:b}");
        }
    }
}

fn random_cnf(n: u32, clauses: usize, r: &mut ChaCha8Rng) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    for _ in 0..clauses {
        let len = r.gen_range(2..=3);
        let c: Vec<i32> = (0..len)
            .map(|_| {
                let v = r.gen_range(1..=n as i32);
                if r.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        f.add_clause(&c);
    }
    f
}

#[test]
fn random_problems_agree_with_random_hashes() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for k in 0..12 {
        let n = r.gen_range(3..=12u32);
        let f = random_cnf(n, r.gen_range(1..=(2 * n as usize)), &mut r);
        let problem = CountingProblem::cnf(f).unwrap();
        let oracles = backends(&problem, k % 3 == 0);
        for t in 0..10 {
            let m = r.gen_range(1..=n as usize);
            let density = [0.1, 0.3, 0.5][t % 3];
            let h =
                sample_hash(&HashParams::new(n as usize, m, density, r.gen()).unwrap()).unwrap();
            let got = answers(&oracles, &h);
            assert!(
                got.windows(2).all(|w| w[0] == w[1]),
                "problem {k}, hash {t}: {got:?}"
            );
        }
    }
}

#[test]
fn conjoined_count_is_the_survivor_count() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let n = r.gen_range(2..=12u32);
        let f = random_cnf(n, r.gen_range(1..=n as usize), &mut r);
        let solutions = CountingProblem::cnf(f.clone())
            .unwrap()
            .solutions()
            .unwrap();
        let m = r.gen_range(1..=n as usize);
        let h = sample_hash(&HashParams::new(n as usize, m, 0.3, r.gen()).unwrap()).unwrap();
        for native in [false, true] {
            let g = conjoin(&f, &h, native, 3).unwrap();
            let models = Search::new(&g)
                .unwrap()
                .enumerate_projected(n as usize, 1 << 13)
                .unwrap();
            assert_eq!(models.len(), count_survivors(&h, &solutions).unwrap());
        }
    }
}

#[test]
fn conjoin_leaves_the_input_alone() {
    let f = small_cnf();
    let before = f.clone();
    let h = hash_from_bits(4, 2, 0b11_1111_0110_1001);
    let native = conjoin(&f, &h, true, 4).unwrap();
    assert_eq!(f, before);
    assert_eq!(native.xors.len(), before.xors.len() + 2);
    let text = dimacs::emit(&native, true).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('x')).count(), 3);
    assert_eq!(conjoin(&f, &ParityHash::trivial(4), false, 4).unwrap(), f);
}

#[test]
fn external_protocol_basics() {
    let solver = reference_solver();
    let v = run_external("p cnf 1 1\n1 0\n", &solver, None).unwrap();
    assert_eq!(v.answer, Answer::Sat);
    assert_eq!(v.witness.unwrap(), Assignment::from_bits(&[true]));
    let v = run_external("p cnf 1 2\n1 0\n-1 0\n", &solver, None).unwrap();
    assert_eq!(v.answer, Answer::Unsat);
    assert!(v.witness.is_none());
}

fn shell(script: &str) -> ExternalSolver {
    // the placeholder rides along as $0 so the template is accepted
    ExternalSolver::from_template(&format!("sh -c '{script}' {{in}}")).unwrap()
}

#[test]
fn budget_exhaustion_is_unknown() {
    let v = run_external(
        "p cnf 1 1\n1 0\n",
        &shell("sleep 5"),
        Some(Duration::from_millis(200)),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::Unknown);
    let t = v.stats.solver_time_s;
    assert!((0.15..2.0).contains(&t), "{t}");
}

#[test]
fn lying_solver_is_an_integrity_error() {
    let liar = shell("echo \"s SATISFIABLE\"; echo \"v -1 0\"");
    let err = run_external("p cnf 1 1\n1 0\n", &liar, None).unwrap_err();
    assert!(matches!(err, Error::Integrity(_)), "{err}");
}

#[test]
fn malformed_replies_are_protocol_errors() {
    let no_model = shell("echo \"s SATISFIABLE\"");
    assert!(matches!(
        run_external("p cnf 1 0\n", &no_model, None),
        Err(Error::Protocol(_))
    ));
    let silent = shell("true");
    assert!(matches!(
        run_external("p cnf 1 0\n", &silent, None),
        Err(Error::Protocol(_))
    ));
    let wrong_exit =
        shell("echo \"s UNSATISFIABLE\"; exit 10").with_profile(SolverProfile::competition());
    assert!(matches!(
        run_external("p cnf 1 0\n", &wrong_exit, None),
        Err(Error::Protocol(_))
    ));
    // a crash without a solution line is merely unknown
    let crashed = shell("exit 3");
    assert_eq!(
        run_external("p cnf 1 0\n", &crashed, None).unwrap().answer,
        Answer::Unknown
    );
}
