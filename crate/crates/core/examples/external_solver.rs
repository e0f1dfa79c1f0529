//! Driving an external solver through the `{in}` command template.
//!
//! Pass a template as the first argument, e.g. `cryptominisat5 --verb 0 {in}`.
//! Without one the example uses this crate's own `xorcount solve`, which must
//! have been built (`cargo build`).

use std::time::Duration;

use xorcount::bounds::{estimate_survival, TrialOptions};
use xorcount::dimacs;
use xorcount::oracle::{Backend, CountingProblem, ExternalSolver, SolverProfile};

fn default_template() -> Option<String> {
    // examples live in target/<profile>/examples/, the binary one level up
    let exe = std::env::current_exe().ok()?;
    let bin = exe.parent()?.parent()?.join("xorcount");
    bin.exists()
        .then(|| format!("'{}' solve {{in}}", bin.display()))
}

fn main() -> xorcount::Result<()> {
    let template = match std::env::args().nth(1).or_else(default_template) {
        Some(t) => t,
        None => {
            eprintln!(
                "no solver template given and no xorcount binary found; run `cargo build` first"
            );
            std::process::exit(1);
        }
    };
    println!("solver: {template}");

    // pigeons: 3 pigeons in 3 holes, one per hole -> 6 models over 9 variables
    let text = "p cnf 9 15\n1 2 3 0\n4 5 6 0\n7 8 9 0\n\
                -1 -4 0\n-1 -7 0\n-4 -7 0\n-2 -5 0\n-2 -8 0\n-5 -8 0\n-3 -6 0\n-3 -9 0\n-6 -9 0\n\
                -1 -2 0\n-4 -5 0\n-7 -8 0\n";
    let formula = dimacs::parse(text)?;
    let problem = CountingProblem::cnf(formula)?;
    println!("exact model count: {}", problem.solutions()?.len());

    let opts = TrialOptions {
        budget: Some(Duration::from_secs(10)),
        jobs: None,
    };
    for native in [false, true] {
        let solver = ExternalSolver::from_template(&template)?
            .with_profile(SolverProfile::competition())
            .with_native_xor(native);
        let oracle = Backend::External(solver).build(&problem)?;
        let est = estimate_survival(oracle.as_ref(), 2, 0.5, 40, 1, &opts)?;
        let secs: f64 = est.outcomes.iter().map(|o| o.solver_time_s).sum();
        println!(
            "native xor {native:<5}: {}/{} nonempty cells at m = 2, {} unknown, {secs:.2}s in the solver",
            est.successes, est.trials, est.unknown
        );
    }

    // the in-process scan answers the same questions
    let scan = Backend::Exhaustive.build(&problem)?;
    let est = estimate_survival(scan.as_ref(), 2, 0.5, 40, 1, &TrialOptions::default())?;
    println!(
        "exhaustive scan   : {}/{} nonempty cells at m = 2",
        est.successes, est.trials
    );
    Ok(())
}
