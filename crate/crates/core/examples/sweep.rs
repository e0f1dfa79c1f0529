//! Lower and upper bounds across densities for a random 3-CNF, as the CLI's
//! `sweep` subcommand would write them.

use clap::Parser;
use rand::{Rng, SeedableRng};
use xorcount::cli::{run_sweep, sweep_csv, Cli, Command};
use xorcount::dimacs::{self, CnfFormula};
use xorcount::oracle::CountingProblem;

fn main() -> xorcount::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut f = CnfFormula::new(22);
    for _ in 0..45 {
        let vars = rand::seq::index::sample(&mut rng, 22, 3);
        let clause: Vec<i32> = vars
            .iter()
            .map(|v| {
                if rng.gen_bool(0.5) {
                    v as i32 + 1
                } else {
                    -(v as i32 + 1)
                }
            })
            .collect();
        f.add_clause(&clause);
    }
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("random.cnf");
    std::fs::write(&path, dimacs::emit(&f, false)?)?;
    let exact = CountingProblem::cnf(f)?.solutions()?.len();
    println!(
        "exact: {exact} models, log2 = {:.3}\n",
        (exact as f64).log2()
    );

    let argv = [
        "xorcount",
        "sweep",
        path.to_str().unwrap(),
        "--f-list",
        "0.05,0.1,0.2,0.3,0.5",
        "--seed",
        "4",
    ];
    let Command::Sweep(args) = Cli::parse_from(argv).command else {
        unreachable!()
    };
    let (rows, problems) = run_sweep(&args)?;
    print!("{}", sweep_csv(&rows)?);
    for p in problems {
        eprintln!("{p}");
    }
    Ok(())
}
