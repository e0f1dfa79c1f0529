//! SPARSE-COUNT with long rows and with the per-level minimum density.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use xorcount::bounds::{sparse_count, DensitySchedule, SparseCountConfig, TrialOptions};
use xorcount::gf2hash::Assignment;
use xorcount::oracle::{Backend, CountingProblem};

fn main() -> xorcount::Result<()> {
    let n = 20;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let mut pts = BTreeSet::new();
    while pts.len() < 1 << 12 {
        pts.insert(rng.gen_range(0..1u64 << n));
    }
    let set = pts
        .into_iter()
        .map(|v| Assignment::from_u64(n, v))
        .collect();
    let oracle = Backend::Auto.build(&CountingProblem::explicit(n, set)?)?;
    println!("true log2 |S| = 12");

    let schedules = [
        ("f = 1/2", DensitySchedule::Constant(0.5)),
        (
            "f*(i) schedule",
            DensitySchedule::Shattering { c: 2, delta: 2.25 },
        ),
    ];
    for (label, schedule) in schedules {
        let cfg = SparseCountConfig::new(0.05, 0.04, schedule);
        let r = sparse_count(oracle.as_ref(), &cfg, 11, &TrialOptions::default())?;
        let est = r
            .log2_estimate
            .map_or("none witnessed".into(), |e| format!("2^{e}"));
        println!(
            "{label}: estimate {est} after {} levels of {} trials",
            r.levels.len(),
            r.trials_per_level
        );
        for l in &r.levels {
            println!(
                "  i = {:>2}  f = {:.3}  {:>3}/{} nonempty",
                l.i, l.f, l.successes, l.trials
            );
        }
    }
    Ok(())
}
