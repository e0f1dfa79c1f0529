//! Certified lower bound on a known random set, showing the trade between
//! kappa, the trial count and the reported confidence.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use xorcount::bounds::{
    best_lower_bound, estimate_survival, lower_bound, pick_promising_m, TrialOptions,
};
use xorcount::gf2hash::Assignment;
use xorcount::oracle::{Backend, CountingProblem};

fn main() -> xorcount::Result<()> {
    let (n, size) = (16, 1000);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut pts = BTreeSet::new();
    while pts.len() < size {
        pts.insert(rng.gen_range(0..1u64 << n));
    }
    let set = pts
        .into_iter()
        .map(|v| Assignment::from_u64(n, v))
        .collect();
    let oracle = Backend::Auto.build(&CountingProblem::explicit(n, set)?)?;
    let opts = TrialOptions::default();
    println!("|S| = {size}, log2 = {:.3}", (size as f64).log2());

    let f = 0.3;
    let pick = pick_promising_m(oracle.as_ref(), f, 15, 7, &opts)?;
    println!("coarse scan suggests m = {pick}");

    // one estimate, several ways to read it
    let est = estimate_survival(oracle.as_ref(), pick, f, 200, 7, &opts)?;
    println!(
        "m = {pick}: {}/{} cells nonempty",
        est.successes, est.trials
    );
    for (kappa, c) in [
        (1.0, Some(0.5)),
        (0.5, Some(0.5)),
        (0.1, Some(0.5)),
        (1.0, None),
    ] {
        let cert = lower_bound(&est, kappa, c)?;
        let bound = cert
            .bound_log2
            .map_or("vacuous".into(), |b| format!("{b:.3}"));
        println!(
            "  kappa {kappa:<4} c {:<6.3}{} -> log2 |S| >= {bound:<8} with confidence {:.4}",
            cert.c,
            if cert.c_from_data {
                " (data)"
            } else {
                "       "
            },
            cert.confidence
        );
    }

    let best = best_lower_bound(
        oracle.as_ref(),
        f,
        1..=pick + 2,
        200,
        1.0,
        Some(0.5),
        7,
        true,
        &opts,
    )?;
    println!(
        "best over m = 1..={}: {:.3} at m = {}, Bonferroni-corrected confidence {:.4}",
        pick + 2,
        best.bound_log2.unwrap_or(0.0),
        best.m,
        best.confidence
    );
    Ok(())
}
