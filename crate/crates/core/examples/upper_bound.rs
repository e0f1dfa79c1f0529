//! Upper bound from mostly-empty cells, across densities.
//!
//! Sparse rows make empty cells less informative, so the threshold U grows as
//! f shrinks, until no set size below 2^n can be refuted at all and the
//! verdict falls back to n even when the event fires.

use xorcount::bounds::{upper_bound, upper_bound_trials, TrialOptions};
use xorcount::gf2hash::Assignment;
use xorcount::oracle::{Backend, CountingProblem};

fn main() -> xorcount::Result<()> {
    let n = 18;
    // every point with exactly three ones: C(18, 3) = 816 solutions
    let set: Vec<Assignment> = (0u64..1 << n)
        .filter(|v| v.count_ones() == 3)
        .map(|v| Assignment::from_u64(n, v))
        .collect();
    let truth = (set.len() as f64).log2();
    let oracle = Backend::Auto.build(&CountingProblem::explicit(n, set)?)?;
    let delta = 0.05;
    println!(
        "log2 |S| = {truth:.3}, T = {} trials per bound",
        upper_bound_trials(delta)?
    );
    for f in [0.5, 0.3, 0.15, 0.05] {
        for m in [11, 13] {
            let cert = upper_bound(oracle.as_ref(), m, f, delta, 3, &TrialOptions::default())?;
            println!(
                "f {f:<4} m {m:<2} empty {:>2}/{} fired {:<5} -> log2 |S| <= {:.3} (confidence {:.2})",
                cert.empty_cells, cert.trials, cert.event_fired, cert.verdict_log2, cert.confidence
            );
        }
    }
    Ok(())
}
