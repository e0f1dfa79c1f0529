//! Minimum constraint density f* for table-shaped problems.
//!
//! The `m` column is one above the lower bound each instance reaches, and the
//! set-size hypothesis is `q = 2^(m+2)` with `delta = 9/4`.

use num_bigint::BigUint;
use xorcount::comb::{asymptotic_density, min_density_fstar, AsymptoticRegime};

fn main() -> xorcount::Result<()> {
    let shapes = [
        ("df (12 x 17 binary)", 204, 54),
        ("icons", 236, 59),
        ("purum", 125, 30),
        ("iqd", 76, 16),
        ("synth_8", 64, 6),
        ("synth_20", 400, 9),
    ];
    println!(
        "{:<22} {:>5} {:>4} {:>8} {:>10}",
        "instance", "n", "m", "f*", "avg len"
    );
    for (name, n, m) in shapes {
        let q = BigUint::from(1u32) << (m + 2);
        let cert = min_density_fstar(n, m, &q, 2.25)?;
        println!(
            "{name:<22} {n:>5} {m:>4} {:>8.4} {:>10.1}",
            cert.f_star,
            cert.f_star * n as f64
        );
    }

    println!();
    println!("asymptotic regimes at m = 10^4:");
    let m = 1e4;
    let lower = asymptotic_density(AsymptoticRegime::Lower { kappa: 1.1 }, m)?;
    let linear = asymptotic_density(AsymptoticRegime::Linear { alpha: 0.5 }, m)?;
    println!("  necessary (lower)   {lower:.6}");
    println!("  sufficient (linear) {linear:.6}");
    Ok(())
}
