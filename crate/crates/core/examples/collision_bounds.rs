//! epsilon, the variance bound v(q) and the upper threshold U for a few densities.
//!
//! ```bash
//! cargo run --example collision_bounds -- 100 10
//! ```

use num_bigint::BigUint;
use xorcount::comb::SparseFamily;

fn main() -> xorcount::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (n, m) = match args[..] {
        [n, m, ..] => (n, m),
        _ => (100, 10),
    };
    let q = BigUint::from(1u32) << (m + 2);
    println!("n = {n}, m = {m}, q = 2^{}", m + 2);
    println!(
        "{:>6} {:>14} {:>14} {:>12}",
        "f", "log2 eps", "log2 v(q)", "log2 U"
    );
    for f in [0.02, 0.05, 0.1, 0.2, 0.3, 0.5] {
        let fam = SparseFamily::new(n, m, f)?;
        let eps = fam.epsilon(&q)?;
        let v = fam.variance_bound(&q)?;
        let u = fam.upper_threshold();
        let u_text = if u.sentinel {
            "n (none)".to_string()
        } else {
            format!("{:.3}", u.log2())
        };
        println!(
            "{f:>6.2} {:>14.4} {:>14.4} {u_text:>12}",
            eps.log2(),
            v.value.log2()
        );
    }
    // at f = 1/2 the family is pairwise independent and eps = 2^-m exactly
    println!(
        "pairwise-independent value: log2 eps = -m = {}",
        -(m as i64)
    );
    Ok(())
}
