//! Exact survival probabilities by enumerating every hash, against the
//! `|S|` ceiling and a sampled estimate.

use xorcount::gf2hash::{count_survivors, exact_survival, sample_hash, Assignment, HashParams};

fn main() -> xorcount::Result<()> {
    let n = 5;
    // an affine subspace and a scattered set of the same size
    let subspace: Vec<Assignment> = (0..8u64).map(|v| Assignment::from_u64(n, v << 2)).collect();
    let scattered: Vec<Assignment> = [1u64, 6, 11, 12, 19, 22, 25, 30]
        .iter()
        .map(|&v| Assignment::from_u64(n, v))
        .collect();
    for (name, set) in [("subspace", &subspace), ("scattered", &scattered)] {
        println!("{name} (|S| = {}):", set.len());
        for m in 1..=3 {
            for f in [0.125, 0.25, 0.5] {
                let ex = exact_survival(set, m, f)?;
                let p = ex.to_lognum().to_f64();
                // sampled counterpart over 4000 hashes
                let hits = (0..4000u64)
                    .filter(|&s| {
                        let h = sample_hash(&HashParams::new(n, m, f, s).unwrap()).unwrap();
                        count_survivors(&h, set).unwrap() > 0
                    })
                    .count();
                println!(
                    "  m {m} f {f:<5}  2^m Pr = {:>6.3} <= {}  (sampled Pr {:.3}, exact {p:.3})",
                    p * (1u64 << m) as f64,
                    set.len(),
                    hits as f64 / 4000.0
                );
                assert!(ex.scaled_at_most(m, set.len() as u64));
            }
        }
    }
    Ok(())
}
