//! Parsing x-lines, conjoining a sparse hash, and the two ways to hand it to a solver.

use xorcount::dimacs::{self, CnfFormula};
use xorcount::gf2hash::{sample_hash, HashParams};
use xorcount::oracle::{conjoin, xor_chunk_count, xor_to_cnf, VarAllocator};

fn main() -> xorcount::Result<()> {
    let text = "c a tiny instance with one native parity line\n\
                p cnf 6 3\n1 -2 0\n3 4 5 0\nx1 3 6 0\n";
    let parsed = dimacs::parse_with_warnings(text)?;
    let f: CnfFormula = parsed.formula;
    println!(
        "{} variables, {} clauses, {} xor lines",
        f.num_vars,
        f.clauses.len(),
        f.xors.len()
    );

    let h = sample_hash(&HashParams::new(6, 2, 0.4, 9)?)?;
    for i in 0..h.m() {
        let vars: Vec<String> = h.support(i).iter().map(|j| format!("x{}", j + 1)).collect();
        println!("row {i}: {} = {}", vars.join(" + "), u8::from(h.rhs(i)));
    }

    let native = conjoin(&f, &h, true, 6)?;
    println!("\nnative:\n{}", dimacs::emit(&native, true)?);
    let plain = conjoin(&f, &h, false, 3)?;
    println!("expanded with chunk 3:\n{}", dimacs::emit(&plain, false)?);

    // long parity constraints: clause counts with and without chunking
    for t in [8usize, 16, 32] {
        let support: Vec<i32> = (1..=t as i32).collect();
        let mut alloc = VarAllocator::new(t as u32);
        let clauses = xor_to_cnf(&support, true, 6, &mut alloc)?;
        println!(
            "t = {t:>2}: {:>3} clauses via {} sub-xors and {} auxiliaries (direct: {})",
            clauses.len(),
            xor_chunk_count(t, 6),
            alloc.last() as usize - t,
            1u64 << (t - 1)
        );
    }
    Ok(())
}
