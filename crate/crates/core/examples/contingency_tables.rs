//! Exact table counts, the CNF encoding of a table, and bounds over its cell bits.

use xorcount::bounds::{best_lower_bound, pick_promising_m, upper_bound, TrialOptions};
use xorcount::comb::LogNum;
use xorcount::oracle::{Backend, CountingProblem};
use xorcount::tables::{
    brute_force_count_with, encode_to_cnf, write_summary_csv, ContingencyTableSpec, CountLimits,
    SummaryRow,
};

fn main() -> xorcount::Result<()> {
    let limits = CountLimits::relaxed();
    for n in [3, 5, 8, 12, 20] {
        let c = brute_force_count_with(&ContingencyTableSpec::synth(n)?, &limits)?;
        println!(
            "synth_{n}: {c} tables (1 + (n-1)^2 = {})",
            1 + (n - 1) * (n - 1)
        );
    }

    let spec = ContingencyTableSpec::parse(
        "rows 3 cols 4\nR: 4 3 2\nC: 3 2 2 2\nbinary: 0\nZ: 0 3\nZ: 2 0\n",
    )?;
    let enc = encode_to_cnf(&spec)?;
    let exact = brute_force_count_with(&spec, &limits)?;
    println!(
        "\n3x4 integer table with two structural zeros: {exact} tables, {} cell bits, {} variables, {} clauses",
        enc.encoding.num_cell_bits(),
        enc.formula.num_vars,
        enc.formula.clauses.len()
    );

    // bounds on synth_8 over its 64 cell bits
    let synth = ContingencyTableSpec::synth(8)?;
    let problem = CountingProblem::table(synth.clone())?;
    let oracle = Backend::Auto.build(&problem)?;
    let opts = TrialOptions::default();
    let f = 0.3;
    let pick = pick_promising_m(oracle.as_ref(), f, 15, 0, &opts)?;
    let lb = best_lower_bound(
        oracle.as_ref(),
        f,
        pick.saturating_sub(2).max(1)..=pick + 2,
        200,
        0.1,
        None,
        0,
        false,
        &opts,
    )?;
    let ub = upper_bound(oracle.as_ref(), pick + 2, 0.5, 0.05, 0, &opts)?;
    let truth = LogNum::from_biguint(&brute_force_count_with(&synth, &limits)?).log2();
    let row = SummaryRow {
        dataset: "synth_8".into(),
        size: "8 x 8".into(),
        f_star: None,
        lb: lb.bound_log2.map(|b| SummaryRow::format_lb(b, f)),
        log2_count: Some((truth * 100.0).round() / 100.0),
        ub: Some((ub.verdict_log2 * 100.0).round() / 100.0),
        trivial_ub: oracle.n(),
    };
    print!("\n{}", write_summary_csv(&[row])?);
    Ok(())
}
