use std::path::PathBuf;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xorcount::dimacs::{emit, emit_with_chunk, parse, parse_with_warnings, CnfFormula};
use xorcount::oracle::{xor_chunk_count, CountingProblem};
use xorcount::tables::{encode_to_cnf, ContingencyTableSpec};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

#[test]
fn small_xor_goldens() {
    let f = parse(&read("small_xor.cnf")).unwrap();
    assert_eq!(f.num_vars, 4);
    assert_eq!(f.xors.len(), 1);
    assert_eq!(emit(&f, true).unwrap(), read("small_xor.native.golden.cnf"));
    assert_eq!(
        emit(&f, false).unwrap(),
        read("small_xor.expanded.golden.cnf")
    );
}

#[test]
fn table_encoding_golden() {
    let enc = encode_to_cnf(&ContingencyTableSpec::synth(3).unwrap()).unwrap();
    assert_eq!(
        emit(&enc.formula, false).unwrap(),
        read("synth3.golden.cnf")
    );
    // the fixture still encodes the five synth_3 tables
    let golden = parse(&read("synth3.golden.cnf")).unwrap();
    let count = CountingProblem::cnf_projected(golden, 9)
        .unwrap()
        .solutions()
        .unwrap()
        .len();
    assert_eq!(count, 5);
}

#[test]
fn table_fixtures_parse() {
    let s = ContingencyTableSpec::parse(&read("synth4.table")).unwrap();
    assert_eq!(s, ContingencyTableSpec::synth(4).unwrap());
    let z = ContingencyTableSpec::parse(&read("small.table")).unwrap();
    assert!(z.is_zero(1, 2));
    assert_eq!(ContingencyTableSpec::parse(&z.to_text()).unwrap(), z);
}

#[test]
fn large_header_shape_parses_with_matching_counts() {
    // a file with the header of the Langford pairs L(2,12) benchmark
    let (vars, clauses) = (576u32, 13584usize);
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let mut text = format!("c langford-shaped\np cnf {vars} {clauses}\n");
    for _ in 0..clauses {
        let len = r.gen_range(1..=4);
        for _ in 0..len {
            let v = r.gen_range(1..=vars as i32);
            text.push_str(&format!("{} ", if r.gen_bool(0.5) { v } else { -v }));
        }
        text.push_str("0\n");
    }
    let parsed = parse_with_warnings(&text).unwrap();
    assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    assert_eq!(parsed.formula.num_vars, vars);
    assert_eq!(parsed.formula.clauses.len(), clauses);
}

#[test]
fn expanded_header_counts_sub_xor_clauses() {
    let mut f = CnfFormula::new(20);
    let support: Vec<i32> = (1..=13).collect();
    f.add_xor(&support, true);
    for chunk in 2..=6usize {
        let text = emit_with_chunk(&f, false, chunk).unwrap();
        let header: Vec<usize> = text.lines().next().unwrap()[6..]
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        // every sub-XOR but the last folds chunk terms plus its auxiliary
        let pieces = xor_chunk_count(13, chunk);
        let last_arity = 13 - (pieces - 1) * (chunk - 1);
        let expect = (pieces - 1) * (1 << chunk) + (1 << (last_arity - 1));
        assert_eq!(header[1], expect, "chunk {chunk}");
        assert_eq!(header[0], 20 + pieces - 1);
    }
}

fn formula_strategy() -> impl Strategy<Value = CnfFormula> {
    (1u32..12).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        let clause = prop::collection::vec(lit.clone(), 1..5);
        let xor = (prop::collection::vec(1..=n as i32, 1..5), any::<bool>());
        (
            prop::collection::vec(clause, 0..8),
            prop::collection::vec(xor, 0..3),
        )
            .prop_map(move |(clauses, xors)| {
                let mut f = CnfFormula::new(n);
                for c in &clauses {
                    f.add_clause(c);
                }
                for (vars, rhs) in &xors {
                    f.add_xor(vars, *rhs);
                }
                f
            })
    })
}

proptest! {
    #[test]
    fn parse_inverts_native_emit(f in formula_strategy()) {
        let text = emit(&f, true).unwrap();
        prop_assert_eq!(parse(&text).unwrap(), f.clone());
        // byte-identical on repetition
        prop_assert_eq!(emit(&f, true).unwrap(), text);
    }

    #[test]
    fn expansion_preserves_projected_models(f in formula_strategy()) {
        let n = f.num_vars as usize;
        let direct = CountingProblem::cnf(f.clone()).unwrap().solutions().unwrap();
        let expanded = parse(&emit_with_chunk(&f, false, 2).unwrap()).unwrap();
        let via = CountingProblem::cnf_projected(expanded, n).unwrap().solutions().unwrap();
        prop_assert_eq!(direct, via);
    }
}
