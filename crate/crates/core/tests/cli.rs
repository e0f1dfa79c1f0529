use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xorcount"))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("XORCOUNT_SOLVER")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Drops every field whose value depends on the clock or the invocation.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in [
                "wall_time_s",
                "solver_time_s",
                "timing_s",
                "total_solver_time_s",
                "command",
            ] {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn report(dir: &Path, name: &str, args: &[&str]) -> (i32, Value) {
    let path: PathBuf = dir.join(name);
    let mut all = args.to_vec();
    let p = path.display().to_string();
    all.extend(["--json", &p]);
    let o = run(&all);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("no report; stderr: {}", String::from_utf8_lossy(&o.stderr)));
    (code(&o), serde_json::from_str(&text).unwrap())
}

#[test]
fn epsilon_at_half_density() {
    let o = run(&[
        "epsilon", "--n", "30", "--m", "5", "--q", "2^10", "--f", "0.5",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("log2 = -5.000000000"), "{}", stdout(&o));
}

#[test]
fn fstar_for_iqd_shape() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    let o = run(&[
        "fstar",
        "--n",
        "76",
        "--m",
        "16",
        "--json",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    let f = v["f_star"].as_f64().unwrap();
    assert!((f - 0.34).abs() <= 0.02, "{f}");
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(code(&run(&["fstar", "76", "16"])), 1);
    assert_eq!(code(&run(&["bound", "/nonexistent/file.cnf"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn same_seed_gives_identical_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let set = data("set300_n12.txt");
    let args = [
        "bound",
        set.as_str(),
        "--mode",
        "lb",
        "--seed",
        "7",
        "--T",
        "60",
    ];
    let (c1, mut a) = report(dir.path(), "a.json", &args);
    let (c2, mut b) = report(dir.path(), "b.json", &args);
    assert_eq!((c1, c2), (0, 0));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let lb = a["certificates"][0]["bound_log2"].as_f64().unwrap();
    assert!(lb <= 300f64.log2(), "{lb}");
    // a different seed draws different hashes
    let (_, mut c) = report(
        dir.path(),
        "c.json",
        &["bound", set.as_str(), "--seed", "8", "--T", "60"],
    );
    strip_timing(&mut c);
    assert_ne!(
        a["certificates"][0]["trial_outcomes"],
        c["certificates"][0]["trial_outcomes"]
    );
}

#[test]
fn full_cube_upper_bound_is_the_sentinel() {
    let dir = tempfile::tempdir().unwrap();
    let cube = dir.path().join("cube.txt");
    let lines: String = (0..64).map(|v| format!("{v:06b}\n")).collect();
    std::fs::write(&cube, lines).unwrap();
    let (code, r) = report(
        dir.path(),
        "r.json",
        &["bound", cube.to_str().unwrap(), "--mode", "ub", "--m", "3"],
    );
    assert_eq!(code, 0);
    let cert = &r["certificates"][0];
    assert_eq!(cert["params"]["event_fired"], Value::Bool(false));
    assert_eq!(cert["bound_log2"].as_f64().unwrap(), 6.0);
}

#[test]
fn synth8_count_is_within_factor_sixteen() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(
        dir.path(),
        "r.json",
        &["bound", "synth:8", "--mode", "count", "--seed", "1"],
    );
    assert_eq!(code, 0);
    let est = r["certificates"][0]["bound_log2"].as_f64().unwrap();
    assert!((est - 50f64.log2()).abs() <= 4.0, "{est}");
}

#[test]
fn timeouts_make_the_run_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(
        dir.path(),
        "r.json",
        &[
            "bound",
            &data("small_xor.cnf"),
            "--solver",
            "sh -c 'sleep 3' {in}",
            "--budget-s",
            "0.1",
            "--m",
            "1",
            "--T",
            "2",
        ],
    );
    assert_eq!(code, 2);
    assert_eq!(r["status"], "inconclusive");
    assert!(r["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn external_reference_solver_matches_in_process_backend() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_xorcount");
    let input = data("small_xor.cnf");
    let base = [
        "bound",
        input.as_str(),
        "--m",
        "2",
        "--T",
        "30",
        "--seed",
        "5",
    ];
    let (c1, mut inproc) = report(dir.path(), "a.json", &base);
    let solver = format!("'{exe}' solve {{in}}");
    let mut ext_args = base.to_vec();
    ext_args.extend(["--solver", solver.as_str()]);
    let (c2, mut ext) = report(dir.path(), "b.json", &ext_args);
    assert_eq!((c1, c2), (0, 0));
    strip_timing(&mut inproc);
    strip_timing(&mut ext);
    assert_eq!(inproc["certificates"], ext["certificates"]);
}

#[test]
fn sweep_writes_csv_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        &data("set300_n12.txt"),
        "--f-list",
        "0.3,0.5",
        "--T",
        "40",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "f,lb_log2,ub_log2,wall_time_s,certificates_path"
    );
    let truth = 300f64.log2();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let (lb, ub): (f64, f64) = (cols[1].parse().unwrap(), cols[2].parse().unwrap());
        assert!(lb <= truth && truth <= ub, "{line}");
        assert!(Path::new(cols[4]).exists());
    }
}

#[test]
fn table_subcommand_counts() {
    let o = run(&["table", &data("small.table")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("tables: 3"));
    let o = run(&["table", "synth:8"]);
    assert!(stdout(&o).contains("tables: 50"));
}

#[test]
fn solve_speaks_the_competition_protocol() {
    let o = run(&["solve", &data("small_xor.cnf")]);
    assert_eq!(code(&o), 10);
    assert!(stdout(&o).lines().any(|l| l == "s SATISFIABLE"));
    let dir = tempfile::tempdir().unwrap();
    let unsat = dir.path().join("u.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = run(&["solve", unsat.to_str().unwrap()]);
    assert_eq!(code(&o), 20);
}
