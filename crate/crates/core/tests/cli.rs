use std::fs;
use std::path::Path;

use bhrep::cli::{run, EXIT_CERTIFICATION, EXIT_OK, EXIT_PARAMETER, EXIT_USAGE, EXIT_VIOLATION};
use bhrep::numset::IntegerSet;
use bhrep::prescribe::audit_from_json;
use num_bigint::BigInt;
use tempfile::TempDir;

fn bhrep(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bhrep").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn read_set(path: &str) -> IntegerSet {
    IntegerSet::from_json(&fs::read_to_string(path).unwrap()).unwrap().1
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

const TARGET: &str = r#"{"g": 1, "default": 1, "exceptions": {"0": 3, "1": 0, "-2": 2}}"#;

/// Writes the 40-term Sidon base and the target, then runs `prescribe`.
fn acceptance_run(dir: &TempDir, steps: &str, mode: &str) -> (i32, String, String) {
    let (code, _, _) = bhrep(&["greedy", "--h", "2", "--g", "1", "--count", "40", "--out", &p(dir, "B.json")]);
    assert_eq!(code, EXIT_OK);
    fs::write(p(dir, "f.json"), TARGET).unwrap();
    bhrep(&[
        "prescribe", "--h", "2", "--g", "1", "--f", &p(dir, "f.json"), "--B", &p(dir, "B.json"),
        "--steps", steps, "--gamma", "linear:17", "--mode", mode, "--out", &p(dir, "A.json"),
        "--audit", &p(dir, "audit.json"),
    ])
}

#[test]
fn greedy_matches_golden() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "g.json");
    let (code, stdout, _) = bhrep(&["greedy", "--h", "2", "--g", "2", "--count", "10", "--out", &out]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("true"));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/greedy_h2_g2_10.json");
    assert_eq!(fs::read_to_string(out).unwrap(), fs::read_to_string(golden).unwrap());
}

#[test]
fn greedy_sidon_prefix_and_single() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "mc.json");
    assert_eq!(bhrep(&["greedy", "--h", "2", "--g", "1", "--count", "9", "--out", &out]).0, EXIT_OK);
    assert_eq!(read_set(&out).as_slice(), ints(&[1, 2, 4, 8, 13, 21, 31, 45, 66]).as_slice());
    assert_eq!(bhrep(&["verify", "bh", "--in", &out, "--h", "2", "--g", "1"]).0, EXIT_OK);
    assert_eq!(bhrep(&["greedy", "--h", "2", "--g", "1", "--count", "1", "--out", &out]).0, EXIT_OK);
    assert_eq!(read_set(&out).as_slice(), ints(&[1]).as_slice());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bhrep(&["greedy", "--h", "2", "--g", "1", "--count", "3"]).0, EXIT_USAGE);
    assert_eq!(bhrep(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = bhrep(&["verify", "bh", "--in", "/nonexistent/x.json", "--h", "2", "--g", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
}

#[test]
fn deterministic_output() {
    let dir = TempDir::new().unwrap();
    let a = p(&dir, "a.json");
    let b = p(&dir, "b.json");
    bhrep(&["greedy", "--h", "3", "--g", "2", "--count", "8", "--out", &a]);
    bhrep(&["greedy", "--h", "3", "--g", "2", "--count", "8", "--out", &b]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read_set(&a).as_slice(), ints(&[1, 2, 3, 6, 12, 18, 41, 54]).as_slice());
}

#[test]
fn prescribe_rejects_non_sidon_base() {
    let dir = TempDir::new().unwrap();
    fs::write(p(&dir, "B.json"), IntegerSet::from_unsorted(ints(&[1, 2, 3, 5])).to_json("bad")).unwrap();
    fs::write(p(&dir, "f.json"), TARGET).unwrap();
    let (code, _, err) = bhrep(&[
        "prescribe", "--h", "2", "--g", "1", "--f", &p(&dir, "f.json"), "--B", &p(&dir, "B.json"),
        "--steps", "5", "--gamma", "linear:17", "--out", &p(&dir, "A.json"),
    ]);
    assert_eq!(code, EXIT_CERTIFICATION);
    assert!(err.contains("r(4) = 2"), "{err}");
}

#[test]
fn prescribe_parameter_violation_exit_3() {
    let dir = TempDir::new().unwrap();
    bhrep(&["greedy", "--h", "2", "--g", "1", "--count", "10", "--out", &p(&dir, "B.json")]);
    fs::write(p(&dir, "f.json"), TARGET).unwrap();
    let (code, _, err) = bhrep(&[
        "prescribe", "--h", "2", "--g", "1", "--f", &p(&dir, "f.json"), "--B", &p(&dir, "B.json"),
        "--steps", "5", "--r", "3", "--gamma", "linear:17", "--out", &p(&dir, "A.json"),
    ]);
    assert_eq!(code, EXIT_PARAMETER);
    assert!(err.contains("2^(r-1)"), "{err}");
}

#[test]
fn prescribe_zero_steps_echoes_a0() {
    let dir = TempDir::new().unwrap();
    let (code, stdout, _) = acceptance_run(&dir, "0", "full");
    assert_eq!(code, EXIT_OK, "{stdout}");
    let a = read_set(&p(&dir, "A.json"));
    // T(1) = 1 falls below n0 = 2; the other 39 terms survive.
    assert_eq!(a.len(), 39);
    assert!(audit_from_json(&fs::read_to_string(p(&dir, "audit.json")).unwrap()).unwrap().is_empty());
}

#[test]
fn acceptance_run_end_to_end() {
    let dir = TempDir::new().unwrap();
    let (code, stdout, err) = acceptance_run(&dir, "400", "window");
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(stdout.contains("n0"), "{stdout}");
    let audit = audit_from_json(&fs::read_to_string(p(&dir, "audit.json")).unwrap()).unwrap();
    assert_eq!(audit.len(), 400);

    let a = p(&dir, "A.json");
    let table = p(&dir, "table.csv");
    let (code, _, err) = bhrep(&[
        "verify", "repfn", "--in", &a, "--h", "2", "--from", "-15", "--to", "15", "--expect",
        &p(&dir, "f.json"), "--out", &table,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let csv = fs::read_to_string(table).unwrap();
    assert!(csv.starts_with("n,count\n-15,1\n"));
    assert!(csv.contains("\n0,3\n1,0\n"));

    let lemmas = p(&dir, "lemmas.csv");
    let (code, _, err) = bhrep(&[
        "verify", "lemmas", "--in", &p(&dir, "audit.json"), "--set", &a, "--k", "1", "--n0", "2",
        "--out", &lemmas,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(fs::read_to_string(lemmas).unwrap().starts_with("s,t,size,min_abs,exempt\n"));

    let density = p(&dir, "density.csv");
    let (code, _, err) = bhrep(&[
        "verify", "density", "--in", &p(&dir, "B.json"), "--r", "4", "--gamma", "linear:17", "--x",
        "1024,131072,1048576", "--set", &a, "--n0", "2", "--out", &density,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rows = fs::read_to_string(density).unwrap();
    assert!(rows.contains("\n1048576,40,32,"), "{rows}");
}

#[test]
fn verify_repfn_mismatch_exit_1() {
    let dir = TempDir::new().unwrap();
    let (code, _, _) = acceptance_run(&dir, "3", "full");
    assert_eq!(code, EXIT_OK);
    // Only three stages ran, so f(0) = 3 is not reached yet.
    let (code, _, err) = bhrep(&[
        "verify", "repfn", "--in", &p(&dir, "A.json"), "--h", "2", "--from", "-15", "--to", "15",
        "--expect", &p(&dir, "f.json"),
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(!err.is_empty());
}

#[test]
fn verify_bh_failure_exit_1() {
    let dir = TempDir::new().unwrap();
    let set = p(&dir, "s.json");
    fs::write(&set, IntegerSet::from_unsorted(ints(&[1, 2, 3, 5])).to_json("s")).unwrap();
    let out = p(&dir, "bh.csv");
    assert_eq!(bhrep(&["verify", "bh", "--in", &set, "--h", "2", "--g", "1", "--out", &out]).0, EXIT_VIOLATION);
    assert_eq!(bhrep(&["verify", "bh", "--in", &set, "--h", "2", "--g", "2"]).0, EXIT_OK);
}

#[test]
fn block_basis_report() {
    let dir = TempDir::new().unwrap();
    let report = p(&dir, "report.csv");
    let (code, _, err) = bhrep(&[
        "block", "--h", "2", "--levels", "1", "--x", "1,100", "--out", &p(&dir, "bb.json"), "--report",
        &report,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(read_set(&p(&dir, "bb.json")).as_slice(), ints(&[2, 4, 8, 16, 26, 42, 62, 90]).as_slice());
    assert!(fs::read_to_string(report).unwrap().starts_with("k,x_k,B(x_k),ratio\n1,100,8,"));
}
