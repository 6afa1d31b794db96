use std::path::PathBuf;
use std::process::Command;

use gmm_csp::algebra::builtin::{mixed3, xor3};
use gmm_csp::format::{parse_instance, serialize_instance};
use gmm_csp::oracle::verify_assignment;
use gmm_csp::{Constraint, Instance, Relation, Tuple};
use gmmcsp_cli::{run, EXIT_ERROR, EXIT_SAT, EXIT_UNSAT};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn gmmcsp(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["gmmcsp"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn unsat_triangle() {
    let (code, out, _) = gmmcsp(&["solve", &fixture("unsat-triangle.gmm")]);
    assert_eq!((code, out.as_str()), (EXIT_UNSAT, "UNSAT\n"));
    let (code, out, _) = gmmcsp(&["oracle", &fixture("unsat-triangle.gmm")]);
    assert_eq!((code, out.as_str()), (EXIT_UNSAT, "UNSAT\n"));
}

#[test]
fn sat_with_witness() {
    let path = fixture("sat.gmm");
    let (code, out, _) = gmmcsp(&["solve", &path, "--witness"]);
    assert_eq!(code, EXIT_SAT);
    assert_eq!(out, "SAT\nw 1 1 0\n");
    let parsed = parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(verify_assignment(&parsed.instance, &Tuple::from([1, 1, 0])).unwrap());
    let (code, out, _) = gmmcsp(&["oracle", &path, "--witness"]);
    assert_eq!((code, out.as_str()), (EXIT_SAT, "SAT\nw 1 1 0\n"));
}

#[test]
fn stats_go_to_stderr() {
    let (code, out, err) = gmmcsp(&["solve", &fixture("sat.gmm"), "--stats"]);
    assert_eq!((code, out.as_str()), (EXIT_SAT, "SAT\n"));
    assert_eq!(err.lines().filter(|l| l.starts_with("c step")).count(), 4);
    assert!(err.contains("compactness_violations 0"));
}

#[test]
fn classify_operations() {
    let (code, out, _) = gmmcsp(&["op", "classify", &fixture("mixed3.op")]);
    assert_eq!(code, EXIT_SAT);
    assert_eq!(
        out,
        "0 0 Majority\n0 1 Minority\n0 2 Majority\n1 1 Majority\n1 2 Majority\n2 2 Majority\n"
    );
    let (code, out, _) = gmmcsp(&["op", "classify", &fixture("and3.op")]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.starts_with("NotGmm(0,1)"));
    let (code, _, _) = gmmcsp(&["op", "classify", &fixture("unsat-triangle.gmm")]);
    assert_eq!(code, EXIT_SAT);
}

#[test]
fn validation_switch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.gmm");
    let not_invariant = Relation::from_tuples(3, [[0u8, 0, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
    let inst = Instance::new(3, 2, vec![Constraint::new(vec![1, 2, 3], not_invariant)]).unwrap();
    std::fs::write(&path, serialize_instance(&xor3(), &inst)).unwrap();
    let path = path.to_string_lossy().into_owned();
    let (code, _, err) = gmmcsp(&["solve", &path]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("not invariant"), "{err}");
    let (code, _, _) = gmmcsp(&["solve", &path, "--validate", "off"]);
    assert_ne!(code, EXIT_ERROR);
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.gmm");
    std::fs::write(&path, "gmmcsp 1\ndomain 2\nop 3\ntable\n0 0 0 1 0 1 1\nvars 1\nconstraints 0\n").unwrap();
    let (code, _, err) = gmmcsp(&["solve", &path.to_string_lossy()]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("line 4"), "{err}");
    let (code, _, _) = gmmcsp(&["solve", "/nonexistent/file.gmm"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, _) = gmmcsp(&["solve"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, _) = gmmcsp(&["gen", "3sat", "--vars", "2", "--constraints", "1", "--seed", "0"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, err) = gmmcsp(&["oracle", &fixture("sat.gmm"), "--budget", "4"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn duplicate_tuples_warn() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.gmm");
    let text = std::fs::read_to_string(fixture("sat.gmm")).unwrap().replace("tuples 1\n1\n", "tuples 2\n1\n1\n");
    std::fs::write(&path, text).unwrap();
    let (code, _, err) = gmmcsp(&["solve", &path.to_string_lossy()]);
    assert_eq!(code, EXIT_SAT);
    assert!(err.contains("warning") && err.contains("duplicate"), "{err}");
}

#[test]
fn gen_writes_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.gmm");
    let args = ["gen", "mixed3", "--vars", "5", "--constraints", "6", "--seed", "9"];
    let (code, stdout_text, _) = gmmcsp(&args);
    assert_eq!(code, EXIT_SAT);
    let mut with_file = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    with_file.extend(["-o", &p]);
    assert_eq!(gmmcsp(&with_file).0, EXIT_SAT);
    let file_text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file_text, stdout_text);
    let parsed = parse_instance(&file_text).unwrap();
    assert_eq!(parsed.op, mixed3());
    assert_eq!(serialize_instance(&parsed.op, &parsed.instance), file_text);
}

#[test]
fn check_rep_passes_on_small_files() {
    for name in ["sat.gmm", "unsat-triangle.gmm"] {
        let (code, out, _) = gmmcsp(&["check-rep", &fixture(name)]);
        assert_eq!(code, EXIT_SAT, "{name}");
        assert!(out.starts_with("OK"));
    }
}

#[test]
fn binary_honours_closure_cap() {
    let exe = env!("CARGO_BIN_EXE_gmmcsp");
    let ok = Command::new(exe)
        .args(["solve", &fixture("sat.gmm"), "--witness"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_SAT));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "SAT\nw 1 1 0\n");
    let bad = Command::new(exe)
        .args(["solve", &fixture("sat.gmm")])
        .env("GMM_CLOSURE_CAP", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_ERROR));
    let tiny = Command::new(exe)
        .args(["check-rep", &fixture("sat.gmm")])
        .env("GMM_CLOSURE_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(tiny.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&tiny.stderr).contains("budget of 1"));
}
