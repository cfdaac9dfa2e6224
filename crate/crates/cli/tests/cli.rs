use std::path::PathBuf;
use std::process::{Command, Output};

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn quect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quect"))
        .args(args)
        .output()
        .unwrap()
}

fn program(name: &str) -> String {
    programs().join(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn deutsch_distribution() {
    let o = quect(&["run", &program("deutsch.qct"), "--dist"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1 1.000000\n");
}

#[test]
fn shots_are_seeded() {
    let file = program("bell.qct");
    let a = quect(&["run", &file, "--shots", "10", "--seed", "7"]);
    let b = quect(&["run", &file, "--shots", "10", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        assert!(line == "0 00" || line == "3 11", "{line}");
    }
}

#[test]
fn var_override_changes_width() {
    let o = quect(&["run", &program("deutsch-jozsa.qct"), "--dist", "--var", "n=2"]);
    // parity.tt is a 3-bit function; two lines of width 2 and 1 cannot carry it
    assert_eq!(o.status.code(), Some(1));
    let o = quect(&["run", &program("deutsch-jozsa.qct"), "--dist"]);
    assert_eq!(stdout(&o), "1 1.000000\n");
}

#[test]
fn misaligned_gate_is_reported() {
    let file = program("misaligned.qct");
    let o = quect(&["run", &file]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with(&format!("{file}:5:4: error: ")), "{err}");
    assert!(err.contains("aligned"));
}

#[test]
fn emit_ir_for_stage_example() {
    let o = quect(&["run", &program("stages.qct"), "--emit-ir"]);
    let text = stdout(&o);
    assert!(text.contains("line 0 repeat n"));
    assert!(text.contains("  gate A lines 0,2"));
    assert!(text.contains("  gate B lines 1"));
    assert!(text.contains("stage 1\n  gate Uf lines 0,1"));
    assert!(text.contains("measure 1\n"));
    assert_eq!(text, stdout(&quect(&["ir", &program("stages.qct")])));
}

#[test]
fn emit_ir_two_chunks_and_filler() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.qct");
    std::fs::write(&path, "QBEGIN(a)\n-------\n--/n/--\nQEND\nQBEGIN(b)\n--[H]--\nQEND\n").unwrap();
    let text = stdout(&quect(&["ir", path.to_str().unwrap()]));
    let blocks: Vec<&str> = text.split_terminator("end\n").collect();
    assert_eq!(blocks.len(), 2);
    assert!(blocks[0].starts_with("chunk a\n") && !blocks[0].contains("stage"));
    assert!(blocks[1].starts_with("chunk b\n") && blocks[1].contains("stage 0"));
}

#[test]
fn chunks_run_in_sequence() {
    let o = quect(&["run", &program("bell.qct"), "--dist"]);
    assert_eq!(stdout(&o), "0 0.500000\n3 0.500000\n");
}

#[test]
fn algorithms() {
    let o = quect(&["algo", "deutsch", "--table", &program("not.tt")]);
    assert_eq!(stdout(&o), "1-1\n");
    let o = quect(&["algo", "grover", "--n", "6", "--target", "7", "--seed", "1"]);
    let text = stdout(&o);
    assert!(text.starts_with("found 7\n"));
    let p: f64 = text.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(p > 0.9);
    let o = quect(&["algo", "qft-check", "--n", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("max error "));
    let o = quect(&["algo", "simon", "--n", "3", "--period", "110"]);
    assert!(stdout(&o).starts_with("period 110\n"));
    let o = quect(&["algo", "deutsch-jozsa", "--table", &program("parity.tt")]);
    assert!(stdout(&o).starts_with("balanced\n"));
}

#[test]
fn bad_parameters_fail() {
    let o = quect(&["algo", "deutsch", "--table", &program("parity.tt")]);
    assert_eq!(o.status.code(), Some(1));
    let o = quect(&["algo", "simon", "--n", "3", "--period", "000"]);
    assert_eq!(o.status.code(), Some(1));
    let o = quect(&["run", "/nonexistent.qct"]);
    assert_eq!(o.status.code(), Some(1));
    let o = quect(&["run"]);
    assert_eq!(o.status.code(), Some(2));
}
