use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ucycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucycle")).args(args).env_remove("UCYCLE_THREADS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sum_prints_first_k_sum() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ab.ucy", "ucycle-file v1\nalphabet: a b c d\ncycle c: a b c\ncycle d: b c d a b\n");
    let out = ucycle(&["sum", "--k", "3", &f]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "abcabbcd");
}

#[test]
fn weave_matches_worked_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w.ucy", "ucycle-file v1\nalphabet: 1 2 3 4 5 a b c d e\ncycle c: 1 2 3 4 5\ncycle d: a b c d e\n");
    let out = ucycle(&["weave", "--t", "3", "--u", "2", &f]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "123ab451cd234ea512bc345de");
}

#[test]
fn build_pairs_then_verify() {
    let dir = TempDir::new().unwrap();
    let out_file = dir.path().join("pairs.ucy");
    assert_eq!(code(&ucycle(&["build-pairs", "--n", "9", "--k", "4", "--out", path(&out_file)])), 0);

    let ok = ucycle(&["verify", "--k", "2", path(&out_file)]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).trim(), "pairs: ok");

    // a pair ucycle is far too short to cover 3-subsets
    assert_eq!(code(&ucycle(&["verify", "--k", "3", path(&out_file)])), 1);
    assert_eq!(code(&ucycle(&["benign-check", "--t", "2", "--k", "4", path(&out_file)])), 0);
}

#[test]
fn search_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    let found = dir.path().join("found.ucy");
    let out = ucycle(&["search", "--n", "8", "--k", "3", "--seed", "3", "--prefix", "0 1 2", "--out", path(&found)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&found).unwrap();
    assert!(text.contains("cycle found: 0 1 2 "));
    assert_eq!(code(&ucycle(&["verify", "--k", "3", path(&found)])), 0);

    let moved = dir.path().join("moved.ucy");
    assert_eq!(code(&ucycle(&["relabel", "--x", "0", "--window", "7 6 5", path(&found), "--out", path(&moved)])), 0);
    assert!(std::fs::read_to_string(&moved).unwrap().contains("cycle found: 7 6 5 "));
    assert_eq!(code(&ucycle(&["verify", "--k", "3", path(&moved)])), 0);
}

#[test]
fn compose_k2_output_verifies() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("k2.ucy");
    assert_eq!(code(&ucycle(&["compose-k2", "--a", "4", "--b", "6", "--out", path(&f)])), 0);
    assert_eq!(code(&ucycle(&["verify", "--k", "2", path(&f)])), 0);
}

#[test]
fn exit_codes() {
    // refused by the divisibility condition
    assert_eq!(code(&ucycle(&["search", "--n", "9", "--k", "3"])), 2);
    // budget exhausted before anything is found
    assert_eq!(code(&ucycle(&["search", "--n", "13", "--k", "4", "--budget-ms", "0"])), 3);
    assert_eq!(code(&ucycle(&["search", "--bogus"])), 2);
    assert_eq!(code(&ucycle(&["verify", "--k", "2", "/nonexistent/file.ucy"])), 2);

    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.ucy", "ucycle-file v1\nalphabet: a b\ncycle x: a q\n");
    assert_eq!(code(&ucycle(&["verify", "--k", "1", &bad])), 2);
    let no_sum = write(&dir, "nosum.ucy", "ucycle-file v1\nalphabet: a b c d\ncycle x: a b\ncycle y: c d\n");
    assert_eq!(code(&ucycle(&["sum", "--k", "3", &no_sum])), 1);
}

#[test]
fn necessary_and_schedule() {
    assert_eq!(stdout(&ucycle(&["necessary", "--n", "18", "--k", "4"])).trim(), "true");
    assert_eq!(stdout(&ucycle(&["necessary", "--n", "9", "--k", "3"])).trim(), "false");
    let out = ucycle(&["schedule", "--n", "34"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "16 16 -> 34");
}
