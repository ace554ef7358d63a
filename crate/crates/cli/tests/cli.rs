use std::path::PathBuf;
use std::process::{Command, Output};

use permcat::serialize::{morphism_from_json, morphism_to_json};
use permcat::{CosetMatrix, Morphism};

fn permcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permcat")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("permcat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_basis(name: &str, q: &str) -> PathBuf {
    let p = scratch(name);
    let f = Morphism::basis(CosetMatrix::parse(q).unwrap()).unwrap();
    std::fs::write(&p, morphism_to_json(&f)).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_chevalley_passes() {
    let o = permcat(&["verify", "chevalley", "--samples", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: PASS"));
}

#[test]
fn deligne_example() {
    let o = permcat(&["deligne", "compose", "--d1", "1,2,1' | 3,2' | 4", "--d2", "1,1' | 2,3 | 2',3' | 4'"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "t^1\n1,1',2' | 2,3\n");
}

#[test]
fn specialize_drops_negative_term() {
    let f = write_basis("xi.json", "L1-1,1;1,L2-1");
    let out = scratch("xi10.json");
    let o = permcat(&["specialize", "--mu", "1,0", "-f", f.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let g = morphism_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.l(), 0);
    assert!(g.is_zero());

    let o = permcat(&["specialize", "--mu", "3,1", "-f", f.to_str().unwrap()]);
    let g = morphism_from_json(&stdout(&o)).unwrap();
    assert!(!g.is_zero());
}

#[test]
fn compose_matches_library() {
    let e = write_basis("e.json", "L1,1;0,L2-1");
    let f = write_basis("f.json", "L1,0;1,L2-1");
    let o = permcat(&["compose", "-f", f.to_str().unwrap(), "-g", e.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got = morphism_from_json(&stdout(&o)).unwrap();
    let fm = Morphism::basis(CosetMatrix::parse("L1,0;1,L2-1").unwrap()).unwrap();
    let em = Morphism::basis(CosetMatrix::parse("L1,1;0,L2-1").unwrap()).unwrap();
    assert_eq!(got, permcat::compose_interpolated(&fm, &em).unwrap());
}

#[test]
fn tensor_writes_blocks() {
    let a = write_basis("a.json", "L1");
    let b = write_basis("b.json", "L1-1,0;0,1");
    let o = permcat(&["tensor", "-f", a.to_str().unwrap(), "-g", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"blocks\""));
}

#[test]
fn verify_is_deterministic() {
    for suite in ["chevalley", "serre", "oracle", "ideal", "hs", "genfun"] {
        let a = permcat(&["verify", suite, "--samples", "5", "--seed", "11"]);
        let b = permcat(&["verify", suite, "--samples", "5", "--seed", "11"]);
        assert_eq!(a.status.code(), Some(0), "{suite}");
        assert_eq!(a.stdout, b.stdout, "{suite}");
    }
}

#[test]
fn error_codes() {
    let o = permcat(&["verify", "serre", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ERR:2:"));

    let o = permcat(&["verify", "nonsense", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = permcat(&["compose", "-f", "/nonexistent/a.json", "-g", "/nonexistent/b.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ERR:2:"));

    let o = permcat(&["krull", "--l1", "3", "--l2", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = permcat(&["kron", "--triple", "2,1;2,1"]);
    assert_eq!(o.status.code(), Some(2));

    // Beyond the character oracle.
    let o = permcat(&["kron", "--triple", "20;20;20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ERR:3:"));
}

#[test]
fn kron_and_hs() {
    assert_eq!(stdout(&permcat(&["kron", "--triple", "2,1;2,1;2,1"])), "1\n");
    let o = permcat(&["hs", "--alpha", "L1,L2", "--matrix", "L1-1,1;1,L2-1"]);
    assert_eq!(stdout(&o), "-L2\n");
}

#[test]
fn stability_csv() {
    let o = permcat(&["stability", "--mu", "2,1", "--x", "perm:|L|-1,1", "--mmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("m,group_size,dimension,stabilized_flag\n1,3,"));
    assert_eq!(s.lines().count(), 5);
}

#[test]
fn krull_report() {
    let o = permcat(&["krull", "--l1", "7", "--l2", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nonconjugate rank-1 idempotent classes: 4"));
}
