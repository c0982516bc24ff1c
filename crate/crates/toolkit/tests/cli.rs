use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dms_toolkit::cli::{EXIT_INVALID, EXIT_PARSE, EXIT_PRECONDITION};
use dms_toolkit::fixtures::TETRA;
use dms_toolkit::formats::write_tri;
use tempfile::TempDir;

fn dms(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dms")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fixture_validate_betti_critical() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(dms(d, &["fixture", "torus7", "--out", "t"]).status.success());
    for ext in ["cwp", "dvf", "dmf"] {
        assert!(d.join(format!("t.{ext}")).exists());
    }
    let o = dms(d, &["validate", "--complex", "t.cwp", "--field", "t.dvf"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "ok");
    assert!(dms(d, &["validate", "--complex", "t.cwp", "--function", "t.dmf"]).status.success());
    assert_eq!(stdout(&dms(d, &["betti", "--complex", "t.cwp"])).trim(), "1 2 1");
    let o = dms(d, &["critical", "--complex", "t.cwp", "--field", "t.dvf"]);
    assert_eq!(stdout(&o).lines().next(), Some("1 2 1"));
}

#[test]
fn compose_then_decompose() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(dms(d, &["fixture", "torus7", "--out", "a"]).status.success());
    assert!(dms(d, &["fixture", "torus7", "--out", "b", "--seed", "4"]).status.success());
    let o = dms(
        d,
        &["compose", "--left", "a.cwp", "--left-function", "a.dmf", "--right", "b.cwp", "--right-function", "b.dmf", "--out", "s"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "chi -2 counts 1 4 1");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("s.report.json")).unwrap()).unwrap();
    assert_eq!(report["perfect"], true);

    let o = dms(d, &["decompose", "--complex", "s.cwp", "--function", "s.dmf", "--g1", "1", "--g2", "1", "--out", "p"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["m1.cwp", "m1.dvf", "m1.dmf", "m2.cwp", "m2.dvf", "m2.dmf", "circle.txt", "report.json"] {
        assert!(d.join(format!("p.{f}")).exists(), "{f}");
    }
    assert_eq!(stdout(&dms(d, &["betti", "--complex", "p.m2.cwp"])).trim(), "1 2 1");
    assert!(dms(d, &["validate", "--complex", "p.m1.cwp", "--field", "p.m1.dvf"]).status.success());
    assert!(dms(d, &["validate", "--complex", "p.m1.cwp", "--function", "p.m1.dmf"]).status.success());

    let o = dms(d, &["decompose", "--complex", "s.cwp", "--function", "s.dmf", "--g1", "2", "--g2", "1", "--out", "q"]);
    assert_eq!(o.status.code(), Some(EXIT_PRECONDITION));
}

#[test]
fn failure_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("k.tri"), write_tri(&TETRA)).unwrap();
    fs::write(d.join("double.dvf"), "pair v0 e0-1\npair v0 e0-2\n").unwrap();
    fs::write(d.join("cycle.dvf"), "pair v0 e0-1\npair v1 e1-2\npair v2 e0-2\n").unwrap();
    fs::write(d.join("junk.dvf"), "pair v0\n").unwrap();

    assert_eq!(stdout(&dms(d, &["betti", "--complex", "k.tri"])).trim(), "1 0 1");
    let o = dms(d, &["validate", "--complex", "k.tri", "--field", "double.dvf"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID));
    let o = dms(d, &["validate", "--complex", "k.tri", "--field", "cycle.dvf"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&o.stderr).contains("closed V-path"));
    assert_eq!(dms(d, &["validate", "--complex", "k.tri", "--field", "junk.dvf"]).status.code(), Some(EXIT_PARSE));
    assert_eq!(dms(d, &["betti", "--complex", "missing.cwp"]).status.code(), Some(EXIT_PARSE));
    assert_eq!(dms(d, &["frobnicate"]).status.code(), Some(EXIT_PARSE));
    assert!(dms(d, &["--help"]).status.success());
}

#[test]
fn exports() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert!(dms(d, &["fixture", "sphere", "--out", "s"]).status.success());
    assert!(dms(d, &["export", "--complex", "s.cwp", "--format", "off", "--out", "s.off"]).status.success());
    let off = fs::read_to_string(d.join("s.off")).unwrap();
    assert!(off.starts_with("OFF\n4 4 6\n"));
    let o = dms(d, &["export", "--complex", "s.cwp", "--format", "dot", "--field", "s.dvf", "--out", "s.dot"]);
    assert!(o.status.success());
    let dot = fs::read_to_string(d.join("s.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("color=red").count(), 6);
}
