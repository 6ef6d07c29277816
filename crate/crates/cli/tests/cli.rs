use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_girthforge"));
    c.env_remove("GIRTHFORGE_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn construct_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let f8 = path(dir.path(), "f8.arcs");
    assert_eq!(run(&["construct", "f8", &f8]).status.code(), Some(0));
    let o = run(&["check", &f8, "--k", "3", "--min-outdeg", "2", "--min-indeg", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["member"], true);
    assert_eq!(v["arc_count"], 20);
    assert_eq!(v["girth"], 4);
    assert_eq!(v["gamma"], 8);

    let c4 = path(dir.path(), "c4.arcs");
    assert_eq!(run(&["construct", "circulant", "--n", "4", "--jumps", "1", &c4]).status.code(), Some(0));
    let o = run(&["check", &c4, "--k", "3", "--min-outdeg", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["failures"][0], "δ⁺ = 1");

    let two = path(dir.path(), "two.arcs");
    fs::write(&two, "3\n0 1\n1 0\n1 2\n2 0\n").unwrap();
    let o = run(&["check", &two, "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["failures"][0], "girth 2");
}

#[test]
fn construct_to_stdout() {
    let o = run(&["construct", "phi31", "--family", "D5", "--orders", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let d = girthforge::arclist::parse(&text).unwrap();
    assert_eq!((d.order(), d.arc_count()), (5, 7));
    let o = run(&["construct", "phi31", "--params", "family=D2 orders=4,1,4 roles=Y"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["construct", "tournament", "--n", "6"]);
    assert_eq!(girthforge::arclist::parse(&stdout(&o)).unwrap().arc_count(), 15);
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(run(&["construct", "phi31", "--orders", "2,2"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "circulant", "--n", "5", "--jumps", "5"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--n", "13", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--n", "7", "--k", "3", "--mode", "witness"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent/file.arcs", "--k", "3"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.arcs");
    fs::write(&bad, "3\n0 0\n").unwrap();
    assert_eq!(run(&["check", &bad, "--k", "3"]).status.code(), Some(3));
    let cp = path(dir.path(), "bad.gfck");
    fs::write(&cp, b"GFCK1 not really").unwrap();
    let o = run(&["search", "--n", "8", "--k", "3", "--xi", "2", "--checkpoint", &cp]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exact_search_writes_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "out");
    let o = run(&["search", "--n", "8", "--k", "3", "--xi", "2", "--zeta", "1", "--mode", "exact", "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["phi"], 20);
    assert_eq!(v["status"], "proved");
    assert_eq!(v["classes"], 1);
    let file = v["files"][0].as_str().unwrap();
    let d = girthforge::arclist::parse(&fs::read_to_string(Path::new(&out).join(file)).unwrap()).unwrap();
    assert!(girthforge::are_isomorphic(&d, &girthforge::construct::f8()));
    assert!(v["timing"]["elapsed_secs"].is_number());
}

#[test]
fn witness_search_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "search", "--n", "10", "--k", "3", "--xi", "2", "--zeta", "1", "--mode", "witness", "--target", "34",
            "--seed", "5", "--no-timing", "--out-dir", out,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let (a_dir, b_dir) = (path(dir.path(), "a"), path(dir.path(), "b"));
    let a = bin().args(args(&a_dir)).output().unwrap();
    let b = bin().args(args(&b_dir)).env("GIRTHFORGE_WORKERS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(va["status"], "witness_found");
    assert!(va.get("timing").is_none());
    assert_eq!(va["canonical"], vb["canonical"]);
    assert_eq!(va["restart"], vb["restart"]);
    let again = bin().args(args(&a_dir)).output().unwrap();
    assert_eq!(a.stdout, again.stdout);
    let d = girthforge::arclist::parse(&fs::read_to_string(Path::new(&a_dir).join(va["files"][0].as_str().unwrap())).unwrap())
        .unwrap();
    assert_eq!(d.arc_count(), 34);
}

#[test]
fn emptiness_and_classify() {
    let o = run(&["search", "--n", "6", "--k", "3", "--xi", "2", "--mode", "emptiness"]);
    assert_eq!(json(&o)["status"], "empty");
    assert_eq!(json(&o)["phi"], 0);
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "m.arcs");
    assert_eq!(run(&["construct", "phi31", "--orders", "4,1,1,4", "--roles", "YX", &f]).status.code(), Some(0));
    let o = run(&["classify", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert!(v["family"].is_string());
    assert_eq!(run(&["classify", &f.replace("m.arcs", "none.arcs")]).status.code(), Some(3));
}

#[test]
fn verify_fast_tier_passes() {
    let o = run(&["verify-theorems", "--tier", "fast"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
    assert!(text.lines().count() >= 12);
    let o = run(&["verify-theorems", "--tier", "fast", "--json", "--no-timing"]);
    let v = json(&o);
    assert_eq!(v["all_pass"], true);
    assert!(v.get("timing").is_none());
}
