use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use zecap::graph::Graph;
use zecap::haemers::eigen_shift_rep;
use zecap::quantum::QHomCert;

fn zecap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zecap")).args(args).output().expect("binary runs")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

/// Parses stdout and checks it against `schemas/<name>.schema.json`.
fn checked(out: &Output, name: &str) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{v}");
    v
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_string()
}

fn graph_file(dir: &TempDir, name: &str, g: &Graph) -> String {
    write(dir, name, &serde_json::to_string(g).unwrap())
}

#[test]
fn graph_subcommands() {
    let dir = TempDir::new().unwrap();
    let out = zecap(&["graph", "make", "cycle", "5"]);
    assert!(out.status.success());
    let v = checked(&out, "graph");
    assert_eq!(v["n"], 5);
    let c5 = write(&dir, "c5.json", std::str::from_utf8(&out.stdout).unwrap());

    let info = checked(&zecap(&["graph", "info", &c5]), "graph-info");
    assert_eq!(info["edge_count"], 5);
    assert_eq!(info["strongly_regular"], serde_json::json!([5, 2, 0, 1]));

    let prod = checked(&zecap(&["graph", "product", &c5, &c5]), "graph");
    assert_eq!(prod["n"], 25);
    assert_eq!(prod["edges"].as_array().unwrap().len(), 25 * 4);
    let union = checked(&zecap(&["graph", "product", "--op", "union", &c5, &c5]), "graph");
    assert_eq!(union["edges"].as_array().unwrap().len(), 10);

    let text = zecap(&["graph", "make", "petersen", "--format", "edgelist"]);
    assert!(String::from_utf8(text.stdout).unwrap().starts_with("10 15\n"));

    // edge-list input is accepted too
    let el = write(&dir, "p3.txt", "3 2\n0 1\n1 2\n");
    assert_eq!(checked(&zecap(&["graph", "info", &el]), "graph-info")["n"], 3);
}

#[test]
fn bounds() {
    let dir = TempDir::new().unwrap();
    let c5 = graph_file(&dir, "c5.json", &Graph::cycle(5).unwrap());
    let theta = checked(&zecap(&["bound", "theta", &c5]), "theta");
    assert!((theta["value"].as_f64().unwrap() - 2.2360680).abs() < 1e-6);
    let with = checked(&zecap(&["bound", "theta", "--matrices", &c5]), "theta");
    assert_eq!(with["primal_matrix"].as_array().unwrap().len(), 5);

    let fcc = checked(&zecap(&["bound", "fcc", &c5]), "fcc");
    assert_eq!(fcc["optimum"], "5/2");
    assert_eq!(fcc["certified"], true);

    let p = graph_file(&dir, "p.json", &Graph::petersen());
    let h = checked(&zecap(&["bound", "haemers", &p]), "haemers");
    assert_eq!(h["value"], 5);

    let rep = eigen_shift_rep(&Graph::petersen(), 1).unwrap();
    let rep_file = write(&dir, "rep.json", &rep.to_json().to_string());
    let out = zecap(&["bound", "haemers", &p, "--rep", &rep_file]);
    assert!(out.status.success());
    let v = checked(&out, "haemers");
    assert_eq!((v["valid"].as_bool(), v["rank"].as_u64()), (Some(true), Some(5)));
    // the same representation does not fit C5
    let out = zecap(&["bound", "haemers", &c5, "--rep", &rep_file]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sandwich() {
    let dir = TempDir::new().unwrap();
    let s = graph_file(&dir, "s.json", &Graph::schlafli_complement().unwrap());
    let out = zecap(&["bound", "sandwich", &s]);
    assert!(out.status.success());
    let v = checked(&out, "sandwich");
    assert_eq!(v["alpha"], 6);
    assert_eq!(v["haemers_upper"], 7);
    assert_eq!(v["haemers_below_theta"], true);
    assert_eq!(v["frac_clique_cover"], "9");
}

#[test]
fn capacity_lower_bound() {
    let dir = TempDir::new().unwrap();
    let c5 = graph_file(&dir, "c5.json", &Graph::cycle(5).unwrap());
    let out = zecap(&["capacity-lb", "--power", "2", &c5]);
    assert!(out.status.success());
    let v = checked(&out, "capacity-lb");
    assert_eq!(v["alpha"], 5);
    assert!((v["root"].as_f64().unwrap() - 2.2360680).abs() < 1e-6);

    let c7 = graph_file(&dir, "c7.json", &Graph::cycle(7).unwrap());
    let out = zecap(&["capacity-lb", "--power", "2", "--node-limit", "3", &c7]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(checked(&out, "capacity-lb")["exact"], false);
}

#[test]
fn cohomomorphism() {
    let dir = TempDir::new().unwrap();
    let c5 = graph_file(&dir, "c5.json", &Graph::cycle(5).unwrap());
    let k2 = graph_file(&dir, "k2.json", &Graph::empty(2));
    let k3 = graph_file(&dir, "k3.json", &Graph::empty(3));
    let v = checked(&zecap(&["preorder", "cohom", &k2, &c5]), "cohom");
    assert_eq!(v["decision"], "yes");
    let v = checked(&zecap(&["preorder", "cohom", &c5, &k2]), "cohom");
    assert_eq!(v["decision"], "no");
    let v = checked(&zecap(&["preorder", "cohom", &c5, &k3]), "cohom");
    assert_eq!(v["decision"], "yes");
}

#[test]
fn verify_certificates() {
    let dir = TempDir::new().unwrap();
    let c5 = Graph::cycle(5).unwrap();
    let k3 = Graph::empty(3);
    let good = QHomCert::from_classical(&c5, &k3, &[0, 1, 1, 2, 0]).unwrap();
    let path = write(&dir, "good.json", &good.to_json().to_string());
    let out = zecap(&["verify", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(checked(&out, "verify")["valid"], true);

    let bad = QHomCert::from_classical(&c5, &k3, &[0, 0, 1, 2, 0]).unwrap();
    let path = write(&dir, "bad_cert.json", &bad.to_json().to_string());
    let out = zecap(&["verify", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = checked(&out, "verify");
    assert_eq!(v["report"]["worst"]["condition"], "orthogonality");

    let b = zecap::nc::bell_kraus(2);
    let path = write(&dir, "bell.json", &b.cert.to_json().to_string());
    let v = checked(&zecap(&["verify", &path]), "verify");
    assert_eq!((v["valid"].as_bool(), v["assisted"].as_bool()), (Some(true), Some(true)));

    let path = write(&dir, "junk.json", r#"{"kind": "mystery"}"#);
    assert_eq!(zecap(&["verify", &path]).status.code(), Some(1));
}

#[test]
fn spectra_test_is_deterministic() {
    let args = ["spectra-test", "--functional", "frac-clique-cover", "--trials", "12", "--seed", "7", "--max-n", "4"];
    let a = zecap(&args);
    let b = zecap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = checked(&a, "axiom-report");
    assert_eq!(v["worst_additive_residual"], 0.0);

    let out = zecap(&["spectra-test", "--functional", "indep-number", "--trials", "30", "--seed", "1", "--max-n", "5"]);
    let v = checked(&out, "axiom-report");
    let code = if v["passed"].as_bool().unwrap() { 0 } else { 2 };
    assert_eq!(out.status.code(), Some(code));
}

#[test]
fn usage_errors() {
    assert_eq!(zecap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(zecap(&["bound", "theta"]).status.code(), Some(1));
    assert_eq!(zecap(&["spectra-test", "--functional", "nope"]).status.code(), Some(1));
    let out = zecap(&["bound", "theta", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    assert_eq!(zecap(&["graph", "make", "cycle", "2"]).status.code(), Some(1));
    assert_eq!(zecap(&["--help"]).status.code(), Some(0));
}
