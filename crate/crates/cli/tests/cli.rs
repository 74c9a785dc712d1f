use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphsimplex"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const P4: &str = "0 1\n1 2\n2 3\n";
const K4: &str = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

#[test]
fn report_p4() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", P4);
    let out = run(&["report", s(&p4)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mu: Vec<f64> = v["spectrum"]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (got, want) in mu.iter().zip([3.414, 2.0, 0.586]) {
        assert!((got - want).abs() < 5e-4);
    }
    assert_eq!(v["volumes"]["tree_count"], 1);
    assert_eq!(v["volumes"]["simplex"].as_f64(), Some(0.666666666667));
    assert!(String::from_utf8(out.stdout).unwrap().contains("0.666666666667"));
}

#[test]
fn report_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "# weighted\n0 1 0.5\n1 2 2\n2 3 1.25\n3 0 3\n1 3 0.1\n");
    let a = run(&["report", s(&g), "--exhaustive-cuts", "--json"]);
    let b = run(&["report", s(&g), "--exhaustive-cuts", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["cuts"]["reports"].as_array().unwrap().len(), 7);
}

#[test]
fn report_k2_resistance() {
    let dir = TempDir::new().unwrap();
    let k2 = write(&dir, "k2.txt", "0 1\n");
    let v = json(&run(&["report", s(&k2)]));
    assert_eq!(v["resistance"], serde_json::json!([[0.0, 1.0], [1.0, 0.0]]));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let disconnected = write(&dir, "d.txt", "0 1\n2 3\n");
    assert_eq!(run(&["report", s(&disconnected)]).status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "0 1 -2\n");
    assert_eq!(run(&["report", s(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["report", "/nonexistent/graph.txt"]).status.code(), Some(1));
    let long_path: String = (0..21).map(|i| format!("{i} {}\n", i + 1)).collect();
    let big = write(&dir, "big.txt", &long_path);
    assert_eq!(run(&["report", s(&big), "--exhaustive-cuts"]).status.code(), Some(3));
    let huge: String = (0..25).map(|i| format!("{i} {}\n", i + 1)).collect();
    let huge = write(&dir, "huge.txt", &huge);
    assert_eq!(run(&["maxcut", s(&huge)]).status.code(), Some(3));
}

#[test]
fn verify_p4_passes() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", P4);
    let out = run(&["verify", s(&p4)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["identities"].as_array().unwrap().len() > 20);
}

#[test]
fn verify_corpus_five() {
    let out = run(&["verify", "--corpus", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("728 graphs"));
}

#[test]
fn verify_overtight_tolerance_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", P4);
    let out = run(&["verify", s(&p4), "--tolerance", "1e-15"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("identity "), "{err}");
    // the full per-identity table is still printed
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn maxcut_examples() {
    let dir = TempDir::new().unwrap();
    for (text, subset, value, alt) in [
        (P4, vec![0, 2], 3.0, 0.57735),
        (K4, vec![0, 1], 4.0, 0.5),
        ("0 1\n", vec![0], 1.0, 1.0),
    ] {
        let g = write(&dir, "g.txt", text);
        let out = run(&["maxcut", s(&g)]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let got: Vec<u64> = v["max_cut"]["subset"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        assert_eq!(got, subset.iter().map(|&x| x as u64).collect::<Vec<_>>());
        assert_eq!(v["max_cut"]["value"].as_f64(), Some(value));
        assert!((v["min_altitude"]["value"].as_f64().unwrap() - alt).abs() < 1e-5);
        assert_eq!(v["subsets_agree"], true);
    }
}

fn mesh_vertices(path: &Path) -> Vec<[f64; 3]> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("3 3"));
    let rest: Vec<&str> = lines.collect();
    assert_eq!(rest.len(), 8);
    assert!(rest[4..].iter().all(|l| l.starts_with("f ")));
    rest[..4]
        .iter()
        .map(|l| {
            let f: Vec<f64> = l.strip_prefix("v ").unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect()
}

#[test]
fn export_meshes() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", P4);
    let prefix = dir.path().join("p4");
    let out = run(&["export", s(&p4), "--mesh", s(&prefix)]);
    assert_eq!(out.status.code(), Some(0));
    let norms: Vec<f64> = mesh_vertices(&dir.path().join("p4-original.mesh"))
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum())
        .collect();
    for (got, want) in norms.iter().zip([1.0, 2.0, 2.0, 1.0]) {
        assert!((got - want).abs() < 1e-10, "{norms:?}");
    }
    assert!(dir.path().join("p4-inverse.mesh").exists());

    let k4 = write(&dir, "k4.txt", K4);
    let prefix = dir.path().join("k4");
    assert_eq!(run(&["export", s(&k4), "--mesh", s(&prefix)]).status.code(), Some(0));
    let v = mesh_vertices(&dir.path().join("k4-original.mesh"));
    let mut lengths = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            lengths.push((0..3).map(|k| (v[i][k] - v[j][k]).powi(2)).sum::<f64>());
        }
    }
    assert!(lengths.iter().all(|l| (l - lengths[0]).abs() < 1e-10), "{lengths:?}");

    let k2 = write(&dir, "k2.txt", "0 1\n");
    let prefix = dir.path().join("k2");
    assert_eq!(run(&["export", s(&k2), "--mesh", s(&prefix)]).status.code(), Some(3));
}

#[test]
fn reads_standard_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin()
        .args(["maxcut", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(P4.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["max_cut"]["value"].as_f64(), Some(3.0));
}
