mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fnf_oracles::graphenc::Digraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fnf-oracles"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn gen(dir: &Path, name: &str, seed: u64, n: usize, density: &str, w: u32) -> PathBuf {
    let p = dir.join(name);
    let o = bin(&[
        "gen",
        "--seed",
        &seed.to_string(),
        "--n",
        &n.to_string(),
        "--density",
        density,
        "--max-weight",
        &w.to_string(),
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

fn run_args<'a>(cmd: &'a str, oracle: &'a str, graph: &'a Path, script: &'a Path) -> Vec<&'a str> {
    vec![
        cmd,
        "--seed",
        "7",
        "--oracle",
        oracle,
        "--graph",
        graph.to_str().unwrap(),
        "--script",
        script.to_str().unwrap(),
    ]
}

#[test]
fn gen_is_deterministic_and_hits_extremes() {
    let dir = TempDir::new().unwrap();
    let a = std::fs::read_to_string(gen(dir.path(), "a", 3, 20, "0.2", 3)).unwrap();
    let b = std::fs::read_to_string(gen(dir.path(), "b", 3, 20, "0.2", 3)).unwrap();
    assert_eq!(a, b);
    assert!(Digraph::parse_edge_list(&a).unwrap().is_weighted());
    let empty = std::fs::read_to_string(gen(dir.path(), "e", 3, 9, "0", 1)).unwrap();
    assert_eq!(empty.trim(), "9 0");
    let full = Digraph::parse_edge_list(&std::fs::read_to_string(gen(dir.path(), "f", 3, 9, "1", 1)).unwrap()).unwrap();
    assert_eq!(full.edge_count(), 72);
}

#[test]
fn query_only_run_equals_verify() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "g", 11, 25, "0.1", 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let script: String = (0..40)
        .map(|_| format!("Q {} {}\n", rng.gen_range(1..=25), rng.gen_range(1..=25)))
        .collect();
    let s = write(dir.path(), "s", &script);
    for oracle in ["dso", "dyn-edge", "vx"] {
        let run = bin(&run_args("run", oracle, &g, &s));
        let verify = bin(&run_args("verify", oracle, &g, &s));
        assert!(
            run.status.success() && verify.status.success(),
            "{oracle}: {}",
            stderr(&verify)
        );
        let out = stdout(&verify);
        assert!(out.starts_with(&stdout(&run)));
        assert!(out.ends_with("0 mismatches / 40 queries\n"), "{out}");
        assert_eq!(stdout(&run), stdout(&bin(&run_args("run", oracle, &g, &s))));
    }
}

#[test]
fn updates_are_verified() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g", "5 4\n1 2\n2 3\n3 4\n4 5\n");
    let dyn_script = write(dir.path(), "d", "Q 1 5\nE+ 1 4\nQ 1 5\nE- 4 5\nQ 1 5\nQ 3 3\n");
    let o = bin(&run_args("verify", "dyn-edge", &g, &dyn_script));
    assert_eq!(
        stdout(&o),
        "Q 1 5 -> 4\nQ 1 5 -> 2\nQ 1 5 -> INF\nQ 3 3 -> 0\n0 mismatches / 4 queries\n"
    );
    let dso_script = write(dir.path(), "f", "F 2 3\nQ 1 3\nF v4\nQ 1 5\nQ 1 3\nF\nQ 1 5\n");
    let o = bin(&run_args("verify", "dso", &g, &dso_script));
    assert_eq!(
        stdout(&o),
        "Q 1 3 -> INF\nQ 1 5 -> INF\nQ 1 3 -> 2\nQ 1 5 -> 4\n0 mismatches / 4 queries\n"
    );
    let vx_script = write(dir.path(), "v", "VX 3 | out: 5 | in: 1\nQ 1 5\nQ 2 3\n");
    let o = bin(&run_args("verify", "vx", &g, &vx_script));
    assert_eq!(stdout(&o), "Q 1 5 -> 2\nQ 2 3 -> INF\n0 mismatches / 2 queries\n");
}

#[test]
fn output_formats() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g", "3 2\n1 2\n2 3\n");
    let s = write(dir.path(), "s", "Q 1 3\nQ 3 1\n");
    let mut args = run_args("run", "dso", &g, &s);
    args.extend(["--format", "csv"]);
    assert_eq!(stdout(&bin(&args)), "index,s,t,distance\n1,1,3,2\n2,3,1,INF\n");
    let mut args = run_args("verify", "dso", &g, &s);
    args.extend(["--format", "json"]);
    let o = bin(&args);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["distance"], 2);
    assert!(lines[1]["distance"].is_null());
    assert!(stderr(&o).contains("0 mismatches / 2 queries"));
}

#[test]
fn empty_script_and_bad_input() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g", "3 1\n1 2\n");
    let empty = write(dir.path(), "e", "# nothing\n");
    let o = bin(&run_args("run", "vx", &g, &empty));
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");

    let bad = write(dir.path(), "b", "Q 1 2\nQ 1 x\n");
    let o = bin(&run_args("run", "dso", &g, &bad));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let absent = write(dir.path(), "a", "Q 1 2\nE- 2 3\n");
    let o = bin(&run_args("run", "dyn-edge", &g, &absent));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("command 2"), "{}", stderr(&o));

    let o = bin(&["run", "--oracle", "dso", "--graph", "g", "--script", "s"]);
    assert!(!o.status.success(), "seed is mandatory");
    let missing = dir.path().join("missing");
    let o = bin(&run_args("run", "dso", &missing, &empty));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tiny_field_is_reported_not_hidden() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "g", 5, 30, "0.08", 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let script: String = (0..200)
        .map(|_| format!("Q {} {}\n", rng.gen_range(1..=30), rng.gen_range(1..=30)))
        .collect();
    let s = write(dir.path(), "s", &script);
    let mut args = run_args("verify", "vx", &g, &s);
    args.extend(["--prime", "101"]);
    let o = bin(&args);
    let out = stdout(&o);
    let summary = out.lines().last().unwrap();
    let count: usize = summary.split(' ').next().unwrap().parse().unwrap();
    assert!(summary.ends_with("/ 200 queries"));
    assert_eq!(o.status.code(), Some(if count == 0 { 0 } else { 1 }));
    assert_eq!(out.matches("mismatch: seed=7 command=").count(), count);
}

#[test]
fn bench_single_point() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.csv");
    let o = bin(&[
        "bench",
        "--seed",
        "1",
        "--sizes",
        "16",
        "--ops",
        "submatrix",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "operation,n,h,f,seconds,agreement");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(",true"));
}
