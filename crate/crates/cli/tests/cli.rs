use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn pathfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathfree")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn colour_trivial_graphs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("empty.txt", ""), ("edge.txt", "0 1\n")] {
        let input = write(&dir, name, text);
        let col = dir.path().join(format!("{name}.col"));
        let out = pathfree(&[
            "colour",
            "--input",
            &input,
            "--r",
            "8",
            "--k",
            "6",
            "--output",
            col.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let verify = pathfree(&["verify", "--input", &input, "--colouring", col.to_str().unwrap()]);
        assert_eq!(code(&verify), 0);
    }
}

#[test]
fn colour_report_on_random_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let report = dir.path().join("report.json");
    let gen = pathfree(&[
        "generate", "--model", "uniform-m", "--n", "500", "--m", "41", "--seed", "3", "--output",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0);
    let out = pathfree(&[
        "--format",
        "json",
        "colour",
        "--input",
        graph.to_str().unwrap(),
        "--r",
        "20",
        "--k",
        "40",
        "--beta0",
        "0.5",
        "--report",
        report.to_str().unwrap(),
    ]);
    let stdout = json(&out);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(stdout, saved);
    assert_eq!(saved["run"]["edges"], 41);
    assert_eq!(saved["run"]["params"]["beta0_overridden"], true);
    let accepted = saved["accepted"].as_bool().unwrap();
    assert_eq!(code(&out), if accepted { 0 } else { 1 });
}

#[test]
fn injected_overspend_is_an_invariant_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir, "g.txt", "0 1\n1 2\n");
    let out = pathfree(&["colour", "--input", &input, "--r", "8", "--k", "6", "--inject-overspend"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&pathfree(&["colour", "--input", "/nonexistent/graph", "--r", "8", "--k", "6"])), 2);
    assert_eq!(code(&pathfree(&["colour"])), 2);
    assert_eq!(code(&pathfree(&["generate", "--model", "d-regular", "--n", "5", "--d", "3"])), 2);
    assert_eq!(code(&pathfree(&["generate", "--model", "uniform-m", "--n", "5"])), 2);
    assert_eq!(code(&pathfree(&["bins", "--grid", "3..1", "1..2"])), 2);
}

#[test]
fn verify_rejects_bad_colourings() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir, "path.txt", "0 1\n1 2\n2 3\n");
    let mono = write(&dir, "mono.col", "# r=2 k=4\n0 1 0\n1 2 0\n2 3 0\n");
    let out = pathfree(&["--format", "json", "verify", "--input", &input, "--colouring", &mono]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["failures"][0]["path"].as_array().unwrap().len(), 4);

    let split = write(&dir, "split.col", "# r=2 k=4\n0 1 0\n1 2 1\n2 3 0\n");
    assert_eq!(code(&pathfree(&["verify", "--input", &input, "--colouring", &split])), 0);
    // too many colours for r
    assert_eq!(code(&pathfree(&["verify", "--input", &input, "--colouring", &split, "--r", "1"])), 1);
    let partial = write(&dir, "partial.col", "# r=2 k=4\n0 1 0\n");
    assert_eq!(code(&pathfree(&["verify", "--input", &input, "--colouring", &partial])), 1);
}

#[test]
fn generate_is_deterministic() {
    let a = pathfree(&["generate", "--model", "d-regular", "--n", "40", "--d", "4", "--seed", "7"]);
    let b = pathfree(&["generate", "--model", "d-regular", "--n", "40", "--d", "4", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let g = pathfree_core::graph::parse_edge_list(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert!((0..40).all(|v| g.degree(v) == 4));

    let empty = pathfree(&["generate", "--model", "uniform-m", "--n", "10", "--m", "0"]);
    let g = pathfree_core::graph::parse_edge_list(std::str::from_utf8(&empty.stdout).unwrap()).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (10, 0));
}

#[test]
fn bins_grid_values() {
    let out = pathfree(&["--format", "json", "bins", "--grid", "1..2", "1..2", "--trials", "4000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let cell = |q: u64, n: u64| rows.iter().find(|r| r["q"] == q && r["n"] == n).unwrap();
    assert_eq!(cell(1, 2)["exact"]["expected_max"], "2");
    assert_eq!(cell(2, 1)["exact"]["expected_max"], "1");
    assert_eq!(cell(2, 2)["exact"]["expected_max"], "3/2");
    assert_eq!(cell(2, 2)["exact"]["w"], "3/4");
    let mc = &cell(2, 2)["mc"];
    let (mean, se) = (mc["mean"].as_f64().unwrap(), mc["stderr"].as_f64().unwrap());
    assert!((mean - 1.5).abs() <= 5.0 * se, "{mean} ± {se}");
}

#[test]
fn inequality_checks() {
    let ok = pathfree(&["check-inequalities", "--grid", "2..3", "1..3", "--trials", "20"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = pathfree(&["check-inequalities", "--grid", "2..3", "1..3", "--trials", "20", "--corrupt-oracle"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn extract_writes_certified_subgraph() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir, "g.txt", &complete_bipartite(4, 4));
    let output = dir.path().join("h.txt");
    let out = pathfree(&[
        "--format",
        "json",
        "extract",
        "--input",
        &input,
        "--k",
        "6",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["certified"], true);
    let h = read_graph(&output);
    let g = read_graph(Path::new(&input));
    assert!(h.edges().iter().all(|e| g.contains_edge(e.u, e.v)));
}

fn complete_bipartite(a: usize, b: usize) -> String {
    (0..a).flat_map(|u| (a..a + b).map(move |v| format!("{u} {v}\n"))).collect()
}

fn read_graph(p: &Path) -> pathfree_core::graph::Graph {
    pathfree_core::graph::parse_edge_list(&std::fs::read_to_string(p).unwrap()).unwrap()
}
