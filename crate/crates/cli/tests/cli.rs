use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sosgraph(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosgraph"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .env_remove("SOSGRAPH_CACHE_DIR")
        .output()
        .expect("running sosgraph")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn lines(out: &Output) -> Vec<String> {
    stdout(out).lines().map(str::to_string).collect()
}

#[test]
fn build_is_reused_with_the_same_checksum() {
    let dir = TempDir::new().unwrap();
    let first = sosgraph(dir.path(), &["build", "--system", "F4", "--k", "4"]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).starts_with("built "));
    let second = sosgraph(dir.path(), &["build", "--system", "F4", "--k", "4"]);
    assert!(stderr(&second).starts_with("reused "));
    assert_eq!(stdout(&first), stdout(&second));
    let row = &lines(&first)[1];
    assert!(row.starts_with("F4,4,24,96,"), "{row}");
    assert_eq!(row.rsplit(',').next().unwrap().len(), 64);
    assert!(dir.path().join("F4_k4.sosg").exists());
}

#[test]
fn build_writes_dot() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("g2.dot");
    let out = sosgraph(dir.path(), &["build", "--system", "G2", "--k", "2", "--dot", dot.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.contains("graph G {"));
    assert_eq!(text.matches(" -- ").count(), 6);
}

#[test]
fn k_above_the_bound_warns_and_is_empty() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["build", "--system", "E6", "--k", "5"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning: k exceeds max SOS size 4 of E6"));
    assert!(lines(&out)[1].starts_with("E6,5,0,0,"));
}

#[test]
fn parameters_table() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["table", "parameters", "--system", "G2"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "system,k,vertices,edges,min_degree,max_degree,components\r\nG2,1,12,30,4,6,1\r\nG2,2,6,6,2,2,1\r\n"
    );
}

#[test]
fn clique_number_table() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["table", "cliques", "--system", "E7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(lines(&out)[1], "E7,7,6,5,7,5,4,1");
}

#[test]
fn sunflower_row() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["table", "sunflowers", "--system", "E8", "--k", "1"]);
    assert!(out.status.success());
    assert_eq!(lines(&out)[1], "E8,1,17280,128,0.7");
}

#[test]
fn pair_budget_skips_rows_with_partial_status() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["--max-pairs", "2000", "stats", "--system", "F4"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = lines(&out);
    assert_eq!(rows[1], "F4,1,48,408,14,20,1");
    assert_eq!(rows[2], "F4,2,SKIPPED,SKIPPED,SKIPPED,SKIPPED,SKIPPED");
    assert_eq!(rows[4], "F4,4,24,96,8,8,1");
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let other = TempDir::new().unwrap();
    let args = ["--format", "json", "cliques", "--system", "F4"];
    let a = sosgraph(dir.path(), &args);
    let b = sosgraph(dir.path(), &args);
    let c = sosgraph(other.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn json_rows_carry_checksums() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["--format", "json", "stats", "--system", "E6", "--k", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["table"], "parameters");
    let row = &v["rows"][0];
    assert_eq!(row["edges"], 4590);
    assert_eq!(row["provenance"]["vertex_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn latex_groups_digits() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["--format", "latex", "sunflowers", "--system", "F4", "--k", "3"]);
    assert!(stdout(&out).contains("F4 & 3 & 4{,}992 & 896 & 17.9 \\\\"));
}

#[test]
fn output_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t.csv");
    let out = sosgraph(dir.path(), &["-o", path.to_str().unwrap(), "stats", "--system", "G2", "--k", "1"]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().contains("G2,1,12,30,4,6,1"));
}

#[test]
fn verify_passes_for_f4() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["verify", "--system", "F4"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_ok"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["check"].as_str().unwrap().contains("D4")));
    assert!(checks.iter().all(|c| c["ok"] == true));
}

#[test]
fn verify_covers_simply_laced_identities() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["verify", "--system", "E6"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert!(names.iter().any(|n| n.contains("mod 8 on V(E6, 4)")), "{names:?}");
    assert!(names.iter().any(|n| n.contains("regular of degree")));
}

#[test]
fn brute_force_agrees() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["cliques", "--system", "G2", "--brute-force"]);
    assert!(out.status.success());
    for row in &lines(&out)[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[5], cells[6], "{row}");
    }
}

#[test]
fn basis_change() {
    let dir = TempDir::new().unwrap();
    let identity = dir.path().join("identity.json");
    std::fs::write(&identity, r#"{"rows": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#).unwrap();
    let swap = dir.path().join("swap.json");
    std::fs::write(&swap, r#"{"rows": [[0,1,0,0],[1,0,0,0],[0,0,1,0],[0,0,0,1]]}"#).unwrap();
    let plain = sosgraph(dir.path(), &["sunflowers", "--system", "F4", "--k", "2"]);
    for file in [&identity, &swap] {
        let out = sosgraph(dir.path(), &["sunflowers", "--system", "F4", "--k", "2", "--basis", file.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(out.stdout, plain.stdout);
    }
    assert_eq!(lines(&plain)[1], "F4,2,1152,192,16.7");

    let mixed = dir.path().join("mixed.json");
    std::fs::write(&mixed, r#"{"rows": [[1,"1/2",0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#).unwrap();
    let out = sosgraph(dir.path(), &["sunflowers", "--system", "F4", "--k", "2", "--basis", mixed.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(lines(&out)[1].starts_with("F4,2,1152,"));

    let wrong = dir.path().join("wrong.json");
    std::fs::write(&wrong, r#"{"rows": [[1,0,0],[0,1,0]]}"#).unwrap();
    let out = sosgraph(dir.path(), &["sunflowers", "--system", "F4", "--k", "2", "--basis", wrong.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn unknown_system_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = sosgraph(dir.path(), &["stats", "--system", "H3"]);
    assert!(!out.status.success());
}
