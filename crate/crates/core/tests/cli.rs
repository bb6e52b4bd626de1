use std::path::Path;
use std::process::{Command, Output};

use chainlab::chain::file::ChainDocument;

fn chainlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(args)
        .env_remove("CHAINLAB_TABLE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    let o = chainlab(&[
        "construct",
        "--method",
        "halving-run",
        "--n",
        "5",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("7 <= 7 OK"));
    let doc = ChainDocument::from_json(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(doc.elements.len(), 8);
    assert_eq!(
        chainlab(&["verify", path_str(&file)]).status.code(),
        Some(0)
    );

    for (method, n) in [
        ("power", "0"),
        ("power-plus-one", "4"),
        ("prime-ladder", "11"),
        ("backtrack", "16"),
        ("pothole", "8"),
        ("factor-pothole", "9"),
        ("iterated-factor", "64"),
        ("degree", "9"),
    ] {
        let o = chainlab(&[
            "construct",
            "--method",
            method,
            "--n",
            n,
            "--out",
            path_str(&file),
        ]);
        assert_eq!(o.status.code(), Some(0), "{method}");
        assert_eq!(
            chainlab(&["verify", path_str(&file)]).status.code(),
            Some(0),
            "{method}"
        );
    }

    let o = chainlab(&[
        "construct",
        "--method",
        "iterated-factor",
        "--n",
        "64",
        "--out",
        path_str(&file),
    ]);
    assert!(stdout(&o).contains("69 <= 83 OK"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    chainlab(&[
        "construct",
        "--method",
        "pothole",
        "--n",
        "6",
        "--out",
        path_str(&file),
    ]);
    let text = std::fs::read_to_string(&file).unwrap();

    let mut doc = ChainDocument::from_json(&text).unwrap();
    doc.steps.as_mut().unwrap()[3] = [0, 0];
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, doc.to_json()).unwrap();
    let o = chainlab(&["verify", path_str(&tampered)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("index 4"));

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(
        chainlab(&["verify", path_str(&truncated)]).status.code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["verify", "/nonexistent/chain.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        chainlab(&["construct", "--method", "pothole", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["construct", "--method", "window", "--n", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["bounds-table", "--range", "9..3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["bounds-table", "--n", "5", "--kinds", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["scholz-audit", "--n-max", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        chainlab(&["search", "--n", "10", "--budget-depth", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_table_rows() {
    let o = chainlab(&["bounds-table", "--n", "64", "--kinds", "main"]);
    assert_eq!(
        stdout(&o),
        "n,kind,bound,constructed_length,satisfied,iota_source\n64,main,83,69,true,search\n"
    );
    let o = chainlab(&["bounds-table", "--n", "4", "--kinds", "simple"]);
    assert!(stdout(&o).ends_with("4,simple,6,5,true,-\n"));
    let o = chainlab(&["bounds-table", "--n", "4", "--kinds", ""]);
    assert_eq!(
        stdout(&o),
        "n,kind,bound,constructed_length,satisfied,iota_source\n"
    );
}

#[test]
fn output_is_independent_of_worker_count() {
    let one = chainlab(&["bounds-table", "--range", "2..80", "--workers", "1"]);
    let three = chainlab(&["bounds-table", "--range", "2..80", "--workers", "3"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);

    let one = chainlab(&["scholz-audit", "--n-max", "8", "--workers", "1"]);
    let three = chainlab(&["scholz-audit", "--n-max", "8", "--workers", "3"]);
    assert_eq!(one.stdout, three.stdout);
    let text = stdout(&one);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[6].starts_with("8,3,search,10,search,10,true,true,"));
}

#[test]
fn scholz_audit_single_row() {
    let o = chainlab(&["scholz-audit", "--n-max", "2"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("2,1,search,2,search,2,true,true,"));
}

#[test]
fn search_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let o = chainlab(&["search", "--n", "127", "--out", path_str(&file)]);
    assert!(stdout(&o).contains("length 10 (optimal)"));
    let doc = ChainDocument::from_json(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert!(doc.search.unwrap().proven_optimal);
    assert_eq!(
        chainlab(&["verify", path_str(&file)]).status.code(),
        Some(0)
    );

    let table = dir.path().join("kv.txt");
    let o = chainlab(&["known-values", "--n-max", "40", "--out", path_str(&table)]);
    assert_eq!(o.status.code(), Some(0));
    let o = chainlab(&["known-values", "--check", "--table", path_str(&table)]);
    assert!(stdout(&o).starts_with("40 of 40"));

    std::fs::write(&table, "7 3\n").unwrap();
    let o = chainlab(&["known-values", "--check", "--table", path_str(&table)]);
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(["known-values", "--check"])
        .env("CHAINLAB_TABLE", &table)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
