use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_friending"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Fixture {
    _dir: TempDir,
    line: String,
    augmented: String,
    diamond: String,
    dir: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let line = write(dir.path(), "line.txt", "# s a b t\n0 1\n1 2\n2 3\n");
    let augmented = write(dir.path(), "aug.txt", "0 1\n1 2\n2 3\n1 3\n");
    let diamond = write(dir.path(), "diamond.txt", "10 11\n10 12\n11 13\n12 13\n");
    Fixture {
        dir: dir.path().to_path_buf(),
        line: line.display().to_string(),
        augmented: augmented.display().to_string(),
        diamond: diamond.display().to_string(),
        _dir: dir,
    }
}

#[test]
fn exit_codes() {
    let f = fixture();
    let missing = f.dir.join("missing.txt").display().to_string();
    assert_eq!(run(&["vmax", "--graph", &missing, "--s", "0", "--t", "3"]).status.code(), Some(2));
    let bad = write(&f.dir, "bad.txt", "0 1\n1 1\n").display().to_string();
    let o = run(&["vmax", "--graph", &bad, "--s", "0", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let solve = |extra: &[&str]| {
        let mut args = vec!["solve", "--graph", &f.line];
        args.extend_from_slice(extra);
        run(&args).status.code()
    };
    assert_eq!(solve(&["--s", "0", "--t", "3", "--alpha", "1.5", "--epsilon", "0.1"]), Some(3));
    assert_eq!(solve(&["--s", "0", "--t", "3", "--alpha", "0.5", "--epsilon", "0.6"]), Some(3));
    assert_eq!(solve(&["--s", "0", "--t", "1", "--alpha", "0.5", "--epsilon", "0.1"]), Some(1));
    assert_eq!(solve(&["--s", "0", "--t", "99", "--alpha", "0.5", "--epsilon", "0.1"]), Some(1));
    assert_eq!(solve(&["--s", "0", "--alpha", "0.5", "--epsilon", "0.1"]), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unreachable_target_is_infeasible() {
    let f = fixture();
    let g = write(&f.dir, "cut.txt", "0 1\n1 2\n3 4\n").display().to_string();
    let o = run(&["solve", "--graph", &g, "--s", "0", "--t", "3", "--alpha", "0.5", "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_instance_commands() {
    let f = fixture();
    let o = run(&["exact-f", "--graph", &f.augmented, "--s", "0", "--t", "3", "--invite", "2,3", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "s,t,invitation,f,p_max\n0,3,2;3,0.75,0.75\n");

    // labels need not be dense
    let o = run(&["vmax", "--graph", &f.diamond, "--s", "10", "--t", "13", "--format", "csv"]);
    assert_eq!(stdout(&o), "s,t,mode,size,nodes\n10,13,exact,1,13\n");

    let o = run(&["baseline", "--graph", &f.augmented, "--s", "0", "--t", "3", "--strategy", "sp", "--k", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"], "3");
    assert_eq!(v["strategy"], "sp");

    let o = run(&["baseline", "--graph", &f.line, "--s", "0", "--t", "3", "--strategy", "sp", "--target-f", "0.9"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reached"], false);

    let o = run(&["estimate-pmax", "--graph", &f.diamond, "--s", "10", "--t", "13", "--epsilon0", "0.5", "--big-n", "100"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p_star"], 1.0);
    assert_eq!(v["upsilon"], 93);

    let o = run(&["solve", "--graph", &f.line, "--s", "0", "--t", "3", "--alpha", "0.5", "--epsilon", "0.25", "--seed", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["invitation"], "2;3");
    assert!(v["covered"].as_u64().unwrap() >= v["p"].as_u64().unwrap());
}

#[test]
fn experiment_writes_rows_and_summary() {
    let f = fixture();
    let csv_path = f.dir.join("rows.csv");
    let json_path = f.dir.join("summary.json");
    let o = bin()
        .args(["experiment", "--graph", &f.augmented, "--experiment", "fixed-budget"])
        .args(["--pair", "0:3", "--pair", "3:0", "--pair", "2:0"])
        .args(["--alpha", "0.5", "--epsilon", "0.1", "--realizations", "2000", "--samples", "2000"])
        .arg("--out")
        .arg(&csv_path)
        .arg("--summary")
        .arg(&json_path)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    for col in ["pair_index", "s", "t", "status", "size_raf", "f_raf", "hw_raf", "size_hd", "f_hd", "size_sp", "f_sp"] {
        assert!(headers.iter().any(|h| h == col), "missing {col}");
    }
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    for key in ["config", "seeds", "per_pair", "aggregates", "versions"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["per_pair"].as_array().unwrap().len(), 3);
    assert_eq!(summary["seeds"]["per_pair"].as_array().unwrap().len(), 3);
}

#[test]
fn experiment_output_ignores_thread_count() {
    let f = fixture();
    let g = f.dir.join("ba.txt");
    assert!(bin().args(["gen-graph", "--nodes", "300", "--m", "3", "--seed", "5"]).arg("--out").arg(&g).status().unwrap().success());
    let run_with = |threads: &str| {
        let o = bin()
            .args(["--threads", threads, "experiment", "--graph"])
            .arg(&g)
            .args(["--experiment", "match-sp", "--pairs", "4", "--realizations", "3000", "--samples", "3000"])
            .args(["--alpha", "0.3", "--epsilon", "0.03", "--seed", "11"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let a = run_with("1");
    assert_eq!(a.lines().count(), 5);
    assert_eq!(a, run_with("3"));
}
