use std::process::{Command, Output};

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse"))
        .args(args)
        .env_remove("HASSE_WORK_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = hasse(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&o)))
}

#[test]
fn hilbert_table_and_single_place() {
    let o = hasse(&["hilbert", "-1", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("inf    1/2"), "{s}");
    assert!(s.contains("2      1/2"), "{s}");
    assert!(s.contains("sum    0"), "{s}");

    let o = hasse(&["hilbert", "17", "3", "--place", "17"]);
    assert_eq!(stdout(&o).trim(), "1/2");

    let v = json(&["hilbert", "1", "5"]);
    assert!(v["invariants"].as_array().unwrap().iter().all(|r| r["invariant"] == "0"));
    assert_eq!(v["sum"], "0");
}

#[test]
fn hilbert_rejects_bad_input() {
    assert_eq!(hasse(&["hilbert", "0", "3"]).status.code(), Some(2));
    assert_eq!(hasse(&["hilbert", "x", "3"]).status.code(), Some(2));
    assert_eq!(hasse(&["hilbert", "2", "3", "--place", "4"]).status.code(), Some(2));
}

#[test]
fn solve_exit_codes() {
    let o = hasse(&["solve", "2", "1", "1", "1", "--everywhere"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("insoluble at {inf, 2}"));

    assert_eq!(hasse(&["solve", "3", "1", "1", "1", "1", "--everywhere"]).status.code(), Some(0));
    assert_eq!(hasse(&["solve", "2", "1", "1", "-1", "--place", "inf"]).status.code(), Some(0));
    // 5x^2 + y^2 + z^2: -1 is a square mod 5, so y^2 + z^2 = 0 has a nonsingular zero.
    assert_eq!(hasse(&["solve", "2", "5", "1", "1", "--place", "5"]).status.code(), Some(0));
    assert_eq!(hasse(&["solve", "2", "3", "1", "1", "--place", "3"]).status.code(), Some(1));
    // Missing scope, and degree >= variables for the everywhere test.
    assert_eq!(hasse(&["solve", "2", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(hasse(&["solve", "3", "1", "1", "1", "--everywhere"]).status.code(), Some(2));
}

#[test]
fn lr_verify_report() {
    let o = hasse(&["lr-verify", "--prime-bound", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verdict: obstructed (certified p ≤ 100)"), "{s}");
    let line17 = s.lines().find(|l| l.starts_with("17 ")).unwrap();
    assert!(line17.ends_with("{1/2}"), "{line17}");

    let v = json(&["lr-verify", "--prime-bound", "17"]);
    assert_eq!(v["verdict"], "obstructed");
    let places = v["places"].as_array().unwrap();
    assert!(places.iter().all(|p| p.get("place").is_some() && p.get("attained").is_some() && p.get("method").is_some()));

    let o = hasse(&["lr-verify", "--prime-bound", "16"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn residues() {
    let v = json(&["residue", "-1", "t"]);
    let divisors: Vec<&str> = v["locus"].as_array().unwrap().iter().map(|d| d["divisor"].as_str().unwrap()).collect();
    assert_eq!(divisors, ["t", "inf"]);
    let v = json(&["residue", "-1", "t^2"]);
    assert!(v["locus"].as_array().unwrap().is_empty());
    let v = json(&["residue", "7", "t", "--reduction"]);
    assert_eq!(v["trivial"], false);
    let v = json(&["residue", "7", "t^2", "--reduction"]);
    assert_eq!(v["trivial"], true);
    assert_eq!(hasse(&["residue", "2", "t", "--reduction"]).status.code(), Some(2));
}

#[test]
fn delta_and_density() {
    assert!(stdout(&hasse(&["delta", "conic"])).contains("Δ(π) = 3/2"));
    assert_eq!(json(&["delta", "cubic4"])["total"], "0");
    assert_eq!(stdout(&hasse(&["density", "conic", "--place", "real"])).trim(), "3/4");
    assert_eq!(stdout(&hasse(&["density", "conic", "--place", "2"])).trim(), "7/12");
    let o = hasse(&["density", "conic", "--place", "3", "--level", "0"]);
    assert_eq!(o.status.code(), Some(2));
    // Δ ≠ 0: the product is rejected.
    assert_eq!(hasse(&["density", "conic", "--product"]).status.code(), Some(2));
    let v = json(&["density", "cubic4", "--product", "--prime-bound", "30"]);
    let x = v["value"].as_f64().unwrap();
    assert!(x > 0.85 && x < 0.95, "{x}");
}

#[test]
fn work_budget_from_env_and_config() {
    let o = Command::new(env!("CARGO_BIN_EXE_hasse"))
        .args(["density", "cubic4", "--place", "3"])
        .env("HASSE_WORK_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "work_budget = 10\nseed = 3\n").unwrap();
    let o = hasse(&["--config", cfg.to_str().unwrap(), "density", "cubic4", "--place", "3"]);
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let o = hasse(&["--config", cfg.to_str().unwrap(), "delta", "conic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sampling_is_byte_identical() {
    let args = ["density", "conic", "--place", "5", "--method", "sample", "--count", "2000", "--seed", "11"];
    let a = hasse(&args);
    let b = hasse(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = hasse(&["density", "conic", "--place", "5", "--method", "sample", "--count", "2000", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn census_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let jl = dir.path().join("c.jsonl");
    let csv = dir.path().join("c.csv");
    let o = hasse(&[
        "census",
        "conic",
        "--B",
        "10,20,30,40",
        "--jsonl",
        jl.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("fitted exponent") && s.contains("Δ(π) = 3/2"), "{s}");

    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&jl)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    for key in ["family", "B", "N_tot", "N_loc", "degenerate_count", "per_place_failures"] {
        assert!(lines[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(lines[0]["B"], 10);
    assert_eq!(lines[0]["family"], "conic");

    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows[0], "B,ratio");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("10,0.3164"));
}

#[test]
fn census_partitions_do_not_change_counts() {
    let one = hasse(&["census", "conic", "--B", "10", "--partitions", "1", "--json"]);
    let eight = hasse(&["census", "conic", "--B", "10", "--partitions", "8", "--json"]);
    let a: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&eight.stdout).unwrap();
    assert_eq!(a["reports"], b["reports"]);
    assert_eq!(hasse(&["census", "conic", "--B", "10", "--partitions", "0"]).status.code(), Some(2));
    assert_eq!(hasse(&["census", "diag:3:3", "--B", "10"]).status.code(), Some(2));
}

#[test]
fn schanuel_prediction_and_count() {
    let s = stdout(&hasse(&["schanuel", "1"]));
    assert!(s.contains("prediction 1.215854"), "{s}");
    let v = json(&["schanuel", "1", "--B", "10000"]);
    assert!(v["relative_error"].as_f64().unwrap() < 0.01);
    assert_eq!(hasse(&["schanuel", "0"]).status.code(), Some(2));
}
