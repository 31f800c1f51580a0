use std::path::PathBuf;
use std::process::{Command, Output};

use toricone::catalog;
use toricone::report::AnalysisReport;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fan_path(name: &str) -> String {
    root().join("fans").join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricone"))
        .args(args)
        .env_remove("TORICONE_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SHIPPED: [(&str, &str); 9] = [
    ("delta_P", "delta_P"),
    ("delta_Q", "delta_Q"),
    ("delta_A", "delta_A"),
    ("delta_B", "delta_B"),
    ("p1xp1", "p1xp1"),
    ("weighted_p112", "weighted_p112"),
    ("pn_2", "pn:2"),
    ("hirzebruch_1", "hirzebruch:1"),
    ("tower_2", "tower:2"),
];

#[test]
fn analyze_matches_golden_files_and_catalog_claims() {
    for (file, entry) in SHIPPED {
        let o = run(&["analyze", &fan_path(file), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
        let golden = std::fs::read_to_string(root().join(format!("crates/cli/tests/golden/{file}.analyze.json"))).unwrap();
        assert_eq!(stdout(&o), golden, "{file}");
        let report = AnalysisReport::from_json(&golden).unwrap();
        assert_eq!(report.to_json() + "\n", golden, "{file} not canonical");
        let miss = catalog::get(entry).unwrap().expected.mismatches(&report);
        assert!(miss.is_empty(), "{file}: {miss:?}");
    }
}

#[test]
fn shipped_files_match_the_catalog() {
    for (file, entry) in SHIPPED {
        let o = run(&["catalog", "--name", entry, "--format", "json"]);
        let shipped = std::fs::read_to_string(fan_path(file)).unwrap();
        assert_eq!(stdout(&o), shipped, "{file}");
    }
}

#[test]
fn delta_b_report_and_intersections() {
    let o = run(&["analyze", &fan_path("delta_B"), "--format", "json"]);
    let r = AnalysisReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.pic_rank, 1);
    assert!(r.ne_equals_n1);
    let w = r.walls.iter().find(|w| w.rays == ["v4", "v7"]).unwrap();
    assert_eq!(w.class, vec![-3]);

    let o = run(&["intersect", &fan_path("delta_B"), "--divisor", r#"{"7":1}"#]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    assert!(rows.contains(&vec!["<v4,v5>", "1"]), "{text}");
    assert!(rows.contains(&vec!["<v4,v7>", "-3"]), "{text}");
}

#[test]
fn intersect_json_renders_rationals() {
    let o = run(&["intersect", "weighted_p112", "--divisor", r#"{"v1":1}"#, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cartier"], false);
    let values: Vec<&serde_json::Value> = v["walls"].as_array().unwrap().iter().map(|w| &w["value"]).collect();
    assert_eq!(values, [&serde_json::json!("1/2"), &serde_json::json!(1), &serde_json::json!("1/2")]);

    let o = run(&["intersect", "delta_P", "--divisor", r#"{"1":1}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not Q-Cartier"));
}

#[test]
fn projective_is_a_predicate() {
    let o = run(&["projective", &fan_path("delta_P")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Farkas certificate"));
    let o = run(&["projective", &fan_path("delta_P"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["projective"], false);
    assert!(v["certificate"]["strict_total"].as_i64().unwrap() > 0);

    let o = run(&["projective", &fan_path("delta_Q")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ample witness"));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":3,"rays":[[2,0,2],[0,1,0]],"max_cones":[[0,1]]}"#).unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("use (1,0,1)"), "{}", stderr(&o));

    std::fs::write(&bad, r#"{"dim":2,"rays":[[1,0],[0,1],[1,0]],"max_cones":[[0,1]]}"#).unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicate ray (1,0)"), "{}", stderr(&o));

    std::fs::write(&bad, "{\"dim\": 2,\n  \"rays\": [[1,0]\n").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn incomplete_fans_validate_but_fail_the_predicate() {
    let dir = tempfile::tempdir().unwrap();
    let octant = dir.path().join("octant.json");
    std::fs::write(&octant, r#"{"dim":2,"rays":[[1,0],[0,1]],"max_cones":[[0,1]]}"#).unwrap();
    let o = run(&["validate", octant.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["analyze", octant.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not complete"));
}

#[test]
fn io_and_usage_exit_codes() {
    assert_eq!(run(&["analyze", "/nonexistent/fan.json"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["analyze", "delta_P", "--colour"]).status.code(), Some(64));
    assert_eq!(run(&["search", "--targets", "everything"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing/dir/out.json");
    assert_eq!(run(&["analyze", "delta_P", "--out", target.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn format_env_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_toricone"))
        .args(["analyze", "delta_Q", "--out", out.to_str().unwrap()])
        .env("TORICONE_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = AnalysisReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.projective.projective);
}

#[test]
fn fan_producing_commands_compose() {
    let dir = tempfile::tempdir().unwrap();
    let blown = dir.path().join("blown.json");
    let o = run(&["subdivide", &fan_path("delta_A"), "--ray", "0,0,-1", "--format", "json", "--out", blown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = toricone::io::read_fan_file(&blown).unwrap();
    assert!(b.same_as(&catalog::delta_b()));

    let o = run(&["tower", "--k", "1", "--format", "json"]);
    assert!(toricone::io::parse_fan_str(&stdout(&o)).unwrap().same_as(&catalog::delta_b()));

    let prod = dir.path().join("prod.json");
    run(&["product", "delta_P", "pn:1", "--format", "json", "--out", prod.to_str().unwrap()]);
    let o = run(&["projective", prod.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["subdivide", "delta_A", "--ray", "0,0,-2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn picard_lists_cartier_rays() {
    let o = run(&["picard", "delta_B", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pic_rank"], 1);
    assert_eq!(v["rays"][6]["cartier"], true);
    assert_eq!(v["rays"][6]["class"], serde_json::json!([1]));
    assert_eq!(v["rays"][0]["cartier"], false);
}

#[test]
fn search_is_deterministic_json_lines() {
    let args = ["search", "--seed", "7", "--iters", "40", "--targets", "nonprojective", "--template", "delta_Q", "--format", "json"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    assert!(!a.is_empty());
    for line in a.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["report"]["projective"]["projective"], false);
        assert!(v["signature"].as_str().unwrap().len() == 64);
    }
}
