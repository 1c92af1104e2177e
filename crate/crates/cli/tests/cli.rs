use std::path::Path;
use std::process::{Command, Output};

fn toproute(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toproute")).args(args).current_dir(dir).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// A generated map with its index, in a fresh directory.
fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(
        code(&toproute(&["gen-map", "--pois", "40", "--density", "0.1", "--seed", "3", "-o", "map.json"], p)),
        0
    );
    assert_eq!(code(&toproute(&["index", "map.json", "-o", "map.idx"], p)), 0);
    dir
}

#[test]
fn generated_map_validates() {
    let dir = workspace();
    let out = toproute(&["validate", "map.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("ok: 40 POIs"));
}

#[test]
fn gen_map_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen-map", "--pois", "25", "--seed", "9"];
    let a = stdout(&toproute(&args, dir.path()));
    let b = stdout(&toproute(&args, dir.path()));
    assert_eq!(a, b);
    assert_ne!(a, stdout(&toproute(&["gen-map", "--pois", "25", "--seed", "10"], dir.path())));
}

#[test]
fn invalid_map_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"directed": false, "beta": 5, "features": ["park"],
        "pois": [{"id": 1, "stay": 10, "ratings": {"park": 9}}, {"id": 2, "stay": 10, "ratings": {}}],
        "edges": [{"from": 1, "to": 3, "cost": 4}]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = toproute(&["validate", "bad.json"], dir.path());
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("rating out of range"), "{err}");
    assert!(err.contains("unknown POI"), "{err}");
    assert_eq!(code(&toproute(&["validate", "missing.json"], dir.path())), 2);
}

#[test]
fn query_answers_with_exact_and_heuristic_solvers() {
    let dir = workspace();
    let p = dir.path();
    let gen = ["gen-queries", "map.json", "--count", "3", "-b", "300", "--theta", "0", "--seed", "1", "-o", "q.json"];
    assert_eq!(code(&toproute(&gen, p)), 0);
    let mut gains = Vec::new();
    for algo in ["pacer2", "pacer1", "pacer-sc", "greedy"] {
        let out = toproute(&["query", "map.json", "map.idx", "q.json", "--algo", algo, "-k", "2"], p);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let results: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let results = results.as_array().unwrap();
        assert_eq!(results.len(), 3);
        for r in results {
            assert_eq!(r["algorithm"], algo);
            let routes = r["routes"].as_array().unwrap();
            assert!(!routes.is_empty() && routes.len() <= 2);
            assert!(routes.iter().all(|route| route["cost"].as_f64().unwrap() <= 300.0));
        }
        gains.push(results.iter().map(|r| r["routes"][0]["gain"].as_f64().unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(gains[0], gains[1]);
    for heuristic in &gains[2..] {
        assert!(heuristic.iter().zip(&gains[0]).all(|(h, o)| h <= &(o + 1e-9)));
    }
}

#[test]
fn exit_codes_for_infeasible_capped_and_bad_queries() {
    let dir = workspace();
    let p = dir.path();
    let map: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("map.json")).unwrap()).unwrap();
    let feature = map["features"][0].as_str().unwrap().to_string();
    let query = |b: f64| format!(r#"{{"x": 1, "y": 2, "b": {b}, "weights": {{"{feature}": 1.0}}}}"#);

    std::fs::write(p.join("tight.json"), query(1.0)).unwrap();
    assert_eq!(code(&toproute(&["query", "map.json", "map.idx", "tight.json"], p)), 3);

    std::fs::write(p.join("loose.json"), query(2000.0)).unwrap();
    let capped = ["query", "map.json", "map.idx", "loose.json", "--algo", "pacer1", "--time-cap-ms", "0"];
    assert_eq!(code(&toproute(&capped, p)), 4);

    assert_eq!(code(&toproute(&["query", "map.json", "map.idx", "loose.json", "--algo", "dijkstra"], p)), 2);
    std::fs::write(p.join("unknown.json"), r#"{"x": 1, "y": 2, "b": 100, "weights": {"opera": 1.0}}"#).unwrap();
    assert_eq!(code(&toproute(&["query", "map.json", "map.idx", "unknown.json"], p)), 2);
    assert_eq!(code(&toproute(&["query", "map.json", "map.json", "loose.json"], p)), 2);
}

#[test]
fn bench_writes_fixed_csv_columns_and_json_rows() {
    let dir = workspace();
    let p = dir.path();
    let gen = ["gen-queries", "map.json", "--count", "4", "-b", "250", "--theta", "0", "--seed", "5", "-o", "q.json"];
    assert_eq!(code(&toproute(&gen, p)), 0);
    let out = toproute(&["bench", "map.json", "q.json", "--algos", "pacer2,bf", "--json", "report.json"], p);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "algorithm,b,theta,alpha,k,mean_gain,mean_ms,mean_examined,completion_ratio");
    assert_eq!(lines.count(), 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 8);

    assert_eq!(code(&toproute(&["bench", "map.json", "q.json", "--algos", "pacer9"], p)), 2);
}

#[test]
fn ratings_from_checkin_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("c.csv"), "poi,feature,count\n1,park,10\n2,park,30\n1,museum,0\n2,museum,0\n").unwrap();
    let out = toproute(&["ratings", "c.csv"], p);
    assert_eq!(code(&out), 0);
    let ratings: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Mean park count is 20.
    assert_eq!(ratings["1"]["park"], 1.25);
    assert_eq!(ratings["2"]["park"], 3.75);
    assert!(String::from_utf8(out.stderr).unwrap().contains("\"museum\""));

    let map = r#"{"directed": false, "beta": 1, "features": ["old"],
        "pois": [{"id": 1, "stay": 10, "ratings": {"old": 1}}, {"id": 2, "stay": 10, "ratings": {}}],
        "edges": [{"from": 1, "to": 2, "cost": 4}]}"#;
    std::fs::write(p.join("m.json"), map).unwrap();
    let out = toproute(&["ratings", "c.csv", "--map", "m.json", "-o", "rated.json"], p);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&toproute(&["validate", "rated.json"], p)), 0);
    let rated: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("rated.json")).unwrap()).unwrap();
    assert_eq!(rated["features"], serde_json::json!(["park"]));
    assert_eq!(rated["beta"], 5.0);
}
