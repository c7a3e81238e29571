use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/deckmap-1.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Runs the binary with `--json -`, checks the document against the schema and
/// that the exit status is zero exactly when no error object is present.
fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_deckmap")).args(args).args(["--json", "-"]).output().unwrap();
    let code = out.status.code().unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations for {args:?}: {errors:?}\n{doc:#}");
    assert_eq!(doc["schema"], "deckmap/1");
    assert_eq!(code == 0, doc.get("error").is_none(), "{args:?}");
    (code, doc)
}

fn entries(e: &Value) -> Vec<String> {
    e["entries"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn deck_of_coalescing_square() {
    let (code, doc) = run(&["deck", "(z^2-2)/(z^2+2)", "--k", "2"]);
    assert_eq!(code, 0);
    let g = &doc["result"]["deck"]["group"];
    assert_eq!(g["iso_type"], "V4");
    assert_eq!(g["all_certified"], true);
    let mut maps: Vec<String> = g["elements"].as_array().unwrap().iter().map(|e| e["map"].as_str().unwrap().to_string()).collect();
    maps.sort();
    assert_eq!(maps, vec!["-2/z", "-z", "2/z", "z"]);
    // entries are exact strings, normalized so the first nonzero one is 1
    let all: Vec<Vec<String>> = g["elements"].as_array().unwrap().iter().map(entries).collect();
    assert!(all.contains(&vec!["0".into(), "1".into(), "1/2".into(), "0".into()]));
}

#[test]
fn parameters_substitute_exactly() {
    let (_, doc) = run(&["deck", "(z^2-a)/(z^2+a)", "--param", "a=2", "--k", "2"]);
    assert_eq!(doc["input"]["params"]["a"], "2");
    assert_eq!(doc["result"]["map"]["num"], serde_json::json!(["-2", "0", "1"]));
}

#[test]
fn shared_odd_degree_pair() {
    let (code, doc) = run(&["shared", "(z^3-1)/(z^3+1)", "-(z^3-1)/(z^3+1)", "--max-k", "4"]);
    assert_eq!(code, 0);
    let s = &doc["result"]["shared"];
    assert_eq!(s["minimal_k"], 4);
    assert_eq!(s["second_iterate_equal"], false);
    assert_eq!(s["mobius_factor"]["map"], "-z");
}

#[test]
fn analyze_power_map() {
    let (_, doc) = run(&["analyze", "z^2"]);
    let c = &doc["result"]["critical"];
    assert_eq!(c["power_map"], true);
    let vals: Vec<&str> = c["values"].as_array().unwrap().iter().map(|p| p["value"].as_str().unwrap()).collect();
    assert_eq!(vals, vec!["0", "inf"]);
    assert_eq!(doc["result"]["postcritical"]["finite"], true);
}

#[test]
fn detect_from_second_iterate() {
    // f_2 ∘ f_2 entered directly
    let (code, doc) = run(&["detect", "((z^2-2)^2 - 2*(z^2+2)^2)/((z^2-2)^2 + 2*(z^2+2)^2)", "--k", "2", "--deg", "2"]);
    assert_eq!(code, 0, "{doc:#}");
    assert_eq!(doc["result"]["detection"]["case"], "V4-no-fixed-point");
    let (code, doc) = run(&["detect", "z^4", "--k", "2", "--deg", "3"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "invalid-argument");
}

#[test]
fn parse_errors_are_reported_with_position() {
    let (code, doc) = run(&["analyze", "(z^2 - b)/(z+1)"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "unbound-parameter");
    assert_eq!(doc["error"]["position"], 7);
    let (_, doc) = run(&["analyze", "z^2.5"]);
    assert_eq!(doc["error"]["kind"], "bad-exponent");
    let (_, doc) = run(&["analyze", "1/(z-z)"]);
    assert_eq!(doc["error"]["kind"], "zero-denominator");
}

#[test]
fn render_writes_ppm_and_sidecar() {
    let dir = std::env::temp_dir().join(format!("deckmap-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ppm = dir.join("sq.ppm");
    let png = dir.join("sq.png");
    let (code, doc) = run(&[
        "render", "julia", "z^2", "--width", "40", "--height", "30",
        "--out", ppm.to_str().unwrap(), "--png", png.to_str().unwrap(), "--threads", "2",
    ]);
    assert_eq!(code, 0);
    let bytes = std::fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n40 30\n255\n"));
    assert_eq!(std::fs::read(&png).unwrap()[1..4], *b"PNG");
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("sq.json")).unwrap()).unwrap();
    assert_eq!(meta, doc["result"]["metadata"]);
    assert_eq!(meta["atlas"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sampling_is_seeded() {
    let (_, a) = run(&["sample", "cubic", "--count", "2", "--seed", "11"]);
    let (_, b) = run(&["sample", "cubic", "--count", "2", "--seed", "11"]);
    assert_eq!(a, b);
    assert_eq!(a["result"]["maps"][0]["degree"], 3);
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = Command::new(env!("CARGO_BIN_EXE_deckmap")).args(["deck", "z^2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
