use serde_json::Value;

use horace::cli::{run, EXIT_INVALID, EXIT_OK, EXIT_SPECIAL, EXIT_USAGE};

fn horace(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("horace").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn chi_examples() {
    let (code, out, _) = horace(&["chi", "6;2^9"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!((v["chi"].as_i64(), v["genus"].as_i64(), v["expected_dim"].as_i64()), (Some(1), Some(1), Some(0)));
    let v = json(&horace(&["chi", "3;1^9"]).1);
    assert_eq!((v["chi"].as_i64(), v["genus"].as_i64()), (Some(1), Some(1)));
    let v = json(&horace(&["chi", "2;2^3"]).1);
    assert_eq!((v["chi"].as_i64(), v["expected_dim"].as_i64()), (Some(-3), Some(-1)));
    assert_eq!(horace(&["chi", "2;2^x"]).0, EXIT_USAGE);
    assert_eq!(horace(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn dim_examples_and_reproducibility() {
    let (code, out, err) = horace(&["dim", "6", "2^9", "--prime", "1000003", "--trials", "3", "--seed", "42"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("seed: 42"));
    assert_eq!(json(&out)["h0"], 1);
    assert_eq!(horace(&["dim", "6", "2^9", "--seed", "42"]).1, out);

    let (code, out, _) = horace(&["dim", "2", "2^2", "--seed", "1"]);
    assert_eq!(code, EXIT_SPECIAL);
    assert_eq!(json(&out)["h0"], 1);

    let (code, out, _) = horace(&["dim", "2", "C:T1", "--curve-degree", "2", "--seed", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["h0"], 4);

    let (_, _, err) = horace(&["dim", "3", "1^3"]);
    assert!(err.starts_with("seed: "));
    assert_eq!(horace(&["dim", "6", "2^9", "--prime", "5"]).0, EXIT_USAGE);
}

#[test]
fn double_cubic_member_is_not_ordinary() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("out.curve");
    let c = curve.to_str().unwrap();
    assert_eq!(horace(&["dim", "6", "2^9", "--seed", "7", "--curve-out", c]).0, EXIT_OK);
    let (code, out, _) = horace(&["analyze", "--curve", c]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["squarefree"], false);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    assert!(points.iter().all(|p| p["ordinary"] == false && p["mult_observed"] == 2));
}

#[test]
fn analyze_explicit_points() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("nodal.curve");
    std::fs::write(&curve, "x*y*z - x^3 - y^3\n").unwrap();
    let (code, out, _) = horace(&["analyze", "--curve", curve.to_str().unwrap(), "--points", "0:0:1@2"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["points"][0]["ordinary"], true);
    assert_eq!(v["factors"], 1);
    assert_eq!(v["extra_singularities"], Value::Array(vec![]));
}

#[test]
fn bounds_output() {
    let (code, out, err) = horace(&["bounds", "--m", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["explicit"], 46208);
    assert!(err.contains("--mults"));
    let v = json(&horace(&["bounds", "--m", "2", "--mults", "2,3,2"]).1);
    assert_eq!(v["conjectural"], 7);
    assert!(v.get("exception").is_none());
    let v = json(&horace(&["bounds", "--m", "5"]).1);
    assert!(v["explicit"].is_string());
}

#[test]
fn plan_verify_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    let (code, _, err) = horace(&["plan", "--class", "6;2^9", "--oracle-backed", "--seed", "3", "--out", c]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, out, _) = horace(&["verify", c]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["valid"], true);

    let mut v: Value = json(&std::fs::read_to_string(&cert).unwrap());
    v["config"]["trials"] = 4.into();
    std::fs::write(&cert, v.to_string()).unwrap();
    assert_eq!(horace(&["verify", c]).0, EXIT_INVALID);
    std::fs::write(&cert, "not json").unwrap();
    assert_eq!(horace(&["verify", c]).0, EXIT_INVALID);
}

#[test]
fn plan_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("thresholds.json");
    std::fs::write(&config, r#"{"a_cfg":{"1":4},"d0":{"4,1":4}}"#).unwrap();
    let (code, out, _) = horace(&["plan", "--class", "12;1^90", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["claim"]["route"], "horace");
    assert_eq!(v["config"]["mode"], "axiom");
    let (code, _, err) = horace(&["plan", "--class", "12;1^90", "--config", "/nonexistent/thresholds.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("nonexistent"));
}

#[test]
fn candidate_verdicts() {
    let v = json(&horace(&["candidate", "2", "2^2", "--m", "2", "--a", "4"]).1);
    assert_eq!(v["verdict"], "candidate");
    let v = json(&horace(&["candidate", "6", "C:T2", "--m", "3", "--a", "4"]).1);
    assert_eq!(v["verdict"], "not-configuration");
    assert_eq!(horace(&["candidate", "1", "1", "--m", "3", "--a", "4"]).0, EXIT_USAGE);
}
