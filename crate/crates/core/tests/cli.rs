use std::fs;

use momentwave::cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("momentwave").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = run(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn kinds(roots: &Value) -> Vec<(String, String, String, u64)> {
    roots
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["exact_kind"].as_str().unwrap().to_string(),
                r["exact_num"].as_str().unwrap().to_string(),
                r["exact_den"].as_str().unwrap().to_string(),
                r["multiplicity"].as_u64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn lowest_block_of_second_order_model() {
    let doc = json(&["speeds", "--N", "2", "--p", "0"]);
    assert_eq!(doc["schema"], "momentwave/1");
    assert_eq!(doc["N"], 2);
    assert_eq!(doc["p"], 0);
    let block = &doc["blocks"][0];
    assert_eq!(block["count"], 6);
    let s = |n: &str, d: &str| ("sqrt".to_string(), n.to_string(), d.to_string(), 1);
    assert_eq!(
        kinds(&block["roots"]),
        vec![s("3", "5"), s("1", "3"), ("rational".into(), "0".into(), "1".into(), 2), s("1", "3"), s("3", "5")]
    );
    assert_eq!(block["roots"][0]["exact"]["sign"], -1);
    assert_eq!(block["roots"][0]["exact"]["sqrt_of"]["num"], "3");
}

#[test]
fn whole_second_order_model_has_fourteen_speeds() {
    let doc = json(&["speeds", "--N", "2"]);
    assert_eq!(doc["model"]["count"], 14);
    let total: u64 = doc["model"]["roots"].as_array().unwrap().iter().map(|r| r["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(total, 14);
}

#[test]
fn top_block_is_zero() {
    let doc = json(&["speeds", "--N", "3", "--p", "3"]);
    assert_eq!(kinds(&doc["blocks"][0]["roots"]), vec![("rational".into(), "0".into(), "1".into(), 1)]);
}

#[test]
fn coefficient_tables() {
    let (code, out, _) = run(&["coeffs", "--p", "0", "--b", "0", "--n", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "h,k,mu_coeff,phi_coeff\n1,0,1,0\n0,1,0,1/3\n");
    let (_, out, _) = run(&["coeffs", "--p", "1", "--b", "0", "--n", "1", "--format", "csv"]);
    assert_eq!(out, "h,k,mu_coeff,phi_coeff\n0,0,-1/3,0\n");
    let (_, out, _) = run(&["coeffs", "--p", "0", "--b", "1", "--n", "0", "--format", "csv"]);
    assert_eq!(out, "h,k,mu_coeff,phi_coeff\n0,0,0,1/3\n");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["speeds"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["verify", "frobnicate"]).0, 2);
    assert_eq!(run(&["speeds", "--N", "2", "--p", "3"]).0, 2);
    assert_eq!(run(&["speeds", "--N", "7"]).0, 2);
    assert_eq!(run(&["speeds", "--N", "2", "--tol", "0"]).0, 2);
    assert_eq!(run(&["verify", "oracle4d", "--N", "5"]).0, 2);
    assert_eq!(run(&["verify", "independence", "--N", "2", "--trials", "0"]).0, 2);
    assert_eq!(run(&["coeffs", "--p", "2", "--b", "0", "--n", "1"]).0, 2);
    assert_eq!(run(&["speeds", "--N", "2", "--closure", "file"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn identical_runs_are_byte_identical() {
    for format in ["json", "csv"] {
        let args = ["speeds", "--N", "3", "--closure", "random", "--seed", "5", "--format", format];
        let (c1, a, _) = run(&args);
        let (c2, b, _) = run(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
    }
}

#[test]
fn closure_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("g.json");
    fs::write(&good, r#"{"N": 2, "G": [["2", 6, "24"], [6, "24", 120.0], [24, "120", "720/1"]]}"#).unwrap();
    let good_s = good.to_str().unwrap();
    let doc = json(&["speeds", "--N", "2", "--closure", "file", "--closure-file", good_s]);
    assert_eq!(doc["closure"]["kind"], "file");
    assert_eq!(doc["closure"]["matches_reduction"], true);
    assert_eq!(run(&["speeds", "--N", "3", "--closure", "file", "--closure-file", good_s]).0, 2);

    let singular = dir.path().join("s.json");
    fs::write(&singular, r#"{"N": 1, "G": ["1", "1", "1", "0"]}"#).unwrap();
    let (code, _, err) = run(&["speeds", "--N", "1", "--closure", "file", "--closure-file", singular.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");

    let broken = dir.path().join("b.json");
    fs::write(&broken, "{\"N\": 1, \"G\": [1, 2, 3]}").unwrap();
    assert_eq!(run(&["speeds", "--N", "1", "--closure", "file", "--closure-file", broken.to_str().unwrap()]).0, 2);
}

#[test]
fn kinetic_closure_matches_reduction() {
    let doc = json(&["speeds", "--N", "3", "--closure", "kinetic"]);
    assert_eq!(doc["closure"]["matches_reduction"], true);
}

#[test]
fn report_goes_to_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let (code, out, _) = run(&["speeds", "--N", "1", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("block,speed,mult,kind,exact\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("all,")).count(), 3);
}

#[test]
fn oracle_report_states_the_adjudication() {
    let (code, out, _) = run(&["verify", "oracle4d", "--N", "2", "--tol", "1e-9"]);
    assert_eq!(code, 0);
    assert!(out.contains("oracle confirms λ = ±1/√(2N+1)"), "{out}");
    let doc = json(&["verify", "oracle4d", "--N", "2"]);
    assert_eq!(doc["adjudication"], "InverseSqrt");
}

#[test]
fn verification_suites_pass() {
    assert_eq!(run(&["verify", "independence", "--N", "2", "--trials", "5", "--seed", "7"]).0, 0);
    assert_eq!(run(&["verify", "tensors", "--max-rank", "3"]).0, 0);
    assert_eq!(run(&["verify", "coeffs", "--N", "3"]).0, 0);
    assert_eq!(run(&["verify", "hankel", "--a-max", "4", "--d-max", "3", "--states", "2"]).0, 0);
    assert_eq!(run(&["verify", "sublum", "--samples", "50"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_momentwave");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let ok = status(&["speeds", "--N", "1", "--format", "json"]);
    assert_eq!(ok.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["model"]["count"], 5);
    assert_eq!(status(&["speeds", "--N", "x"]).status.code(), Some(2));
}
