use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_mflab");

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("mflab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_file(&p);
    p
}

fn mflab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MF_LAB_THREADS").output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = mflab(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (code, v)
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn scenarios() -> Vec<Vec<String>> {
    let models = fixture("shift_models.json");
    let polys = fixture("shift_polys.txt");
    let input = fixture("dilation_input.json");
    [
        vec!["dilate", "--random", "dim=12,n=2,m=2,seed=3", "--trials", "3"],
        vec!["dilate", "--input", &input, "--r1", "10", "--q-poly", "X1", "--matrices"],
        vec!["pv", "--nj", "4,8,16"],
        vec!["crossed", "--theta", "0.3", "--nj", "8,16", "--dim", "4", "--seed", "5", "--h-poly", "X1*X2'", "--r1", "2"],
        vec!["finite-crossed", "--group", "S3", "--seed", "1", "--samples", "10"],
        vec!["freeness", "--n", "2", "--m", "3", "--trials", "100", "--seed", "7"],
        vec!["coset", "--example", "z-2z", "--g", "t^5", "--random", "5", "--seed", "2"],
        vec!["norm", "--oracle", "torus", "--poly", "X1 + X2'"],
        vec!["ball", "--n", "2", "--poly", "X1+X1'+X2+X2'", "--radius", "4", "--from", "2"],
        vec!["report", "--models", &models, "--polys", &polys, "--oracle", "circle"],
        vec!["report", "--models", &models, "--polys", &polys, "--oracle", "ball:1:4"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect()
}

#[test]
fn every_scenario_validates_against_the_bundled_schema() {
    let schema = validator();
    for args in scenarios() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, v) = report(&args);
        assert_ne!(code, 1, "{args:?}");
        let errors: Vec<String> = schema.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:#?}");
        assert_eq!(v["command"], args[0]);
        assert_eq!(code == 2, v["passed"] == false, "{args:?}");
    }
}

#[test]
fn schema_rejects_a_tampered_report() {
    let schema = validator();
    let (_, mut v) = report(&["pv", "--nj", "4"]);
    assert!(schema.is_valid(&v));
    v["payload"]["rows"][0].as_object_mut().unwrap().remove("commutator_norm");
    assert!(!schema.is_valid(&v));
    let (_, mut v) = report(&["pv", "--nj", "4"]);
    v["schema"] = "mflab-report/0".into();
    assert!(!schema.is_valid(&v));
}

#[test]
fn pv_decay_table() {
    let (code, v) = report(&["pv", "--nj", "4,8,16"]);
    assert_eq!(code, 0);
    let col: Vec<f64> = v["payload"]["rows"].as_array().unwrap().iter().map(|r| r["commutator_norm"].as_f64().unwrap()).collect();
    assert_eq!(col.len(), 3);
    assert!(col.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(v["payload"]["strictly_decreasing"], true);
}

#[test]
fn freeness_example_has_no_failures() {
    let (code, v) = report(&["freeness", "--n", "2", "--m", "3", "--trials", "100", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["payload"]["nonidentity"], 100);
}

#[test]
fn coset_example() {
    let (code, v) = report(&["coset", "--example", "z-2z", "--g", "t^5"]);
    assert_eq!(code, 0);
    let row = &v["payload"]["rows"][0];
    assert_eq!(row["sigma"], serde_json::json!([2, 1]));
    assert_eq!(row["hs"], serde_json::json!(["4", "6"]));
}

#[test]
fn invalid_flag_is_a_usage_error_and_writes_nothing() {
    let out = scratch("invalid.json");
    let o = mflab(&["pv", "--nj", "4", "--no-such-flag", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(o.stdout.is_empty());
    assert!(!out.exists());

    assert_eq!(mflab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mflab(&[]).status.code(), Some(1));
    // Missing seed for a randomized scenario.
    assert_eq!(mflab(&["crossed", "--theta", "0.3", "--nj", "4"]).status.code(), Some(1));
    assert_eq!(mflab(&["--help"]).status.code(), Some(0));
    assert_eq!(mflab(&["--version"]).status.code(), Some(0));
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let out = scratch("malformed.json");
    let polys = fixture("shift_polys.txt");
    let o = mflab(&["report", "--models", &polys, "--polys", &polys, "--oracle", "circle", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert_eq!(mflab(&["norm", "--poly", "X1 +"]).status.code(), Some(1));
    assert_eq!(mflab(&["dilate", "--random", "dim=8,n=1,m=1"]).status.code(), Some(1));
    assert_eq!(mflab(&["finite-crossed", "--group", "Q8", "--seed", "1"]).status.code(), Some(1));
    let o = Command::new(BIN).args(["pv", "--nj", "4"]).env("MF_LAB_THREADS", "lots").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_certificates_exit_two() {
    // ‖[U, V]‖ ≈ 0.017 cannot meet 1/1000.
    let (code, v) = report(&["dilate", "--random", "dim=16,n=2,m=2,seed=7", "--r1", "1000"]);
    assert_eq!(code, 2);
    assert_eq!(v["passed"], false);
    assert_eq!(v["certificates"][0]["passed"], true);
    assert_eq!(v["certificates"][1]["passed"], false);

    let models = fixture("shift_models.json");
    let polys = fixture("shift_polys.txt");
    let base = ["report", "--models", &models, "--polys", &polys, "--oracle", "circle", "--max-deviation"];
    let (code, _) = report(&[&base[..], &["0.01"]].concat());
    assert_eq!(code, 2);
    let (code, _) = report(&[&base[..], &["0.5"]].concat());
    assert_eq!(code, 0);
}

#[test]
fn output_file_matches_stdout_and_repeats_byte_for_byte() {
    let a = scratch("a.json");
    let b = scratch("b.json");
    let args = ["crossed", "--theta", "0.3", "--nj", "8,16", "--dim", "4", "--seed", "11"];
    for p in [&a, &b] {
        let o = mflab(&[&args[..], &["-o", p.to_str().unwrap()]].concat());
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, mflab(&args).stdout);
    let threaded = Command::new(BIN).args(args).env("MF_LAB_THREADS", "1").output().unwrap();
    assert_eq!(bytes, threaded.stdout);
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = report(&["pv", "--nj", "4"]);
    assert!(v.get("wall_clock_seconds").is_none());
    let (_, v) = report(&["pv", "--nj", "4", "--timing"]);
    assert!(v["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn floats_use_the_canonical_format() {
    let out = mflab(&["norm", "--poly", "X1 + X1'"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"value\": 2.0000000000000000e0"), "{text}");
    assert!(text.contains("\"grid\": 65536"));
}
