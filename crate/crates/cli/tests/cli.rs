use std::process::{Command, Output};

use serde_json::Value;

fn gafzero(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gafzero")).args(args).output().expect("spawn gafzero")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn tonelli_example_passes() {
    let out = gafzero(&[
        "verify", "tonelli", "--coeffs", "basis", "--measure", "disk", "--p", "2", "--s", "1", "--samples", "10000",
        "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["provenance"]["seed"], "7");
    assert_eq!(doc["provenance"]["samples"], "10000");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn jensen_example_passes() {
    let out = gafzero(&["check", "jensen", "--degree", "30", "--radius", "0.9", "--trials", "100", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["reports"][0];
    assert!(r["estimate"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["params"]["max_degree"], "30");
}

#[test]
fn quant_example_passes() {
    let out = gafzero(&[
        "verify", "quant", "--coeffs", "unit", "--measure", "disk", "--p", "0.5", "--s", "0.9", "--samples", "10000",
        "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(gafzero(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gafzero(&["verify", "tonelli", "--coeffs", "nope"]).status.code(), Some(2));
    assert_eq!(gafzero(&["verify", "slepian", "--rho", "2", "--samples", "100"]).status.code(), Some(2));
    // the literal Fock family diverges at q = 4
    assert_eq!(gafzero(&["verify", "fock-scan", "--p", "2", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(gafzero(&["verify", "fock-scan", "--p", "2", "--alpha", "1", "--b", "2"]).status.code(), Some(0));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# tonelli point\ncoeffs = geom:rho=0.8\nsamples=300\np=1\nformat=csv\n").unwrap();
    let out_path = dir.path().join("out.json");
    let out = gafzero(&[
        "verify",
        "tonelli",
        "--config",
        cfg.to_str().unwrap(),
        "--p",
        "2",
        "--s",
        "0.5",
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let prov = &doc["provenance"];
    assert_eq!(prov["coeffs"], "geom:rho=0.8");
    assert_eq!(prov["p"], "2");
    assert_eq!(prov["samples"], "300");
    assert_eq!(doc["reports"][0]["samples"], 300);
}

#[test]
fn csv_output() {
    let out = gafzero(&["check", "stokes", "--b", "1", "--t", "10,100", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("name,criterion,pass,estimate"));
    assert_eq!(lines.count(), 3);

    let out = gafzero(&["zeros", "--coeffs", "unit", "--s", "0.8", "--seed", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("re,im,multiplicity"));
}

#[test]
fn sample_zeros_norm() {
    let sample = json(&gafzero(&["sample", "--coeffs", "geom:rho=0.8", "--s", "0.7", "--seed", "4", "--index", "2"]));
    let result = &sample["result"];
    assert_eq!(result["sample_index"], 2);
    assert_eq!(result["coeffs"].as_array().unwrap().len() as u64, result["degree"].as_u64().unwrap() + 1);

    let zeros = json(&gafzero(&["zeros", "--coeffs", "unit", "--s", "0.9", "--seed", "4"]));
    assert_eq!(zeros["result"]["certified"], true);
    for z in zeros["result"]["zeros"].as_array().unwrap() {
        assert!(z["re"].as_f64().unwrap().hypot(z["im"].as_f64().unwrap()) < 0.9);
    }

    let norm = json(&gafzero(&["norm", "--coeffs", "unit", "--measure", "bergman:alpha=1", "--p", "2", "--s", "0.7"]));
    // ∫₀^0.7 (1-r²)^{-1} 2(1-r²) dr = 1.4
    let v = norm["result"]["coefficient_integral"]["value"].as_f64().unwrap();
    assert!((v - 1.4).abs() < 1e-12);
}

#[test]
fn output_ignores_thread_count() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gafzero"))
            .args(["verify", "quant3", "--coeffs", "unit", "--s", "0.8", "--p", "1", "--samples", "400", "--seed", "5"])
            .env("GAFZERO_THREADS", threads)
            .output()
            .unwrap();
        let mut doc = json(&out);
        for r in doc["reports"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("runtime_ms");
        }
        serde_json::to_string(&doc).unwrap()
    };
    assert_eq!(run("1"), run("4"));
    let bad = Command::new(env!("CARGO_BIN_EXE_gafzero"))
        .args(["check", "mm"])
        .env("GAFZERO_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
