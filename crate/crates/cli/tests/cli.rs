use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const MIXED_QUBIT: &str = r#"{"dim":2,"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
const SINGLET: &str = r#"{"dim":4,"matrix":[[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0.5,0],[-0.5,0],[0,0]],[[0,0],[-0.5,0],[0.5,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
const TRANSPOSE: &str = r#"{"dim":2,"choi":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}"#;
const IDENTITY_CHOI: &str = r#"{"dim":2,"choi":[[[1,0],[0,0],[0,0],[1,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[1,0],[0,0],[0,0],[1,0]]]}"#;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn uqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uqm")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn check<'a>(r: &'a Value, id: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap_or_else(|| panic!("no check {id}"))
}

/// Trace distance between two 2x2 report matrices from the closed-form eigenvalues of their difference.
fn qubit_trace_distance(a: &Value, b: &Value) -> f64 {
    let e = |m: &Value, i: usize, j: usize, p: usize| m["matrix"][i][j][p].as_f64().unwrap();
    let d00 = e(a, 0, 0, 0) - e(b, 0, 0, 0);
    let d11 = e(a, 1, 1, 0) - e(b, 1, 1, 0);
    let (re, im) = (e(a, 0, 1, 0) - e(b, 0, 1, 0), e(a, 0, 1, 1) - e(b, 0, 1, 1));
    let mean = (d00 + d11) / 2.0;
    let radius = (((d00 - d11) / 2.0).powi(2) + re * re + im * im).sqrt();
    ((mean + radius).abs() + (mean - radius).abs()) / 2.0
}

#[test]
fn tomography_of_maximally_mixed_state() {
    let s = Sandbox::new();
    let state = s.file("w.json", MIXED_QUBIT);
    let out = uqm(&["tomography", "--state", &state, "--samples", "100000", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["config"]["samples"], 100000);
    assert_eq!(r["tool"]["name"], "uqm");
    let res = &r["result"];
    assert!(res["trace_distance_to_input"].as_f64().unwrap() <= 0.05);
    assert!(qubit_trace_distance(&res["reconstruction_psd"], &res["input_state"]) <= 0.05);
    for key in ["input_state", "n_samples", "ensemble_estimate", "reconstruction_raw", "reconstruction_psd", "seed"] {
        assert!(!res[key].is_null(), "missing {key}");
    }
}

#[test]
fn seed_is_generated_and_recorded() {
    let s = Sandbox::new();
    let state = s.file("w.json", MIXED_QUBIT);
    let r = report(&uqm(&["tomography", "--state", &state, "--samples", "10"]));
    let seed = r["seed"].as_u64().unwrap();
    assert_eq!(r["config"]["seed"].as_u64().unwrap(), seed);
    let again = report(&uqm(&["tomography", "--state", &state, "--samples", "10", "--seed", &seed.to_string()]));
    assert_eq!(again["result"], r["result"]);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let s = Sandbox::new();
    let state = s.file("pair.json", SINGLET);
    let run = |t: &str| {
        report(&uqm(&[
            "disentangle",
            "--state",
            &state,
            "--dims",
            "2,2",
            "--samples",
            "20000",
            "--seed",
            "3",
            "--threads",
            t,
        ]))
    };
    let (a, b) = (run("1"), run("4"));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["checks"], b["checks"]);
}

#[test]
fn exit_codes() {
    let s = Sandbox::new();
    let missing = s.path("absent.json").display().to_string();
    assert_eq!(code(&uqm(&["tomography", "--state", &missing])), 3);

    let not_psd = s.file("bad.json", r#"{"dim":2,"matrix":[[[1.2,0],[0,0]],[[0,0],[-0.2,0]]]}"#);
    let out = uqm(&["tomography", "--state", &not_psd]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue"));

    let not_json = s.file("garbage.json", "{ not json");
    assert_eq!(code(&uqm(&["tomography", "--state", &not_json])), 2);
    let wrong_dim = s.file("wd.json", r#"{"dim":3,"matrix":[[[1,0]]]}"#);
    assert_eq!(code(&uqm(&["tomography", "--state", &wrong_dim])), 2);

    let state = s.file("w.json", MIXED_QUBIT);
    assert_eq!(code(&uqm(&["tomography", "--state", &state, "--samples", "0"])), 3);
    assert_eq!(code(&uqm(&["tomography", "--state", &state, "--threads", "0"])), 3);
    assert_eq!(code(&uqm(&["tomography", "--state", &state, "--tol", "-1"])), 3);
    assert_eq!(code(&uqm(&["tomography"])), 3);
    assert_eq!(code(&uqm(&["frobnicate"])), 3);
    assert_eq!(code(&uqm(&["--help"])), 0);

    let pair = s.file("pair.json", SINGLET);
    assert_eq!(code(&uqm(&["disentangle", "--state", &pair, "--dims", "4"])), 3);
    assert_eq!(code(&uqm(&["disentangle", "--state", &pair, "--dims", "2,3", "--samples", "10"])), 2);
    assert_eq!(code(&uqm(&["coherent", "--state", &pair])), 3);
    assert_eq!(code(&uqm(&["coherent", "--state", &pair, "--spin", "1", "--samples", "10"])), 2);
    assert_eq!(code(&uqm(&["identity-check", "--base-dim", "0"])), 3);
    assert_eq!(code(&uqm(&["identity-check", "--degree", "2"])), 3);
    assert_eq!(code(&uqm(&["identity-check", "--spin", "0.25"])), 3);

    let malformed_map = s.file("m.json", r#"{"dim":2}"#);
    assert_eq!(code(&uqm(&["choi-decompose", "--map", &malformed_map])), 2);
}

#[test]
fn disentangling_singlet() {
    let s = Sandbox::new();
    let pair = s.file("pair.json", SINGLET);
    let csv = s.path("samples.csv");
    let out = uqm(&[
        "disentangle",
        "--state",
        &pair,
        "--dims",
        "2,2",
        "--samples",
        "100000",
        "--seed",
        "9",
        "--csv-samples",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r["result"]["aligned_fraction"].as_f64().unwrap() < 0.002);
    assert_eq!(check(&r, "outcomes-are-product-states")["passed"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "trial,density,f0_0_re,f0_0_im,f0_1_re,f0_1_im,f1_0_re,f1_0_im,f1_1_re,f1_1_im");
    assert_eq!(lines.count(), 100000);
}

#[test]
fn coherent_spin_one() {
    let s = Sandbox::new();
    let state = s.file(
        "s.json",
        r#"{"dim":3,"matrix":[[[0.6,0],[0.1,0.1],[0,0]],[[0.1,-0.1],[0.3,0],[0,0]],[[0,0],[0,0],[0.1,0]]]}"#,
    );
    let out_path = s.path("report.json");
    let out = uqm(&[
        "coherent",
        "--state",
        &state,
        "--spin",
        "1",
        "--samples",
        "50000",
        "--seed",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["result"]["veronese"]["sym_dim"], 3);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["passed"], true, "{c}");
    }
}

#[test]
fn identity_checks() {
    let r = report(&uqm(&["identity-check", "--base-dim", "1", "--samples", "1000", "--seed", "1"]));
    assert_eq!(r["result"]["fourth_moment"]["max_abs_deviation"], 0.0);
    let out = uqm(&["identity-check", "--base-dim", "2", "--samples", "100000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let out = uqm(&["identity-check", "--base-dim", "3", "--degree", "2", "--samples", "100000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(check(&r, "coherent-resolution-of-identity")["value"].as_f64().unwrap() <= 5.0);
    assert_eq!(r["result"]["coherent_resolution"]["veronese"]["sym_dim"], 6);
}

#[test]
fn choi_decompositions() {
    let s = Sandbox::new();
    let id = s.file("id.json", IDENTITY_CHOI);
    let r = report(&uqm(&["choi-decompose", "--map", &id, "--seed", "1"]));
    assert_eq!(r["result"]["kraus_count"], 1);
    let k = &r["result"]["kraus"][0];
    let (a, b) = (k[0][0][0].as_f64().unwrap(), k[1][1][0].as_f64().unwrap());
    assert!((a.abs() - 1.0).abs() < 1e-12 && (a - b).abs() < 1e-12);
    assert!(k[0][1][0].as_f64().unwrap().abs() < 1e-12);

    let t = s.file("t.json", TRANSPOSE);
    let out = uqm(&["choi-decompose", "--map", &t, "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["completely_positive"], false);
    assert!((r["result"]["min_choi_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(r["result"]["positivity"]["kind"], "positive_not_cp_candidate");

    // Depolarizing channel with p = 0.3 as Kraus operators.
    let (a, b) = ((1.0f64 - 0.75 * 0.3).sqrt(), (0.3f64 / 4.0).sqrt());
    let dep = format!(
        r#"{{"dim":2,"kraus":[[[[{a},0],[0,0]],[[0,0],[{a},0]]],[[[0,0],[{b},0]],[[{b},0],[0,0]]],[[[0,0],[0,{nb}]],[[0,{b}],[0,0]]],[[[{b},0],[0,0]],[[0,0],[{nb},0]]]]}}"#,
        nb = -b
    );
    let d = s.file("dep.json", &dep);
    let r = report(&uqm(&["choi-decompose", "--map", &d, "--seed", "1"]));
    assert_eq!(r["result"]["kraus_count"], 4);
    assert!(r["result"]["roundtrip_error"].as_f64().unwrap() <= 1e-10);
    let out = uqm(&["validate-map", "--map", &d]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["trace_preserving"], true);
}

#[test]
fn validate_map_flags_violations() {
    let s = Sandbox::new();
    let t = s.file("t.json", TRANSPOSE);
    let out = uqm(&["validate-map", "--map", &t]);
    assert_eq!(code(&out), 1);
    assert_eq!(check(&report(&out), "completely-positive")["passed"], false);

    let good =
        r#"{"outcomes":["up","down"],"transforms":[[[[[1,0],[0,0]],[[0,0],[0,0]]]],[[[[0,0],[0,0]],[[0,0],[1,0]]]]]}"#;
    assert_eq!(code(&uqm(&["validate-map", "--map", &s.file("good.json", good)])), 0);
    let doubled = r#"{"outcomes":["up","down"],"transforms":[[[[[1.4142135623730951,0],[0,0]],[[0,0],[0,0]]]],[[[[0,0],[0,0]],[[0,0],[1.4142135623730951,0]]]]]}"#;
    let out = uqm(&["validate-map", "--map", &s.file("doubled.json", doubled), "--seed", "4"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    let kinds: Vec<&str> = r["result"]["validation"]["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"total_probability"));
}

#[test]
fn report_has_no_wall_clock_content() {
    let s = Sandbox::new();
    let state = s.file("w.json", MIXED_QUBIT);
    let a = uqm(&["tomography", "--state", &state, "--samples", "2000", "--seed", "8"]);
    std::thread::sleep(std::time::Duration::from_millis(1100));
    let b = uqm(&["tomography", "--state", &state, "--samples", "2000", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(Path::new(&state).exists());
}
