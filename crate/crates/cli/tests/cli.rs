use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use brownlab::rdiagonal::RadialPlanarMeasure;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn brownlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brownlab"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn cdf_rows(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let (r, f) = l.split_once(',').unwrap();
            (r.parse().unwrap(), f.parse().unwrap())
        })
        .collect()
}

/// Parses `text` as `T`, serializes it again and compares the JSON trees.
fn assert_round_trip<T: serde::Serialize + serde::de::DeserializeOwned>(text: &str) {
    let value: T = serde_json::from_str(text).unwrap();
    let again: Value = serde_json::to_value(&value).unwrap();
    assert_eq!(again, serde_json::from_str::<Value>(text).unwrap());
}

fn write_matrix(dir: &Path, name: &str, rows: &[&[f64]]) -> PathBuf {
    let text: String = rows
        .iter()
        .map(|r| r.iter().flat_map(|x| [x.to_string(), "0".into()]).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn rdiag_bernoulli_half_table() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(dir.path(), &["rdiag", data("bernoulli-half.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = cdf_rows(&read(dir.path(), "rdiag_cdf.csv"));
    let half = rows.iter().find(|r| r.0 == 0.5).expect("row at r = 0.5");
    assert!((half.1 - 2.0 / 3.0).abs() < 1e-12, "{half:?}");
    assert!(read(dir.path(), "rdiag_cdf.csv").contains("\n0.5,0.666666"));
    assert_round_trip::<RadialPlanarMeasure>(&read(dir.path(), "rdiag.json"));
}

#[test]
fn rdiag_two_atom_endpoints_match_annulus() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(dir.path(), &["rdiag", data("two-atom.json").to_str().unwrap(), "--step", "0.01"]);
    assert_eq!(code(&o), 0);
    // H = 1 or 2 with probability 1/2: radii are ||H^-1||_2^-1 and ||H||_2
    let inner = 1.0 / (0.5 * 1.0 + 0.5 * 0.25f64).sqrt();
    let outer = (0.5 * 1.0 + 0.5 * 4.0f64).sqrt();
    let rows = cdf_rows(&read(dir.path(), "rdiag_cdf.csv"));
    let last = rows.last().unwrap();
    assert!((last.0 - outer).abs() < 1e-12 && last.1 == 1.0);
    for &(r, f) in &rows {
        if r < inner - 1e-9 {
            assert_eq!(f, 0.0, "mass below the inner radius at r = {r}");
        }
        if r > inner + 1e-9 {
            assert!(f > 0.0, "no mass above the inner radius at r = {r}");
        }
    }
    let m = json(dir.path(), "rdiag.json");
    assert!((m["support"][0].as_f64().unwrap() - inner).abs() < 1e-12);
    assert!((m["support"][1].as_f64().unwrap() - outer).abs() < 1e-12);
}

#[test]
fn rdiag_error_codes() {
    let dir = TempDir::new().unwrap();
    let run = |f: &str| code(&brownlab(dir.path(), &["rdiag", data(f).to_str().unwrap()]));
    assert_eq!(run("dirac.json"), 6);
    assert_eq!(run("bad-mass.json"), 5);
    assert_eq!(run("missing.json"), 3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"atoms\": [[1.0").unwrap();
    assert_eq!(code(&brownlab(dir.path(), &["rdiag", bad.to_str().unwrap()])), 4);
    let step = brownlab(dir.path(), &["rdiag", data("two-atom.json").to_str().unwrap(), "--step", "0"]);
    assert_eq!(code(&step), 7);
}

#[test]
fn usage_and_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&brownlab(dir.path(), &["rdiag"])), 2);
    assert_eq!(code(&brownlab(dir.path(), &["frobnicate"])), 2);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "sed = 3\n").unwrap();
    let o = brownlab(dir.path(), &["--config", cfg.to_str().unwrap(), "verify", "--criteria", "1"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn stochastic_commands_require_a_seed() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&brownlab(dir.path(), &["simulate", "--tag", "W1F12", "--dim", "8"])), 15);
    assert_eq!(code(&brownlab(dir.path(), &["field", "--tag", "W1F12", "--dim", "8"])), 15);
    assert_eq!(code(&brownlab(dir.path(), &["verify", "--criteria", "1"])), 15);
    let id = write_matrix(dir.path(), "id.csv", &[&[1.0, 0.0], &[0.0, 1.0]]);
    assert_eq!(code(&brownlab(dir.path(), &["algebra", id.to_str().unwrap(), "--kfold", "1"])), 15);
}

#[test]
fn seed_from_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 11\n[simulate]\ntag = \"E12_plus_F12\"\ndim = 8\n").unwrap();
    let o = brownlab(dir.path(), &["--config", cfg.to_str().unwrap(), "simulate", "--seeds", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec = json(dir.path(), "run.json");
    assert_eq!(rec["master_seed"], 11);
    assert_eq!(rec["config"]["simulate"]["seeds"], 2);
}

#[test]
fn simulate_small_model_files() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(
        dir.path(),
        &["--seed", "5", "simulate", "--tag", "E12_plus_F12", "--dim", "64", "--seeds", "1", "--word", "c(W1) c(V1)"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let spectrum = read(dir.path(), "spectrum_0.csv");
    assert_eq!(spectrum.lines().count(), 65);
    let cdf = cdf_rows(&read(dir.path(), "aggregate_cdf.csv"));
    assert_eq!(cdf.last().unwrap().1, 1.0);
    let s = read(dir.path(), "simulate.json");
    assert_round_trip::<Value>(&s);
    let v: Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["eigenvalues"], 64);
    assert_eq!(v["seeds"][0]["model"]["dim"], 64);
    assert_eq!(v["seeds"][0]["model"]["tag"], "E12_plus_F12");
    assert!(v["seeds"][0]["word_trace"].is_array());
}

#[test]
fn simulate_error_codes() {
    let dir = TempDir::new().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["--seed", "1", "simulate"];
        args.extend_from_slice(extra);
        code(&brownlab(dir.path(), &args))
    };
    assert_eq!(run(&["--tag", "W9F12", "--dim", "8"]), 8);
    assert_eq!(run(&["--tag", "W1F12", "--dim", "8", "--word", "c(W1"]), 8);
    assert_eq!(run(&["--tag", "W1F12", "--dim", "7"]), 13);
}

#[test]
fn simulate_w1f12_matches_catalog() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(dir.path(), &["--seed", "2024", "simulate", "--tag", "W1F12", "--dim", "1024", "--seeds", "5"]);
    assert_eq!(code(&o), 0);
    let v = json(dir.path(), "simulate.json");
    let ks = v["ks"].as_f64().unwrap();
    assert!(ks <= 0.03, "KS {ks}");
    assert!((v["atom_fraction"].as_f64().unwrap() - 0.5).abs() < 0.02);
}

#[test]
fn simulate_w1_plus_f12_stays_in_support() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(dir.path(), &["--seed", "2025", "simulate", "--tag", "W1_plus_F12", "--dim", "1024", "--seeds", "5"]);
    assert_eq!(code(&o), 0);
    let v = json(dir.path(), "simulate.json");
    assert_eq!(v["support_violations"], 0);
    assert_eq!(v["eigenvalues"], 5 * 1024);
}

#[test]
fn simulate_digests_reproduce() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["--seed", "9", "simulate", "--tag", "W1F12", "--dim", "32", "--seeds", "2"];
    assert_eq!(code(&brownlab(a.path(), &args)), 0);
    assert_eq!(code(&brownlab(b.path(), &args)), 0);
    let (ra, rb) = (json(a.path(), "run.json"), json(b.path(), "run.json"));
    assert_eq!(ra["digests"], rb["digests"]);
    assert_eq!(ra["digests"].as_object().unwrap().len(), 4);
    for (name, digest) in ra["digests"].as_object().unwrap() {
        assert_eq!(&Value::String(brownlab::verify::sha256_hex(read(a.path(), name).as_bytes())), digest);
    }
}

#[test]
fn field_digests_do_not_depend_on_threads() {
    let mut digests = Vec::new();
    for threads in ["1", "3"] {
        let dir = TempDir::new().unwrap();
        let o = brownlab(
            dir.path(),
            &["--seed", "4", "--threads", threads, "field", "--tag", "E12_plus_F12", "--dim", "16", "--grid", "33"],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let s = read(dir.path(), "field.json");
        let v: Value = serde_json::from_str(&s).unwrap();
        assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 0.05, "{v}");
        assert_round_trip::<Value>(&s);
        let rec = json(dir.path(), "run.json");
        digests.push((rec["digests"]["field.csv"].clone(), rec["digests"]["mass.csv"].clone()));
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn field_error_codes() {
    let dir = TempDir::new().unwrap();
    let field = |m: &Path, extra: &[&str]| {
        let mut args = vec!["field", "--matrix", m.to_str().unwrap()];
        args.extend_from_slice(extra);
        code(&brownlab(dir.path(), &args))
    };
    let id = write_matrix(dir.path(), "id.csv", &[&[1.0, 0.0], &[0.0, 1.0]]);
    assert_eq!(field(&id, &["--grid", "2"]), 9);
    // eigenvalues on the center node and on its half-cell jitter target
    let hit = dir.path().join("hit.csv");
    std::fs::write(&hit, "0,0,0,0\n0,0,0.25,0.25\n").unwrap();
    assert_eq!(field(&hit, &["--grid", "5", "--half-width", "1", "--epsilon", "0"]), 10);
    let wide = write_matrix(dir.path(), "wide.csv", &[&[1.0, 0.0, 0.0]]);
    assert_eq!(field(&wide, &[]), 11);
    let nan = dir.path().join("nan.csv");
    std::fs::write(&nan, "NaN,0,1,0\n0,0,1,0\n").unwrap();
    assert_eq!(field(&nan, &["--grid", "5", "--epsilon", "0"]), 12);
    assert_eq!(field(&nan, &["--grid", "5", "--epsilon", "0.1", "--half-width", "1"]), 12);
    assert_eq!(field(&id, &["--grid", "5", "--path", "qr"]), 2);
}

#[test]
fn algebra_reports() {
    let dir = TempDir::new().unwrap();
    let e12 = write_matrix(dir.path(), "e12.csv", &[&[0.0, 1.0], &[0.0, 0.0]]);
    let e21 = write_matrix(dir.path(), "e21.csv", &[&[0.0, 0.0], &[1.0, 0.0]]);
    let run = |files: &[&Path], extra: &[&str]| {
        let mut args = vec!["--seed", "3", "algebra"];
        args.extend(files.iter().map(|f| f.to_str().unwrap()));
        args.extend_from_slice(extra);
        code(&brownlab(dir.path(), &args))
    };

    assert_eq!(run(&[&e12, &e21], &["--kfold", "2"]), 0);
    let s = read(dir.path(), "algebra.json");
    assert_round_trip::<Value>(&s);
    let v: Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["closure_dim"], 4);
    assert_eq!(v["transitive"], true);
    assert_eq!(v["kfold"]["ampliation"], true);
    assert_eq!(v["kfold"]["orbit"], true);

    assert_eq!(run(&[&e12], &[]), 0);
    let v = json(dir.path(), "algebra.json");
    assert_eq!(v["closure_dim"], 2);
    assert_eq!(v["transitive"], false);
    assert_eq!(v["subspace"]["verified"], true);

    let big = write_matrix(dir.path(), "i3.csv", &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    assert_eq!(run(&[&e12, &big], &[]), 11);
    assert_eq!(run(&[&e12], &["--kfold", "0"]), 13);
}

#[test]
fn verify_selected_criteria() {
    let dir = TempDir::new().unwrap();
    let o = brownlab(dir.path(), &["--seed", "1", "verify", "--criteria", "1,2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("criterion 1 PASS") && stdout.contains("criterion 2 PASS"), "{stdout}");
    let s = read(dir.path(), "verify.json");
    assert_round_trip::<Vec<brownlab::verify::CriterionReport>>(&s);
    let rec = json(dir.path(), "run.json");
    assert!(rec["timings"]["criterion_1"].is_number());
    assert!(rec["timings"]["criterion_1_runtime_s"].is_number());
    assert!(!s.contains("runtime"));

    let again = TempDir::new().unwrap();
    assert_eq!(code(&brownlab(again.path(), &["--seed", "1", "verify", "--criteria", "1,2"])), 0);
    assert_eq!(json(again.path(), "run.json")["digests"], rec["digests"]);
    assert_eq!(code(&brownlab(dir.path(), &["--seed", "1", "verify", "--criteria", "42"])), 13);
}
