use brownlab_web::{brown_field_json, rdiag_curve_json, simulate_spectrum_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn curve_matches_closed_form() {
    // half Bernoulli modulus: F(r) = 1 / (2 (1 - r^2)) up to 1/sqrt 2
    let v = parse(rdiag_curve_json(r#"{"atoms": [[0, 0.5], [1, 0.5]]}"#, 51).unwrap());
    for p in v["curve"].as_array().unwrap().iter().take(50) {
        let (r, f) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
        assert!((f - 0.5 / (1.0 - r * r)).abs() < 1e-8, "r = {r}");
    }
}

#[test]
fn same_seed_same_output() {
    let a = simulate_spectrum_json("W1_plus_F12", 12, 77).unwrap();
    assert_eq!(a, simulate_spectrum_json("W1_plus_F12", 12, 77).unwrap());
    assert_ne!(a, simulate_spectrum_json("W1_plus_F12", 12, 78).unwrap());
    let f = brown_field_json("E12_plus_F12", 8, 2, 17, 0.0).unwrap();
    assert_eq!(f, brown_field_json("E12_plus_F12", 8, 2, 17, 0.0).unwrap());
}

#[test]
fn errors_surface() {
    assert!(brown_field_json("W1F12", 8, 1, 2, 0.0).is_err());
    assert!(brown_field_json("W1F12", 8, 1, 10_000, 0.0).is_err());
    assert!(rdiag_curve_json("not json", 10).is_err());
}
