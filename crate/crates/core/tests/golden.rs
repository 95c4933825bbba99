//! Main-path results against reference values frozen from the oracles.

use dimerlab::action::area;
use dimerlab::geometry::CylinderSpec;
use dimerlab::meanfield::{pendulum_period, ModelParams};
use dimerlab::quantum::{build_hamiltonian, eigenvalues, QuantumParams};
use dimerlab::specfun::{elliptic_e, elliptic_k};
use serde_json::Value;

fn golden() -> Value {
    serde_json::from_str(include_str!("golden/derived.json")).expect("golden file parses")
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

#[test]
fn elliptic_against_quadrature() {
    for row in golden()["elliptic"].as_array().unwrap() {
        let m = f(row, "m");
        assert!((elliptic_k(m).unwrap() - f(row, "K")).abs() < 1e-10, "K({m})");
        assert!((elliptic_e(m).unwrap() - f(row, "E")).abs() < 1e-10, "E({m})");
    }
}

#[test]
fn areas_within_four_standard_errors() {
    for row in golden()["mc_area"].as_array().unwrap() {
        let spec = CylinderSpec::new(f(row, "a"), f(row, "r")).unwrap();
        let s = area(spec).unwrap().s_inside;
        let (mean, se) = (f(row, "mean"), f(row, "stderr"));
        assert!((s - mean).abs() <= 4.0 * se, "{spec:?}: {s} vs {mean} ± {se}");
    }
}

#[test]
fn eigenvalues_against_sturm() {
    let g = golden();
    let row = &g["sturm_n8"];
    let qp = QuantumParams::new(f(row, "epsilon"), f(row, "v"), f(row, "c"), 8).unwrap();
    let e = eigenvalues(&build_hamiltonian(&qp)).unwrap();
    let reference: Vec<f64> = row["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in e.iter().zip(&reference) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn periods_against_tight_integration() {
    for row in golden()["period_ode"].as_array().unwrap() {
        let p = ModelParams::symmetric(f(row, "v"), f(row, "g")).unwrap();
        let spec = CylinderSpec::new(f(row, "a"), f(row, "r")).unwrap();
        let t = pendulum_period(&p, spec).unwrap();
        let reference = f(row, "period");
        assert!(((t - reference) / reference).abs() < 1e-6, "{spec:?}: {t} vs {reference}");
    }
}
