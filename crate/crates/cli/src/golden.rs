//! Reference values from the slow oracles, frozen as JSON for the test suites.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dimerlab::geometry::CylinderSpec;
use dimerlab::meanfield::ModelParams;
use dimerlab::oracles::{self, EllipticKind, DEFAULT_SEED};
use dimerlab::quantum::{build_hamiltonian, QuantumParams};

use crate::CliResult;

const MC_SAMPLES: u64 = 10_000_000;
const ELLIPTIC_PANELS: usize = 4096;

fn mc(a: f64, r: f64) -> CliResult<Value> {
    let est = oracles::mc_spherical_area(CylinderSpec::new(a, r)?, MC_SAMPLES, DEFAULT_SEED)?;
    Ok(json!({ "a": a, "r": r, "samples": est.samples, "seed": est.seed, "mean": est.mean, "stderr": est.stderr }))
}

fn period(v: f64, g: f64, r: f64) -> CliResult<Value> {
    let a = v / g;
    let t = oracles::period_by_ode(&ModelParams::symmetric(v, g)?, CylinderSpec::new(a, r)?, 1e-12, 1e3)?;
    Ok(json!({ "v": v, "g": g, "a": a, "r": r, "rtol": 1e-12, "period": t }))
}

pub fn generate() -> CliResult<Value> {
    let elliptic: Vec<Value> = [0.0, 0.36, 0.5, 0.9, 0.99]
        .iter()
        .map(|&m| {
            Ok(json!({
                "m": m,
                "panels": ELLIPTIC_PANELS,
                "K": oracles::quad_elliptic(EllipticKind::First, m, ELLIPTIC_PANELS)?,
                "E": oracles::quad_elliptic(EllipticKind::Second, m, ELLIPTIC_PANELS)?,
            }))
        })
        .collect::<CliResult<_>>()?;

    let areas = vec![mc(0.5, 0.5)?, mc(0.25, 0.6)?, mc(1.25, 0.8)?, mc(0.7, 0.3)?];

    // one random N = 8 Hamiltonian, drawn from the documented seed
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let qp =
        QuantumParams::new(rng.random_range(-1.0..1.0), rng.random_range(0.1..2.0), rng.random_range(-1.0..1.0), 8)?;
    let h = build_hamiltonian(&qp);
    let sturm = json!({
        "seed": DEFAULT_SEED,
        "epsilon": qp.epsilon, "v": qp.v, "c": qp.c, "N": qp.n_particles,
        "tol": 1e-13,
        "eigenvalues": oracles::sturm_eigenvalues(&h.diag, &h.offdiag, 1e-13),
    });

    let periods = vec![
        period(1.0, 2.0, 0.8)?,
        period(1.0, 2.0, 0.3)?,
        period(1.0, 2.0, 1.2)?,
        period(0.3, 1.0, 0.3)?,
        period(1.0, 0.5, 2.5)?,
    ];

    Ok(json!({
        "generator": "dimerlab oracle",
        "elliptic": elliptic,
        "mc_area": areas,
        "sturm_n8": sturm,
        "period_ode": periods,
        "viviani_area": 2.0 * PI - 4.0,
    }))
}

pub fn write(out: Option<&Path>) -> CliResult<()> {
    let v = generate()?;
    let text = serde_json::to_string_pretty(&v).map_err(|e| crate::invalid(e.to_string()))? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
