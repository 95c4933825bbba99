//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero on failure only when `ACCEPTANCE_STRICT` is set, so the
//! rest of the workspace suite still runs and reports.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use dimerlab::action::{area, area_closed_form, area_quadrature, pole_orbit_area, separatrix_area, VIVIANI_AREA};
use dimerlab::geometry::{CylinderSpec, SpherePoint};
use dimerlab::meanfield::{
    self, bogoliubov_period, cylinder_from_energy, energy, integrate, pendulum_parameter, pendulum_period,
    period_of_energy, pole_orbit_period, EquatorPoint, ModelParams, SOUTH_POLE,
};
use dimerlab::oracles::{self, mc_spherical_area, sturm_eigenvalues};
use dimerlab::quantum::{self, build_hamiltonian, eigensystem, eigenvalues, husimi, QuantumParams};
use dimerlab::semiclassics::{compare_with_exact, max_error_away_from_separatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Runner {
    failed: usize,
    total: usize,
}

impl Runner {
    fn run(&mut self, id: &str, title: &str, budget_s: Option<f64>, f: impl FnOnce() -> Outcome) {
        let t0 = Instant::now();
        let mut o = f();
        let dt = t0.elapsed().as_secs_f64();
        if let Some(b) = budget_s {
            if dt > b {
                o.pass = false;
                o.detail.push_str(&format!("; over the {b} s budget"));
            }
        }
        self.total += 1;
        if !o.pass {
            self.failed += 1;
        }
        println!("{} [{id}] {title}: {} ({dt:.2} s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
}

fn sym(v: f64, g: f64) -> ModelParams {
    ModelParams::symmetric(v, g).unwrap()
}

fn viviani_area() -> Outcome {
    let spec = CylinderSpec::new(0.5, 0.5).unwrap();
    let cf = area(spec).unwrap().s_inside;
    let mc = mc_spherical_area(spec, 10_000_000, oracles::DEFAULT_SEED).unwrap();
    let z = (mc.mean - VIVIANI_AREA).abs() / mc.stderr;
    outcome(
        (cf - VIVIANI_AREA).abs() <= 1e-10 && z <= 4.0,
        format!(
            "closed form {cf:.12} (|Δ| = {:.1e}), MC {:.5} ± {:.5} ({z:.2} σ)",
            (cf - VIVIANI_AREA).abs(),
            mc.mean,
            mc.stderr
        ),
    )
}

fn closed_form_vs_quadrature() -> Outcome {
    let mut worst = 0.0f64;
    let mut check = |spec: CylinderSpec, cf: f64| {
        let q = area_quadrature(spec).unwrap().s_inside;
        worst = worst.max((q - cf).abs());
        if let Some(c) = area_closed_form(spec) {
            worst = worst.max((c.s_inside - cf).abs());
        }
    };
    for i in 1..=20 {
        let a = 0.1 * i as f64;
        check(CylinderSpec::new(a, a).unwrap(), pole_orbit_area(a).unwrap());
    }
    for i in 1..=19 {
        let a = 0.05 * i as f64;
        check(CylinderSpec::new(a, 1.0 - a).unwrap(), separatrix_area(a).unwrap());
    }
    outcome(worst <= 1e-7, format!("max |Δ| = {worst:.2e} over 39 grid points"))
}

/// Random orbits away from the separatrix, shared by criteria 3–5.
struct Run {
    cylinder_err: f64,
    period_rel_err: f64,
    energy_drift: f64,
    norm_drift: f64,
}

fn random_runs() -> Vec<Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(oracles::DEFAULT_SEED);
    let mut runs = Vec::new();
    while runs.len() < 50 {
        let v = rng.random_range(0.5..2.0);
        let g = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi = rng.random_range(-PI..PI);
        let s0 = SpherePoint::from_angles(z.acos(), phi);
        let p = sym(v, g);
        let e = energy(&p, &s0);
        let spec = cylinder_from_energy(&p, e).unwrap();
        let m = pendulum_parameter(spec);
        if (m - 1.0).abs() < 1e-3 || spec.r < 1e-3 {
            continue;
        }
        let t_cf = pendulum_period(&p, spec).unwrap();
        let tr = integrate(&p, s0, 10.0 * t_cf, meanfield::DEFAULT_RTOL).unwrap();
        let a = v / g;
        let r2 = 1.0 + a * a - 2.0 * e / g;
        let cylinder_err = tr.states.iter().map(|s| ((s.x - a).powi(2) + s.y * s.y - r2).abs()).fold(0.0, f64::max);
        let period_rel_err = tr.period.map_or(f64::INFINITY, |t| ((t - t_cf) / t_cf).abs());
        runs.push(Run {
            cylinder_err,
            period_rel_err,
            energy_drift: tr.rel_energy_drift(),
            norm_drift: tr.max_norm_drift,
        });
    }
    runs
}

fn cylinder_identity(runs: &[Run]) -> Outcome {
    let worst = runs.iter().map(|r| r.cylinder_err).fold(0.0, f64::max);
    outcome(worst <= 1e-7, format!("max |(x−a)² + y² − r²| = {worst:.2e} over {} runs", runs.len()))
}

fn period_closed_forms(runs: &[Run], extra: &mut Vec<Run>) -> Outcome {
    let mut worst = runs.iter().map(|r| r.period_rel_err).fold(0.0, f64::max);
    // orbits through the poles, both sides of a = 1/2
    for g in [1.0 / 0.3, 1.25, 4.0, 0.8] {
        let p = sym(1.0, g);
        let t_cf = pole_orbit_period(&p).unwrap();
        let tr = integrate(&p, SOUTH_POLE, 3.0 * t_cf, meanfield::DEFAULT_RTOL).unwrap();
        worst = worst.max(tr.period.map_or(f64::INFINITY, |t| ((t - t_cf) / t_cf).abs()));
        extra.push(Run {
            cylinder_err: 0.0,
            period_rel_err: 0.0,
            energy_drift: tr.rel_energy_drift(),
            norm_drift: tr.max_norm_drift,
        });
    }
    // Bogoliubov limit: orbits hugging (−1,0,0), and (1,0,0) where it is stable
    let mut bog = 0.0f64;
    for (g, at) in [(2.0, EquatorPoint::Lower), (0.3, EquatorPoint::Lower), (0.5, EquatorPoint::Upper)] {
        let p = sym(1.0, g);
        let a = 1.0 / g;
        let r = match at {
            EquatorPoint::Lower => 1.0 + a - 1e-6,
            EquatorPoint::Upper => a - 1.0 + 1e-6,
        };
        let spec = CylinderSpec::new(a, r).unwrap();
        let t_b = bogoliubov_period(&p, at).unwrap();
        let t_ode = oracles::period_by_ode(&p, spec, 1e-12, 100.0).unwrap();
        bog = bog.max(((pendulum_period(&p, spec).unwrap() - t_b) / t_b).abs());
        bog = bog.max(((t_ode - t_b) / t_b).abs());
    }
    outcome(
        worst <= 1e-6 && bog <= 1e-4,
        format!("max period rel. error {worst:.2e}; Bogoliubov limit rel. error {bog:.2e}"),
    )
}

fn conservation(runs: &[Run]) -> Outcome {
    let e = runs.iter().map(|r| r.energy_drift).fold(0.0, f64::max);
    let n = runs.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    outcome(
        e <= 1e-8 && n <= 1e-8,
        format!("max energy drift {e:.2e} (relative to |ε| + v + |g|/2), norm drift {n:.2e}"),
    )
}

fn reference_params() -> QuantumParams {
    QuantumParams::with_g(0.0, 1.0, 2.0, 1000).unwrap()
}

fn spectrum_bounds() -> Outcome {
    let qp = reference_params();
    let e = eigenvalues(&build_hamiltonian(&qp)).unwrap();
    let n = qp.n_particles as f64;
    let (lo, hi) = (e[0] / n, e[e.len() - 1] / n);
    let bounded = lo > -1.01 && hi < 1.26;
    let mut rng = ChaCha8Rng::seed_from_u64(oracles::DEFAULT_SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=20usize);
        let qp =
            QuantumParams::new(rng.random_range(-1.0..1.0), rng.random_range(0.1..2.0), rng.random_range(-0.5..0.5), n)
                .unwrap();
        let h = build_hamiltonian(&qp);
        let ql = eigenvalues(&h).unwrap();
        let st = sturm_eigenvalues(&h.diag, &h.offdiag, 1e-13);
        worst = worst.max(ql.iter().zip(&st).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    outcome(bounded && worst <= 1e-10, format!("E/N ∈ [{lo:.5}, {hi:.5}]; QL vs Sturm max |Δ| = {worst:.2e}"))
}

fn quoted_eigenvalues(e: &[f64]) -> Outcome {
    let n = 1000.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (idx, target) in [(790usize, 0.9733), (819, 1.0007), (820, 1.0017), (837, 1.0158)] {
        let best = (idx - 1..=idx + 1).map(|k| (e[k] / n - target).abs()).fold(f64::INFINITY, f64::min);
        ok &= best <= 2e-3;
        parts.push(format!("n={idx}: {best:.1e}"));
    }
    outcome(ok, format!("best |Δ(E/N)| in ±1 window: {}", parts.join(", ")))
}

fn window_counts(e: &[f64]) -> Outcome {
    let above = e.iter().filter(|&&x| x / 1000.0 > 1.0).count() as i64;
    let below = e.len() as i64 - above;
    outcome((above - 182).abs() <= 3 && (below - 819).abs() <= 3, format!("{above} above E/N = 1, {below} below"))
}

fn husimi_localization(spec: &quantum::Spectrum) -> Outcome {
    let saddle = SpherePoint::new(1.0, 0.0, 0.0);
    // quoted indices count from one
    let h819 = husimi(&spec.state(818), 200, 200).unwrap();
    let d819 = h819.argmax().direction().angle_to(&saddle);
    let h837 = husimi(&spec.state(836), 200, 200).unwrap();
    let (north, south) = h837.hemisphere_maxima();
    let a: f64 = 0.5;
    let z1 = (1.0 - a * a).sqrt();
    let dn = north.direction().angle_to(&SpherePoint::new(a, 0.0, z1));
    let ds = south.direction().angle_to(&SpherePoint::new(a, 0.0, -z1));
    outcome(
        d819 <= 0.2 && dn <= 0.25 && ds <= 0.25,
        format!("n=819 argmax {d819:.3} rad from the saddle; n=837 maxima {dn:.3} / {ds:.3} rad from s₁±"),
    )
}

fn density_period_colocation() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (v, g) in [(1.0, 2.0), (0.5, 1.0)] {
        let qp = QuantumParams::with_g(0.0, v, g, 1000).unwrap();
        let s = eigensystem(&build_hamiltonian(&qp)).unwrap();
        let bins = quantum::level_density(&s, 30).unwrap();
        let pk = bins[quantum::peak_bin(&bins)];
        let p = sym(v, g);
        let (lo, hi) = meanfield::allowed_energy_range(&p);
        let (mut e_star, mut t_star) = (f64::NAN, 0.0);
        for i in 1..4000 {
            let e = lo + (hi - lo) * (i as f64 + 0.5) / 4000.0;
            if let Ok(t) = period_of_energy(&p, e) {
                if t > t_star {
                    (e_star, t_star) = (e, t);
                }
            }
        }
        let hit = pk.e_lo <= v && v <= pk.e_hi && pk.e_lo <= e_star && e_star <= pk.e_hi;
        ok &= hit;
        parts.push(format!("(v={v}, g={g}): peak bin [{:.4}, {:.4}], T max at E = {e_star:.4}", pk.e_lo, pk.e_hi));
    }
    outcome(ok, parts.join("; "))
}

fn self_trapping() -> Outcome {
    let v = 1.0;
    let reach = |g: f64| integrate(&sym(v, g), SOUTH_POLE, 40.0, meanfield::DEFAULT_RTOL).unwrap().z_range.1;
    let z_below = reach(1.9 * v);
    let z_above = reach(2.1 * v);
    let t_ref = pole_orbit_period(&sym(v, v)).unwrap();
    let measured = |g: f64| {
        let p = sym(v, g);
        let t_cf = pole_orbit_period(&p).unwrap();
        integrate(&p, SOUTH_POLE, 1.5 * t_cf, meanfield::DEFAULT_RTOL).unwrap().period.unwrap_or(f64::NAN)
    };
    let ratio = measured(2.0 * v - 0.01).min(measured(2.0 * v + 0.01)) / t_ref;
    outcome(
        z_below >= 1.0 - 1e-6 && z_above < 0.0 && ratio >= 3.0,
        format!("max z = {z_below:.9} at g = 1.9v, {z_above:.6} at g = 2.1v; period ratio at 2v ± 0.01 = {ratio:.3}"),
    )
}

fn semiclassical_accuracy() -> Outcome {
    let err = |n: usize| {
        let qp = QuantumParams::with_g(0.0, 1.0, 2.0, n).unwrap();
        max_error_away_from_separatrix(&compare_with_exact(&qp).unwrap(), &qp, 0.05)
    };
    let e: Vec<f64> = [50, 100, 200].into_iter().map(err).collect();
    outcome(
        e[1] <= 5e-3 && e[0] > e[1] && e[1] > e[2],
        format!("max |ΔE|/N = {:.2e} (N=50), {:.2e} (N=100), {:.2e} (N=200)", e[0], e[1], e[2]),
    )
}

fn body(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dimerlab"))
        .args(args)
        .env("DIMERLAB_THREADS", "4")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8_lossy(&out.stdout);
    if text.starts_with('{') {
        // the manifest carries a timestamp; the body is the tables
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        return Ok(v["tables"].to_string());
    }
    Ok(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n"))
}

fn determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["curve", "--a", "0.5", "--r", "0.5"],
        &["area", "--a", "0.3"],
        &["area", "--families"],
        &["trajectory", "--g", "2", "--pole", "south", "--t-end", "5"],
        &["period", "--g", "2", "--points", "10"],
        &["spectrum", "--g", "2", "--n", "200"],
        &["husimi", "--g", "2", "--n", "100", "--state", "50", "--n-theta", "40", "--n-phi", "40"],
        &["sweep", "--n", "50", "--g-points", "5", "--t-points", "21"],
        &["sweep", "--n", "50", "--g-points", "5", "--t-points", "21", "--mode", "many-particle"],
        &["semiclassical", "--g", "2", "--n", "100"],
    ];
    let mut bad = Vec::new();
    for args in commands {
        for fmt in ["csv", "json"] {
            let mut full = args.to_vec();
            full.extend(["--format", fmt]);
            let (a, b) = (body(&full), body(&full));
            match (a, b) {
                (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
                (Err(e), _) | (_, Err(e)) => bad.push(format!("{} {fmt}: {}", args[0], e.trim())),
                _ => bad.push(format!("{} {fmt}: bodies differ", args[0])),
            }
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{} invocations reproduced byte for byte", 2 * commands.len()))
    } else {
        outcome(false, bad.join("; "))
    }
}

fn main() {
    let mut r = Runner { failed: 0, total: 0 };
    r.run("1", "Viviani area", Some(5.0), viviani_area);
    r.run("2", "closed forms vs quadrature", Some(30.0), closed_form_vs_quadrature);

    let mut runs = Vec::new();
    r.run("3", "trajectories on their cylinder", Some(60.0), || {
        runs = random_runs();
        cylinder_identity(&runs)
    });
    let mut extra = Vec::new();
    r.run("4", "period closed forms", Some(60.0), || period_closed_forms(&runs, &mut extra));
    let all: Vec<Run> = runs.into_iter().chain(extra).collect();
    r.run("5", "energy and norm conservation", None, || conservation(&all));

    r.run("6", "spectrum bounds and eigensolver oracle", Some(120.0), spectrum_bounds);
    let spec = eigensystem(&build_hamiltonian(&reference_params())).unwrap();
    r.run("7", "quoted eigenvalues", None, || quoted_eigenvalues(&spec.energies));
    r.run("8", "Viviani window counts", None, || window_counts(&spec.energies));
    r.run("9", "Husimi localization", Some(120.0), || husimi_localization(&spec));
    r.run("10", "level density and period divergence", None, density_period_colocation);
    r.run("11", "self-trapping criticality", None, self_trapping);
    r.run("12", "semiclassical accuracy", None, semiclassical_accuracy);
    r.run("13", "CLI determinism", None, determinism);

    println!("acceptance: {} passed, {} failed", r.total - r.failed, r.failed);
    if r.failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
