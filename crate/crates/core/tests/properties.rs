//! Property checks of the invariants tying geometry, dynamics and spectrum together.

use std::f64::consts::PI;

use dimerlab::action::{self, area_closed_form, area_quadrature, loop_areas, separatrix_area};
use dimerlab::geometry::{classify, CurveClass, CylinderSpec, SpherePoint};
use dimerlab::meanfield::{
    self, bloch_rhs, cylinder_from_energy, energy, integrate, pendulum_parameter, pendulum_period, ModelParams,
};
use dimerlab::quantum::{self, build_hamiltonian, eigensystem, QuantumParams};
use dimerlab::semiclassics::{self, compare_with_exact, max_error_away_from_separatrix, QuantizationRule};
use proptest::prelude::*;

fn sphere_point() -> impl Strategy<Value = SpherePoint> {
    (-1.0f64..1.0, -PI..PI).prop_map(|(z, phi)| SpherePoint::from_angles(z.acos(), phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// Orbits are the sphere–cylinder intersection curves, and the integrator
    /// keeps energy and norm over ten periods.
    #[test]
    fn trajectories_lie_on_their_cylinder(
        v in 0.5f64..2.0,
        g in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
        s0 in sphere_point(),
    ) {
        let p = ModelParams::symmetric(v, g).unwrap();
        let e = energy(&p, &s0);
        let spec = cylinder_from_energy(&p, e).unwrap();
        let m = pendulum_parameter(spec);
        prop_assume!((m - 1.0).abs() > 1e-3 && spec.r > 1e-3);
        let period = pendulum_period(&p, spec).unwrap();
        let tr = integrate(&p, s0, 10.0 * period, meanfield::DEFAULT_RTOL).unwrap();
        // signed displacement: attractive g puts the cylinder at negative x
        let a = v / g;
        let r2 = 1.0 + a * a - 2.0 * e / g;
        for s in &tr.states {
            prop_assert!(((s.x - a).powi(2) + s.y * s.y - r2).abs() <= 1e-7);
        }
        prop_assert!(tr.rel_energy_drift() <= 1e-8, "energy drift {}", tr.rel_energy_drift());
        prop_assert!(tr.max_norm_drift <= 1e-8, "norm drift {}", tr.max_norm_drift);
        let measured = tr.period.unwrap();
        prop_assert!(((measured - period) / period).abs() < 1e-6, "{measured} vs {period}");
    }

    #[test]
    fn fixed_points_are_stationary(v in 0.1f64..3.0, g in -5.0f64..5.0) {
        let p = ModelParams::symmetric(v, g).unwrap();
        for f in meanfield::fixed_points(&p).unwrap().points {
            prop_assert!(bloch_rhs(&p, &f.point).norm() <= 1e-12);
        }
    }

    #[test]
    fn energy_cylinder_round_trip(v in 0.1f64..3.0, g in 0.1f64..5.0, t in 0.0f64..1.0) {
        let p = ModelParams::symmetric(v, g).unwrap();
        let (lo, hi) = meanfield::allowed_energy_range(&p);
        let e = lo + t * (hi - lo);
        let c = cylinder_from_energy(&p, e).unwrap();
        prop_assert!((meanfield::energy_from_cylinder(&p, c) - e).abs() <= 1e-12 * (1.0 + e.abs()) * g.max(1.0));
    }

    #[test]
    fn two_loop_areas_split_evenly(a in 0.05f64..0.95, t in 0.05f64..0.95) {
        let r = t * (1.0 - a).min(a);
        let spec = CylinderSpec::new(a, r).unwrap();
        prop_assume!(classify(spec) == CurveClass::TwoLoops);
        let loops = loop_areas(spec).unwrap();
        prop_assert_eq!(loops.len(), 2);
        prop_assert!((loops[0] - loops[1]).abs() <= 1e-9);
        prop_assert!((loops.iter().sum::<f64>() - action::area(spec).unwrap().s_inside).abs() <= 1e-9);
    }

    #[test]
    fn area_is_monotone_in_radius(a in 0.0f64..2.0) {
        let grid: Vec<f64> = (0..=200).map(|i| (1.0 + a) * i as f64 / 200.0).collect();
        let rows = action::area_vs_radius_dataset(a, &grid).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].s >= w[0].s - 1e-9, "a={a} r={} → {}", w[1].r, w[1].s);
        }
        prop_assert!((rows.last().unwrap().s_over_4pi - 1.0).abs() < 1e-9);
    }
}

#[test]
fn closed_forms_agree_with_quadrature() {
    for i in 1..=20 {
        let a = 0.1 * i as f64;
        let spec = CylinderSpec::new(a, a).unwrap();
        let q = area_quadrature(spec).unwrap().s_inside;
        let c = area_closed_form(spec).unwrap().s_inside;
        assert!((q - c).abs() <= 1e-7, "r = a = {a}: {q} vs {c}");
    }
    for i in 1..=19 {
        let a = 0.05 * i as f64;
        let spec = CylinderSpec::new(a, 1.0 - a).unwrap();
        let q = area_quadrature(spec).unwrap().s_inside;
        assert!((q - separatrix_area(a).unwrap()).abs() <= 1e-7, "r = 1 - a, a = {a}");
    }
}

/// The period diverges logarithmically at the separatrix: each factor 100
/// closer to m = 1 adds the same increment, `ln(100)/(g√(ar))` on the
/// libration side.
#[test]
fn period_diverges_logarithmically() {
    let p = ModelParams::symmetric(1.0, 2.0).unwrap();
    let a = 0.5;
    // r with m(r) = 1 − δ on the libration side (r > 1 − a)
    let radius_for = |target: f64| {
        let (mut lo, mut hi) = (0.5 + 1e-12, 1.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pendulum_parameter(CylinderSpec::new(a, mid).unwrap()) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let periods: Vec<(f64, f64)> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&d| {
            let r = radius_for(1.0 - d);
            let spec = CylinderSpec::new(a, r).unwrap();
            let t = dimerlab::oracles::period_by_ode(&p, spec, 1e-12, 1e3).unwrap();
            (t, 100f64.ln() / (p.g * (a * r).sqrt()))
        })
        .collect();
    for w in periods.windows(2) {
        let step = w[1].0 - w[0].0;
        assert!(((step - w[1].1) / w[1].1).abs() < 0.02, "increment {step} vs {}", w[1].1);
    }
}

#[test]
fn self_trapping_switches_at_twice_v() {
    for (g, trapped) in [(0.5, false), (1.5, false), (1.95, false), (2.05, true), (3.0, true)] {
        let p = ModelParams::symmetric(1.0, g).unwrap();
        let tr = integrate(&p, meanfield::SOUTH_POLE, 30.0, meanfield::DEFAULT_RTOL).unwrap();
        let zmax = tr.z_range.1;
        if trapped {
            assert!(zmax < 0.0, "g = {g}: max z = {zmax}");
        } else {
            assert!(zmax >= 1.0 - 1e-6, "g = {g}: max z = {zmax}");
        }
    }
}

#[test]
fn small_oscillations_about_self_trapped_points() {
    for g in [1.5, 2.0, 4.0] {
        let p = ModelParams::symmetric(1.0, g).unwrap();
        let a: f64 = 1.0 / g;
        let s1 = SpherePoint::new(a, 0.0, (1.0 - a * a).sqrt());
        // tiny displacement along the tangent y direction
        let eps = 1e-5;
        let s0 = SpherePoint::new(s1.x, eps, s1.z);
        let s0 = SpherePoint::new(s0.x / s0.norm(), s0.y / s0.norm(), s0.z / s0.norm());
        let tr = integrate(&p, s0, 5.0, 1e-12).unwrap();
        let w = 2.0 * PI / tr.period.unwrap();
        let expected = meanfield::self_trapped_frequency(&p).unwrap();
        assert!(((w - expected) / expected).abs() < 1e-4, "g = {g}: {w} vs {expected}");
    }
}

#[test]
fn spectra_are_clean() {
    for (eps, v, c, n) in [(0.0, 1.0, 0.02, 100), (0.3, 0.7, -0.05, 60), (0.0, 1.0, 0.002, 1000)] {
        let qp = QuantumParams::new(eps, v, c, n).unwrap();
        let h = build_hamiltonian(&qp);
        let s = eigensystem(&h).unwrap();
        let hn = h.norm();
        for i in 0..s.dim() {
            assert!(s.residual(&h, i) <= 1e-10 * hn);
            if eps == 0.0 {
                assert!((s.parity(i).abs() - 1.0).abs() <= 1e-10);
            }
        }
        if n <= 100 {
            assert!(s.energies.windows(2).all(|w| w[0] < w[1]));
        } else {
            // deep self-trapped doublets are split below double precision
            assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
        }
        let tr = h.trace();
        assert!((s.energies.iter().sum::<f64>() - tr).abs() <= 1e-9 * tr.abs().max(1.0));
        if n <= 100 {
            assert!(s.max_orthonormality_error() <= 1e-12);
        }
    }
}

/// The histogram maximum sits at the saddle energy E/N = v for every N; at
/// fixed bin count the location is resolved to one bin width.
#[test]
fn density_peak_sits_at_saddle_energy() {
    for n in [100, 300, 1000] {
        let qp = QuantumParams::with_g(0.0, 1.0, 2.0, n).unwrap();
        let s = eigensystem(&build_hamiltonian(&qp)).unwrap();
        for n_bins in [30, 60] {
            let bins = quantum::level_density(&s, n_bins).unwrap();
            let pk = bins[quantum::peak_bin(&bins)];
            assert!(pk.e_lo <= 1.0 && 1.0 <= pk.e_hi, "N = {n}, {n_bins} bins: {pk:?}");
        }
    }
}

#[test]
fn semiclassical_counting() {
    let qp = QuantumParams::with_g(0.0, 1.0, 2.0, 1000).unwrap();
    let rule = QuantizationRule::for_particles(1000);
    let n_v = rule.cells(2.0 * PI - 4.0);
    let levels = semiclassics::semiclassical_spectrum(&qp).unwrap();
    let n = qp.n_particles as f64;
    // semiclassical energies carry the (N + 1) scale of the classical model
    let above = levels.iter().filter(|l| l.energy / (n + 1.0) > 1.0).count() as f64;
    assert!((above - n_v.round()).abs() <= 1.0, "{above} vs {n_v}");
    let exact = quantum::eigenvalues(&build_hamiltonian(&qp)).unwrap();
    let exact_above = exact.iter().filter(|&&e| e / n > 1.0).count() as f64;
    assert!((above - exact_above).abs() <= 3.0);
}

#[test]
fn semiclassical_error_shrinks_with_n() {
    let errs: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&n| {
            let qp = QuantumParams::with_g(0.0, 1.0, 2.0, n).unwrap();
            max_error_away_from_separatrix(&compare_with_exact(&qp).unwrap(), &qp, 0.05)
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[1] <= 5e-3);
}

#[test]
fn action_inversion_is_monotone() {
    let p = ModelParams::symmetric(1.0, 2.0).unwrap();
    let (lo, hi) = meanfield::allowed_energy_range(&p);
    let s: Vec<f64> =
        (0..=400).map(|i| semiclassics::action_of_energy(&p, lo + (hi - lo) * i as f64 / 400.0).unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] < w[0]));
}
