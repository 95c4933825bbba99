//! Mean-field (Gross–Pitaevskii) dynamics of the dimer on the Bloch sphere.
//!
//! The Bloch vector is rescaled to unit length, `(x, y, z) = 2 (s_x, s_y, s_z)`,
//! with `z = |ψ₁|² − |ψ₂|²` the population imbalance. Energies are per
//! particle: `E = ε z + v x + g z² / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CylinderSpec, SpherePoint, BOUNDARY_TOL};
use crate::ode::{Dopri5, Tolerances};
use crate::specfun::elliptic_k;

/// Points on the unit Bloch sphere.
pub type BlochVector = SpherePoint;

pub const SOUTH_POLE: BlochVector = SpherePoint::new(0.0, 0.0, -1.0);
pub const NORTH_POLE: BlochVector = SpherePoint::new(0.0, 0.0, 1.0);

/// Default relative tolerance of [`integrate`].
pub const DEFAULT_RTOL: f64 = 1e-10;

/// `|m − 1|` below which a cylinder counts as the separatrix.
pub const SEPARATRIX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub epsilon: f64,
    pub v: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, v: f64, g: f64) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("coupling v must be > 0, got {v}")));
        }
        if !epsilon.is_finite() || !g.is_finite() {
            return Err(Error::domain("epsilon and g must be finite"));
        }
        Ok(Self { epsilon, v, g })
    }

    /// Symmetric dimer, ε = 0.
    pub fn symmetric(v: f64, g: f64) -> Result<Self> {
        Self::new(0.0, v, g)
    }

    /// Cylinder displacement `a = v / g`, `None` for g = 0.
    pub fn a(&self) -> Option<f64> {
        (self.g != 0.0).then(|| self.v / self.g)
    }

    /// Typical energy magnitude, used to make drifts relative.
    pub fn energy_scale(&self) -> f64 {
        self.epsilon.abs() + self.v + 0.5 * self.g.abs()
    }

    fn require_symmetric(&self, what: &str) -> Result<()> {
        if self.epsilon != 0.0 {
            return Err(Error::domain(format!("{what} is only defined for epsilon = 0")));
        }
        Ok(())
    }
}

/// Two complex mode amplitudes, normalized `|ψ₁|² + |ψ₂|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorState {
    pub psi1: Complex64,
    pub psi2: Complex64,
}

impl SpinorState {
    pub fn to_bloch(&self) -> BlochVector {
        let c = self.psi1.conj() * self.psi2;
        SpherePoint::new(2.0 * c.re, 2.0 * c.im, self.psi1.norm_sqr() - self.psi2.norm_sqr())
    }

    /// A spinor with the given Bloch vector (global phase fixed by real ψ₁).
    pub fn from_bloch(s: &BlochVector) -> Self {
        let theta = s.polar_angle();
        let phi = s.azimuth();
        Self { psi1: Complex64::new((0.5 * theta).cos(), 0.0), psi2: Complex64::from_polar((0.5 * theta).sin(), phi) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi1.norm_sqr() + self.psi2.norm_sqr()
    }

    /// Right-hand side of the discrete nonlinear Schrödinger equation,
    /// `i ψ̇_j = ∂H/∂ψ_j*`.
    pub fn gpe_rhs(&self, params: &ModelParams) -> (Complex64, Complex64) {
        let mu = params.epsilon + params.g * (self.psi1.norm_sqr() - self.psi2.norm_sqr());
        let mi = Complex64::new(0.0, -1.0);
        (mi * (mu * self.psi1 + params.v * self.psi2), mi * (params.v * self.psi1 - mu * self.psi2))
    }
}

/// Population imbalance `p = z` and half relative phase `q`, `2q = atan2(y, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPoint {
    pub p: f64,
    pub q: f64,
}

impl CanonicalPoint {
    pub fn from_bloch(s: &BlochVector) -> Self {
        Self { p: s.z, q: 0.5 * s.y.atan2(s.x) }
    }

    pub fn to_bloch(&self) -> BlochVector {
        let rho = (1.0 - self.p * self.p).max(0.0).sqrt();
        let (s, c) = (2.0 * self.q).sin_cos();
        SpherePoint::new(rho * c, rho * s, self.p)
    }
}

pub fn energy(params: &ModelParams, s: &BlochVector) -> f64 {
    params.epsilon * s.z + params.v * s.x + 0.5 * params.g * s.z * s.z
}

/// Nonlinear Bloch equations:
/// `ẋ = −2εy − 2gyz`, `ẏ = 2εx + 2gxz − 2vz`, `ż = 2vy`.
pub fn bloch_rhs(params: &ModelParams, s: &BlochVector) -> BlochVector {
    let ModelParams { epsilon, v, g } = *params;
    SpherePoint::new(
        -2.0 * epsilon * s.y - 2.0 * g * s.y * s.z,
        2.0 * epsilon * s.x + 2.0 * g * s.x * s.z - 2.0 * v * s.z,
        2.0 * v * s.y,
    )
}

/// `H`, `ṗ = −∂H/∂q` and `q̇ = ∂H/∂p` of the canonical form
/// `H = εp + v√(1 − p²) cos 2q + g p²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalDerivatives {
    pub h: f64,
    pub p_dot: f64,
    pub q_dot: f64,
}

pub fn canonical_form(params: &ModelParams, pt: &CanonicalPoint) -> Result<CanonicalDerivatives> {
    let ModelParams { epsilon, v, g } = *params;
    let CanonicalPoint { p, q } = *pt;
    if !(p.abs() < 1.0) {
        return Err(Error::domain(format!("q-dot is singular at the poles (|p| = 1), got p = {p}")));
    }
    let rho = (1.0 - p * p).sqrt();
    let (s2, c2) = (2.0 * q).sin_cos();
    Ok(CanonicalDerivatives {
        h: epsilon * p + v * rho * c2 + 0.5 * g * p * p,
        p_dot: 2.0 * v * rho * s2,
        q_dot: epsilon - v * p * c2 / rho + g * p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Min,
    Max,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: BlochVector,
    pub energy: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
}

/// Stationary points of the symmetric flow: `(±1, 0, 0)` always, and
/// `(a, 0, ±√(1 − a²))` once `a² < 1` (|g| > v).
pub fn fixed_points(params: &ModelParams) -> Result<FixedPointSet> {
    params.require_symmetric("fixed_points")?;
    let ModelParams { v, g, .. } = *params;
    let mk = |p: BlochVector, stability| FixedPoint { point: p, energy: energy(params, &p), stability };
    let bifurcated = g.abs() > v;
    let plus = SpherePoint::new(1.0, 0.0, 0.0);
    let minus = SpherePoint::new(-1.0, 0.0, 0.0);
    let mut points = if g >= 0.0 {
        vec![mk(plus, if bifurcated { Stability::Saddle } else { Stability::Max }), mk(minus, Stability::Min)]
    } else {
        vec![mk(plus, Stability::Max), mk(minus, if bifurcated { Stability::Saddle } else { Stability::Min })]
    };
    if bifurcated {
        let a = v / g;
        let z = (1.0 - a * a).sqrt();
        let st = if g > 0.0 { Stability::Max } else { Stability::Min };
        points.push(mk(SpherePoint::new(a, 0.0, z), st));
        points.push(mk(SpherePoint::new(a, 0.0, -z), st));
    }
    Ok(FixedPointSet { points })
}

/// Energy band `[E_min, E_max]` reachable on the sphere (ε = 0).
pub fn allowed_energy_range(params: &ModelParams) -> (f64, f64) {
    let ModelParams { v, g, .. } = *params;
    let top = if g > v { 0.5 * g * (1.0 + (v / g).powi(2)) } else { v };
    let bottom = if g < -v { 0.5 * g * (1.0 + (v / g).powi(2)) } else { -v };
    (bottom, top)
}

/// Cylinder whose intersection with the sphere is the energy-E orbit:
/// `a = v/g`, `r = √(1 + a² − 2E/g)`. Negative `a` (attractive g) is mirrored.
pub fn cylinder_from_energy(params: &ModelParams, e: f64) -> Result<CylinderSpec> {
    params.require_symmetric("cylinder_from_energy")?;
    let a = params.a().ok_or_else(|| Error::domain("cylinder mapping needs g != 0"))?;
    let (lo, hi) = allowed_energy_range(params);
    let slack = 1e-12 * params.energy_scale();
    if e < lo - slack || e > hi + slack {
        return Err(Error::domain(format!("energy {e} outside the allowed range [{lo}, {hi}]")));
    }
    let r2 = 1.0 + a * a - 2.0 * e / params.g;
    CylinderSpec::new(a, r2.max(0.0).sqrt())
}

/// Inverse of [`cylinder_from_energy`]: `E = g (1 + a² − r²) / 2`.
pub fn energy_from_cylinder(params: &ModelParams, spec: CylinderSpec) -> f64 {
    0.5 * params.g * (1.0 + spec.a * spec.a - spec.r * spec.r)
}

/// Pendulum parameter `m = (1 − (r − a)²) / (4ar)`; `m > 1` rotation
/// (two loops), `m < 1` libration (single loop), `m = 1` separatrix.
pub fn pendulum_parameter(spec: CylinderSpec) -> f64 {
    let CylinderSpec { a, r } = spec;
    (1.0 - (r - a).powi(2)) / (4.0 * a * r)
}

fn check_spec_matches(params: &ModelParams, spec: CylinderSpec) -> Result<f64> {
    params.require_symmetric("pendulum_period")?;
    let g = params.g.abs();
    if !(g > 0.0) {
        return Err(Error::domain("closed-form period needs g != 0"));
    }
    let a = params.v / g;
    if (spec.a - a).abs() > 1e-9 * a.max(1.0) {
        return Err(Error::domain(format!("cylinder displacement {} does not match v/|g| = {a}", spec.a)));
    }
    if !(spec.r > 0.0) {
        return Err(Error::domain("closed-form period needs r > 0 (fixed point)"));
    }
    Ok(g)
}

/// Period of the orbit on the cylinder `spec`:
/// rotation `T = K(1/m) / (g √(m a r))` for m > 1, libration
/// `T = 2 K(m) / (g √(a r))` for m < 1. Attractive g uses |g| (mirror symmetry).
pub fn pendulum_period(params: &ModelParams, spec: CylinderSpec) -> Result<f64> {
    let g = check_spec_matches(params, spec)?;
    let CylinderSpec { a, r } = spec;
    let m = pendulum_parameter(spec);
    if (m - 1.0).abs() < SEPARATRIX_TOL {
        return Err(Error::Separatrix { m, tol: SEPARATRIX_TOL });
    }
    if m < -BOUNDARY_TOL {
        return Err(Error::domain(format!("cylinder a = {a}, r = {r} carries no orbit (m = {m})")));
    }
    let m = m.max(0.0);
    if m > 1.0 {
        // parameter passed as 1/m
        Ok(elliptic_k(1.0 / m)? / (g * (m * a * r).sqrt()))
    } else {
        Ok(2.0 * elliptic_k(m)? / (g * (a * r).sqrt()))
    }
}

/// Period of the energy-E orbit, one loop in the two-loop regime.
pub fn period_of_energy(params: &ModelParams, e: f64) -> Result<f64> {
    let spec = cylinder_from_energy(params, e)?;
    pendulum_period(params, spec)
}

/// Orbit through the poles (r = a): `(2/g) K(4a²)` for a < 1/2,
/// `(2/v) K(1/(4a²))` for a > 1/2.
pub fn pole_orbit_period(params: &ModelParams) -> Result<f64> {
    params.require_symmetric("pole_orbit_period")?;
    let g = params.g.abs();
    if g == 0.0 {
        return Ok(PI / params.v);
    }
    let a = params.v / g;
    if (a - 0.5).abs() < SEPARATRIX_TOL {
        return Err(Error::Separatrix { m: 1.0, tol: SEPARATRIX_TOL });
    }
    if a < 0.5 {
        Ok(2.0 / g * elliptic_k(4.0 * a * a)?)
    } else {
        Ok(2.0 / params.v * elliptic_k(1.0 / (4.0 * a * a))?)
    }
}

/// Which Bogoliubov limit: small oscillations about `(−1, 0, 0)` or `(1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquatorPoint {
    Lower,
    Upper,
}

/// Small-oscillation period about an equatorial fixed point,
/// `π / √(v (v ± g))` (lower: +, upper: −).
pub fn bogoliubov_period(params: &ModelParams, at: EquatorPoint) -> Result<f64> {
    let ModelParams { v, g, .. } = *params;
    let w2 = match at {
        EquatorPoint::Lower => v * (v + g),
        EquatorPoint::Upper => v * (v - g),
    };
    if !(w2 > 0.0) {
        return Err(Error::domain(format!("no oscillation: v (v ± g) = {w2}")));
    }
    Ok(PI / w2.sqrt())
}

/// Linearized angular frequency about the self-trapped points `s₁±`,
/// `2 √(g² − v²)`; requires |g| > v.
pub fn self_trapped_frequency(params: &ModelParams) -> Result<f64> {
    let d = params.g * params.g - params.v * params.v;
    if !(d > 0.0) {
        return Err(Error::domain("self-trapped fixed points need |g| > v"));
    }
    Ok(2.0 * d.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

/// Angular velocity and acceleration of the base-circle angle φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    pub phi_dot: f64,
    pub phi_ddot: f64,
}

/// `φ̇ = ±2g √(1 − a² − r² − 2ar cos φ)` (= 2gz) and `φ̈ = 4vgr sin φ`.
pub fn pendulum_reduce(params: &ModelParams, spec: CylinderSpec, phi: f64, branch: Branch) -> Result<PendulumState> {
    let CylinderSpec { a, r } = spec;
    let rad = 1.0 - a * a - r * r - 2.0 * a * r * phi.cos();
    if rad < -BOUNDARY_TOL {
        let b = (a * a + r * r - 1.0) / (2.0 * a * r);
        return Err(Error::domain(format!(
            "phi = {phi} is beyond the turning points theta0 = ±arccos({b}) about phi = pi"
        )));
    }
    let sign = match branch {
        Branch::Positive => 1.0,
        Branch::Negative => -1.0,
    };
    Ok(PendulumState {
        phi_dot: sign * 2.0 * params.g * rad.max(0.0).sqrt(),
        phi_ddot: 4.0 * params.v * params.g * r * phi.sin(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub tol: Tolerances,
    /// Detect the first return to the initial point.
    pub detect_period: bool,
    /// Stop as soon as the period is found.
    pub stop_at_period: bool,
    /// Record only these times (ascending, within `[0, t_end]`) instead of
    /// every accepted step.
    pub sample_times: Option<Vec<f64>>,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::new(DEFAULT_RTOL),
            detect_period: true,
            stop_at_period: false,
            sample_times: None,
            max_steps: 50_000_000,
        }
    }
}

impl IntegrateOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self { tol: Tolerances::new(rtol), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
    /// Energy of the initial state.
    pub energy: f64,
    /// First-return time, if detected.
    pub period: Option<f64>,
    /// max |E(t) − E(0)| over all accepted steps.
    pub max_energy_drift: f64,
    /// max ||s(t)| − 1| over all accepted steps.
    pub max_norm_drift: f64,
    pub energy_scale: f64,
    pub steps: usize,
    /// Extremes of the imbalance `z`, with interior turning points located
    /// inside each step rather than read off the step grid.
    pub z_range: (f64, f64),
}

impl Trajectory {
    pub fn rel_energy_drift(&self) -> f64 {
        self.max_energy_drift / self.energy_scale
    }
}

const PERIOD_TIME_TOL: f64 = 1e-12;

/// Integrates the Bloch equations from `s0` to `t_end` at relative tolerance `rtol`.
pub fn integrate(params: &ModelParams, s0: BlochVector, t_end: f64, rtol: f64) -> Result<Trajectory> {
    integrate_with(params, s0, t_end, &IntegrateOptions::with_rtol(rtol))
}

/// Integration with explicit options. No projection back onto the sphere is
/// applied; the drift diagnostics report how well the invariants held.
pub fn integrate_with(
    params: &ModelParams,
    s0: BlochVector,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !((s0.norm() - 1.0).abs() <= 1e-10) {
        return Err(Error::domain(format!("initial state not on the unit sphere, |s0| = {}", s0.norm())));
    }
    if !(t_end >= 0.0) {
        return Err(Error::domain(format!("t_end must be >= 0, got {t_end}")));
    }
    let p = *params;
    let sys = move |_t: f64, y: &[f64; 3]| {
        let d = bloch_rhs(&p, &SpherePoint::new(y[0], y[1], y[2]));
        [d.x, d.y, d.z]
    };
    let e0 = energy(params, &s0);
    let y0 = [s0.x, s0.y, s0.z];
    let vel0 = bloch_rhs(params, &s0);
    let fixed = vel0.norm() < 1e-14;
    let section = |y: &[f64; 3]| vel0.x * (y[0] - s0.x) + vel0.y * (y[1] - s0.y) + vel0.z * (y[2] - s0.z);

    let mut st = Dopri5::new(&sys, 0.0, y0, opts.tol);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energy: e0,
        period: None,
        max_energy_drift: 0.0,
        max_norm_drift: (s0.norm() - 1.0).abs(),
        energy_scale: params.energy_scale(),
        steps: 0,
        z_range: (s0.z, s0.z),
    };
    let zdot = |y: &[f64; 3]| bloch_rhs(params, &SpherePoint::new(y[0], y[1], y[2])).z;
    let mut zdot_prev = zdot(&y0);
    let samples = opts.sample_times.as_deref();
    let mut next_sample = 0usize;
    let record = |traj: &mut Trajectory, t: f64, y: &[f64; 3]| {
        traj.times.push(t);
        traj.states.push(SpherePoint::new(y[0], y[1], y[2]));
    };
    match samples {
        None => record(&mut traj, 0.0, &y0),
        Some(ts) => {
            while next_sample < ts.len() && ts[next_sample] <= 0.0 {
                record(&mut traj, ts[next_sample], &y0);
                next_sample += 1;
            }
        }
    }
    let mut dmax = 0.0f64;
    let mut f_prev = 0.0;
    while st.t < t_end {
        if st.accepted >= opts.max_steps {
            return Err(Error::Integration {
                t: st.t,
                reason: format!(
                    "step budget {} exhausted (energy drift {:e}, norm drift {:e})",
                    opts.max_steps, traj.max_energy_drift, traj.max_norm_drift
                ),
            });
        }
        let limit = samples.and_then(|ts| ts.get(next_sample).copied()).map_or(t_end, |ts| ts.min(t_end));
        let (t_prev, y_prev) = (st.t, st.y);
        st.advance(limit).map_err(|e| match e {
            Error::Integration { t, reason } => Error::Integration {
                t,
                reason: format!(
                    "{reason}; energy drift {:e}, norm drift {:e}",
                    traj.max_energy_drift, traj.max_norm_drift
                ),
            },
            other => other,
        })?;
        let s = SpherePoint::new(st.y[0], st.y[1], st.y[2]);
        traj.max_energy_drift = traj.max_energy_drift.max((energy(params, &s) - e0).abs());
        traj.max_norm_drift = traj.max_norm_drift.max((s.norm() - 1.0).abs());
        let zdot_new = zdot(&st.y);
        if zdot_prev.signum() != zdot_new.signum() && zdot_prev != 0.0 {
            let stepper = Dopri5::new(&sys, t_prev, y_prev, opts.tol);
            let (mut lo, mut hi) = (0.0, st.t - t_prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if zdot(&stepper.trial(mid).0).signum() == zdot_prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let z_turn = stepper.trial(0.5 * (lo + hi)).0[2];
            traj.z_range = (traj.z_range.0.min(z_turn), traj.z_range.1.max(z_turn));
        }
        traj.z_range = (traj.z_range.0.min(s.z), traj.z_range.1.max(s.z));
        zdot_prev = zdot_new;
        match samples {
            None => record(&mut traj, st.t, &st.y),
            Some(ts) => {
                while next_sample < ts.len() && ts[next_sample] <= st.t {
                    record(&mut traj, st.t, &st.y);
                    next_sample += 1;
                }
            }
        }
        if opts.detect_period && !fixed && traj.period.is_none() {
            let f_new = section(&st.y);
            let dist = s.distance(&s0);
            if f_prev < 0.0 && f_new >= 0.0 && dist < 0.25 * dmax {
                let stepper = Dopri5::new(&sys, t_prev, y_prev, opts.tol);
                let (mut lo, mut hi) = (0.0, st.t - t_prev);
                while hi - lo > PERIOD_TIME_TOL * st.t.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if section(&stepper.trial(mid).0) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if mid == lo && mid == hi {
                        break;
                    }
                }
                traj.period = Some(t_prev + 0.5 * (lo + hi));
                if opts.stop_at_period {
                    break;
                }
            }
            dmax = dmax.max(dist);
            f_prev = f_new;
        }
    }
    if let Some(ts) = samples {
        // remaining requested samples past a t_end that was reached exactly
        while next_sample < ts.len() && ts[next_sample] <= t_end && st.t >= t_end {
            record(&mut traj, ts[next_sample], &st.y);
            next_sample += 1;
        }
    }
    traj.steps = st.accepted;
    Ok(traj)
}
