//! Slow, independent reference computations used to check the main path.
//!
//! Nothing here shares code with the routines it checks, except
//! [`period_by_ode`], which reuses the integrator at a tighter tolerance.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{curve_point, CylinderSpec, Hemisphere};
use crate::meanfield::{integrate_with, IntegrateOptions, ModelParams};
use crate::ode::Tolerances;

/// Seed used for every Monte-Carlo oracle run in the test suites.
pub const DEFAULT_SEED: u64 = 20_100_617;
const MC_SHARDS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: f64,
    pub main: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    /// Sample count or grid size.
    pub samples: u64,
    pub seed: Option<u64>,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, oracle: f64, main: f64, samples: u64, seed: Option<u64>) -> Self {
        let abs_dev = (oracle - main).abs();
        let rel_dev = if oracle != 0.0 { abs_dev / oracle.abs() } else { abs_dev };
        Self { quantity: quantity.into(), oracle, main, abs_dev, rel_dev, samples, seed }
    }

    pub fn within(&self, abs_bound: f64) -> bool {
        self.abs_dev <= abs_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Area of `{(x − a)² + y² ≤ r²}` on the unit sphere by uniform sampling
/// (normalized Gaussian triples), with binomial standard error.
///
/// Sampling is split into fixed shards, each on its own ChaCha stream, so
/// the result does not depend on the thread count.
pub fn mc_spherical_area(spec: CylinderSpec, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if n_samples < 10_000 {
        return Err(Error::domain(format!("need at least 1e4 samples, got {n_samples}")));
    }
    let CylinderSpec { a, r } = spec;
    let r2 = r * r;
    let hits: u64 = (0..MC_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = n_samples / MC_SHARDS + u64::from(shard < n_samples % MC_SHARDS);
            let mut hits = 0u64;
            for _ in 0..count {
                let (x, y, z): (f64, f64, f64) =
                    (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
                let n = (x * x + y * y + z * z).sqrt();
                let (x, y) = (x / n, y / n);
                if (x - a) * (x - a) + y * y <= r2 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let f = hits as f64 / n_samples as f64;
    Ok(McEstimate {
        mean: 4.0 * PI * f,
        stderr: 4.0 * PI * (f * (1.0 - f) / n_samples as f64).sqrt(),
        samples: n_samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipticKind {
    First,
    Second,
}

/// `K(m)` or `E(m)` from their defining integrals over `[0, π/2]`.
///
/// The integrands are smooth and π-periodic in t, so the trapezoid rule over
/// a full period converges geometrically; at `m = 1`, `E` uses `|cos t|` and
/// the rule is second order.
pub fn quad_elliptic(kind: EllipticKind, m: f64, n_panels: usize) -> Result<f64> {
    if kind == EllipticKind::First && m >= 1.0 {
        return Err(Error::domain("K(m) diverges for m >= 1"));
    }
    if m > 1.0 {
        return Err(Error::domain("E(m) is complex for m > 1"));
    }
    let n = n_panels.max(2);
    let h = PI / n as f64;
    let f = |t: f64| {
        let s = t.sin();
        let w = (1.0 - m * s * s).max(0.0).sqrt();
        match kind {
            EllipticKind::First => 1.0 / w,
            EllipticKind::Second => w,
        }
    };
    // ∫₀^π = 2 ∫₀^{π/2}; periodic trapezoid over [0, π)
    let sum: f64 = (0..n).map(|i| f(i as f64 * h)).sum();
    Ok(0.5 * h * sum)
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection.
pub fn sturm_eigenvalues(diag: &[f64], offdiag: &[f64], tol: f64) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { offdiag[i - 1].abs() } else { 0.0 } + if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: f64| {
        let mut c = 0usize;
        let mut q = 1.0f64;
        for i in 0..n {
            let b2 = if i > 0 { offdiag[i - 1] * offdiag[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (diag[i].abs() + 1.0);
            }
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo - 1.0, hi + 1.0);
            while b - a > tol * (1.0 + a.abs().max(b.abs())) {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                if count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Period measured by integrating from the orbit point at φ = π on the
/// northern branch, at relative tolerance `rtol`; errors if the orbit does
/// not return before `t_max`.
pub fn period_by_ode(params: &ModelParams, spec: CylinderSpec, rtol: f64, t_max: f64) -> Result<f64> {
    let s0 = curve_point(spec, PI, Hemisphere::North)?;
    let opts = IntegrateOptions {
        tol: Tolerances::new(rtol),
        detect_period: true,
        stop_at_period: true,
        ..IntegrateOptions::default()
    };
    integrate_with(params, s0, t_max, &opts)?
        .period
        .ok_or_else(|| Error::Integration { t: t_max, reason: "no return to the initial point (timeout)".into() })
}
