//! Complete elliptic integrals K(m) and E(m).
//!
//! Everything in this crate uses the *parameter* convention m = k². Call sites
//! that need K of the reciprocal parameter pass `1.0 / m` explicitly.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_REL_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind,
/// K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ), for m < 1.
///
/// Computed as π / (2 AGM(1, √(1−m))). Negative m is accepted.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(Error::domain(format!("K(m) requires m < 1 (logarithmic divergence at m = 1), got m = {m}")));
    }
    if m == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let (a, _) = agm(1.0, (1.0 - m).sqrt(), None);
    Ok(FRAC_PI_2 / a)
}

/// Complete elliptic integral of the second kind,
/// E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ, for m ≤ 1.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(m <= 1.0) {
        return Err(Error::domain(format!("E(m) requires m <= 1, got m = {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    if m == 0.0 {
        return Ok(FRAC_PI_2);
    }
    // E = K (1 - sum_n 2^(n-1) c_n^2) with c_0^2 = m.
    let mut sum = 0.5 * m;
    let (a, _) = agm(1.0, (1.0 - m).sqrt(), Some(&mut sum));
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}

/// Both integrals from a single AGM pass.
pub fn elliptic_ke(m: f64) -> Result<(f64, f64)> {
    Ok((elliptic_k(m)?, elliptic_e(m)?))
}

/// Arithmetic-geometric mean. When `csum` is given, accumulates
/// Σ 2^(n-1) c_n² for n ≥ 1 into it, with c_n = (a_{n-1} − b_{n-1}) / 2.
fn agm(mut a: f64, mut b: f64, mut csum: Option<&mut f64>) -> (f64, usize) {
    let mut pow = 1.0;
    for it in 0..AGM_MAX_ITER {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if let Some(s) = csum.as_deref_mut() {
            *s += pow * c * c;
        }
        pow *= 2.0;
        let done = (an - a).abs() <= AGM_REL_TOL * an && (an - bn).abs() <= AGM_REL_TOL * an;
        a = an;
        b = bn;
        if done {
            return (a, it + 1);
        }
    }
    (a, AGM_MAX_ITER)
}
