//! Spherical areas enclosed by generalized Viviani curves.
//!
//! The area is computed through the area-preserving cylindrical projection
//! `(x, y, z) ↦ (atan2(y, x), z)`: along the curve `dS = z dφ_az`, which
//! becomes an integral over the base-circle angle φ. "Inside" always means
//! inside the cylinder, `(x − a)² + y² ≤ r²`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify, phi_gap, CurveClass, CylinderSpec, SpherePoint, BOUNDARY_TOL};
use crate::quad::{self, QuadResult};
use crate::specfun::{elliptic_e, elliptic_k};

pub const FULL_SPHERE: f64 = 4.0 * PI;

/// Area enclosed by the original Viviani curve, 2π − 4.
pub const VIVIANI_AREA: f64 = TAU - 4.0;

const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AreaMethod {
    ClosedForm,
    Quadrature,
}

impl AreaMethod {
    pub fn name(&self) -> &'static str {
        match self {
            AreaMethod::ClosedForm => "closed_form",
            AreaMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaResult {
    /// Area inside the cylinder, summed over loops.
    pub s_inside: f64,
    /// Signed auxiliary integral between the curve and the equator; `None`
    /// when the area is fixed by convention (no curve or a point).
    pub s0: Option<f64>,
    pub method: AreaMethod,
    pub est_error: f64,
}

/// Azimuth and height of a point on the sphere under the cylindrical projection.
pub fn cylindrical_projection(p: &SpherePoint) -> Result<(f64, f64)> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::domain(format!("azimuth undefined at the pole (z = {}); poles project onto circles", p.z)));
    }
    Ok((p.y.atan2(p.x), p.z))
}

/// Integrand of S₀ in the base-circle angle φ:
/// `r √(1 − r² − a² − 2ar cos φ) (r + a cos φ) / (a² + r² + 2ar cos φ)`.
///
/// The fraction is written with `1 + cos φ = 2 cos²(φ/2)` so that the `r = a`
/// cancellation at φ = π stays accurate.
pub fn s0_integrand(spec: CylinderSpec, phi: f64) -> f64 {
    let CylinderSpec { a, r } = spec;
    let c2 = (0.5 * phi).cos().powi(2);
    let rad = (1.0 - r * r - a * a - 2.0 * a * r * phi.cos()).max(0.0);
    let d = r - a;
    let num = d + 2.0 * a * c2;
    let den = d * d + 4.0 * a * r * c2;
    if den == 0.0 {
        // r = a at φ = π: the removable limit 1/(2a)
        return r * rad.sqrt() / (2.0 * a);
    }
    r * rad.sqrt() * num / den
}

/// Quadrature of S₀ over `[φ₀, π]` (φ₀ = 0 when the full base circle lies on
/// the sphere).
///
/// Substitutes `φ = φ₀ + u²` to remove the square-root endpoint at φ₀, and
/// splits near φ = π where the integrand peaks like `1/(r − a)`.
pub fn area_s0_quadrature(spec: CylinderSpec) -> Result<QuadResult> {
    let class = classify(spec);
    if class == CurveClass::Empty {
        return Err(Error::domain(format!("cylinder a = {}, r = {} does not meet the sphere", spec.a, spec.r)));
    }
    if spec.a == 0.0 {
        // concentric cylinder: integrand is constant √(1 − r²)
        let v = PI * (1.0 - spec.r * spec.r).max(0.0).sqrt();
        return Ok(QuadResult { value: v, est_error: 0.0, evaluations: 0 });
    }
    if spec.r == 0.0 {
        return Ok(QuadResult { value: 0.0, est_error: 0.0, evaluations: 0 });
    }
    let phi0 = phi_gap(spec)?.unwrap_or(0.0);
    let umax = (PI - phi0).max(0.0).sqrt();
    let f = |u: f64| 2.0 * u * s0_integrand(spec, phi0 + u * u);
    // Peak half-width near φ = π is about |r − a| / √(ar) in φ.
    let w = (spec.r - spec.a).abs() / (spec.a * spec.r).sqrt();
    let mut breaks = Vec::new();
    for k in [1e3, 1e2, 10.0, 1.0] {
        let dphi = k * w;
        if dphi < PI - phi0 && dphi > 0.0 {
            breaks.push((PI - phi0 - dphi).sqrt());
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut res = quad::integrate(f, 0.0, umax, &breaks, QUAD_ABS_TOL, QUAD_MAX_SEGMENTS)?;
    if (spec.r - spec.a).abs() <= BOUNDARY_TOL {
        // Through the poles S₀ is taken over both halves of the curve
        // (S = 2π − 2S₀), twice the half-curve integral.
        res.value *= 2.0;
        res.est_error *= 2.0;
    }
    Ok(res)
}

/// Applies the piecewise rule `S = −4S₀ (r < a)`, `2π − 2S₀ (r = a)`,
/// `4π − 4S₀ (r > a)`.
fn area_from_s0(spec: CylinderSpec, s0: f64) -> f64 {
    if (spec.r - spec.a).abs() <= BOUNDARY_TOL {
        TAU - 2.0 * s0
    } else if spec.r < spec.a {
        -4.0 * s0
    } else {
        FULL_SPHERE - 4.0 * s0
    }
}

/// Area fixed by convention: no curve, or a curve that degenerates to points.
fn trivial_area(spec: CylinderSpec) -> Option<f64> {
    if spec.r > 1.0 + spec.a + BOUNDARY_TOL {
        return Some(FULL_SPHERE);
    }
    if spec.r < spec.a - 1.0 - BOUNDARY_TOL || spec.r <= BOUNDARY_TOL {
        return Some(0.0);
    }
    if (spec.r - (1.0 + spec.a)).abs() <= BOUNDARY_TOL {
        return Some(FULL_SPHERE);
    }
    if spec.a > 1.0 && (spec.r - (spec.a - 1.0)).abs() <= BOUNDARY_TOL {
        return Some(0.0);
    }
    None
}

/// S₀ in closed form for cylinders through the poles (`r = a`).
pub fn pole_orbit_s0(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("pole orbit needs a > 0, got {a}")));
    }
    if a <= 0.5 {
        Ok(2.0 * elliptic_e(4.0 * a * a)?)
    } else {
        let m = 1.0 / (4.0 * a * a);
        Ok(4.0 * a * (elliptic_e(m)? - (1.0 - m) * elliptic_k(m)?))
    }
}

/// Area enclosed by the orbit through the poles, `r = a`.
pub fn pole_orbit_area(a: f64) -> Result<f64> {
    Ok(TAU - 2.0 * pole_orbit_s0(a)?)
}

/// Area enclosed by the figure-eight separatrix `r = 1 − a`:
/// `8 arcsin √(1 − a) − 8 √(a(1 − a))`.
pub fn separatrix_area(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("separatrix requires 0 < a < 1, got {a}")));
    }
    Ok(8.0 * (1.0 - a).sqrt().asin() - 8.0 * (a * (1.0 - a)).sqrt())
}

/// Closed-form area when one exists (`r = a` or `r = 1 − a`).
pub fn area_closed_form(spec: CylinderSpec) -> Option<AreaResult> {
    let CylinderSpec { a, r } = spec;
    if a > 0.0 && (r - a).abs() <= BOUNDARY_TOL {
        let s0 = pole_orbit_s0(a).ok()?;
        return Some(AreaResult {
            s_inside: TAU - 2.0 * s0,
            s0: Some(s0),
            method: AreaMethod::ClosedForm,
            est_error: 0.0,
        });
    }
    if a > 0.0 && a < 1.0 && (r - (1.0 - a)).abs() <= BOUNDARY_TOL {
        let s = separatrix_area(a).ok()?;
        let s0 = if r > a { (FULL_SPHERE - s) / 4.0 } else { -s / 4.0 };
        return Some(AreaResult { s_inside: s, s0: Some(s0), method: AreaMethod::ClosedForm, est_error: 0.0 });
    }
    None
}

/// Area by quadrature regardless of whether a closed form exists.
pub fn area_quadrature(spec: CylinderSpec) -> Result<AreaResult> {
    if let Some(s) = trivial_area(spec) {
        return Ok(AreaResult { s_inside: s, s0: None, method: AreaMethod::ClosedForm, est_error: 0.0 });
    }
    let q = area_s0_quadrature(spec)?;
    let s = area_from_s0(spec, q.value);
    if !(-1e-9..=FULL_SPHERE + 1e-9).contains(&s) {
        return Err(Error::Numerical(format!("enclosed area {s} outside [0, 4π] for a = {}, r = {}", spec.a, spec.r)));
    }
    let weight = if (spec.r - spec.a).abs() <= BOUNDARY_TOL { 2.0 } else { 4.0 };
    Ok(AreaResult {
        s_inside: s.clamp(0.0, FULL_SPHERE),
        s0: Some(q.value),
        method: AreaMethod::Quadrature,
        est_error: weight * q.est_error,
    })
}

/// Area enclosed by the curve of `spec`, using a closed form where one exists.
pub fn area(spec: CylinderSpec) -> Result<AreaResult> {
    if let Some(s) = trivial_area(spec) {
        return Ok(AreaResult { s_inside: s, s0: None, method: AreaMethod::ClosedForm, est_error: 0.0 });
    }
    if let Some(r) = area_closed_form(spec) {
        return Ok(r);
    }
    area_quadrature(spec)
}

/// Areas of the individual connected components of the inside region.
pub fn loop_areas(spec: CylinderSpec) -> Result<Vec<f64>> {
    let s = area(spec)?.s_inside;
    Ok(match classify(spec) {
        CurveClass::TwoLoops | CurveClass::FigureEight | CurveClass::VivianiCurve => {
            vec![0.5 * s, 0.5 * s]
        }
        _ => vec![s],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaRow {
    pub a: f64,
    pub r: f64,
    pub s: f64,
    pub s_over_4pi: f64,
    pub method: AreaMethod,
    pub est_error: f64,
}

/// Enclosed area over a grid of radii at fixed displacement.
pub fn area_vs_radius_dataset(a: f64, r_grid: &[f64]) -> Result<Vec<AreaRow>> {
    use rayon::prelude::*;
    r_grid
        .par_iter()
        .map(|&r| {
            let spec = CylinderSpec::new(a, r)?;
            let res = area(spec)?;
            Ok(AreaRow {
                a: spec.a,
                r,
                s: res.s_inside,
                s_over_4pi: res.s_inside / FULL_SPHERE,
                method: res.method,
                est_error: res.est_error,
            })
        })
        .collect()
}
