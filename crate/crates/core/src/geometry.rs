//! Intersection curves of the unit sphere with a cylinder parallel to the
//! z-axis, `(x − a)² + y² = r²` (generalized Viviani curves).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for boundary cases in [`classify`] and for on-sphere checks.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Point in Cartesian coordinates. Constructors that place points on the unit
/// sphere keep `|p| = 1` to round-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// From polar angle `theta` (measured from +z) and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(st * cp, st * sp, ct)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Euclidean (chord) distance.
    pub fn distance(&self, o: &Self) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }

    /// Great-circle angle between the directions of two points.
    pub fn angle_to(&self, o: &Self) -> f64 {
        let cross = ((self.y * o.z - self.z * o.y).powi(2)
            + (self.z * o.x - self.x * o.z).powi(2)
            + (self.x * o.y - self.y * o.x).powi(2))
        .sqrt();
        cross.atan2(self.dot(o))
    }

    pub fn polar_angle(&self) -> f64 {
        self.x.hypot(self.y).atan2(self.z)
    }

    pub fn azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_on_unit_sphere(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

/// Cylinder of radius `r` whose axis is parallel to z and passes through
/// `(a, 0)`. Negative displacements are mirrored to `a ≥ 0` (x → −x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub a: f64,
    pub r: f64,
}

impl CylinderSpec {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !a.is_finite() || !r.is_finite() {
            return Err(Error::domain(format!("non-finite cylinder (a = {a}, r = {r})")));
        }
        if r < 0.0 {
            return Err(Error::domain(format!("cylinder radius must be >= 0, got {r}")));
        }
        Ok(Self { a: a.abs(), r })
    }

    /// The original Viviani cylinder, a = r = 1/2.
    pub const fn viviani() -> Self {
        Self { a: 0.5, r: 0.5 }
    }

    pub fn class(&self) -> CurveClass {
        classify(*self)
    }

    /// True when the cylinder meets the sphere, `a − 1 ≤ r ≤ 1 + a`.
    pub fn intersects_sphere(&self) -> bool {
        self.r <= 1.0 + self.a + BOUNDARY_TOL && self.r >= self.a - 1.0 - BOUNDARY_TOL
    }

    /// Signed cylinder residual `(x − a)² + y² − r²`.
    pub fn residual(&self, p: &SpherePoint) -> f64 {
        (p.x - self.a).powi(2) + p.y * p.y - self.r * self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveClass {
    /// Two disjoint loops, one per hemisphere (`0 ≤ a < 1`, `0 < r < 1 − a`).
    TwoLoops,
    /// One loop crossing the equator (`|1 − a| < r < 1 + a`).
    SingleLoop,
    /// `r = 1 − a`, `a ≠ 1/2`: figure eight with a double point at (1, 0, 0).
    FigureEight,
    /// `r = a = 1/2`.
    VivianiCurve,
    /// Curve degenerates to isolated points (`r = 0`, `r = 1 + a`, or `r = a − 1`).
    PointTangency,
    /// `a = 0`, `r = 1`: the equator.
    GreatCircleLimit,
    Empty,
}

impl CurveClass {
    pub fn name(&self) -> &'static str {
        match self {
            CurveClass::TwoLoops => "TwoLoops",
            CurveClass::SingleLoop => "SingleLoop",
            CurveClass::FigureEight => "FigureEight",
            CurveClass::VivianiCurve => "VivianiCurve",
            CurveClass::PointTangency => "PointTangency",
            CurveClass::GreatCircleLimit => "GreatCircleLimit",
            CurveClass::Empty => "Empty",
        }
    }
}

impl std::fmt::Display for CurveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= BOUNDARY_TOL
}

pub fn classify(spec: CylinderSpec) -> CurveClass {
    let CylinderSpec { a, r } = spec;
    if r > 1.0 + a + BOUNDARY_TOL || r < a - 1.0 - BOUNDARY_TOL {
        return CurveClass::Empty;
    }
    if near(a, 0.0) && near(r, 1.0) {
        return CurveClass::GreatCircleLimit;
    }
    if near(r, 0.0) || near(r, 1.0 + a) || (a > 1.0 && near(r, a - 1.0)) {
        return CurveClass::PointTangency;
    }
    if a < 1.0 && near(r, 1.0 - a) {
        if near(a, 0.5) {
            return CurveClass::VivianiCurve;
        }
        return CurveClass::FigureEight;
    }
    if r < 1.0 - a {
        CurveClass::TwoLoops
    } else {
        CurveClass::SingleLoop
    }
}

/// cos φ₀ = (1 − a² − r²) / (2ar); the base-circle angle where the curve meets z = 0.
fn gap_cosine(spec: CylinderSpec) -> f64 {
    (1.0 - spec.a * spec.a - spec.r * spec.r) / (2.0 * spec.a * spec.r)
}

/// Half-width φ₀ of the base-circle arc `|φ| < φ₀` that lies outside the sphere.
///
/// `Some` for single-loop curves and the tangent cases (where φ₀ is 0 or π),
/// `None` when the whole base circle lies inside the sphere or there is no
/// curve.
pub fn phi_gap(spec: CylinderSpec) -> Result<Option<f64>> {
    match classify(spec) {
        CurveClass::SingleLoop | CurveClass::FigureEight | CurveClass::VivianiCurve => {}
        CurveClass::PointTangency if spec.r > 0.0 => {}
        _ => return Ok(None),
    }
    let c = gap_cosine(spec);
    if !(-1.0 - BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&c) {
        return Err(Error::Numerical(format!("gap cosine {c} outside [-1, 1] for a = {}, r = {}", spec.a, spec.r)));
    }
    Ok(Some(c.clamp(-1.0, 1.0).acos()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hemisphere {
    North,
    South,
}

impl Hemisphere {
    pub fn sign(self) -> f64 {
        match self {
            Hemisphere::North => 1.0,
            Hemisphere::South => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Hemisphere::North => "north",
            Hemisphere::South => "south",
        }
    }
}

/// Lifts the base-circle point at angle `phi` to the sphere:
/// `(a + r cos φ, r sin φ, ±√(1 − x² − y²))`.
pub fn curve_point(spec: CylinderSpec, phi: f64, hemisphere: Hemisphere) -> Result<SpherePoint> {
    let x = spec.a + spec.r * phi.cos();
    let y = spec.r * phi.sin();
    let rad = 1.0 - x * x - y * y;
    if rad < -BOUNDARY_TOL {
        let range = match phi_gap(spec) {
            Ok(Some(p0)) => format!("admissible phi is [{p0}, {}]", TAU - p0),
            _ => "the curve is empty".to_string(),
        };
        return Err(Error::domain(format!("phi = {phi} lifts off the sphere (1 - x^2 - y^2 = {rad:e}); {range}")));
    }
    Ok(SpherePoint::new(x, y, hemisphere.sign() * rad.max(0.0).sqrt()))
}

/// The original Viviani curve parametrized by azimuth:
/// `(cos²φ, cos φ sin φ, sin φ)`.
pub fn viviani_point(phi_az: f64) -> SpherePoint {
    let (s, c) = phi_az.sin_cos();
    SpherePoint::new(c * c, c * s, s)
}

/// Residual of the projection onto the (y, z) plane,
/// `(z² − 1 + a² + r²)² + 4a²y² − 4a²r²`; zero on the curve.
pub fn yz_projection_residual(spec: CylinderSpec, p: &SpherePoint) -> f64 {
    let CylinderSpec { a, r } = spec;
    (p.z * p.z - 1.0 + a * a + r * r).powi(2) + 4.0 * a * a * p.y * p.y - 4.0 * a * a * r * r
}

/// Focal points of the curve viewed as a euclidean spherical ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalPoints {
    pub plus: SpherePoint,
    pub minus: SpherePoint,
    /// Half of the constant chord-distance sum.
    pub c: f64,
}

/// `x_F = a/(1 + r)`, `z_F = ±√(1 − x_F²)`, `c² = z_F² a / x_F`.
///
/// The constant-sum property holds for `a ≤ 1`; for `a > 1` the formula is
/// evaluated but the property is not guaranteed.
pub fn focal_points(spec: CylinderSpec) -> Result<FocalPoints> {
    let CylinderSpec { a, r } = spec;
    let xf = a / (1.0 + r);
    if !(xf > 0.0) {
        return Err(Error::domain("focal points are degenerate for a = 0"));
    }
    if xf > 1.0 {
        return Err(Error::domain(format!("focal x = {xf} lies outside the sphere")));
    }
    let zf = (1.0 - xf * xf).sqrt();
    Ok(FocalPoints {
        plus: SpherePoint::new(xf, 0.0, zf),
        minus: SpherePoint::new(xf, 0.0, -zf),
        c: (zf * zf * a / xf).sqrt(),
    })
}

/// One emitted curve sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub phi: f64,
    pub point: SpherePoint,
    pub hemisphere: Hemisphere,
    /// Connected component (0 or 1 for two-loop curves, 0 otherwise).
    pub loop_index: usize,
}

/// Samples the intersection curve with `n` points per branch.
///
/// Single-loop curves run over the northern branch for φ from φ₀ to 2π − φ₀
/// and return along the southern branch, so consecutive samples trace one
/// closed loop. Two-loop curves emit the northern loop, then the southern
/// loop, each for φ from 0 to 2π.
pub fn sample_curve(spec: CylinderSpec, n: usize) -> Result<Vec<CurveSample>> {
    let n = n.max(2);
    let class = classify(spec);
    // Open branches end at turning points where z ~ √(φ − φ₀); cosine spacing
    // keeps the arc-length steps even there.
    let branch = |lo: f64, hi: f64, h: Hemisphere, li: usize, rev: bool| -> Result<Vec<CurveSample>> {
        let open = class != CurveClass::TwoLoops && class != CurveClass::GreatCircleLimit;
        (0..n)
            .map(|i| {
                let mut t = i as f64 / (n - 1) as f64;
                if open {
                    t = 0.5 * (1.0 - (PI * t).cos());
                }
                let phi = if rev { hi - t * (hi - lo) } else { lo + t * (hi - lo) };
                Ok(CurveSample { phi, point: curve_point(spec, phi, h)?, hemisphere: h, loop_index: li })
            })
            .collect()
    };
    match class {
        CurveClass::Empty => {
            Err(Error::domain(format!("cylinder a = {}, r = {} does not meet the unit sphere", spec.a, spec.r)))
        }
        CurveClass::TwoLoops => {
            let mut out = branch(0.0, TAU, Hemisphere::North, 0, false)?;
            out.extend(branch(0.0, TAU, Hemisphere::South, 1, false)?);
            Ok(out)
        }
        CurveClass::GreatCircleLimit => branch(0.0, TAU, Hemisphere::North, 0, false),
        CurveClass::PointTangency => {
            if spec.r == 0.0 || spec.r < BOUNDARY_TOL {
                let z = (1.0 - spec.a * spec.a).max(0.0).sqrt();
                let mut out = vec![CurveSample {
                    phi: 0.0,
                    point: SpherePoint::new(spec.a, 0.0, z),
                    hemisphere: Hemisphere::North,
                    loop_index: 0,
                }];
                if z > 0.0 {
                    out.push(CurveSample {
                        phi: 0.0,
                        point: SpherePoint::new(spec.a, 0.0, -z),
                        hemisphere: Hemisphere::South,
                        loop_index: 1,
                    });
                }
                Ok(out)
            } else {
                let phi = if spec.r > spec.a { PI } else { 0.0 };
                Ok(vec![CurveSample {
                    phi,
                    point: curve_point(spec, phi, Hemisphere::North)?,
                    hemisphere: Hemisphere::North,
                    loop_index: 0,
                }])
            }
        }
        CurveClass::SingleLoop | CurveClass::FigureEight | CurveClass::VivianiCurve => {
            let p0 = phi_gap(spec)?.unwrap_or(0.0);
            let mut out = branch(p0, TAU - p0, Hemisphere::North, 0, false)?;
            out.extend(branch(p0, TAU - p0, Hemisphere::South, 0, true)?);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(a: f64, r: f64) -> CylinderSpec {
        CylinderSpec::new(a, r).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(spec(0.25, 0.6)), CurveClass::TwoLoops);
        assert_eq!(classify(spec(1.25, 0.8)), CurveClass::SingleLoop);
        assert_eq!(classify(spec(0.7, 0.3)), CurveClass::FigureEight);
        assert_eq!(classify(spec(0.5, 0.5)), CurveClass::VivianiCurve);
        assert_eq!(classify(spec(2.0, 0.5)), CurveClass::Empty);
        assert_eq!(classify(spec(1.5, 2.6)), CurveClass::Empty);
        assert_eq!(classify(spec(0.3, 1.3)), CurveClass::PointTangency);
        assert_eq!(classify(spec(0.0, 1.0)), CurveClass::GreatCircleLimit);
        assert_eq!(classify(spec(0.0, 0.4)), CurveClass::TwoLoops);
    }

    #[test]
    fn negative_displacement_mirrors() {
        assert_eq!(spec(-0.25, 0.6), spec(0.25, 0.6));
        assert!(CylinderSpec::new(0.2, -0.1).is_err());
    }

    #[test]
    fn gap_angle() {
        let p0 = phi_gap(spec(1.25, 0.8)).unwrap().unwrap();
        assert_abs_diff_eq!(p0, (-0.60125f64).acos(), epsilon = 1e-15);
        assert_abs_diff_eq!(p0, 2.215_86, epsilon = 1e-5);
        let end = curve_point(spec(1.25, 0.8), p0, Hemisphere::North).unwrap();
        assert_abs_diff_eq!(end.z, 0.0, epsilon = 1e-7);
        assert!(end.is_on_unit_sphere(1e-12));
        assert_eq!(phi_gap(CylinderSpec::viviani()).unwrap(), Some(0.0));
        assert_eq!(phi_gap(spec(0.25, 0.6)).unwrap(), None);
    }

    #[test]
    fn curve_point_examples() {
        let v = CylinderSpec::viviani();
        let p = curve_point(v, 0.0, Hemisphere::North).unwrap();
        assert_abs_diff_eq!(p.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-15);
        let p = curve_point(v, PI, Hemisphere::North).unwrap();
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 1.0, epsilon = 1e-15);
        let p = curve_point(spec(0.25, 0.6), PI / 2.0, Hemisphere::North).unwrap();
        assert_abs_diff_eq!(p.x, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.5775f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.759_93, epsilon = 1e-5);
        let e = curve_point(spec(1.25, 0.8), 0.5, Hemisphere::North).unwrap_err();
        assert!(e.to_string().contains("admissible phi"));
    }

    #[test]
    fn viviani_parametrizations_agree() {
        let p = viviani_point(PI / 4.0);
        assert_abs_diff_eq!(p.x, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.5f64.sqrt(), epsilon = 1e-15);
        for i in 1..100 {
            let phi_az = -PI / 2.0 + i as f64 * PI / 100.0;
            let h = if phi_az >= 0.0 { Hemisphere::North } else { Hemisphere::South };
            let q = curve_point(CylinderSpec::viviani(), 2.0 * phi_az, h).unwrap();
            let p = viviani_point(phi_az);
            assert!(p.distance(&q) < 1e-12, "phi_az = {phi_az}");
            // azimuth equals latitude
            assert_abs_diff_eq!(p.azimuth(), PI / 2.0 - p.polar_angle(), epsilon = 1e-12);
        }
    }

    #[test]
    fn yz_residual() {
        let v = CylinderSpec::viviani();
        assert_abs_diff_eq!(yz_projection_residual(v, &SpherePoint::new(1.0, 0.0, 0.0)), 0.0);
        let off = SpherePoint::new(0.0, 0.6, 0.8);
        assert!(yz_projection_residual(v, &off).abs() > 1e-3);
        for s in [spec(0.25, 0.6), spec(1.25, 0.8), spec(0.7, 0.3), v] {
            for smp in sample_curve(s, 200).unwrap() {
                assert!(yz_projection_residual(s, &smp.point).abs() < 1e-10);
            }
        }
    }

    fn check_constant_sum(s: CylinderSpec) -> f64 {
        let f = focal_points(s).unwrap();
        sample_curve(s, 50)
            .unwrap()
            .iter()
            .map(|c| (c.point.distance(&f.plus) + c.point.distance(&f.minus) - 2.0 * f.c).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn focal_points_viviani() {
        let f = focal_points(CylinderSpec::viviani()).unwrap();
        assert_abs_diff_eq!(f.plus.x, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.plus.z, 8f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.minus.z, -(8f64.sqrt()) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.c, 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert!(check_constant_sum(CylinderSpec::viviani()) < 1e-8);
    }

    #[test]
    fn focal_constant_sum() {
        let s = spec(0.25, 0.6);
        assert_abs_diff_eq!(focal_points(s).unwrap().plus.x, 0.156_25, epsilon = 1e-15);
        assert!(check_constant_sum(s) < 1e-8);
        for (a, r) in [(0.1, 0.3), (0.4, 0.9), (0.7, 0.3), (0.9, 1.5), (1.0, 1.2)] {
            assert!(check_constant_sum(spec(a, r)) < 1e-8, "a = {a}, r = {r}");
        }
        assert!(focal_points(spec(0.0, 0.5)).is_err());
    }

    #[test]
    fn confocal_family() {
        // Same focus x_F = a/(1+r) = 1/3 but different a, r give different c.
        let c1 = focal_points(spec(0.4, 0.2)).unwrap();
        let c2 = focal_points(spec(0.6, 0.8)).unwrap();
        let v = focal_points(CylinderSpec::viviani()).unwrap();
        assert!(c1.plus.distance(&v.plus) < 1e-15 && c2.plus.distance(&v.plus) < 1e-15);
        assert!(c1.c < v.c && v.c < c2.c);
        assert!(check_constant_sum(spec(0.4, 0.2)) < 1e-8);
        assert!(check_constant_sum(spec(0.6, 0.8)) < 1e-8);
    }

    #[test]
    fn figure_eight_double_point() {
        let s = spec(0.7, 0.3);
        let n = curve_point(s, 0.0, Hemisphere::North).unwrap();
        let so = curve_point(s, 0.0, Hemisphere::South).unwrap();
        assert!(n.distance(&SpherePoint::new(1.0, 0.0, 0.0)) < 1e-12);
        assert!(so.distance(&SpherePoint::new(1.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn sampling_order_closes_single_loop() {
        let s = spec(1.25, 0.8);
        let pts = sample_curve(s, 100).unwrap();
        assert_eq!(pts.len(), 200);
        let jump = pts.windows(2).map(|w| w[0].point.distance(&w[1].point)).fold(0.0, f64::max);
        assert!(jump < 0.1);
        assert!(pts[0].point.distance(&pts[199].point) < 1e-6);
    }

    proptest! {
        #[test]
        fn curve_points_on_sphere_and_cylinder(a in 0.0f64..3.0, t in 0.0f64..1.0, phi in 0.0f64..TAU, north in any::<bool>()) {
            let lo = (a - 1.0).max(0.0);
            let r = lo + t * (1.0 + a - lo);
            let s = spec(a, r);
            let h = if north { Hemisphere::North } else { Hemisphere::South };
            if let Ok(p) = curve_point(s, phi, h) {
                prop_assert!(p.is_on_unit_sphere(1e-12));
                prop_assert!(s.residual(&p).abs() < 1e-12);
            }
        }

        #[test]
        fn gap_consistent_with_class(a in 0.0f64..3.0, r in 0.0f64..4.0) {
            let s = spec(a, r);
            let gap = phi_gap(s).unwrap();
            let c = classify(s);
            let tangent = matches!(c, CurveClass::FigureEight | CurveClass::VivianiCurve)
                || (c == CurveClass::PointTangency && r > 0.0);
            prop_assert_eq!(gap.is_some(), c == CurveClass::SingleLoop || tangent);
        }
    }
}
