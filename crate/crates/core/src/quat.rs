//! Unit-quaternion algebra and Euler-angle extraction.
//!
//! Quaternions are stored in `(w, x, y, z)` order. Rotations are active and
//! composed with the Hamilton product, so `p * q` applies `q` first when the
//! result acts on a vector. All angles at this module's public boundary are
//! degrees.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

/// Allowed deviation of a rotation axis from unit length.
pub const AXIS_TOLERANCE: f64 = 1e-9;

/// Norm drift that triggers renormalization after an operation.
const RENORM_DRIFT: f64 = 1e-12;

/// Distance below which two quaternions denote the same rotation.
pub const ROTATION_EQ_TOLERANCE: f64 = 1e-9;

/// Rotation angles below this (degrees) are reported as the null rotation.
const NULL_ROTATION_DEG: f64 = 1e-7;

/// Width of the band (degrees) around an Euler singularity that gets flagged.
pub const EULER_SINGULAR_BAND_DEG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuatError {
    #[error("rotation axis is not unit length (|axis| = {0})")]
    NonUnitAxis(f64),
    #[error("quaternion has zero norm")]
    ZeroNorm,
    #[error("quaternion component is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale(1.0 / n))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A rotation carried as a unit quaternion.
///
/// Every constructor and operation keeps the norm within `1 ± 1e-9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuat {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Default for UnitQuat {
    fn default() -> Self {
        UnitQuat::IDENTITY
    }
}

impl fmt::Display for UnitQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes an arbitrary nonzero 4-tuple.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, QuatError> {
        if !(w.is_finite() && x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(QuatError::NonFinite);
        }
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n == 0.0 {
            return Err(QuatError::ZeroNorm);
        }
        Ok(UnitQuat { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self, QuatError> {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &UnitQuat) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// `(cos θ/2, V sin θ/2)` for a unit `axis` and an angle in degrees.
    pub fn from_axis_angle(axis: Vec3, angle_deg: f64) -> Result<Self, QuatError> {
        let n = axis.norm();
        if !n.is_finite() || (n - 1.0).abs() > AXIS_TOLERANCE {
            return Err(QuatError::NonUnitAxis(n));
        }
        if !angle_deg.is_finite() {
            return Err(QuatError::NonFinite);
        }
        Ok(Self::about(axis, angle_deg))
    }

    /// Rotation about an axis that is already known to be unit length.
    pub(crate) fn about(axis: Vec3, angle_deg: f64) -> Self {
        let half = angle_deg.to_radians() / 2.0;
        let (s, c) = half.sin_cos();
        UnitQuat { w: c, x: axis.x * s, y: axis.y * s, z: axis.z * s }.renormalized()
    }

    pub fn about_x(angle_deg: f64) -> Self {
        Self::about(Vec3::X, angle_deg)
    }
    pub fn about_y(angle_deg: f64) -> Self {
        Self::about(Vec3::Y, angle_deg)
    }
    pub fn about_z(angle_deg: f64) -> Self {
        Self::about(Vec3::Z, angle_deg)
    }

    fn renormalized(self) -> Self {
        let n = self.norm();
        if (n - 1.0).abs() > RENORM_DRIFT {
            UnitQuat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
        } else {
            self
        }
    }

    /// Hamilton product `self ⊗ rhs`.
    pub fn mul(&self, rhs: &UnitQuat) -> UnitQuat {
        let (p0, p) = (self.w, self.vector());
        let (q0, q) = (rhs.w, rhs.vector());
        let w = p0 * q0 - p.dot(q);
        let v = q.scale(p0) + p.scale(q0) + p.cross(q);
        UnitQuat { w, x: v.x, y: v.y, z: v.z }.renormalized()
    }

    pub fn conjugate(&self) -> UnitQuat {
        UnitQuat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// `q* / ‖q‖²`, which for a unit quaternion equals the conjugate.
    pub fn inverse(&self) -> UnitQuat {
        let n2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z;
        let k = 1.0 / n2;
        UnitQuat { w: self.w * k, x: -self.x * k, y: -self.y * k, z: -self.z * k }.renormalized()
    }

    /// Vector part of `q ⊗ (0, v) ⊗ q*`.
    pub fn rotate_vec(&self, v: Vec3) -> Vec3 {
        // Expanded form of the sandwich product: v + 2w(Q×v) + 2Q×(Q×v).
        let q = self.vector();
        let t = q.cross(v).scale(2.0);
        v + t.scale(self.w) + q.cross(t)
    }

    /// Axis and angle with the angle in `[0°, 180°]`. The null rotation
    /// reports the +Z axis.
    pub fn to_axis_angle(&self) -> (Vec3, f64) {
        let c = if self.w < 0.0 { -*self } else { *self };
        let s = c.vector().norm();
        let angle = 2.0 * s.atan2(c.w).to_degrees();
        if angle < NULL_ROTATION_DEG || s == 0.0 {
            return (Vec3::Z, 0.0);
        }
        (c.vector().scale(1.0 / s), angle)
    }

    /// Rotation angle in degrees, `[0°, 180°]`.
    pub fn angle(&self) -> f64 {
        2.0 * self.vector().norm().atan2(self.w.abs()).to_degrees()
    }

    /// Angle of the relative rotation between two orientations, degrees.
    pub fn angle_to(&self, other: &UnitQuat) -> f64 {
        self.conjugate().mul(other).angle()
    }

    /// Double-cover aware equality: `min(‖p−q‖, ‖p+q‖) < tol`.
    pub fn same_rotation(&self, other: &UnitQuat, tol: f64) -> bool {
        self.rotation_distance(other) < tol
    }

    pub fn rotation_distance(&self, other: &UnitQuat) -> f64 {
        let d = |s: f64| {
            ((self.w - s * other.w).powi(2)
                + (self.x - s * other.x).powi(2)
                + (self.y - s * other.y).powi(2)
                + (self.z - s * other.z).powi(2))
            .sqrt()
        };
        d(1.0).min(d(-1.0))
    }

    /// Component-wise distance, without sign folding.
    pub fn distance(&self, other: &UnitQuat) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
    }

    /// Spherical linear interpolation along the shortest arc.
    pub fn slerp(&self, other: &UnitQuat, t: f64) -> UnitQuat {
        let t = t.clamp(0.0, 1.0);
        if t == 0.0 {
            return *self;
        }
        if t == 1.0 {
            return *other;
        }
        let mut b = *other;
        let mut d = self.dot(&b);
        if d < 0.0 {
            b = -b;
            d = -d;
        }
        let a = self.to_array();
        let b = b.to_array();
        let (ka, kb) = if d > 1.0 - 1e-10 {
            (1.0 - t, t)
        } else {
            let omega = d.min(1.0).acos();
            let s = omega.sin();
            (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s)
        };
        let mix = |i: usize| ka * a[i] + kb * b[i];
        UnitQuat::new(mix(0), mix(1), mix(2), mix(3)).unwrap_or(*self)
    }

    /// Composes intrinsic rotations about successive body axes.
    pub fn from_euler(triple: &EulerTriple) -> UnitQuat {
        let [a1, a2, a3] = triple.convention.axes();
        UnitQuat::about(a1, triple.r1)
            .mul(&UnitQuat::about(a2, triple.r2))
            .mul(&UnitQuat::about(a3, triple.r3))
    }

    /// Intrinsic Euler decomposition. Singular configurations put the whole
    /// representable rotation into `r1`, force `r3 = 0`, and set the flag.
    pub fn to_euler(&self, convention: EulerConvention) -> EulerTriple {
        let m = self.matrix();
        let (r1, r2, r3, singular) = match convention {
            EulerConvention::Yzy => {
                let r2 = (m[1][0].hypot(m[1][2])).atan2(m[1][1]).to_degrees();
                if r2 < EULER_SINGULAR_BAND_DEG {
                    (m[0][2].atan2(m[0][0]).to_degrees(), r2, 0.0, true)
                } else if r2 > 180.0 - EULER_SINGULAR_BAND_DEG {
                    (m[0][2].atan2(m[2][2]).to_degrees(), r2, 0.0, true)
                } else {
                    let r1 = m[2][1].atan2(-m[0][1]).to_degrees();
                    let r3 = m[1][2].atan2(m[1][0]).to_degrees();
                    (r1, r2, r3, false)
                }
            }
            EulerConvention::Zxy => {
                let r2 = m[2][1].atan2(m[0][1].hypot(m[1][1])).to_degrees();
                if r2.abs() > 90.0 - EULER_SINGULAR_BAND_DEG {
                    (m[1][0].atan2(m[0][0]).to_degrees(), r2, 0.0, true)
                } else {
                    let r1 = (-m[0][1]).atan2(m[1][1]).to_degrees();
                    let r3 = (-m[2][0]).atan2(m[2][2]).to_degrees();
                    (r1, r2, r3, false)
                }
            }
        };
        EulerTriple { r1: wrap_deg(r1), r2, r3: wrap_deg(r3), convention, singular }
    }

    /// Rotation matrix entries, row-major. Internal helper for extraction.
    fn matrix(&self) -> [[f64; 3]; 3] {
        let UnitQuat { w, x, y, z } = *self;
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }
}

impl std::ops::Mul for UnitQuat {
    type Output = UnitQuat;
    fn mul(self, rhs: UnitQuat) -> UnitQuat {
        UnitQuat::mul(&self, &rhs)
    }
}

impl Neg for UnitQuat {
    type Output = UnitQuat;
    fn neg(self) -> UnitQuat {
        UnitQuat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Wraps an angle into `(−180°, 180°]`.
pub fn wrap_deg(a: f64) -> f64 {
    let mut r = a % 360.0;
    if r <= -180.0 {
        r += 360.0;
    } else if r > 180.0 {
        r -= 360.0;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EulerConvention {
    /// Y, then Z, then Y′ (shoulder).
    Yzy,
    /// Z, then X, then Y (elbow).
    Zxy,
}

impl EulerConvention {
    pub fn axes(self) -> [Vec3; 3] {
        match self {
            EulerConvention::Yzy => [Vec3::Y, Vec3::Z, Vec3::Y],
            EulerConvention::Zxy => [Vec3::Z, Vec3::X, Vec3::Y],
        }
    }

    /// Whether a middle angle lies inside the flagged singular band.
    pub fn is_singular(self, r2: f64) -> bool {
        match self {
            EulerConvention::Yzy => {
                r2 < EULER_SINGULAR_BAND_DEG || r2 > 180.0 - EULER_SINGULAR_BAND_DEG
            }
            EulerConvention::Zxy => r2.abs() > 90.0 - EULER_SINGULAR_BAND_DEG,
        }
    }
}

/// Three successive intrinsic rotations, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerTriple {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub convention: EulerConvention,
    /// Set when `r2` sits on a singularity; `r3` is then forced to zero.
    pub singular: bool,
}

impl EulerTriple {
    pub fn new(convention: EulerConvention, r1: f64, r2: f64, r3: f64) -> Self {
        EulerTriple { r1, r2, r3, convention, singular: convention.is_singular(r2) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_angle_is_identity() {
        let q = UnitQuat::from_axis_angle(Vec3::new(0.6, 0.0, 0.8), 0.0).unwrap();
        assert_eq!(q.to_array(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn half_turn_about_z() {
        let q = UnitQuat::from_axis_angle(Vec3::Z, 180.0).unwrap();
        assert!(close(q.w(), 0.0, 1e-15));
        assert_eq!([q.x(), q.y(), q.z()], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(matches!(
            UnitQuat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 10.0),
            Err(QuatError::NonUnitAxis(_))
        ));
        assert_eq!(UnitQuat::new(0.0, 0.0, 0.0, 0.0), Err(QuatError::ZeroNorm));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(UnitQuat::IDENTITY.conjugate(), UnitQuat::IDENTITY);
        let q = UnitQuat::new(0.5, 0.5, 0.5, 0.5).unwrap();
        assert_eq!(q.conjugate().to_array(), [0.5, -0.5, -0.5, -0.5]);
    }

    #[test]
    fn axis_angle_conventions() {
        assert_eq!(UnitQuat::IDENTITY.to_axis_angle(), (Vec3::Z, 0.0));
        let (axis, angle) = UnitQuat::new(0.0, 1.0, 0.0, 0.0).unwrap().to_axis_angle();
        assert_eq!(axis, Vec3::X);
        assert!(close(angle, 180.0, 1e-12));
    }

    #[test]
    fn euler_identity_and_pure_z() {
        let t = UnitQuat::IDENTITY.to_euler(EulerConvention::Zxy);
        assert_eq!((t.r1, t.r2, t.r3), (0.0, 0.0, 0.0));
        let t = UnitQuat::about_z(30.0).to_euler(EulerConvention::Yzy);
        assert!(close(t.r1, 0.0, 1e-12) && close(t.r2, 30.0, 1e-12) && close(t.r3, 0.0, 1e-12));
        assert!(!t.singular);
    }

    #[test]
    fn yzy_singular_folds_into_first_angle() {
        let q = UnitQuat::about_y(25.0).mul(&UnitQuat::about_y(-5.0));
        let t = q.to_euler(EulerConvention::Yzy);
        assert!(t.singular);
        assert_eq!(t.r3, 0.0);
        assert!(close(t.r1, 20.0, 1e-9));

        let q = UnitQuat::from_euler(&EulerTriple::new(EulerConvention::Yzy, 40.0, 180.0, 10.0));
        let t = q.to_euler(EulerConvention::Yzy);
        assert!(t.singular);
        assert!(UnitQuat::from_euler(&t).same_rotation(&q, 1e-9));
    }

    #[test]
    fn zxy_singular_folds_into_first_angle() {
        for r2 in [90.0, -90.0] {
            let q = UnitQuat::from_euler(&EulerTriple::new(EulerConvention::Zxy, 30.0, r2, 15.0));
            let t = q.to_euler(EulerConvention::Zxy);
            assert!(t.singular);
            assert_eq!(t.r3, 0.0);
            assert!(UnitQuat::from_euler(&t).same_rotation(&q, 1e-9));
        }
    }

    #[test]
    fn slerp_endpoints_and_shortest_arc() {
        let a = UnitQuat::about_x(10.0);
        let b = -UnitQuat::about_x(50.0);
        assert_eq!(a.slerp(&b, 0.0), a);
        assert_eq!(a.slerp(&b, 1.0), b);
        let mid = a.slerp(&b, 0.5);
        assert!(mid.same_rotation(&UnitQuat::about_x(30.0), 1e-12));
        // a ≈ b falls back to nlerp without NaNs
        let m = a.slerp(&a, 0.3);
        assert!(m.same_rotation(&a, 1e-12));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_deg(180.0), 180.0);
        assert_eq!(wrap_deg(-180.0), 180.0);
        assert_eq!(wrap_deg(190.0), -170.0);
        assert_eq!(wrap_deg(-540.0), 180.0);
    }
}
