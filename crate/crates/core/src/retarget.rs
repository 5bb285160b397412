//! Sensor frames to avatar rotations.
//!
//! World-frame module orientations `q̂` become relative right-handed
//! rotations `q̃` (arm relative to back, forearm relative to arm), which are
//! then mapped into the left-handed avatar convention `q́`.
//!
//! The rotated-axis intermediates are evaluated literally: the back's Z (or an
//! arm's Y) axis is carried into the world with [`UnitQuat::rotate_vec`], a
//! rotation about that world axis is built, and it pre-multiplies the module
//! orientation.

use crate::calib::CalibStatus;
use crate::quat::{UnitQuat, Vec3};
use crate::segment::{PerSegment, SegmentId};

/// One time-stamped snapshot of all five modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorFrameSet {
    pub t_ms: u64,
    pub quats: PerSegment<UnitQuat>,
    pub calib: PerSegment<CalibStatus>,
}

impl SensorFrameSet {
    pub fn new(t_ms: u64, quats: PerSegment<UnitQuat>) -> Self {
        SensorFrameSet { t_ms, quats, calib: PerSegment::splat(CalibStatus::FULL) }
    }

    pub fn q(&self, s: SegmentId) -> UnitQuat {
        self.quats[s]
    }

    /// Pre-multiplies every orientation by a common world rotation.
    pub fn rotated_in_world(&self, g: &UnitQuat) -> Self {
        SensorFrameSet { quats: self.quats.map(|_, q| g.mul(q)), ..*self }
    }
}

/// Post-multiplies each module orientation by its correction offset.
pub fn correct(raw: &SensorFrameSet, offsets: &PerSegment<UnitQuat>) -> SensorFrameSet {
    SensorFrameSet { quats: raw.quats.map(|s, q| q.mul(&offsets[s])), ..*raw }
}

/// Avatar-ready rotations for every segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetargetSet {
    /// Relative right-handed rotations.
    pub tilde: PerSegment<UnitQuat>,
    /// Left-handed avatar input, the handedness image of `tilde`.
    pub acute: PerSegment<UnitQuat>,
}

impl RetargetSet {
    pub fn from_tilde(tilde: PerSegment<UnitQuat>) -> Self {
        RetargetSet { tilde, acute: to_left_handed(&tilde) }
    }
}

/// Rotation of `q` by `angle_deg` about the world image of its own `body_axis`.
///
/// Builds `q_axis = q ⊗ q(axis) ⊗ q*`, takes its vector part as the rotation
/// axis and returns `q_axis(angle) ⊗ q`.
pub fn rotate_about_own_axis(q: &UnitQuat, body_axis: Vec3, angle_deg: f64) -> UnitQuat {
    let world_axis = q.rotate_vec(body_axis);
    let world_axis = world_axis.normalized().unwrap_or(body_axis);
    UnitQuat::about(world_axis, angle_deg).mul(q)
}

/// Right-handed relative rotations for all five segments.
pub fn relative_rotations(frames: &SensorFrameSet) -> PerSegment<UnitQuat> {
    let b = frames.q(SegmentId::B);
    let la = frames.q(SegmentId::LA);
    let ra = frames.q(SegmentId::RA);
    let lf = frames.q(SegmentId::LF);
    let rf = frames.q(SegmentId::RF);

    let la_trans = rotate_about_own_axis(&b, Vec3::Z, 180.0);
    let lf_trans = rotate_about_own_axis(&la, Vec3::Y, 90.0);
    let rf_trans = rotate_about_own_axis(&ra, Vec3::Y, -90.0);
    let b_trans = rotate_about_own_axis(&b, Vec3::Y, 90.0);

    PerSegment {
        b: b_trans.inverse().mul(&b),
        la: la_trans.inverse().mul(&la),
        ra: b.inverse().mul(&ra),
        lf: lf_trans.inverse().mul(&lf),
        rf: rf_trans.inverse().mul(&rf),
    }
}

/// Relative rotations plus their left-handed images.
pub fn retarget(frames: &SensorFrameSet) -> RetargetSet {
    RetargetSet::from_tilde(relative_rotations(frames))
}

/// Signed axis permutation: output component `i` is `sign[i] * v[src[i]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRemap {
    src: [usize; 3],
    sign: [i8; 3],
}

impl AxisRemap {
    pub fn for_segment(s: SegmentId) -> AxisRemap {
        match s {
            // [−Vy, Vx, −Vz]
            SegmentId::LA => AxisRemap { src: [1, 0, 2], sign: [-1, 1, -1] },
            // [Vy, −Vx, −Vz]
            SegmentId::RA | SegmentId::B => AxisRemap { src: [1, 0, 2], sign: [1, -1, -1] },
            // [−Vy, Vz, Vx]
            SegmentId::LF => AxisRemap { src: [1, 2, 0], sign: [-1, 1, 1] },
            // [Vy, Vz, −Vx]
            SegmentId::RF => AxisRemap { src: [1, 2, 0], sign: [1, 1, -1] },
        }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let a = v.to_array();
        Vec3::from_array([0, 1, 2].map(|i| f64::from(self.sign[i]) * a[self.src[i]]))
    }

    pub fn invert(&self, v: Vec3) -> Vec3 {
        let a = v.to_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[self.src[i]] = f64::from(self.sign[i]) * a[i];
        }
        Vec3::from_array(out)
    }
}

/// Maps one right-handed rotation into the avatar's left-handed frame:
/// remap the axis, negate the angle.
pub fn segment_to_left_handed(s: SegmentId, q: &UnitQuat) -> UnitQuat {
    let (axis, angle) = q.to_axis_angle();
    UnitQuat::about(AxisRemap::for_segment(s).apply(axis), -angle)
}

/// Inverse of [`segment_to_left_handed`].
pub fn segment_from_left_handed(s: SegmentId, q: &UnitQuat) -> UnitQuat {
    let (axis, angle) = q.to_axis_angle();
    UnitQuat::about(AxisRemap::for_segment(s).invert(axis), -angle)
}

pub fn to_left_handed(tilde: &PerSegment<UnitQuat>) -> PerSegment<UnitQuat> {
    tilde.map(segment_to_left_handed)
}

pub fn from_left_handed(acute: &PerSegment<UnitQuat>) -> PerSegment<UnitQuat> {
    acute.map(segment_from_left_handed)
}
