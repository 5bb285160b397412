//! Clinical joint angles in the joint-coordinate-system framework.
//!
//! The back module references both shoulders and each upper-arm module
//! references its forearm. Reference and module frames are flipped 180° about
//! a per-segment body axis ("daggered") so that left and right share one sign
//! convention: flexion, abduction, internal rotation and pronation are
//! positive.
//!
//! Shoulders decompose as intrinsic Y-Z-Y′ (plane, elevation, axial); elbows
//! as intrinsic Z-X-Y (flexion, carrying, pronation).

use serde::{Deserialize, Serialize};

use crate::quat::{wrap_deg, EulerConvention, EulerTriple, UnitQuat, Vec3};
use crate::retarget::{rotate_about_own_axis, SensorFrameSet};
use crate::segment::{PerSegment, SegmentId, Side};

/// Physiological carrying-angle band, degrees (closed).
pub const CARRYING_RANGE_DEG: (f64, f64) = (8.0, 20.0);

/// Returns true when a carrying angle is inside the physiological band.
pub fn carrying_in_range(carrying_deg: f64) -> bool {
    (CARRYING_RANGE_DEG.0..=CARRYING_RANGE_DEG.1).contains(&carrying_deg)
}

/// How the internal-external rotation is read from the Y-Z-Y′ triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxialRotation {
    /// `θ_Y + θ_Y′`.
    #[default]
    PlanePlusAxial,
    /// `θ_Y′` alone.
    AxialOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JcsConfig {
    /// Body axis each segment's frame is flipped about.
    pub dagger_axes: PerSegment<[f64; 3]>,
    pub axial_rotation: AxialRotation,
}

impl Default for JcsConfig {
    fn default() -> Self {
        JcsConfig { dagger_axes: PerSegment::splat([0.0, 0.0, 1.0]), axial_rotation: AxialRotation::default() }
    }
}

impl JcsConfig {
    /// The 180° flip applied to a segment's frames.
    pub fn flip(&self, segment: SegmentId) -> UnitQuat {
        let axis = Vec3::from_array(self.dagger_axes[segment]).normalized().unwrap_or(Vec3::Z);
        UnitQuat::about(axis, 180.0)
    }

    pub fn dagger(&self, q: &UnitQuat, segment: SegmentId) -> UnitQuat {
        q.mul(&self.flip(segment))
    }
}

/// Daggers with the default configuration (flip about the frame's own Z).
pub fn dagger(q: &UnitQuat, segment: SegmentId) -> UnitQuat {
    JcsConfig::default().dagger(q, segment)
}

/// Per-frame references built from the back and upper-arm modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcsRefs {
    pub left_back: UnitQuat,
    pub right_back: UnitQuat,
    pub left_arm: UnitQuat,
    pub right_arm: UnitQuat,
}

impl JcsRefs {
    pub fn back(&self, side: Side) -> UnitQuat {
        match side {
            Side::Left => self.left_back,
            Side::Right => self.right_back,
        }
    }

    pub fn arm(&self, side: Side) -> UnitQuat {
        match side {
            Side::Left => self.left_arm,
            Side::Right => self.right_arm,
        }
    }
}

pub fn make_refs(frames: &SensorFrameSet) -> JcsRefs {
    let back = rotate_about_own_axis(&frames.q(SegmentId::B), Vec3::Z, -90.0);
    JcsRefs {
        left_back: back,
        right_back: back,
        left_arm: rotate_about_own_axis(&frames.q(SegmentId::LA), Vec3::Y, 90.0),
        right_arm: rotate_about_own_axis(&frames.q(SegmentId::RA), Vec3::Y, -90.0),
    }
}

/// Angles for one side, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideAngles {
    pub shoulder_plane: f64,
    pub shoulder_elevation: f64,
    pub shoulder_rotation: f64,
    pub elbow_flexion: f64,
    pub carrying: f64,
    pub pronation: f64,
    pub shoulder_singular: bool,
    pub elbow_singular: bool,
}

impl SideAngles {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.shoulder_plane,
            self.shoulder_elevation,
            self.shoulder_rotation,
            self.elbow_flexion,
            self.carrying,
            self.pronation,
        ]
    }

    /// Whether the internal-external rotation is well defined. At zero
    /// elevation the Y-Z-Y′ sum still is; at 180° it is not.
    pub fn rotation_defined(&self, mode: AxialRotation) -> bool {
        !self.shoulder_singular
            || (mode == AxialRotation::PlanePlusAxial && self.shoulder_elevation < 90.0)
    }
}

/// Twelve clinical angles, left then right.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointAngles {
    pub left: SideAngles,
    pub right: SideAngles,
}

/// Bits of the singular-joint mask, as stored in session files.
pub mod flags {
    pub const LEFT_SHOULDER: u8 = 1;
    pub const RIGHT_SHOULDER: u8 = 2;
    pub const LEFT_ELBOW: u8 = 4;
    pub const RIGHT_ELBOW: u8 = 8;
}

impl JointAngles {
    pub fn side(&self, side: Side) -> &SideAngles {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut SideAngles {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[..6].copy_from_slice(&self.left.to_array());
        out[6..].copy_from_slice(&self.right.to_array());
        out
    }

    pub fn from_parts(values: [f64; 12], mask: u8) -> Self {
        let side = |v: &[f64], sh: u8, el: u8| SideAngles {
            shoulder_plane: v[0],
            shoulder_elevation: v[1],
            shoulder_rotation: v[2],
            elbow_flexion: v[3],
            carrying: v[4],
            pronation: v[5],
            shoulder_singular: mask & sh != 0,
            elbow_singular: mask & el != 0,
        };
        JointAngles {
            left: side(&values[..6], flags::LEFT_SHOULDER, flags::LEFT_ELBOW),
            right: side(&values[6..], flags::RIGHT_SHOULDER, flags::RIGHT_ELBOW),
        }
    }

    pub fn singular_mask(&self) -> u8 {
        let mut m = 0;
        if self.left.shoulder_singular {
            m |= flags::LEFT_SHOULDER;
        }
        if self.right.shoulder_singular {
            m |= flags::RIGHT_SHOULDER;
        }
        if self.left.elbow_singular {
            m |= flags::LEFT_ELBOW;
        }
        if self.right.elbow_singular {
            m |= flags::RIGHT_ELBOW;
        }
        m
    }

    pub fn get(&self, channel: AngleChannel) -> f64 {
        self.to_array()[channel.index()]
    }
}

/// One of the twelve angle columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngleChannel {
    pub side: Side,
    pub joint: Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Joint {
    ShoulderPlane,
    ShoulderElevation,
    ShoulderRotation,
    ElbowFlexion,
    Carrying,
    Pronation,
}

impl Joint {
    pub const ALL: [Joint; 6] = [
        Joint::ShoulderPlane,
        Joint::ShoulderElevation,
        Joint::ShoulderRotation,
        Joint::ElbowFlexion,
        Joint::Carrying,
        Joint::Pronation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Joint::ShoulderPlane => "shoulder_plane",
            Joint::ShoulderElevation => "shoulder_elevation",
            Joint::ShoulderRotation => "shoulder_rotation",
            Joint::ElbowFlexion => "elbow_flexion",
            Joint::Carrying => "carrying",
            Joint::Pronation => "pronation",
        }
    }
}

impl AngleChannel {
    pub const fn new(side: Side, joint: Joint) -> Self {
        AngleChannel { side, joint }
    }

    pub fn index(self) -> usize {
        let base = match self.side {
            Side::Left => 0,
            Side::Right => 6,
        };
        base + Joint::ALL.iter().position(|&j| j == self.joint).unwrap_or(0)
    }

    pub fn all() -> impl Iterator<Item = AngleChannel> {
        Side::BOTH
            .into_iter()
            .flat_map(|s| Joint::ALL.into_iter().map(move |j| AngleChannel::new(s, j)))
    }

    /// Column name such as `L_shoulder_elevation`.
    pub fn name(self) -> String {
        format!("{}_{}", self.side.letter(), self.joint.as_str())
    }

    pub fn parse(s: &str) -> Option<AngleChannel> {
        AngleChannel::all().find(|c| c.name() == s)
    }
}

/// Joint rotation quaternions and the angles read from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointRotations {
    pub left_shoulder: UnitQuat,
    pub right_shoulder: UnitQuat,
    pub left_elbow: UnitQuat,
    pub right_elbow: UnitQuat,
    pub angles: JointAngles,
}

/// Shoulder rotation quaternion for one side: `(ref_B†)* ⊗ q̂_arm†`.
pub fn shoulder_quat(frames: &SensorFrameSet, refs: &JcsRefs, side: Side, cfg: &JcsConfig) -> UnitQuat {
    let reference = cfg.dagger(&refs.back(side), SegmentId::B);
    let arm = cfg.dagger(&frames.q(side.arm()), side.arm());
    reference.conjugate().mul(&arm)
}

/// Elbow rotation quaternion for one side: `(ref_arm†)* ⊗ q̂_forearm†`.
pub fn elbow_quat(frames: &SensorFrameSet, refs: &JcsRefs, side: Side, cfg: &JcsConfig) -> UnitQuat {
    let reference = cfg.dagger(&refs.arm(side), side.arm());
    let forearm = cfg.dagger(&frames.q(side.forearm()), side.forearm());
    reference.conjugate().mul(&forearm)
}

fn shoulder_from_triple(t: &EulerTriple, mode: AxialRotation) -> (f64, f64, f64) {
    let rotation = match mode {
        AxialRotation::PlanePlusAxial => wrap_deg(t.r1 + t.r3),
        AxialRotation::AxialOnly => t.r3,
    };
    (t.r1, t.r2, rotation)
}

/// Fills the shoulder fields of `out` from a shoulder quaternion.
fn read_shoulder(q: &UnitQuat, mode: AxialRotation, out: &mut SideAngles) {
    let t = q.to_euler(EulerConvention::Yzy);
    let (plane, elevation, rotation) = shoulder_from_triple(&t, mode);
    out.shoulder_plane = plane;
    out.shoulder_elevation = elevation;
    out.shoulder_rotation = rotation;
    out.shoulder_singular = t.singular;
}

fn read_elbow(q: &UnitQuat, out: &mut SideAngles) {
    let t = q.to_euler(EulerConvention::Zxy);
    out.elbow_flexion = t.r1;
    out.carrying = t.r2;
    out.pronation = t.r3;
    out.elbow_singular = t.singular;
}

pub fn shoulder_angles(frames: &SensorFrameSet, cfg: &JcsConfig) -> (UnitQuat, UnitQuat, JointAngles) {
    let refs = make_refs(frames);
    let mut angles = JointAngles::default();
    let ls = shoulder_quat(frames, &refs, Side::Left, cfg);
    let rs = shoulder_quat(frames, &refs, Side::Right, cfg);
    read_shoulder(&ls, cfg.axial_rotation, &mut angles.left);
    read_shoulder(&rs, cfg.axial_rotation, &mut angles.right);
    (ls, rs, angles)
}

pub fn elbow_angles(frames: &SensorFrameSet, cfg: &JcsConfig) -> (UnitQuat, UnitQuat, JointAngles) {
    let refs = make_refs(frames);
    let mut angles = JointAngles::default();
    let le = elbow_quat(frames, &refs, Side::Left, cfg);
    let re = elbow_quat(frames, &refs, Side::Right, cfg);
    read_elbow(&le, &mut angles.left);
    read_elbow(&re, &mut angles.right);
    (le, re, angles)
}

/// All four joint quaternions and the twelve angles.
pub fn joint_rotations(frames: &SensorFrameSet, cfg: &JcsConfig) -> JointRotations {
    let refs = make_refs(frames);
    let mut angles = JointAngles::default();
    let ls = shoulder_quat(frames, &refs, Side::Left, cfg);
    let rs = shoulder_quat(frames, &refs, Side::Right, cfg);
    let le = elbow_quat(frames, &refs, Side::Left, cfg);
    let re = elbow_quat(frames, &refs, Side::Right, cfg);
    read_shoulder(&ls, cfg.axial_rotation, &mut angles.left);
    read_shoulder(&rs, cfg.axial_rotation, &mut angles.right);
    read_elbow(&le, &mut angles.left);
    read_elbow(&re, &mut angles.right);
    JointRotations { left_shoulder: ls, right_shoulder: rs, left_elbow: le, right_elbow: re, angles }
}

pub fn joint_angles(frames: &SensorFrameSet, cfg: &JcsConfig) -> JointAngles {
    joint_rotations(frames, cfg).angles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_frames() -> SensorFrameSet {
        SensorFrameSet::new(0, PerSegment::splat(UnitQuat::IDENTITY))
    }

    #[test]
    fn back_reference_with_identity_back() {
        let refs = make_refs(&identity_frames());
        let expected = UnitQuat::from_axis_angle(Vec3::Z, -90.0).unwrap();
        assert!(refs.right_back.same_rotation(&expected, 1e-12));
        assert_eq!(refs.left_back, refs.right_back);
    }

    #[test]
    fn arm_reference_with_identity_arm() {
        let refs = make_refs(&identity_frames());
        let expected = UnitQuat::from_axis_angle(Vec3::Y, 90.0).unwrap();
        assert!(refs.left_arm.same_rotation(&expected, 1e-12));
        let expected = UnitQuat::from_axis_angle(Vec3::Y, -90.0).unwrap();
        assert!(refs.right_arm.same_rotation(&expected, 1e-12));
    }

    #[test]
    fn dagger_is_a_half_turn() {
        let d = dagger(&UnitQuat::IDENTITY, SegmentId::LA);
        assert!(d.distance(&UnitQuat::new(0.0, 0.0, 0.0, 1.0).unwrap()) < 1e-15);
        let q = UnitQuat::about_x(20.0).mul(&UnitQuat::about_y(-35.0));
        for s in SegmentId::ALL {
            assert!(dagger(&dagger(&q, s), s).same_rotation(&q, 1e-12));
        }
    }

    #[test]
    fn carrying_band_is_closed() {
        assert!(carrying_in_range(8.0));
        assert!(carrying_in_range(20.0));
        assert!(!carrying_in_range(7.9));
        assert!(!carrying_in_range(20.1));
    }

    #[test]
    fn channel_names_round_trip() {
        let names: Vec<String> = AngleChannel::all().map(|c| c.name()).collect();
        assert_eq!(names.len(), 12);
        assert_eq!(names[1], "L_shoulder_elevation");
        assert_eq!(names[10], "R_carrying");
        for (i, c) in AngleChannel::all().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(AngleChannel::parse(&c.name()), Some(c));
        }
    }

    #[test]
    fn mask_round_trip() {
        let mut a = JointAngles::default();
        a.left.elbow_singular = true;
        a.right.shoulder_singular = true;
        let m = a.singular_mask();
        assert_eq!(m, flags::LEFT_ELBOW | flags::RIGHT_SHOULDER);
        assert_eq!(JointAngles::from_parts(a.to_array(), m), a);
    }
}
