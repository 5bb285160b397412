//! Deterministic motion simulator.
//!
//! Builds world-frame module orientations from target joint angles by
//! inverting the joint-angle pipeline. The inversion uses the body-frame form
//! of every reference rotation (`q ⊗ R_axis(θ)`) rather than the world-axis
//! construction the forward path uses, so the two routes stay independent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calib::CalibStatus;
use crate::jcs::{AngleChannel, AxialRotation, JcsConfig, JointAngles, SideAngles};
use crate::quat::{EulerConvention, EulerTriple, UnitQuat, Vec3, EULER_SINGULAR_BAND_DEG};
use crate::retarget::{RetargetSet, SensorFrameSet};
use crate::segment::{PerSegment, SegmentId, Side};

pub const FRAME_RATE_RANGE_HZ: (f64, f64) = (10.0, 200.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScriptError {
    #[error("frame rate {0} Hz outside 10..=200")]
    FrameRate(f64),
    #[error("segment {index}: duration must be positive")]
    Duration { index: usize },
    #[error("segment {index}: {channel} range reaches an Euler singularity")]
    Singular { index: usize, channel: String },
    #[error("segment {index}: {channel} value {value} outside the representable range")]
    OutOfRange { index: usize, channel: String, value: f64 },
    #[error("unknown angle channel {0:?}")]
    UnknownChannel(String),
    #[error("invalid quaternion for {0}")]
    BadQuat(String),
    #[error("script syntax: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Easing {
    #[default]
    Linear,
    /// Smoothstep `3u² − 2u³`.
    Smooth,
}

impl Easing {
    pub fn apply(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Easing::Linear => u,
            Easing::Smooth => u * u * (3.0 - 2.0 * u),
        }
    }
}

/// One ramp of one joint angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptSegment {
    pub channel: AngleChannel,
    pub start_deg: f64,
    pub end_deg: f64,
    pub duration_ms: u64,
    pub easing: Easing,
    /// Explicit start time; `None` starts when the previous segment ends.
    pub start_ms: Option<u64>,
}

impl ScriptSegment {
    pub fn new(channel: AngleChannel, start_deg: f64, end_deg: f64, duration_ms: u64) -> Self {
        ScriptSegment { channel, start_deg, end_deg, duration_ms, easing: Easing::Linear, start_ms: None }
    }

    pub fn smooth(mut self) -> Self {
        self.easing = Easing::Smooth;
        self
    }

    pub fn starting_at(mut self, start_ms: u64) -> Self {
        self.start_ms = Some(start_ms);
        self
    }
}

/// Calibration levels over time: each sensor climbs 0→3 and reaches 3 at
/// its ready time. `None` never calibrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CalibRamp {
    pub gyro_ready_ms: Option<u64>,
    pub accel_ready_ms: Option<u64>,
    pub mag_ready_ms: Option<u64>,
}

impl CalibRamp {
    pub fn all_ready_at(t_ms: u64) -> Self {
        CalibRamp { gyro_ready_ms: Some(t_ms), accel_ready_ms: Some(t_ms), mag_ready_ms: Some(t_ms) }
    }

    pub fn never() -> Self {
        CalibRamp::default()
    }

    fn level(ready: Option<u64>, t_ms: u64) -> u8 {
        match ready {
            None => 0,
            Some(0) => 3,
            Some(r) if t_ms >= r => 3,
            Some(r) => ((3 * t_ms) / r) as u8,
        }
    }

    pub fn status(&self, t_ms: u64) -> CalibStatus {
        CalibStatus {
            gyro: Self::level(self.gyro_ready_ms, t_ms),
            accel: Self::level(self.accel_ready_ms, t_ms),
            mag: Self::level(self.mag_ready_ms, t_ms),
        }
    }
}

/// A scripted motion: timed joint-angle ramps over a neutral base pose.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionScript {
    pub frame_rate_hz: f64,
    /// Carrying angle of both elbows whenever no segment drives it.
    pub carrying_deg: f64,
    /// World orientation of the back module.
    pub back: UnitQuat,
    /// Sensor-on-segment misalignment, post-multiplied onto each module.
    pub mounting_offsets: PerSegment<UnitQuat>,
    pub segments: Vec<ScriptSegment>,
    /// Quiet time appended after the last segment.
    pub hold_ms: u64,
    pub calibration: Option<CalibRamp>,
    pub jcs: JcsConfig,
}

impl Default for MotionScript {
    fn default() -> Self {
        MotionScript {
            frame_rate_hz: 50.0,
            carrying_deg: 0.0,
            back: UnitQuat::IDENTITY,
            mounting_offsets: PerSegment::splat(UnitQuat::IDENTITY),
            segments: Vec::new(),
            hold_ms: 0,
            calibration: None,
            jcs: JcsConfig::default(),
        }
    }
}

/// What the forward pipeline should recover from a synthesized frame set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    /// Anatomical angles the script asked for (before mounting offsets).
    pub angles: JointAngles,
    /// Avatar rotations of the emitted frames.
    pub retarget: RetargetSet,
}

impl MotionScript {
    pub fn new(frame_rate_hz: f64) -> Self {
        MotionScript { frame_rate_hz, ..Default::default() }
    }

    pub fn with_segment(mut self, s: ScriptSegment) -> Self {
        self.segments.push(s);
        self
    }

    /// Resolved `(start, end)` times of each segment.
    pub fn timeline(&self) -> Vec<(u64, u64)> {
        let mut cursor = 0u64;
        self.segments
            .iter()
            .map(|s| {
                let start = s.start_ms.unwrap_or(cursor);
                let end = start + s.duration_ms;
                cursor = end;
                (start, end)
            })
            .collect()
    }

    pub fn duration_ms(&self) -> u64 {
        self.timeline().iter().map(|&(_, e)| e).max().unwrap_or(0) + self.hold_ms
    }

    /// Frame timestamps from 0 through the script duration.
    pub fn frame_times(&self) -> impl Iterator<Item = u64> + '_ {
        let period = 1000.0 / self.frame_rate_hz;
        let end = self.duration_ms();
        (0u64..)
            .map(move |k| (k as f64 * period).round() as u64)
            .take_while(move |&t| t <= end)
    }

    pub fn validate(&self) -> Result<(), ScriptError> {
        let (lo, hi) = FRAME_RATE_RANGE_HZ;
        if !(lo..=hi).contains(&self.frame_rate_hz) {
            return Err(ScriptError::FrameRate(self.frame_rate_hz));
        }
        let base = self.base_angles();
        let check = |index, channel: AngleChannel, lo: f64, hi: f64| -> Result<(), ScriptError> {
            use crate::jcs::Joint::*;
            let name = channel.name();
            let out_of_range = |value| ScriptError::OutOfRange { index, channel: name.clone(), value };
            for v in [lo, hi] {
                if !v.is_finite() || !(-180.0..=180.0).contains(&v) {
                    return Err(out_of_range(v));
                }
            }
            match channel.joint {
                ShoulderElevation => {
                    if lo < 0.0 {
                        return Err(out_of_range(lo));
                    }
                    if hi >= 180.0 - EULER_SINGULAR_BAND_DEG {
                        return Err(ScriptError::Singular { index, channel: name });
                    }
                }
                Carrying => {
                    if lo <= -90.0 + EULER_SINGULAR_BAND_DEG || hi >= 90.0 - EULER_SINGULAR_BAND_DEG {
                        return Err(ScriptError::Singular { index, channel: name });
                    }
                }
                _ => {}
            }
            Ok(())
        };
        for side in Side::BOTH {
            let c = AngleChannel::new(side, crate::jcs::Joint::Carrying);
            check(usize::MAX, c, base.get(c), base.get(c))?;
        }
        for (index, s) in self.segments.iter().enumerate() {
            if s.duration_ms == 0 {
                return Err(ScriptError::Duration { index });
            }
            check(index, s.channel, s.start_deg.min(s.end_deg), s.start_deg.max(s.end_deg))?;
        }
        Ok(())
    }

    fn base_angles(&self) -> JointAngles {
        let mut a = JointAngles::default();
        a.left.carrying = self.carrying_deg;
        a.right.carrying = self.carrying_deg;
        a
    }

    /// Scripted angles at `t_ms`: the latest segment started on each channel
    /// wins, finished segments hold their end value.
    pub fn angles_at(&self, t_ms: u64) -> JointAngles {
        let mut values = self.base_angles().to_array();
        let mut owner_start: [Option<u64>; 12] = [None; 12];
        for (s, (start, end)) in self.segments.iter().zip(self.timeline()) {
            if t_ms < start {
                continue;
            }
            let i = s.channel.index();
            if owner_start[i].is_some_and(|o| o > start) {
                continue;
            }
            owner_start[i] = Some(start);
            let u = if t_ms >= end { 1.0 } else { (t_ms - start) as f64 / s.duration_ms as f64 };
            let k = s.easing.apply(u);
            values[i] = s.start_deg + (s.end_deg - s.start_deg) * k;
        }
        JointAngles::from_parts(values, 0)
    }

    pub fn synthesize(&self, t_ms: u64) -> (SensorFrameSet, GroundTruth) {
        let angles = self.angles_at(t_ms);
        let mut frames = synthesize_pose(&angles, &self.back, &self.mounting_offsets, &self.jcs);
        frames.t_ms = t_ms;
        if let Some(ramp) = &self.calibration {
            frames.calib = PerSegment::splat(ramp.status(t_ms));
        }
        let retarget = RetargetSet::from_tilde(expected_relative(&frames));
        (frames, GroundTruth { angles, retarget })
    }

    /// Sets a mounting twist of `deg` about an arm sensor's longitudinal axis.
    pub fn with_arm_twist(mut self, side: Side, deg: f64) -> Self {
        self.mounting_offsets[side.arm()] = arm_twist(side, deg, &self.jcs);
        self
    }
}

/// The arm module's longitudinal axis in its own frame: the body axis that
/// the flipped frame maps onto the shoulder's Y.
pub fn arm_long_axis(side: Side, cfg: &JcsConfig) -> Vec3 {
    cfg.flip(side.arm()).rotate_vec(Vec3::Y)
}

/// Mounting offset that reads as `deg` of internal-external rotation.
pub fn arm_twist(side: Side, deg: f64, cfg: &JcsConfig) -> UnitQuat {
    let axis = arm_long_axis(side, cfg).normalized().unwrap_or(Vec3::Y);
    UnitQuat::about(axis, deg)
}

fn shoulder_target(a: &SideAngles, mode: AxialRotation) -> UnitQuat {
    let r3 = match mode {
        AxialRotation::PlanePlusAxial => a.shoulder_rotation - a.shoulder_plane,
        AxialRotation::AxialOnly => a.shoulder_rotation,
    };
    UnitQuat::from_euler(&EulerTriple::new(
        EulerConvention::Yzy,
        a.shoulder_plane,
        a.shoulder_elevation,
        r3,
    ))
}

fn elbow_target(a: &SideAngles) -> UnitQuat {
    UnitQuat::from_euler(&EulerTriple::new(EulerConvention::Zxy, a.elbow_flexion, a.carrying, a.pronation))
}

fn arm_ref_angle(side: Side) -> f64 {
    match side {
        Side::Left => 90.0,
        Side::Right => -90.0,
    }
}

/// World-frame module orientations that produce `angles`.
pub fn synthesize_pose(
    angles: &JointAngles,
    back: &UnitQuat,
    offsets: &PerSegment<UnitQuat>,
    cfg: &JcsConfig,
) -> SensorFrameSet {
    let mut quats = PerSegment::splat(UnitQuat::IDENTITY);
    quats.b = *back;
    let back_ref = back.mul(&UnitQuat::about_z(-90.0)).mul(&cfg.flip(SegmentId::B));
    for side in Side::BOTH {
        let a = angles.side(side);
        let arm_flip = cfg.flip(side.arm());
        let arm = back_ref.mul(&shoulder_target(a, cfg.axial_rotation)).mul(&arm_flip.conjugate());
        let arm_ref = arm.mul(&UnitQuat::about_y(arm_ref_angle(side))).mul(&arm_flip);
        let forearm = arm_ref.mul(&elbow_target(a)).mul(&cfg.flip(side.forearm()).conjugate());
        quats[side.arm()] = arm;
        quats[side.forearm()] = forearm;
    }
    let quats = quats.map(|s, q| q.mul(&offsets[s]));
    SensorFrameSet::new(0, quats)
}

/// Relative rotations by the body-frame identities of the retargeting
/// transforms, e.g. `q̂_LATrans = q̂_B ⊗ R_z(180°)`.
pub fn expected_relative(frames: &SensorFrameSet) -> PerSegment<UnitQuat> {
    let q = |s| frames.q(s);
    PerSegment {
        b: UnitQuat::about_y(-90.0),
        la: UnitQuat::about_z(180.0).conjugate().mul(&q(SegmentId::B).conjugate()).mul(&q(SegmentId::LA)),
        ra: q(SegmentId::B).conjugate().mul(&q(SegmentId::RA)),
        lf: UnitQuat::about_y(90.0).conjugate().mul(&q(SegmentId::LA).conjugate()).mul(&q(SegmentId::LF)),
        rf: UnitQuat::about_y(-90.0).conjugate().mul(&q(SegmentId::RA).conjugate()).mul(&q(SegmentId::RF)),
    }
}

/// World-frame orientations whose relative rotations are `tilde`, given the
/// back orientation. Inverse of [`expected_relative`] for the four limbs.
pub fn pose_from_relative(back: &UnitQuat, tilde: &PerSegment<UnitQuat>) -> SensorFrameSet {
    let la = back.mul(&UnitQuat::about_z(180.0)).mul(&tilde.la);
    let ra = back.mul(&tilde.ra);
    let lf = la.mul(&UnitQuat::about_y(90.0)).mul(&tilde.lf);
    let rf = ra.mul(&UnitQuat::about_y(-90.0)).mul(&tilde.rf);
    SensorFrameSet::new(0, PerSegment { b: *back, la, ra, lf, rf })
}

// ---------------------------------------------------------------------------
// Script files (TOML)

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    #[serde(default = "default_rate")]
    frame_rate_hz: f64,
    #[serde(default)]
    carrying_deg: f64,
    #[serde(default)]
    back_yaw_deg: f64,
    #[serde(default)]
    hold_ms: u64,
    #[serde(default)]
    mounting_offsets: BTreeMap<String, [f64; 4]>,
    #[serde(default)]
    arm_twist_deg: BTreeMap<String, f64>,
    #[serde(default)]
    segments: Vec<SegmentFile>,
    #[serde(default)]
    calibration: Option<CalibRamp>,
    #[serde(default)]
    jcs: Option<JcsConfig>,
}

fn default_rate() -> f64 {
    50.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentFile {
    channel: String,
    start_deg: f64,
    end_deg: f64,
    duration_ms: u64,
    #[serde(default)]
    easing: Easing,
    #[serde(default)]
    start_ms: Option<u64>,
}

impl MotionScript {
    /// Parses and validates a TOML motion script.
    pub fn from_toml(text: &str) -> Result<MotionScript, ScriptError> {
        let file: ScriptFile = toml::from_str(text).map_err(|e| ScriptError::Syntax(e.to_string()))?;
        let mut script = MotionScript {
            frame_rate_hz: file.frame_rate_hz,
            carrying_deg: file.carrying_deg,
            back: UnitQuat::about_z(file.back_yaw_deg),
            hold_ms: file.hold_ms,
            calibration: file.calibration,
            jcs: file.jcs.unwrap_or_default(),
            ..Default::default()
        };
        for (name, q) in &file.mounting_offsets {
            let seg: SegmentId = name.parse().map_err(|_| ScriptError::BadQuat(name.clone()))?;
            script.mounting_offsets[seg] =
                UnitQuat::from_array(*q).map_err(|_| ScriptError::BadQuat(name.clone()))?;
        }
        for (name, deg) in &file.arm_twist_deg {
            let side: Side = name.parse().map_err(|_| ScriptError::BadQuat(name.clone()))?;
            script = script.with_arm_twist(side, *deg);
        }
        for s in &file.segments {
            let channel =
                AngleChannel::parse(&s.channel).ok_or_else(|| ScriptError::UnknownChannel(s.channel.clone()))?;
            script.segments.push(ScriptSegment {
                channel,
                start_deg: s.start_deg,
                end_deg: s.end_deg,
                duration_ms: s.duration_ms,
                easing: s.easing,
                start_ms: s.start_ms,
            });
        }
        script.validate()?;
        Ok(script)
    }

    /// Serializes the script. The back orientation is written as a yaw, so
    /// only rotations about world Z survive.
    pub fn to_toml(&self) -> String {
        let file = ScriptFile {
            frame_rate_hz: self.frame_rate_hz,
            carrying_deg: self.carrying_deg,
            back_yaw_deg: {
                let (axis, angle) = self.back.to_axis_angle();
                if axis.z < 0.0 { -angle } else { angle }
            },
            hold_ms: self.hold_ms,
            mounting_offsets: self
                .mounting_offsets
                .iter()
                .filter(|(_, q)| **q != UnitQuat::IDENTITY)
                .map(|(s, q)| (s.to_string(), q.to_array()))
                .collect(),
            arm_twist_deg: BTreeMap::new(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentFile {
                    channel: s.channel.name(),
                    start_deg: s.start_deg,
                    end_deg: s.end_deg,
                    duration_ms: s.duration_ms,
                    easing: s.easing,
                    start_ms: s.start_ms,
                })
                .collect(),
            calibration: self.calibration,
            jcs: (self.jcs != JcsConfig::default()).then_some(self.jcs),
        };
        toml::to_string(&file).unwrap_or_default()
    }
}
