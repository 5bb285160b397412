//! Motion capture and exergame engine for upper-limb telerehabilitation.
//!
//! Five body-worn inertial modules stream absolute orientation quaternions.
//! This crate turns them into avatar rotations and clinical joint angles, and
//! drives the calibration, mounting, recording, playback, authoring and
//! game workflows around them.

pub mod bridge;
pub mod calib;
pub mod exercise;
pub mod game;
pub mod jcs;
pub mod mount;
pub mod profile;
pub mod quat;
pub mod retarget;
pub mod segment;
pub mod session;
pub mod stream;

pub use calib::{CalibReport, CalibStatus, CalibStep};
pub use jcs::{joint_angles, AngleChannel, JcsConfig, JointAngles, SideAngles};
pub use quat::{EulerConvention, EulerTriple, UnitQuat, Vec3};
pub use retarget::{retarget, RetargetSet, SensorFrameSet};
pub use segment::{PerSegment, SegmentId, Side};

/// Book chapters, compiled so their snippets stay in sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quaternions.md")]
    mod quaternions {}
    #[doc = include_str!("../../../book/src/retargeting.md")]
    mod retargeting {}
    #[doc = include_str!("../../../book/src/joint-angles.md")]
    mod joint_angles {}
    #[doc = include_str!("../../../book/src/calibration-and-mounting.md")]
    mod calibration_and_mounting {}
    #[doc = include_str!("../../../book/src/wire-protocol.md")]
    mod wire_protocol {}
    #[doc = include_str!("../../../book/src/sessions-and-scoring.md")]
    mod sessions_and_scoring {}
    #[doc = include_str!("../../../book/src/exercises.md")]
    mod exercises {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/bridge.md")]
    mod bridge {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
