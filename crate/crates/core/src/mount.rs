//! In-situ mounting guidance for the upper-arm modules.
//!
//! With the subject in the neutral pose, the arm sensor's twist about the
//! humerus reads directly as internal-external rotation. The advisor cues
//! the operator to turn the sensor until that rotation is inside the dead
//! band and the carrying angle is physiological.

use std::fmt;

use crate::jcs::{carrying_in_range, joint_angles, JcsConfig, SideAngles};
use crate::retarget::SensorFrameSet;
use crate::segment::Side;

/// Half-width of the internal-external rotation dead band, degrees.
pub const IE_BAND_DEG: f64 = 5.0;
pub const DEFAULT_CONFIRM_HOLD_MS: u64 = 1000;

const BAND_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cue {
    RotateForward,
    RotateBackward,
    Aligned,
}

/// Cue shown while the arm reads as internally rotated (positive).
pub const INTERNAL_ROTATION_CUE: Cue = Cue::RotateBackward;
/// Cue shown while the arm reads as externally rotated (negative).
pub const EXTERNAL_ROTATION_CUE: Cue = Cue::RotateForward;

impl Cue {
    pub fn as_str(self) -> &'static str {
        match self {
            Cue::RotateForward => "ROTATE_FORWARD",
            Cue::RotateBackward => "ROTATE_BACKWARD",
            Cue::Aligned => "ALIGNED",
        }
    }

    pub fn parse(s: &str) -> Option<Cue> {
        match s {
            "ROTATE_FORWARD" => Some(Cue::RotateForward),
            "ROTATE_BACKWARD" => Some(Cue::RotateBackward),
            "ALIGNED" => Some(Cue::Aligned),
            _ => None,
        }
    }

    /// Sign of the internal-external rotation change the cue asks for.
    pub fn correction_sign(self) -> f64 {
        if self == INTERNAL_ROTATION_CUE {
            -1.0
        } else if self == EXTERNAL_ROTATION_CUE {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for Cue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn ie_in_band(ie_rotation_deg: f64) -> bool {
    ie_rotation_deg.abs() <= IE_BAND_DEG + BAND_EPS
}

/// The cue for one arm. Outside the alignment criteria the direction follows
/// the sign of the rotation; exactly zero counts as external.
pub fn cue_for(ie_rotation_deg: f64, carrying_deg: f64) -> Cue {
    if ie_in_band(ie_rotation_deg) && carrying_in_range(carrying_deg) {
        Cue::Aligned
    } else if ie_rotation_deg > 0.0 {
        INTERNAL_ROTATION_CUE
    } else {
        EXTERNAL_ROTATION_CUE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideMount {
    pub ie_rotation: f64,
    pub carrying: f64,
    pub cue: Cue,
    pub aligned_since_ms: Option<u64>,
}

impl Default for SideMount {
    fn default() -> Self {
        SideMount { ie_rotation: 0.0, carrying: 0.0, cue: cue_for(0.0, 0.0), aligned_since_ms: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MountState {
    pub t_ms: u64,
    pub left: SideMount,
    pub right: SideMount,
    /// Whether any frame has been seen yet.
    pub started: bool,
}

impl MountState {
    pub fn side(&self, side: Side) -> &SideMount {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut SideMount {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

fn next_side(prev: &SideMount, a: &SideAngles, cfg: &JcsConfig, t_ms: u64) -> SideMount {
    if !a.rotation_defined(cfg.axial_rotation) || a.elbow_singular {
        return *prev;
    }
    let cue = cue_for(a.shoulder_rotation, a.carrying);
    let aligned_since_ms = match (cue, prev.aligned_since_ms) {
        (Cue::Aligned, Some(since)) => Some(since),
        (Cue::Aligned, None) => Some(t_ms),
        _ => None,
    };
    SideMount { ie_rotation: a.shoulder_rotation, carrying: a.carrying, cue, aligned_since_ms }
}

/// Advances the advisor by one frame set.
pub fn advise(prev: &MountState, frames: &SensorFrameSet, cfg: &JcsConfig) -> MountState {
    let angles = joint_angles(frames, cfg);
    let mut next = MountState { t_ms: frames.t_ms, started: true, ..*prev };
    for side in Side::BOTH {
        *next.side_mut(side) = next_side(prev.side(side), angles.side(side), cfg, frames.t_ms);
    }
    next
}

/// True once `side` has stayed aligned for at least `hold_ms`.
pub fn confirm(state: &MountState, side: Side, hold_ms: u64) -> bool {
    state
        .side(side)
        .aligned_since_ms
        .is_some_and(|since| state.t_ms.saturating_sub(since) >= hold_ms)
}

pub fn confirm_both(state: &MountState, hold_ms: u64) -> bool {
    Side::BOTH.iter().all(|&s| confirm(state, s, hold_ms))
}
