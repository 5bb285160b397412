//! Groups per-module frames into complete sensor frame sets.

use std::collections::BTreeSet;

use thiserror::Error;

use super::wire::WireFrame;
use crate::calib::CalibStatus;
use crate::quat::UnitQuat;
use crate::retarget::SensorFrameSet;
use crate::segment::{PerSegment, SegmentId};

pub const DEFAULT_WINDOW_MS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssembleError {
    #[error("INCOMPLETE_SET stale modules {0:?}")]
    Incomplete(Vec<SegmentId>),
}

/// Latest frame per module plus the set of modules refreshed since the
/// last emitted set.
#[derive(Debug, Clone)]
pub struct Assembler {
    window_ms: u64,
    latest: PerSegment<Option<WireFrame>>,
    fresh: BTreeSet<SegmentId>,
}

impl Default for Assembler {
    fn default() -> Self {
        Assembler::new(DEFAULT_WINDOW_MS)
    }
}

impl Assembler {
    pub fn new(window_ms: u64) -> Self {
        Assembler { window_ms, latest: PerSegment::default(), fresh: BTreeSet::new() }
    }

    /// Records a frame; an older frame never replaces a newer one.
    pub fn push(&mut self, frame: WireFrame) {
        let slot = &mut self.latest[frame.module];
        if slot.is_none_or(|old| frame.t_ms >= old.t_ms) {
            *slot = Some(frame);
        }
        self.fresh.insert(frame.module);
    }

    /// Builds a set from the latest frames. The set time is the newest module
    /// time; modules older than the window (or never seen) make it incomplete.
    pub fn assemble(&self) -> Result<SensorFrameSet, AssembleError> {
        assemble(&self.latest, self.window_ms)
    }

    /// Pushes a frame and returns a set once every module has been refreshed.
    pub fn offer(&mut self, frame: WireFrame) -> Option<Result<SensorFrameSet, AssembleError>> {
        self.push(frame);
        if self.fresh.len() == SegmentId::ALL.len() {
            self.fresh.clear();
            Some(self.assemble())
        } else {
            None
        }
    }
}

pub fn assemble(
    latest: &PerSegment<Option<WireFrame>>,
    window_ms: u64,
) -> Result<SensorFrameSet, AssembleError> {
    let t_ms = latest.iter().filter_map(|(_, f)| f.map(|f| f.t_ms)).max().unwrap_or(0);
    let stale: Vec<SegmentId> = latest
        .iter()
        .filter(|(_, f)| f.is_none_or(|f| t_ms - f.t_ms > window_ms))
        .map(|(s, _)| s)
        .collect();
    if !stale.is_empty() {
        return Err(AssembleError::Incomplete(stale));
    }
    let mut quats = PerSegment::splat(UnitQuat::IDENTITY);
    let mut calib = PerSegment::splat(CalibStatus::NONE);
    for (s, f) in latest.iter() {
        if let Some(f) = f {
            quats[s] = f.quat();
            calib[s] = f.calib;
        }
    }
    Ok(SensorFrameSet { t_ms, quats, calib })
}
