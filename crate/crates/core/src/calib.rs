//! Calibration tracking for the fifteen MARG sub-sensors.

use std::fmt;

use thiserror::Error;

use crate::retarget::SensorFrameSet;
use crate::segment::{PerSegment, SegmentId};

pub const MAX_LEVEL: u8 = 3;

/// Calibration levels reported by one module, each `0..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CalibStatus {
    pub gyro: u8,
    pub accel: u8,
    pub mag: u8,
}

impl CalibStatus {
    pub const FULL: CalibStatus = CalibStatus { gyro: 3, accel: 3, mag: 3 };
    pub const NONE: CalibStatus = CalibStatus { gyro: 0, accel: 0, mag: 0 };

    pub fn new(gyro: u8, accel: u8, mag: u8) -> Result<Self, CalibError> {
        let s = CalibStatus { gyro, accel, mag };
        s.validate(SegmentId::B).map(|_| s)
    }

    fn validate(&self, segment: SegmentId) -> Result<(), CalibError> {
        for (sensor, level) in Sensor::ALL.into_iter().zip(self.levels()) {
            if level > MAX_LEVEL {
                return Err(CalibError::LevelOutOfRange { segment, sensor, level });
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> [u8; 3] {
        [self.gyro, self.accel, self.mag]
    }

    pub fn level(&self, sensor: Sensor) -> u8 {
        match sensor {
            Sensor::Gyro => self.gyro,
            Sensor::Accel => self.accel,
            Sensor::Mag => self.mag,
        }
    }

    fn merge(&self, other: &CalibStatus) -> CalibStatus {
        CalibStatus {
            gyro: self.gyro.max(other.gyro),
            accel: self.accel.max(other.accel),
            mag: self.mag.max(other.mag),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sensor {
    Gyro,
    Accel,
    Mag,
}

impl Sensor {
    pub const ALL: [Sensor; 3] = [Sensor::Gyro, Sensor::Accel, Sensor::Mag];

    pub fn as_str(self) -> &'static str {
        match self {
            Sensor::Gyro => "gyro",
            Sensor::Accel => "accel",
            Sensor::Mag => "mag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CalibError {
    #[error("{segment} {} level {level} outside 0..=3", .sensor.as_str())]
    LevelOutOfRange { segment: SegmentId, sensor: Sensor, level: u8 },
}

/// Next action in the calibration routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CalibStep {
    /// Keep the holder stationary (gyroscope).
    HoldStill,
    /// Tilt about 45° about each axis (accelerometer).
    Tilt45,
    /// Move randomly in 3D (magnetometer).
    RandomMotion,
    Done,
}

impl CalibStep {
    pub fn as_str(self) -> &'static str {
        match self {
            CalibStep::HoldStill => "HOLD_STILL",
            CalibStep::Tilt45 => "TILT_45",
            CalibStep::RandomMotion => "RANDOM_MOTION",
            CalibStep::Done => "DONE",
        }
    }

    pub fn parse(s: &str) -> Option<CalibStep> {
        match s {
            "HOLD_STILL" => Some(CalibStep::HoldStill),
            "TILT_45" => Some(CalibStep::Tilt45),
            "RANDOM_MOTION" => Some(CalibStep::RandomMotion),
            "DONE" => Some(CalibStep::Done),
            _ => None,
        }
    }
}

impl fmt::Display for CalibStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The routine step implied by a level vector: gyroscopes first, then
/// accelerometers, then magnetometers.
pub fn next_step(levels: &PerSegment<CalibStatus>) -> CalibStep {
    let any_below = |sensor| levels.iter().any(|(_, c)| c.level(sensor) < MAX_LEVEL);
    if any_below(Sensor::Gyro) {
        CalibStep::HoldStill
    } else if any_below(Sensor::Accel) {
        CalibStep::Tilt45
    } else if any_below(Sensor::Mag) {
        CalibStep::RandomMotion
    } else {
        CalibStep::Done
    }
}

/// Immutable calibration snapshot. Levels are merged monotonically; only
/// [`CalibReport::reset`] lowers them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibReport {
    pub levels: PerSegment<CalibStatus>,
    pub overall_ready: bool,
    pub next_step: CalibStep,
    start_ms: Option<u64>,
    latest_ms: Option<u64>,
    ready_at_ms: Option<u64>,
}

impl Default for CalibReport {
    fn default() -> Self {
        CalibReport::new()
    }
}

impl CalibReport {
    pub fn new() -> Self {
        CalibReport {
            levels: PerSegment::splat(CalibStatus::NONE),
            overall_ready: false,
            next_step: CalibStep::HoldStill,
            start_ms: None,
            latest_ms: None,
            ready_at_ms: None,
        }
    }

    /// Clears all levels and restarts the timer.
    pub fn reset(&self) -> Self {
        CalibReport::new()
    }

    /// Merges a frame's levels into the report. Frame timestamps drive the
    /// elapsed-time clock; the first frame starts it.
    pub fn update(&self, frame: &SensorFrameSet) -> Result<CalibReport, CalibError> {
        for (s, c) in frame.calib.iter() {
            c.validate(s)?;
        }
        let levels = self.levels.map(|s, old| old.merge(&frame.calib[s]));
        let overall_ready =
            levels.iter().all(|(_, c)| c.levels().iter().all(|&l| l == MAX_LEVEL));
        let start_ms = Some(self.start_ms.unwrap_or(frame.t_ms));
        let latest_ms = Some(self.latest_ms.map_or(frame.t_ms, |t| t.max(frame.t_ms)));
        let ready_at_ms = self.ready_at_ms.or(overall_ready.then_some(frame.t_ms));
        Ok(CalibReport {
            levels,
            overall_ready,
            next_step: next_step(&levels),
            start_ms,
            latest_ms,
            ready_at_ms,
        })
    }

    /// Fill fraction `level / 3` for one sensor.
    pub fn fill(&self, segment: SegmentId, sensor: Sensor) -> f64 {
        f64::from(self.levels[segment].level(sensor)) / f64::from(MAX_LEVEL)
    }

    /// Seconds from the first frame until readiness, or until the latest
    /// frame while not yet ready.
    pub fn elapsed(&self) -> f64 {
        match (self.start_ms, self.ready_at_ms.or(self.latest_ms)) {
            (Some(start), Some(end)) => end.saturating_sub(start) as f64 / 1000.0,
            _ => 0.0,
        }
    }

    /// Text rendering of the per-sensor bars, one module per line.
    pub fn render_bars(&self) -> String {
        let mut out = String::new();
        for (s, c) in self.levels.iter() {
            out.push_str(&format!("{:<2}", s.as_str()));
            for sensor in Sensor::ALL {
                let l = usize::from(c.level(sensor));
                out.push_str(&format!(
                    " {:>5} [{}{}]",
                    sensor.as_str(),
                    "#".repeat(l),
                    ".".repeat(usize::from(MAX_LEVEL) - l)
                ));
            }
            out.push('\n');
        }
        out.push_str(&format!("next: {}  ready: {}\n", self.next_step, self.overall_ready));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::UnitQuat;

    fn frame(t_ms: u64, calib: PerSegment<CalibStatus>) -> SensorFrameSet {
        SensorFrameSet { t_ms, quats: PerSegment::splat(UnitQuat::IDENTITY), calib }
    }

    #[test]
    fn all_zero_starts_with_gyro() {
        let r = CalibReport::new().update(&frame(0, PerSegment::splat(CalibStatus::NONE))).unwrap();
        assert_eq!(r.next_step, CalibStep::HoldStill);
        assert!(!r.overall_ready);
    }

    #[test]
    fn all_full_is_ready() {
        let r = CalibReport::new().update(&frame(0, PerSegment::splat(CalibStatus::FULL))).unwrap();
        assert!(r.overall_ready);
        assert_eq!(r.next_step, CalibStep::Done);
        assert_eq!(r.elapsed(), 0.0);
    }

    #[test]
    fn one_accel_short_asks_for_tilt() {
        let mut levels = PerSegment::splat(CalibStatus::FULL);
        levels.ra.accel = 2;
        let r = CalibReport::new().update(&frame(0, levels)).unwrap();
        assert_eq!(r.next_step, CalibStep::Tilt45);
    }

    #[test]
    fn levels_never_drop() {
        let r = CalibReport::new().update(&frame(0, PerSegment::splat(CalibStatus::FULL))).unwrap();
        let r = r.update(&frame(10, PerSegment::splat(CalibStatus::NONE))).unwrap();
        assert!(r.overall_ready);
        assert_eq!(r.fill(SegmentId::LF, Sensor::Mag), 1.0);
        let r = r.reset();
        assert!(!r.overall_ready);
    }

    #[test]
    fn out_of_range_level_rejected() {
        let mut levels = PerSegment::splat(CalibStatus::FULL);
        levels.lf.mag = 4;
        let err = CalibReport::new().update(&frame(0, levels)).unwrap_err();
        assert_eq!(
            err,
            CalibError::LevelOutOfRange { segment: SegmentId::LF, sensor: Sensor::Mag, level: 4 }
        );
    }

    #[test]
    fn elapsed_tracks_latest_until_ready() {
        let none = PerSegment::splat(CalibStatus::NONE);
        let mut r = CalibReport::new();
        for t in [1000, 2000, 4500] {
            r = r.update(&frame(t, none)).unwrap();
        }
        assert_eq!(r.elapsed(), 3.5);
        r = r.update(&frame(6000, PerSegment::splat(CalibStatus::FULL))).unwrap();
        r = r.update(&frame(9000, PerSegment::splat(CalibStatus::FULL))).unwrap();
        assert_eq!(r.elapsed(), 5.0);
    }
}
