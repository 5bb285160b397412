//! Level machine of the instrumented-fork eating game.
//!
//! Each activity: grasp the fork hard enough to open the ring, lift and
//! rotate the forearm while holding the grasp, then press the pad to drop the
//! apple. Level 3 adds a knife grasp at full calibrated force and a cutting
//! press before the activity counts.

use std::fmt;

use thiserror::Error;

/// Grasp threshold per level as a fraction of the calibrated force.
pub const GRASP_FRACTIONS: [f64; 3] = [0.50, 0.75, 1.00];
/// Forearm rotation needed per level, degrees.
pub const ROTATION_THRESHOLDS_DEG: [f64; 3] = [90.0, 135.0, 135.0];
/// Activities to complete within each level.
pub const LEVEL_TARGETS: [u32; 3] = [3, 6, 9];
pub const KNIFE_GRASP_FRACTION: f64 = 1.00;
pub const POINTS_PER_LEVEL: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForkConfig {
    /// Average calibration force of the unaffected hand, newtons.
    pub calib_force_n: f64,
    pub poke_fraction: f64,
    pub cut_fraction: f64,
}

impl ForkConfig {
    pub fn new(calib_force_n: f64) -> Self {
        ForkConfig { calib_force_n, poke_fraction: 0.5, cut_fraction: 0.5 }
    }
}

/// Thresholds in force units for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForkThresholds {
    pub grasp_n: f64,
    pub rotation_deg: f64,
    pub poke_n: f64,
    pub knife_grasp_n: f64,
    pub cut_n: f64,
}

pub fn thresholds(level: u8, cfg: &ForkConfig) -> ForkThresholds {
    let i = usize::from(level.clamp(1, 3) - 1);
    ForkThresholds {
        grasp_n: GRASP_FRACTIONS[i] * cfg.calib_force_n,
        rotation_deg: ROTATION_THRESHOLDS_DEG[i],
        poke_n: cfg.poke_fraction * cfg.calib_force_n,
        knife_grasp_n: KNIFE_GRASP_FRACTION * cfg.calib_force_n,
        cut_n: cfg.cut_fraction * cfg.calib_force_n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForkPhase {
    AwaitGrasp,
    AwaitLiftRotate,
    AwaitPoke,
    AwaitKnifeGrasp,
    AwaitCut,
    /// Activity counted; waiting for the grasp to be released.
    DoneOne,
    /// All level-3 activities done.
    Complete,
}

impl ForkPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            ForkPhase::AwaitGrasp => "AWAIT_GRASP",
            ForkPhase::AwaitLiftRotate => "AWAIT_LIFT_ROTATE",
            ForkPhase::AwaitPoke => "AWAIT_POKE",
            ForkPhase::AwaitKnifeGrasp => "AWAIT_KNIFE_GRASP",
            ForkPhase::AwaitCut => "AWAIT_CUT",
            ForkPhase::DoneOne => "DONE_ONE",
            ForkPhase::Complete => "COMPLETE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForkEvent {
    RingOpen,
    GraspLost,
    RingRotate,
    AppleDrop,
    KnifeGrasp,
    AppleSlide,
    Completion { level: u8, count: u32 },
    LevelUp { level: u8 },
    GameComplete,
}

impl fmt::Display for ForkEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForkEvent::RingOpen => f.write_str("RING_OPEN"),
            ForkEvent::GraspLost => f.write_str("GRASP_LOST"),
            ForkEvent::RingRotate => f.write_str("RING_ROTATE"),
            ForkEvent::AppleDrop => f.write_str("APPLE_DROP"),
            ForkEvent::KnifeGrasp => f.write_str("KNIFE_GRASP"),
            ForkEvent::AppleSlide => f.write_str("APPLE_SLIDE"),
            ForkEvent::Completion { level, count } => write!(f, "COMPLETION,{level},{count}"),
            ForkEvent::LevelUp { level } => write!(f, "LEVEL_UP,{level}"),
            ForkEvent::GameComplete => f.write_str("GAME_COMPLETE"),
        }
    }
}

/// Device readings for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForkInput {
    pub grasp_n: f64,
    pub rotation_deg: f64,
    pub poke_n: f64,
    pub knife_grasp_n: f64,
    pub cut_n: f64,
    /// Fork pointed at the pad.
    pub pointing: bool,
}

impl Default for ForkInput {
    fn default() -> Self {
        ForkInput { grasp_n: 0.0, rotation_deg: 0.0, poke_n: 0.0, knife_grasp_n: 0.0, cut_n: 0.0, pointing: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GameError {
    #[error("input {field} is negative or not finite: {value}")]
    BadInput { field: &'static str, value: f64 },
    #[error("calibrated force must be positive, got {0}")]
    BadCalibration(f64),
}

impl ForkInput {
    fn validate(&self) -> Result<(), GameError> {
        let fields = [
            ("grasp_n", self.grasp_n),
            ("rotation_deg", self.rotation_deg),
            ("poke_n", self.poke_n),
            ("knife_grasp_n", self.knife_grasp_n),
            ("cut_n", self.cut_n),
        ];
        for (field, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(GameError::BadInput { field, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PeakForces {
    pub grasp_n: f64,
    pub poke_n: f64,
    pub knife_grasp_n: f64,
    pub cut_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForkLevelState {
    pub level: u8,
    pub phase: ForkPhase,
    pub completions_in_level: u32,
    pub total_completions: u32,
    pub config: ForkConfig,
    pub timer_ms: u64,
    pub score: u32,
    pub peaks: PeakForces,
}

impl ForkLevelState {
    pub fn new(config: ForkConfig) -> Result<Self, GameError> {
        if !(config.calib_force_n.is_finite() && config.calib_force_n > 0.0) {
            return Err(GameError::BadCalibration(config.calib_force_n));
        }
        Ok(ForkLevelState {
            level: 1,
            phase: ForkPhase::AwaitGrasp,
            completions_in_level: 0,
            total_completions: 0,
            config,
            timer_ms: 0,
            score: 0,
            peaks: PeakForces::default(),
        })
    }

    pub fn thresholds(&self) -> ForkThresholds {
        thresholds(self.level, &self.config)
    }

    pub fn is_complete(&self) -> bool {
        self.phase == ForkPhase::Complete
    }
}

/// Advances the game by one tick. At most one phase transition fires per
/// tick. Invalid input leaves the state untouched.
pub fn fork_step(
    state: &ForkLevelState,
    input: &ForkInput,
    dt_ms: u64,
) -> Result<(ForkLevelState, Vec<ForkEvent>), GameError> {
    input.validate()?;
    let mut s = *state;
    let mut events = Vec::new();
    if s.phase == ForkPhase::Complete {
        return Ok((s, events));
    }
    s.timer_ms += dt_ms;
    s.peaks.grasp_n = s.peaks.grasp_n.max(input.grasp_n);
    s.peaks.poke_n = s.peaks.poke_n.max(input.poke_n);
    s.peaks.knife_grasp_n = s.peaks.knife_grasp_n.max(input.knife_grasp_n);
    s.peaks.cut_n = s.peaks.cut_n.max(input.cut_n);

    let th = s.thresholds();
    let grasped = input.grasp_n >= th.grasp_n;
    match s.phase {
        ForkPhase::AwaitGrasp if grasped => {
            s.phase = ForkPhase::AwaitLiftRotate;
            events.push(ForkEvent::RingOpen);
        }
        ForkPhase::AwaitLiftRotate if !grasped => {
            s.phase = ForkPhase::AwaitGrasp;
            events.push(ForkEvent::GraspLost);
        }
        ForkPhase::AwaitLiftRotate if input.rotation_deg >= th.rotation_deg && input.pointing => {
            s.phase = ForkPhase::AwaitPoke;
            events.push(ForkEvent::RingRotate);
        }
        ForkPhase::AwaitPoke if input.poke_n >= th.poke_n => {
            events.push(ForkEvent::AppleDrop);
            if s.level == 3 {
                s.phase = ForkPhase::AwaitKnifeGrasp;
            } else {
                complete_activity(&mut s, &mut events);
            }
        }
        ForkPhase::AwaitKnifeGrasp if input.knife_grasp_n >= th.knife_grasp_n => {
            s.phase = ForkPhase::AwaitCut;
            events.push(ForkEvent::KnifeGrasp);
        }
        ForkPhase::AwaitCut if input.cut_n >= th.cut_n => {
            events.push(ForkEvent::AppleSlide);
            complete_activity(&mut s, &mut events);
        }
        ForkPhase::DoneOne if !grasped => {
            s.phase = ForkPhase::AwaitGrasp;
        }
        _ => {}
    }
    Ok((s, events))
}

fn complete_activity(s: &mut ForkLevelState, events: &mut Vec<ForkEvent>) {
    s.completions_in_level += 1;
    s.total_completions += 1;
    s.score += POINTS_PER_LEVEL * u32::from(s.level);
    events.push(ForkEvent::Completion { level: s.level, count: s.completions_in_level });
    let target = LEVEL_TARGETS[usize::from(s.level - 1)];
    s.phase = ForkPhase::DoneOne;
    if s.completions_in_level >= target {
        if s.level == 3 {
            s.phase = ForkPhase::Complete;
            events.push(ForkEvent::GameComplete);
        } else {
            s.level += 1;
            s.completions_in_level = 0;
            events.push(ForkEvent::LevelUp { level: s.level });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ForkConfig {
        ForkConfig::new(20.0)
    }

    fn activity(level: u8) -> Vec<ForkInput> {
        let th = thresholds(level, &cfg());
        let grasp = ForkInput { grasp_n: th.grasp_n, ..Default::default() };
        let rotate = ForkInput { rotation_deg: th.rotation_deg, ..grasp };
        let poke = ForkInput { poke_n: th.poke_n, ..rotate };
        let mut out = vec![grasp, rotate, poke];
        if level == 3 {
            out.push(ForkInput { knife_grasp_n: th.knife_grasp_n, ..poke });
            out.push(ForkInput { knife_grasp_n: th.knife_grasp_n, cut_n: th.cut_n, ..poke });
        }
        out.push(ForkInput::default());
        out
    }

    fn run(s: ForkLevelState, inputs: &[ForkInput]) -> (ForkLevelState, Vec<ForkEvent>) {
        inputs.iter().fold((s, Vec::new()), |(s, mut ev), i| {
            let (n, e) = fork_step(&s, i, 20).unwrap();
            ev.extend(e);
            (n, ev)
        })
    }

    #[test]
    fn just_below_half_does_nothing() {
        let s = ForkLevelState::new(cfg()).unwrap();
        let (n, ev) = fork_step(&s, &ForkInput { grasp_n: 0.49 * 20.0, ..Default::default() }, 20).unwrap();
        assert_eq!(n.phase, ForkPhase::AwaitGrasp);
        assert!(ev.is_empty());
        let (n, ev) = fork_step(&s, &ForkInput { grasp_n: 10.0, ..Default::default() }, 20).unwrap();
        assert_eq!(n.phase, ForkPhase::AwaitLiftRotate);
        assert_eq!(ev, vec![ForkEvent::RingOpen]);
    }

    #[test]
    fn three_level_one_activities_advance() {
        let mut s = ForkLevelState::new(cfg()).unwrap();
        for _ in 0..3 {
            s = run(s, &activity(1)).0;
        }
        assert_eq!(s.level, 2);
        assert_eq!(s.thresholds().grasp_n, 15.0);
        assert_eq!(s.thresholds().rotation_deg, 135.0);
    }

    #[test]
    fn level_three_completes_after_nine() {
        let mut s = ForkLevelState::new(cfg()).unwrap();
        let mut all = Vec::new();
        while !s.is_complete() {
            let (n, ev) = run(s, &activity(s.level));
            s = n;
            all.extend(ev);
        }
        assert_eq!(s.total_completions, 3 + 6 + 9);
        assert_eq!(s.completions_in_level, 9);
        assert!(s.timer_ms > 0);
        assert_eq!(all.iter().filter(|e| matches!(e, ForkEvent::AppleSlide)).count(), 9);
        assert_eq!(all.last(), Some(&ForkEvent::GameComplete));
        let frozen = fork_step(&s, &activity(3)[0], 20).unwrap().0;
        assert_eq!(frozen, s);
    }

    #[test]
    fn rotation_needs_grasp_and_pointing() {
        let s = ForkLevelState::new(cfg()).unwrap();
        let (s, _) = run(s, &[ForkInput { grasp_n: 10.0, ..Default::default() }]);
        let away = ForkInput { grasp_n: 10.0, rotation_deg: 120.0, pointing: false, ..Default::default() };
        assert_eq!(run(s, &[away]).0.phase, ForkPhase::AwaitLiftRotate);
        let loose = ForkInput { grasp_n: 9.0, rotation_deg: 120.0, ..Default::default() };
        assert_eq!(run(s, &[loose]).1, vec![ForkEvent::GraspLost]);
    }

    #[test]
    fn bad_input_rejected() {
        let s = ForkLevelState::new(cfg()).unwrap();
        for bad in [-1.0, f64::NAN, f64::INFINITY] {
            assert!(fork_step(&s, &ForkInput { cut_n: bad, ..Default::default() }, 20).is_err());
        }
        assert!(ForkLevelState::new(ForkConfig::new(0.0)).is_err());
    }
}
