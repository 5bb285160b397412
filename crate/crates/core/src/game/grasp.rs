//! Level machine of the astronaut runner driven by the grasp device.
//!
//! The astronaut runs along a rock ledge. A rising lift force starts a jump
//! whose apex is proportional to the force. Missing a gap drops the player to
//! the ground layer, where warp holes lead back up and, from level 2 on,
//! ground holes end the run. On level 3 squeezing past the grasp limit makes
//! the astronaut explode.

use std::fmt;

use super::fork::GameError;

pub const SPEED_MULTIPLIERS: [f64; 3] = [1.0, 1.5, 2.0];
pub const DISTANCE_SCALES: [f64; 3] = [1.0, 1.25, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Rocks,
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Running,
    Win,
    Fail,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Running => "RUNNING",
            Outcome::Win => "WIN",
            Outcome::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraspEvent {
    Jump { apex_m: f64 },
    Land,
    Star,
    FellToGround,
    Warp,
    Explode,
    HoleFall,
    MissedRocket,
    Win,
}

impl fmt::Display for GraspEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraspEvent::Jump { apex_m } => write!(f, "JUMP,{apex_m:.4}"),
            GraspEvent::Land => f.write_str("LAND"),
            GraspEvent::Star => f.write_str("STAR"),
            GraspEvent::FellToGround => f.write_str("FELL_TO_GROUND"),
            GraspEvent::Warp => f.write_str("WARP"),
            GraspEvent::Explode => f.write_str("EXPLODE"),
            GraspEvent::HoleFall => f.write_str("HOLE_FALL"),
            GraspEvent::MissedRocket => f.write_str("MISSED_ROCKET"),
            GraspEvent::Win => f.write_str("WIN"),
        }
    }
}

/// A `[start, start + len)` stretch of track, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: f64,
    pub len: f64,
}

impl Span {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x < self.start + self.len
    }

    fn scaled(&self, k: f64) -> Span {
        Span { start: self.start * k, len: self.len * k }
    }
}

/// Level-1 geometry; higher levels scale every distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Course {
    /// Rocket position at the end of the ledge.
    pub length_m: f64,
    /// Gaps in the rock ledge.
    pub gaps: Vec<Span>,
    /// Ground-layer warp holes back to the ledge.
    pub warps: Vec<Span>,
    /// Ground-layer holes, active from level 2.
    pub holes: Vec<Span>,
}

impl Default for Course {
    fn default() -> Self {
        Course {
            length_m: 120.0,
            gaps: [20.0, 45.0, 70.0, 95.0].map(|s| Span { start: s, len: 3.0 }).to_vec(),
            warps: [30.0, 55.0, 80.0, 105.0].map(|s| Span { start: s, len: 2.0 }).to_vec(),
            holes: [25.0, 50.0, 75.0, 100.0].map(|s| Span { start: s, len: 2.0 }).to_vec(),
        }
    }
}

impl Course {
    pub fn scaled(&self, k: f64) -> Course {
        Course {
            length_m: self.length_m * k,
            gaps: self.gaps.iter().map(|s| s.scaled(k)).collect(),
            warps: self.warps.iter().map(|s| s.scaled(k)).collect(),
            holes: self.holes.iter().map(|s| s.scaled(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspConfig {
    pub grasp_limit_n: f64,
    /// Apex height per newton of lift, metres.
    pub jump_k_m_per_n: f64,
    /// Lift above which a rising edge starts a jump.
    pub lift_trigger_n: f64,
    pub gravity_m_s2: f64,
    pub base_speed_m_s: f64,
    pub course: Course,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            grasp_limit_n: 20.0,
            jump_k_m_per_n: 0.1,
            lift_trigger_n: 1.0,
            gravity_m_s2: 9.81,
            base_speed_m_s: 4.0,
            course: Course::default(),
        }
    }
}

/// Apex height of a jump started with `lift_n`.
pub fn jump_apex(lift_n: f64, cfg: &GraspConfig) -> f64 {
    cfg.jump_k_m_per_n * lift_n.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspInput {
    pub grasp_n: f64,
    pub lift_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspLevelState {
    pub level: u8,
    pub run_speed_multiplier: f64,
    pub grasp_limit_n: f64,
    pub holes_enabled: bool,
    pub explode_on_overgrasp: bool,
    pub player_layer: Layer,
    pub stars: u32,
    pub outcome: Outcome,
    pub x_m: f64,
    pub height_m: f64,
    pub vertical_speed_m_s: f64,
    pub airborne: bool,
    pub elapsed_ms: u64,
    pub peak_grasp_n: f64,
    pub peak_lift_n: f64,
    pub last_apex_m: Option<f64>,
    lift_was_high: bool,
    course: Course,
}

impl GraspLevelState {
    pub fn new(level: u8, cfg: &GraspConfig) -> Self {
        let level = level.clamp(1, 3);
        let i = usize::from(level - 1);
        GraspLevelState {
            level,
            run_speed_multiplier: SPEED_MULTIPLIERS[i],
            grasp_limit_n: cfg.grasp_limit_n,
            holes_enabled: level >= 2,
            explode_on_overgrasp: level == 3,
            player_layer: Layer::Rocks,
            stars: 0,
            outcome: Outcome::Running,
            x_m: 0.0,
            height_m: 0.0,
            vertical_speed_m_s: 0.0,
            airborne: false,
            elapsed_ms: 0,
            peak_grasp_n: 0.0,
            peak_lift_n: 0.0,
            last_apex_m: None,
            lift_was_high: false,
            course: cfg.course.scaled(DISTANCE_SCALES[i]),
        }
    }

    pub fn course(&self) -> &Course {
        &self.course
    }

    pub fn is_over(&self) -> bool {
        self.outcome != Outcome::Running
    }
}

/// Whether a grounded player moving from `from` to `to` ends inside a span
/// or runs over one entirely.
fn touches(spans: &[Span], from: f64, to: f64) -> bool {
    spans.iter().any(|s| s.contains(to) || (s.start > from && s.start + s.len <= to))
}

/// Advances the runner by one tick. WIN and FAIL are absorbing.
pub fn grasp_step(
    state: &GraspLevelState,
    input: &GraspInput,
    dt_ms: u64,
    cfg: &GraspConfig,
) -> Result<(GraspLevelState, Vec<GraspEvent>), GameError> {
    for (field, value) in [("grasp_n", input.grasp_n), ("lift_n", input.lift_n)] {
        if !value.is_finite() {
            return Err(GameError::BadInput { field, value });
        }
    }
    let mut s = state.clone();
    let mut events = Vec::new();
    if s.is_over() {
        return Ok((s, events));
    }
    s.elapsed_ms += dt_ms;
    s.peak_grasp_n = s.peak_grasp_n.max(input.grasp_n);
    s.peak_lift_n = s.peak_lift_n.max(input.lift_n);

    if s.explode_on_overgrasp && input.grasp_n > s.grasp_limit_n {
        s.outcome = Outcome::Fail;
        events.push(GraspEvent::Explode);
        return Ok((s, events));
    }

    let lift_high = input.lift_n >= cfg.lift_trigger_n;
    if lift_high && !s.lift_was_high && !s.airborne {
        let apex = jump_apex(input.lift_n, cfg);
        s.airborne = true;
        s.vertical_speed_m_s = (2.0 * cfg.gravity_m_s2 * apex).sqrt();
        s.last_apex_m = Some(apex);
        events.push(GraspEvent::Jump { apex_m: apex });
    }
    s.lift_was_high = lift_high;

    let dt = dt_ms as f64 / 1000.0;
    let x0 = s.x_m;
    s.x_m += cfg.base_speed_m_s * s.run_speed_multiplier * dt;
    if s.airborne {
        s.height_m += s.vertical_speed_m_s * dt - 0.5 * cfg.gravity_m_s2 * dt * dt;
        s.vertical_speed_m_s -= cfg.gravity_m_s2 * dt;
        if s.height_m <= 0.0 {
            s.height_m = 0.0;
            s.vertical_speed_m_s = 0.0;
            s.airborne = false;
            events.push(GraspEvent::Land);
        }
    }

    if !s.airborne {
        let (from, to) = (x0, s.x_m);
        match s.player_layer {
            Layer::Rocks => {
                if touches(&s.course.gaps, from, to) {
                    s.player_layer = Layer::Ground;
                    events.push(GraspEvent::FellToGround);
                }
            }
            Layer::Ground => {
                if s.holes_enabled && touches(&s.course.holes, from, to) {
                    s.outcome = Outcome::Fail;
                    events.push(GraspEvent::HoleFall);
                    return Ok((s, events));
                }
                if touches(&s.course.warps, from, to) {
                    s.player_layer = Layer::Rocks;
                    events.push(GraspEvent::Warp);
                }
            }
        }
    }
    if s.player_layer == Layer::Rocks {
        let passed = s.course.gaps.iter().filter(|g| {
            let end = g.start + g.len;
            end > x0 && end <= s.x_m
        });
        for _ in passed {
            s.stars += 1;
            events.push(GraspEvent::Star);
        }
    }

    if s.x_m >= s.course.length_m {
        if s.player_layer == Layer::Rocks {
            s.outcome = Outcome::Win;
            events.push(GraspEvent::Win);
        } else {
            s.outcome = Outcome::Fail;
            events.push(GraspEvent::MissedRocket);
        }
    }
    Ok((s, events))
}
