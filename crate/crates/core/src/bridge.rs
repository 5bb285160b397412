//! Text protocol between the engine and the coach UI, and the command
//! handling behind it.
//!
//! Engine to UI, one line each:
//!
//! ```text
//! EVT CALIB <ready>,<next_step>,<B_g>,<B_a>,<B_m>,...,<RF_m>
//! EVT MOUNT <t_ms>,<L_ie>,<L_carrying>,<L_cue>,<R_ie>,<R_carrying>,<R_cue>
//! EVT POSE <t_ms>,<PATIENT|INSTRUCTOR>,<20 left-handed quaternion scalars>
//! EVT ANGLES <t_ms>,<12 angles>,<flags>
//! EVT PLAYBACK <PLAYING|PAUSED>,<position_ms>,<duration_ms>,<rate>
//! EVT GAME <game>,<level>,<status>,<score>,<event>
//! ```
//!
//! UI to engine: `CMD <verb> <args>` with verbs `PLAY`, `PAUSE`, `SEEK <ms>`,
//! `VIEW <FRONT|BACK|LEFT|RIGHT>`, `SELECT_EXERCISE <path>`,
//! `CAPTURE_KEYPOINT`, `SET_INTERVAL <index>,<seconds>` and
//! `SAVE_EXERCISE <path>`.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::calib::{CalibReport, CalibStatus, CalibStep};
use crate::exercise::{Exercise, ExerciseError};
use crate::jcs::{JcsConfig, JointAngles};
use crate::mount::{Cue, MountState, SideMount};
use crate::quat::UnitQuat;
use crate::retarget::{retarget, to_left_handed, RetargetSet, SensorFrameSet};
use crate::segment::{PerSegment, SegmentId};
use crate::session::{PlaybackCursor, PlaybackState, Session, SessionRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("not a bridge line: {0:?}")]
    Syntax(String),
    #[error("unknown topic {0:?}")]
    UnknownTopic(String),
    #[error("unknown verb {0:?}")]
    UnknownVerb(String),
    #[error("bad argument for {verb}: {detail}")]
    BadArgument { verb: &'static str, detail: String },
    #[error("{0}")]
    Rejected(String),
}

impl BridgeError {
    pub fn code(&self) -> &'static str {
        match self {
            BridgeError::Syntax(_) => "BAD_LINE",
            BridgeError::UnknownTopic(_) => "UNKNOWN_TOPIC",
            BridgeError::UnknownVerb(_) => "UNKNOWN_VERB",
            BridgeError::BadArgument { .. } => "BAD_ARGUMENT",
            BridgeError::Rejected(_) => "REJECTED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topic {
    Calib,
    Mount,
    Pose,
    Angles,
    Playback,
    Game,
}

impl Topic {
    pub const ALL: [Topic; 6] = [Topic::Calib, Topic::Mount, Topic::Pose, Topic::Angles, Topic::Playback, Topic::Game];

    pub fn as_str(self) -> &'static str {
        match self {
            Topic::Calib => "CALIB",
            Topic::Mount => "MOUNT",
            Topic::Pose => "POSE",
            Topic::Angles => "ANGLES",
            Topic::Playback => "PLAYBACK",
            Topic::Game => "GAME",
        }
    }

    pub fn parse(s: &str) -> Option<Topic> {
        Topic::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoseRole {
    Patient,
    Instructor,
}

impl PoseRole {
    fn as_str(self) -> &'static str {
        match self {
            PoseRole::Patient => "PATIENT",
            PoseRole::Instructor => "INSTRUCTOR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountSideEvent {
    pub ie_rotation: f64,
    pub carrying: f64,
    pub cue: Cue,
}

impl From<&SideMount> for MountSideEvent {
    fn from(m: &SideMount) -> Self {
        MountSideEvent { ie_rotation: m.ie_rotation, carrying: m.carrying, cue: m.cue }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Calib { ready: bool, next_step: CalibStep, levels: PerSegment<CalibStatus> },
    Mount { t_ms: u64, left: MountSideEvent, right: MountSideEvent },
    Pose { t_ms: u64, role: PoseRole, quats: PerSegment<[f64; 4]> },
    Angles { t_ms: u64, angles: [f64; 12], flags: u8 },
    Playback { state: PlaybackState, position_ms: f64, duration_ms: u64, rate: f64 },
    Game { game: String, level: u8, status: String, score: u32, event: String },
}

impl Event {
    pub fn calib(r: &CalibReport) -> Event {
        Event::Calib { ready: r.overall_ready, next_step: r.next_step, levels: r.levels }
    }

    pub fn mount(m: &MountState) -> Event {
        Event::Mount { t_ms: m.t_ms, left: (&m.left).into(), right: (&m.right).into() }
    }

    /// Left-handed avatar input.
    pub fn pose(t_ms: u64, role: PoseRole, acute: &PerSegment<UnitQuat>) -> Event {
        Event::Pose { t_ms, role, quats: acute.map(|_, q| q.to_array()) }
    }

    pub fn angles(t_ms: u64, a: &JointAngles) -> Event {
        Event::Angles { t_ms, angles: a.to_array(), flags: a.singular_mask() }
    }

    pub fn from_row(row: &SessionRow) -> [Event; 2] {
        [
            Event::pose(row.t_ms, PoseRole::Patient, &to_left_handed(&row.pose())),
            Event::Angles { t_ms: row.t_ms, angles: row.angles, flags: row.flags },
        ]
    }

    pub fn playback(c: &PlaybackCursor, session: &Session) -> Event {
        Event::Playback { state: c.state, position_ms: c.position_ms, duration_ms: session.duration_ms(), rate: c.rate }
    }

    pub fn topic(&self) -> Topic {
        match self {
            Event::Calib { .. } => Topic::Calib,
            Event::Mount { .. } => Topic::Mount,
            Event::Pose { .. } => Topic::Pose,
            Event::Angles { .. } => Topic::Angles,
            Event::Playback { .. } => Topic::Playback,
            Event::Game { .. } => Topic::Game,
        }
    }

    fn payload(&self) -> Vec<String> {
        match self {
            Event::Calib { ready, next_step, levels } => {
                let mut f = vec![u8::from(*ready).to_string(), next_step.as_str().to_string()];
                for (_, c) in levels.iter() {
                    f.extend(c.levels().iter().map(u8::to_string));
                }
                f
            }
            Event::Mount { t_ms, left, right } => {
                let mut f = vec![t_ms.to_string()];
                for s in [left, right] {
                    f.extend([format!("{:.4}", s.ie_rotation), format!("{:.4}", s.carrying), s.cue.to_string()]);
                }
                f
            }
            Event::Pose { t_ms, role, quats } => {
                let mut f = vec![t_ms.to_string(), role.as_str().to_string()];
                for (_, q) in quats.iter() {
                    f.extend(q.iter().map(|c| format!("{c:.6}")));
                }
                f
            }
            Event::Angles { t_ms, angles, flags } => {
                let mut f = vec![t_ms.to_string()];
                f.extend(angles.iter().map(|a| format!("{a:.4}")));
                f.push(flags.to_string());
                f
            }
            Event::Playback { state, position_ms, duration_ms, rate } => vec![
                match state {
                    PlaybackState::Playing => "PLAYING".into(),
                    PlaybackState::Paused => "PAUSED".into(),
                },
                format!("{position_ms:.1}"),
                duration_ms.to_string(),
                format!("{rate}"),
            ],
            Event::Game { game, level, status, score, event } => {
                vec![game.clone(), level.to_string(), status.clone(), score.to_string(), event.clone()]
            }
        }
    }

    pub fn render(&self) -> String {
        format!("EVT {} {}", self.topic().as_str(), self.payload().join(","))
    }

    pub fn parse(line: &str) -> Result<Event, BridgeError> {
        let line = line.trim_end_matches(['\n', '\r']);
        let syntax = || BridgeError::Syntax(line.to_string());
        let rest = line.strip_prefix("EVT ").ok_or_else(syntax)?;
        let (topic, payload) = rest.split_once(' ').unwrap_or((rest, ""));
        let topic = Topic::parse(topic).ok_or_else(|| BridgeError::UnknownTopic(topic.to_string()))?;
        let f: Vec<&str> = payload.split(',').collect();
        let num = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(syntax);
        let int = |s: &str| s.parse::<u64>().map_err(|_| syntax());
        let want = |n: usize| if f.len() == n { Ok(()) } else { Err(syntax()) };
        Ok(match topic {
            Topic::Calib => {
                want(17)?;
                let ready = match f[0] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(syntax()),
                };
                let next_step = CalibStep::parse(f[1]).ok_or_else(syntax)?;
                let mut levels = PerSegment::splat(CalibStatus::NONE);
                for s in SegmentId::ALL {
                    let l = |k: usize| f[2 + 3 * s.index() + k].parse::<u8>().map_err(|_| syntax());
                    levels[s] = CalibStatus::new(l(0)?, l(1)?, l(2)?).map_err(|_| syntax())?;
                }
                Event::Calib { ready, next_step, levels }
            }
            Topic::Mount => {
                want(7)?;
                let side = |i: usize| -> Result<MountSideEvent, BridgeError> {
                    Ok(MountSideEvent {
                        ie_rotation: num(f[i])?,
                        carrying: num(f[i + 1])?,
                        cue: Cue::parse(f[i + 2]).ok_or_else(syntax)?,
                    })
                };
                Event::Mount { t_ms: int(f[0])?, left: side(1)?, right: side(4)? }
            }
            Topic::Pose => {
                want(22)?;
                let role = match f[1] {
                    "PATIENT" => PoseRole::Patient,
                    "INSTRUCTOR" => PoseRole::Instructor,
                    _ => return Err(syntax()),
                };
                let mut quats = PerSegment::splat([0.0; 4]);
                for s in SegmentId::ALL {
                    for k in 0..4 {
                        quats[s][k] = num(f[2 + 4 * s.index() + k])?;
                    }
                }
                Event::Pose { t_ms: int(f[0])?, role, quats }
            }
            Topic::Angles => {
                want(14)?;
                let mut angles = [0.0; 12];
                for (k, a) in angles.iter_mut().enumerate() {
                    *a = num(f[1 + k])?;
                }
                Event::Angles { t_ms: int(f[0])?, angles, flags: f[13].parse().map_err(|_| syntax())? }
            }
            Topic::Playback => {
                want(4)?;
                let state = match f[0] {
                    "PLAYING" => PlaybackState::Playing,
                    "PAUSED" => PlaybackState::Paused,
                    _ => return Err(syntax()),
                };
                Event::Playback { state, position_ms: num(f[1])?, duration_ms: int(f[2])?, rate: num(f[3])? }
            }
            Topic::Game => {
                if f.len() < 5 {
                    return Err(syntax());
                }
                Event::Game {
                    game: f[0].to_string(),
                    level: f[1].parse().map_err(|_| syntax())?,
                    status: f[2].to_string(),
                    score: f[3].parse().map_err(|_| syntax())?,
                    event: f[4..].join(","),
                }
            }
        })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Camera {
    Front,
    Back,
    Left,
    Right,
}

impl Camera {
    pub const ALL: [Camera; 4] = [Camera::Front, Camera::Back, Camera::Left, Camera::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Camera::Front => "FRONT",
            Camera::Back => "BACK",
            Camera::Left => "LEFT",
            Camera::Right => "RIGHT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Play,
    Pause,
    Seek { to_ms: f64 },
    View(Camera),
    SelectExercise(String),
    CaptureKeypoint,
    SetInterval { index: usize, seconds: f64 },
    SaveExercise(String),
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Play => "PLAY",
            Command::Pause => "PAUSE",
            Command::Seek { .. } => "SEEK",
            Command::View(_) => "VIEW",
            Command::SelectExercise(_) => "SELECT_EXERCISE",
            Command::CaptureKeypoint => "CAPTURE_KEYPOINT",
            Command::SetInterval { .. } => "SET_INTERVAL",
            Command::SaveExercise(_) => "SAVE_EXERCISE",
        }
    }

    pub fn render(&self) -> String {
        let args = match self {
            Command::Seek { to_ms } => to_ms.to_string(),
            Command::View(c) => c.as_str().to_string(),
            Command::SelectExercise(p) | Command::SaveExercise(p) => p.clone(),
            Command::SetInterval { index, seconds } => format!("{index},{seconds}"),
            _ => String::new(),
        };
        if args.is_empty() {
            format!("CMD {}", self.verb())
        } else {
            format!("CMD {} {args}", self.verb())
        }
    }

    pub fn parse(line: &str) -> Result<Command, BridgeError> {
        let line = line.trim_end_matches(['\n', '\r']);
        let rest = line.strip_prefix("CMD ").ok_or_else(|| BridgeError::Syntax(line.to_string()))?;
        let (verb, args) = match rest.split_once(' ') {
            Some((v, a)) => (v, a.trim()),
            None => (rest, ""),
        };
        let bad = |verb: &'static str, detail: &str| BridgeError::BadArgument { verb, detail: detail.to_string() };
        let none = |verb: &'static str, cmd: Command| if args.is_empty() { Ok(cmd) } else { Err(bad(verb, args)) };
        match verb {
            "PLAY" => none("PLAY", Command::Play),
            "PAUSE" => none("PAUSE", Command::Pause),
            "CAPTURE_KEYPOINT" => none("CAPTURE_KEYPOINT", Command::CaptureKeypoint),
            "SEEK" => args
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|to_ms| Command::Seek { to_ms })
                .ok_or_else(|| bad("SEEK", args)),
            "VIEW" => Camera::ALL
                .into_iter()
                .find(|c| c.as_str() == args)
                .map(Command::View)
                .ok_or_else(|| bad("VIEW", args)),
            "SELECT_EXERCISE" if !args.is_empty() => Ok(Command::SelectExercise(args.to_string())),
            "SAVE_EXERCISE" if !args.is_empty() => Ok(Command::SaveExercise(args.to_string())),
            "SELECT_EXERCISE" => Err(bad("SELECT_EXERCISE", "missing path")),
            "SAVE_EXERCISE" => Err(bad("SAVE_EXERCISE", "missing path")),
            "SET_INTERVAL" => {
                let (i, s) = args.split_once(',').ok_or_else(|| bad("SET_INTERVAL", args))?;
                let index = i.trim().parse().map_err(|_| bad("SET_INTERVAL", args))?;
                let seconds = s.trim().parse::<f64>().map_err(|_| bad("SET_INTERVAL", args))?;
                Ok(Command::SetInterval { index, seconds })
            }
            other => Err(BridgeError::UnknownVerb(other.to_string())),
        }
    }
}

/// Engine-side state behind the bridge: a playback session, the live pose
/// and the exercise being authored or shown.
#[derive(Debug, Clone)]
pub struct BridgeController {
    pub session: Option<Session>,
    pub cursor: PlaybackCursor,
    pub authoring: Exercise,
    pub instructor: Option<Exercise>,
    pub view: Camera,
    pub live: Option<RetargetSet>,
    pub calib: CalibReport,
    pub mount: MountState,
    pub jcs: JcsConfig,
    /// Paths given to `SELECT_EXERCISE`/`SAVE_EXERCISE` resolve against this.
    pub exercise_dir: PathBuf,
    instructor_t_s: f64,
}

impl Default for BridgeController {
    fn default() -> Self {
        BridgeController {
            session: None,
            cursor: PlaybackCursor::new(1.0),
            authoring: Exercise::new("untitled"),
            instructor: None,
            view: Camera::Front,
            live: None,
            calib: CalibReport::new(),
            mount: MountState::default(),
            jcs: JcsConfig::default(),
            exercise_dir: PathBuf::from("."),
            instructor_t_s: 0.0,
        }
    }
}

impl BridgeController {
    pub fn with_session(session: Session) -> Self {
        BridgeController { session: Some(session), ..Default::default() }
    }

    fn resolve(&self, p: &str) -> PathBuf {
        self.exercise_dir.join(p)
    }

    fn session(&self) -> Result<&Session, BridgeError> {
        self.session.as_ref().ok_or_else(|| BridgeError::Rejected("no session loaded".into()))
    }

    pub fn handle(&mut self, cmd: &Command) -> Result<Vec<Event>, BridgeError> {
        match cmd {
            Command::Play | Command::Pause => {
                let session = self.session.as_ref().ok_or_else(|| BridgeError::Rejected("no session loaded".into()))?;
                if *cmd == Command::Play {
                    if self.cursor.at_end(session) {
                        self.cursor.rewind();
                    }
                    self.cursor.play();
                } else {
                    self.cursor.pause();
                }
                Ok(vec![Event::playback(&self.cursor, session)])
            }
            Command::Seek { to_ms } => {
                let session = self.session()?;
                let mut cursor = self.cursor;
                let row = *cursor.seek(session, *to_ms).map_err(|e| BridgeError::Rejected(e.to_string()))?;
                let mut out = vec![Event::playback(&cursor, session)];
                out.extend(Event::from_row(&row));
                self.cursor = cursor;
                Ok(out)
            }
            Command::View(c) => {
                self.view = *c;
                Ok(Vec::new())
            }
            Command::SelectExercise(p) => {
                let text = std::fs::read_to_string(self.resolve(p)).map_err(|e| BridgeError::Rejected(e.to_string()))?;
                let ex = Exercise::parse(&text).map_err(|e| BridgeError::Rejected(e.to_string()))?;
                let pose = ex.trajectory(0.0).expect("validated exercise has keypoints");
                self.instructor = Some(ex);
                self.instructor_t_s = 0.0;
                Ok(vec![Event::pose(0, PoseRole::Instructor, &pose.acute)])
            }
            Command::CaptureKeypoint => {
                let pose = self.live.ok_or_else(|| BridgeError::Rejected("no live pose".into()))?;
                self.authoring.add_keypoint(&pose);
                Ok(Vec::new())
            }
            Command::SetInterval { index, seconds } => {
                self.authoring.set_interval(*index, *seconds).map_err(|e| BridgeError::Rejected(e.to_string()))?;
                Ok(Vec::new())
            }
            Command::SaveExercise(p) => {
                self.authoring.validate().map_err(|e: ExerciseError| BridgeError::Rejected(e.to_string()))?;
                std::fs::write(self.resolve(p), self.authoring.to_text())
                    .map_err(|e| BridgeError::Rejected(e.to_string()))?;
                Ok(Vec::new())
            }
        }
    }

    /// Live frame set from the sensor stream.
    pub fn on_frames(&mut self, frames: &SensorFrameSet) -> Vec<Event> {
        let mut out = Vec::new();
        if let Ok(r) = self.calib.update(frames) {
            self.calib = r;
            out.push(Event::calib(&r));
        }
        self.mount = crate::mount::advise(&self.mount, frames, &self.jcs);
        out.push(Event::mount(&self.mount));
        let rt = retarget(frames);
        self.live = Some(rt);
        out.push(Event::pose(frames.t_ms, PoseRole::Patient, &rt.acute));
        out.push(Event::angles(frames.t_ms, &crate::jcs::joint_angles(frames, &self.jcs)));
        out
    }

    /// Advances playback and the instructor trajectory by wall time.
    pub fn tick(&mut self, wall_dt_ms: f64) -> Vec<Event> {
        let mut out = Vec::new();
        if let Some(session) = &self.session {
            let was_playing = self.cursor.state == PlaybackState::Playing;
            for row in self.cursor.step(session, wall_dt_ms) {
                out.extend(Event::from_row(row));
            }
            if was_playing {
                out.push(Event::playback(&self.cursor, session));
            }
        }
        if let Some(ex) = &self.instructor {
            self.instructor_t_s += wall_dt_ms / 1000.0;
            if self.instructor_t_s > ex.duration_s() {
                self.instructor_t_s = 0.0;
            }
            if let Some(p) = ex.trajectory(self.instructor_t_s) {
                out.push(Event::pose((self.instructor_t_s * 1000.0) as u64, PoseRole::Instructor, &p.acute));
            }
        }
        out
    }
}
