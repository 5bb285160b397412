//! Recorded sessions: the `.wise-session` text format, seeking and playback.
//!
//! ```text
//! #WISE-SESSION v1
//! #exercise=abduction
//! #subject=S01
//! 0,<20 quaternion scalars>,<12 angles>,<flags>
//! ```
//!
//! Quaternion scalars are `q̃` for B, LA, RA, LF, RF in `(w, x, y, z)` order
//! with six decimals; angles use four decimals, left side then right.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::jcs::{joint_angles, AngleChannel, JcsConfig, JointAngles};
use crate::quat::UnitQuat;
use crate::retarget::{retarget, SensorFrameSet};
use crate::segment::{PerSegment, SegmentId};

pub const SESSION_HEADER: &str = "#WISE-SESSION v1";
pub const QUAT_DECIMALS: usize = 6;
pub const ANGLE_DECIMALS: usize = 4;
pub const COLUMN_COUNT: usize = 1 + 20 + 12 + 1;
pub const FLUSH_INTERVAL: Duration = Duration::from_secs(1);

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
    #[error("missing {SESSION_HEADER:?} header")]
    BadHeader,
    #[error("line {line}: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("line {line}: t_ms {t_ms} not after {previous}")]
    NonMonotonic { line: usize, t_ms: u64, previous: u64 },
    #[error("session has no rows")]
    NoData,
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Io(_) => "IO",
            SessionError::NoData => "NO_DATA",
            _ => "DATA_FORMAT",
        }
    }
}

/// Round-trips `v` through its decimal text at `decimals` places.
pub fn quantize(v: f64, decimals: usize) -> f64 {
    format!("{v:.decimals$}").parse::<f64>().unwrap_or(v) + 0.0
}

/// One recorded frame, already at file precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionRow {
    pub t_ms: u64,
    pub quats: [f64; 20],
    pub angles: [f64; 12],
    pub flags: u8,
}

impl SessionRow {
    pub fn new(t_ms: u64, tilde: &PerSegment<UnitQuat>, angles: &JointAngles) -> Self {
        let mut quats = [0.0; 20];
        for (s, q) in tilde.iter() {
            for (k, c) in q.to_array().into_iter().enumerate() {
                quats[4 * s.index() + k] = quantize(c, QUAT_DECIMALS);
            }
        }
        SessionRow {
            t_ms,
            quats,
            angles: angles.to_array().map(|a| quantize(a, ANGLE_DECIMALS)),
            flags: angles.singular_mask(),
        }
    }

    /// Row for a live frame set: retargeted rotations plus joint angles.
    pub fn from_frames(frames: &SensorFrameSet, cfg: &JcsConfig) -> Self {
        let rt = retarget(frames);
        SessionRow::new(frames.t_ms, &rt.tilde, &joint_angles(frames, cfg))
    }

    pub fn pose(&self) -> PerSegment<UnitQuat> {
        PerSegment::from_fn(|s| {
            let i = 4 * s.index();
            let c = &self.quats[i..i + 4];
            UnitQuat::new(c[0], c[1], c[2], c[3]).unwrap_or(UnitQuat::IDENTITY)
        })
    }

    pub fn joint_angles(&self) -> JointAngles {
        JointAngles::from_parts(self.angles, self.flags)
    }

    pub fn angle(&self, channel: AngleChannel) -> f64 {
        self.angles[channel.index()]
    }

    /// The twelve angle fields exactly as written to the file.
    pub fn angle_text(&self) -> String {
        self.angles.iter().map(|a| format!("{a:.ANGLE_DECIMALS$}")).collect::<Vec<_>>().join(",")
    }

    pub fn render(&self) -> String {
        let mut out = self.t_ms.to_string();
        for q in self.quats {
            out.push_str(&format!(",{q:.QUAT_DECIMALS$}"));
        }
        out.push(',');
        out.push_str(&self.angle_text());
        out.push_str(&format!(",{}", self.flags));
        out
    }

    pub fn parse(line: &str, line_no: usize) -> Result<SessionRow, SessionError> {
        let bad = |reason: String| SessionError::BadRow { line: line_no, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMN_COUNT {
            return Err(bad(format!("expected {COLUMN_COUNT} fields, found {}", fields.len())));
        }
        let t_ms = fields[0].parse::<u64>().map_err(|_| bad("bad t_ms".into()))?;
        let num = |i: usize| -> Result<f64, SessionError> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad number in column {}", i + 1)))
        };
        let mut quats = [0.0; 20];
        for (k, q) in quats.iter_mut().enumerate() {
            *q = num(1 + k)?;
        }
        for s in SegmentId::ALL {
            let c = &quats[4 * s.index()..4 * s.index() + 4];
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-4 {
                return Err(bad(format!("{s} quaternion norm {norm}")));
            }
        }
        let mut angles = [0.0; 12];
        for (k, a) in angles.iter_mut().enumerate() {
            *a = num(21 + k)?;
        }
        let flags = fields[33].parse::<u8>().map_err(|_| bad("bad flags".into()))?;
        Ok(SessionRow { t_ms, quats, angles, flags })
    }
}

/// Column names, in file order.
pub fn column_names() -> Vec<String> {
    let mut cols = vec!["t_ms".to_string()];
    for s in SegmentId::ALL {
        for c in ["w", "x", "y", "z"] {
            cols.push(format!("{s}_{c}"));
        }
    }
    cols.extend(AngleChannel::all().map(|c| c.name()));
    cols.push("flags".into());
    cols
}

/// Streams rows into a sink, flushing at least once per second of either
/// wall time or session time.
pub struct SessionWriter<W: Write> {
    sink: W,
    last_t: Option<u64>,
    last_flush_t: u64,
    last_flush: Instant,
    rows: usize,
}

impl<W: Write> SessionWriter<W> {
    /// Writes the header and metadata lines and flushes them.
    pub fn new(mut sink: W, meta: &[(&str, &str)]) -> Result<Self, SessionError> {
        writeln!(sink, "{SESSION_HEADER}")?;
        for (k, v) in meta {
            writeln!(sink, "#{k}={}", v.replace('\n', " "))?;
        }
        writeln!(sink, "#columns={}", column_names().join(","))?;
        sink.flush()?;
        Ok(SessionWriter { sink, last_t: None, last_flush_t: 0, last_flush: Instant::now(), rows: 0 })
    }

    pub fn push(&mut self, row: &SessionRow) -> Result<(), SessionError> {
        if let Some(prev) = self.last_t {
            if row.t_ms <= prev {
                return Err(SessionError::NonMonotonic { line: self.rows + 1, t_ms: row.t_ms, previous: prev });
            }
        }
        writeln!(self.sink, "{}", row.render())?;
        self.rows += 1;
        self.last_t = Some(row.t_ms);
        if row.t_ms.saturating_sub(self.last_flush_t) >= FLUSH_INTERVAL.as_millis() as u64
            || self.last_flush.elapsed() >= FLUSH_INTERVAL
        {
            self.sink.flush()?;
            self.last_flush_t = row.t_ms;
            self.last_flush = Instant::now();
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> Result<W, SessionError> {
        self.sink.flush()?;
        Ok(self.sink)
    }
}

/// A loaded session.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Session {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<SessionRow>,
}

/// Non-fatal problems found while reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadWarning {
    /// The last line had no terminator and was dropped.
    TornFinalLine { line: usize },
}

impl Session {
    pub fn parse(text: &str) -> Result<(Session, Vec<ReadWarning>), SessionError> {
        let mut warnings = Vec::new();
        let mut lines: Vec<&str> = text.split('\n').collect();
        // A complete file ends with LF, leaving an empty tail element.
        let tail = lines.pop().unwrap_or("");
        if !tail.is_empty() {
            warnings.push(ReadWarning::TornFinalLine { line: lines.len() + 1 });
        }
        let mut it = lines.iter().enumerate();
        match it.next() {
            Some((_, h)) if h.trim_end_matches('\r') == SESSION_HEADER => {}
            _ => return Err(SessionError::BadHeader),
        }
        let mut session = Session::default();
        for (i, raw) in it {
            let line = raw.trim_end_matches('\r');
            let line_no = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once('=') {
                    if k != "columns" {
                        session.meta.push((k.to_string(), v.to_string()));
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let row = SessionRow::parse(line, line_no)?;
            if let Some(prev) = session.rows.last() {
                if row.t_ms <= prev.t_ms {
                    return Err(SessionError::NonMonotonic { line: line_no, t_ms: row.t_ms, previous: prev.t_ms });
                }
            }
            session.rows.push(row);
        }
        Ok((session, warnings))
    }

    pub fn render(&self) -> String {
        let meta: Vec<(&str, &str)> = self.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let mut w = SessionWriter::new(Vec::new(), &meta).expect("in-memory write");
        for r in &self.rows {
            w.push(r).expect("rows are ordered");
        }
        String::from_utf8(w.finish().expect("in-memory flush")).expect("ASCII output")
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn start_ms(&self) -> Option<u64> {
        self.rows.first().map(|r| r.t_ms)
    }

    /// Time from the first to the last row.
    pub fn duration_ms(&self) -> u64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.t_ms - a.t_ms,
            _ => 0,
        }
    }

    /// Index of the greatest row with `t_ms ≤ to_ms`, clamped to the first row.
    pub fn seek_index(&self, to_ms: u64) -> Result<usize, SessionError> {
        if self.rows.is_empty() {
            return Err(SessionError::NoData);
        }
        Ok(self.rows.partition_point(|r| r.t_ms <= to_ms).max(1) - 1)
    }

    pub fn seek(&self, to_ms: u64) -> Result<&SessionRow, SessionError> {
        self.seek_index(to_ms).map(|i| &self.rows[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaybackState {
    Playing,
    Paused,
}

/// Media-player position over a session. Positions are relative to the first
/// row and stay within `0..=duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaybackCursor {
    pub position_ms: f64,
    pub state: PlaybackState,
    pub rate: f64,
    next: usize,
}

impl Default for PlaybackCursor {
    fn default() -> Self {
        PlaybackCursor { position_ms: 0.0, state: PlaybackState::Paused, rate: 1.0, next: 0 }
    }
}

impl PlaybackCursor {
    pub fn new(rate: f64) -> Self {
        PlaybackCursor { rate: if rate.is_finite() && rate > 0.0 { rate } else { 1.0 }, ..Default::default() }
    }

    pub fn play(&mut self) {
        self.state = PlaybackState::Playing;
    }

    pub fn pause(&mut self) {
        self.state = PlaybackState::Paused;
    }

    /// Back to the start, with the first row not yet emitted.
    pub fn rewind(&mut self) {
        self.position_ms = 0.0;
        self.next = 0;
    }

    /// Moves to `to_ms` (relative, clamped) and returns the row shown there.
    /// Playback resumes with the row after it.
    pub fn seek<'a>(&mut self, session: &'a Session, to_ms: f64) -> Result<&'a SessionRow, SessionError> {
        let start = session.start_ms().ok_or(SessionError::NoData)?;
        let pos = to_ms.clamp(0.0, session.duration_ms() as f64);
        let i = session.seek_index(start + pos.floor() as u64)?;
        self.position_ms = pos;
        self.next = i + 1;
        Ok(&session.rows[i])
    }

    /// Rows whose relative time has been reached and not yet emitted.
    pub fn step<'a>(&mut self, session: &'a Session, wall_dt_ms: f64) -> &'a [SessionRow] {
        if self.state == PlaybackState::Paused || session.rows.is_empty() {
            return &[];
        }
        let start = session.rows[0].t_ms;
        let duration = session.duration_ms() as f64;
        self.position_ms = (self.position_ms + self.rate * wall_dt_ms.max(0.0)).min(duration);
        let first = self.next.min(session.rows.len());
        let mut end = first;
        while end < session.rows.len() && ((session.rows[end].t_ms - start) as f64) <= self.position_ms {
            end += 1;
        }
        self.next = end;
        if self.position_ms >= duration && end == session.rows.len() {
            self.state = PlaybackState::Paused;
        }
        &session.rows[first..end]
    }

    pub fn at_end(&self, session: &Session) -> bool {
        self.next >= session.rows.len()
    }
}
