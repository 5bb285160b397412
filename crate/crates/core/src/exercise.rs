//! Keypoint exercises for the instructor avatar and adherence scoring of
//! recorded repetitions.

use thiserror::Error;

use crate::jcs::AngleChannel;
use crate::quat::UnitQuat;
use crate::retarget::RetargetSet;
use crate::segment::{PerSegment, SegmentId};
use crate::session::SessionRow;

pub const EXERCISE_HEADER: &str = "#WISE-EXERCISE v1";
pub const DEFAULT_INTERVAL_S: f64 = 2.0;
pub const DEFAULT_TICK_HZ: f64 = 50.0;
const KEYPOINT_DECIMALS: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExerciseError {
    #[error("missing {EXERCISE_HEADER:?} header")]
    BadHeader,
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("an exercise needs at least two keypoints, found {0}")]
    TooFewKeypoints(usize),
    #[error("interval {index} must be positive, got {value}")]
    BadInterval { index: usize, value: f64 },
    #[error("target angle must be finite and nonzero, got {0}")]
    BadTarget(f64),
}

/// A named sequence of captured poses with the time between each pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Exercise {
    pub name: String,
    pub keypoints: Vec<PerSegment<UnitQuat>>,
    /// Seconds from keypoint `i` to keypoint `i + 1`.
    pub intervals_s: Vec<f64>,
    pub tick_rate_hz: f64,
}

impl Exercise {
    pub fn new(name: impl Into<String>) -> Self {
        Exercise { name: name.into(), keypoints: Vec::new(), intervals_s: Vec::new(), tick_rate_hz: DEFAULT_TICK_HZ }
    }

    /// Appends a captured pose. Every keypoint after the first is reached
    /// over the default interval until edited.
    pub fn add_keypoint(&mut self, pose: &RetargetSet) {
        if !self.keypoints.is_empty() {
            self.intervals_s.push(DEFAULT_INTERVAL_S);
        }
        self.keypoints.push(pose.tilde);
    }

    /// Removes the most recent keypoint.
    pub fn undo(&mut self) -> bool {
        let removed = self.keypoints.pop().is_some();
        self.intervals_s.truncate(self.keypoints.len().saturating_sub(1));
        removed
    }

    pub fn set_interval(&mut self, index: usize, seconds: f64) -> Result<(), ExerciseError> {
        if !(seconds.is_finite() && seconds > 0.0) || index >= self.intervals_s.len() {
            return Err(ExerciseError::BadInterval { index, value: seconds });
        }
        self.intervals_s[index] = seconds;
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.intervals_s.iter().sum()
    }

    pub fn validate(&self) -> Result<(), ExerciseError> {
        if self.keypoints.len() < 2 {
            return Err(ExerciseError::TooFewKeypoints(self.keypoints.len()));
        }
        for (index, &value) in self.intervals_s.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(ExerciseError::BadInterval { index, value });
            }
        }
        Ok(())
    }

    /// Interpolated pose at `t_s`, clamped to the exercise span. `None` for an
    /// exercise without keypoints.
    pub fn trajectory(&self, t_s: f64) -> Option<RetargetSet> {
        let last = self.keypoints.len().checked_sub(1)?;
        let mut t = if t_s.is_nan() { 0.0 } else { t_s.max(0.0) };
        for (i, &dt) in self.intervals_s.iter().enumerate().take(last) {
            if t < dt {
                let u = t / dt;
                let (a, b) = (&self.keypoints[i], &self.keypoints[i + 1]);
                return Some(RetargetSet::from_tilde(a.map(|s, q| q.slerp(&b[s], u))));
            }
            t -= dt;
        }
        Some(RetargetSet::from_tilde(self.keypoints[last]))
    }

    /// Instructor poses sampled at the tick rate over the whole exercise.
    pub fn ticks(&self) -> impl Iterator<Item = (f64, RetargetSet)> + '_ {
        let rate = if self.tick_rate_hz > 0.0 { self.tick_rate_hz } else { DEFAULT_TICK_HZ };
        let n = (self.duration_s() * rate).round() as usize;
        (0..=n).filter_map(move |k| {
            let t = k as f64 / rate;
            self.trajectory(t).map(|p| (t, p))
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{EXERCISE_HEADER}\n#name={}\n#tick_hz={}\n",
            self.name.replace(['\n', '\r'], " "),
            self.tick_rate_hz
        );
        for (i, kp) in self.keypoints.iter().enumerate() {
            let interval = self.intervals_s.get(i).copied().unwrap_or(0.0);
            out.push_str(&format!("K,{interval}"));
            for s in SegmentId::ALL {
                for c in kp[s].to_array() {
                    out.push_str(&format!(",{c:.KEYPOINT_DECIMALS$}"));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Exercise, ExerciseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == EXERCISE_HEADER => {}
            _ => return Err(ExerciseError::BadHeader),
        }
        let mut ex = Exercise::new("");
        let mut trailing = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim_end();
            let line_no = i + 1;
            let bad = |reason: &str| ExerciseError::BadLine { line: line_no, reason: reason.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                match meta.split_once('=') {
                    Some(("name", v)) => ex.name = v.to_string(),
                    Some(("tick_hz", v)) => {
                        ex.tick_rate_hz = v
                            .parse::<f64>()
                            .ok()
                            .filter(|r| r.is_finite() && *r > 0.0)
                            .ok_or_else(|| bad("bad tick_hz"))?
                    }
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.first() != Some(&"K") || fields.len() != 22 {
                return Err(bad("expected K,<interval>,<20 scalars>"));
            }
            let nums: Vec<f64> = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("bad number"))?;
            let mut kp = PerSegment::splat(UnitQuat::IDENTITY);
            for s in SegmentId::ALL {
                let c = &nums[1 + 4 * s.index()..5 + 4 * s.index()];
                let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-6 {
                    return Err(bad("quaternion not unit"));
                }
                kp[s] = UnitQuat::new(c[0], c[1], c[2], c[3]).map_err(|_| bad("quaternion not unit"))?;
            }
            ex.keypoints.push(kp);
            trailing.push(nums[0]);
        }
        // The last keypoint's interval field is a placeholder.
        trailing.pop();
        ex.intervals_s = trailing;
        ex.validate()?;
        Ok(ex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdKind {
    #[default]
    Sample,
    Population,
}

/// Repetition segmentation thresholds, as fractions of the target angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreConfig {
    pub open_fraction: f64,
    pub close_fraction: f64,
    pub std_kind: StdKind,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { open_fraction: 0.2, close_fraction: 0.2, std_kind: StdKind::Sample }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdherenceReport {
    pub target_deg: f64,
    pub channel: AngleChannel,
    pub rep_peaks: Vec<f64>,
    pub rep_count: usize,
    /// `None` when no repetition was found.
    pub mean: Option<f64>,
    /// `None` with too few repetitions for the chosen estimator.
    pub std: Option<f64>,
}

impl AdherenceReport {
    pub fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("undefined".to_string(), |v| format!("{v:.4}"));
        let peaks: Vec<String> = self.rep_peaks.iter().map(|p| format!("{p:.4}")).collect();
        format!(
            "channel={}\ntarget_deg={}\nrep_count={}\nrep_peaks={}\nmean={}\nstd={}\n",
            self.channel.name(),
            self.target_deg,
            self.rep_count,
            peaks.join(","),
            opt(self.mean),
            opt(self.std)
        )
    }
}

/// Mean and standard deviation of `values`.
pub fn mean_std(values: &[f64], kind: StdKind) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let std = match kind {
        StdKind::Sample if n >= 2 => Some((ss / (n - 1) as f64).sqrt()),
        StdKind::Sample => None,
        StdKind::Population => Some((ss / n as f64).sqrt()),
    };
    (Some(mean), std)
}

/// Peak of every repetition in a channel trace. A repetition opens when the
/// value passes `open_fraction · target` and closes when it falls back below
/// `close_fraction · target`; one still open at the end is counted.
pub fn repetition_peaks(values: impl IntoIterator<Item = f64>, target_deg: f64, cfg: &ScoreConfig) -> Vec<f64> {
    let dir = target_deg.signum();
    let open = cfg.open_fraction * target_deg.abs();
    let close = cfg.close_fraction * target_deg.abs();
    let mut peaks = Vec::new();
    let mut current: Option<f64> = None;
    for v in values {
        let along = v * dir;
        current = match current {
            None if along > open => Some(v),
            None => None,
            Some(p) if along < close => {
                peaks.push(p);
                None
            }
            Some(p) => Some(if along > p * dir { v } else { p }),
        };
    }
    peaks.extend(current);
    peaks
}

pub fn score(
    rows: &[SessionRow],
    target_deg: f64,
    channel: AngleChannel,
    cfg: &ScoreConfig,
) -> Result<AdherenceReport, ExerciseError> {
    if !target_deg.is_finite() || target_deg == 0.0 {
        return Err(ExerciseError::BadTarget(target_deg));
    }
    let rep_peaks = repetition_peaks(rows.iter().map(|r| r.angle(channel)), target_deg, cfg);
    let (mean, std) = mean_std(&rep_peaks, cfg.std_kind);
    Ok(AdherenceReport { target_deg, channel, rep_count: rep_peaks.len(), rep_peaks, mean, std })
}
