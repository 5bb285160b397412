//! Calibration, mounting, recording, playback and scoring.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use wise_core::bridge::Event;
use wise_core::exercise::{score as score_rows, Exercise, ScoreConfig, StdKind};
use wise_core::mount::{advise, confirm, MountState, DEFAULT_CONFIRM_HOLD_MS};
use wise_core::session::{ReadWarning, Session, SessionError, SessionRow, SessionWriter};
use wise_core::{AngleChannel, CalibReport, Side};

use crate::error::{CliError, Status};
use crate::ingest::{Ingest, Input, Next};
use crate::settings::{load_profile, pick, read_text, window_ms};
use crate::{SideArg, StreamArgs};

const POLL: Duration = Duration::from_millis(100);

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::L => Side::Left,
            SideArg::R => Side::Right,
        }
    }
}

fn timeout_secs(t: Option<f64>) -> Result<Option<f64>, CliError> {
    match t {
        Some(s) if !(s.is_finite() && s > 0.0) => Err(CliError::usage(format!("--timeout must be positive, got {s}"))),
        t => Ok(t),
    }
}

fn stdout_error(e: io::Error) -> CliError {
    CliError::io("stdout", e)
}

pub fn calibrate(args: &StreamArgs, timeout: Option<f64>) -> Result<(), CliError> {
    let timeout = timeout_secs(timeout)?;
    let profile = load_profile(args.profile.as_deref())?;
    let mut ingest = Ingest::open(&args.source, window_ms(args, &profile), profile.offsets)?;
    let started = Instant::now();
    let mut report = CalibReport::new();
    let mut shown: Option<CalibReport> = None;
    let mut out = io::stdout().lock();
    loop {
        let expired = |r: &CalibReport| timeout.is_some_and(|s| r.elapsed() > s || started.elapsed().as_secs_f64() > s);
        match ingest.next(POLL)? {
            Next::Item(Input::Set(set)) => {
                report = match report.update(&set) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("WARN BAD_LEVEL {e}");
                        continue;
                    }
                };
                if shown.map(|s| s.levels) != Some(report.levels) {
                    write!(out, "t_ms={}\n{}", set.t_ms, report.render_bars()).map_err(stdout_error)?;
                    shown = Some(report);
                }
                if report.overall_ready {
                    writeln!(out, "READY elapsed_s={:.3}", report.elapsed()).map_err(stdout_error)?;
                    return Ok(());
                }
                if expired(&report) {
                    return Err(CliError::timeout(format!("not ready after {:.3} s", report.elapsed())));
                }
            }
            Next::Item(Input::Force(_)) => {}
            Next::Idle if expired(&report) => {
                return Err(CliError::timeout(format!("no readiness within {} s", timeout.unwrap_or(0.0))));
            }
            Next::Idle => {}
            Next::End => {
                return Err(CliError::new(
                    Status::Timeout,
                    "NOT_READY",
                    format!("stream ended before readiness, next step {}", report.next_step),
                ))
            }
        }
    }
}

pub fn mount(args: &StreamArgs, side: SideArg, hold_ms: Option<u64>, timeout: Option<f64>) -> Result<(), CliError> {
    let timeout = timeout_secs(timeout)?;
    let side = Side::from(side);
    let profile = load_profile(args.profile.as_deref())?;
    let hold = pick(hold_ms, profile.config.confirm_hold_ms, DEFAULT_CONFIRM_HOLD_MS);
    let jcs = profile.jcs();
    let mut ingest = Ingest::open(&args.source, window_ms(args, &profile), profile.offsets)?;
    let started = Instant::now();
    let mut state = MountState::default();
    let mut first_t: Option<u64> = None;
    let mut last_shown: Option<(u64, wise_core::mount::Cue)> = None;
    let mut out = io::stdout().lock();
    loop {
        let stream_s = |state: &MountState, first: Option<u64>| {
            first.map_or(0.0, |t0| state.t_ms.saturating_sub(t0) as f64 / 1000.0)
        };
        let expired = |state: &MountState, first: Option<u64>| {
            timeout.is_some_and(|s| stream_s(state, first) > s || started.elapsed().as_secs_f64() > s)
        };
        match ingest.next(POLL)? {
            Next::Item(Input::Set(set)) => {
                first_t.get_or_insert(set.t_ms);
                state = advise(&state, &set, &jcs);
                let m = state.side(side);
                let due = match last_shown {
                    None => true,
                    Some((t, cue)) => cue != m.cue || state.t_ms.saturating_sub(t) >= 1000,
                };
                if due {
                    writeln!(
                        out,
                        "MOUNT t_ms={} side={} ie_deg={:.3} carrying_deg={:.3} cue={}",
                        state.t_ms,
                        side.letter(),
                        m.ie_rotation,
                        m.carrying,
                        m.cue
                    )
                    .map_err(stdout_error)?;
                    last_shown = Some((state.t_ms, m.cue));
                }
                if confirm(&state, side, hold) {
                    writeln!(out, "CONFIRMED side={} t_ms={}", side.letter(), state.t_ms).map_err(stdout_error)?;
                    return Ok(());
                }
                if expired(&state, first_t) {
                    let waited = stream_s(&state, first_t);
                    return Err(CliError::timeout(format!("mounting not confirmed after {waited:.3} s")));
                }
            }
            Next::Item(Input::Force(_)) => {}
            Next::Idle if expired(&state, first_t) => return Err(CliError::timeout("mounting not confirmed")),
            Next::Idle => {}
            Next::End => {
                return Err(CliError::new(Status::Timeout, "NOT_CONFIRMED", "stream ended before alignment held"))
            }
        }
    }
}

pub fn record(
    args: &StreamArgs,
    out_path: &str,
    exercise: Option<&Path>,
    subject: Option<&str>,
) -> Result<(), CliError> {
    let profile = load_profile(args.profile.as_deref())?;
    let jcs = profile.jcs();
    let exercise = match exercise {
        Some(p) => Some(Exercise::parse(&read_text(p)?)?),
        None => None,
    };
    let subject = subject.unwrap_or(&profile.alias).to_string();
    let mut meta: Vec<(&str, &str)> = vec![("subject", &subject), ("source", &args.source)];
    if let Some(ex) = &exercise {
        meta.push(("exercise", &ex.name));
    }
    let sink: Box<dyn Write> = if out_path == "-" {
        Box::new(io::stdout())
    } else {
        Box::new(File::create(out_path).map_err(|e| CliError::io(out_path, e))?)
    };
    let mut writer = SessionWriter::new(BufWriter::new(sink), &meta)?;
    // Instructor poses go to stdout unless the session itself does.
    let mut events = (out_path != "-").then(|| io::stdout().lock());
    let mut ingest = Ingest::open(&args.source, window_ms(args, &profile), profile.offsets)?;
    let mut first_t: Option<u64> = None;
    loop {
        match ingest.next(POLL)? {
            Next::Item(Input::Set(set)) => {
                let row = SessionRow::from_frames(&set, &jcs);
                match writer.push(&row) {
                    Ok(()) => {}
                    Err(e @ SessionError::NonMonotonic { .. }) => {
                        eprintln!("WARN NON_MONOTONIC {e}");
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                }
                let t0 = *first_t.get_or_insert(set.t_ms);
                if let (Some(ex), Some(out)) = (&exercise, events.as_mut()) {
                    let dur = ex.duration_s();
                    let rel = (set.t_ms - t0) as f64 / 1000.0;
                    let t = if dur > 0.0 { rel % dur } else { 0.0 };
                    if let Some(pose) = ex.trajectory(t) {
                        let evt = Event::pose(set.t_ms, wise_core::bridge::PoseRole::Instructor, &pose.acute);
                        writeln!(out, "{}", evt.render()).map_err(stdout_error)?;
                    }
                }
            }
            Next::Item(Input::Force(_)) | Next::Idle => {}
            Next::End => break,
        }
    }
    let rows = writer.rows();
    writer.finish()?;
    eprintln!("RECORDED rows={rows} warnings={}", ingest.warnings());
    Ok(())
}

pub fn load_session(path: &Path) -> Result<Session, CliError> {
    let (session, warnings) = Session::parse(&read_text(path)?)?;
    for w in warnings {
        match w {
            ReadWarning::TornFinalLine { line } => eprintln!("WARN TORN_LINE dropped unterminated line {line}"),
        }
    }
    Ok(session)
}

pub fn play(path: &Path, rate: f64, seek: Option<f64>, realtime: bool, tick_ms: f64) -> Result<(), CliError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(CliError::usage(format!("--rate must be positive, got {rate}")));
    }
    if !(tick_ms.is_finite() && tick_ms > 0.0) {
        return Err(CliError::usage(format!("--tick-ms must be positive, got {tick_ms}")));
    }
    let session = load_session(path)?;
    if session.rows.is_empty() {
        return Err(SessionError::NoData.into());
    }
    let mut out = BufWriter::new(io::stdout().lock());
    let mut emit = |e: &Event| writeln!(out, "{}", e.render()).map_err(stdout_error);
    let mut cursor = wise_core::session::PlaybackCursor::new(rate);
    if let Some(to) = seek {
        let row = *cursor.seek(&session, to)?;
        emit(&Event::playback(&cursor, &session))?;
        for e in Event::from_row(&row) {
            emit(&e)?;
        }
    }
    cursor.play();
    emit(&Event::playback(&cursor, &session))?;
    let tick = Duration::from_secs_f64(tick_ms / 1000.0);
    while cursor.state == wise_core::session::PlaybackState::Playing {
        let started = Instant::now();
        for row in cursor.step(&session, tick_ms) {
            for e in Event::from_row(row) {
                emit(&e)?;
            }
        }
        if realtime {
            std::thread::sleep(tick.saturating_sub(started.elapsed()));
        }
    }
    emit(&Event::playback(&cursor, &session))?;
    drop(emit);
    out.flush().map_err(stdout_error)
}

#[allow(clippy::too_many_arguments)]
pub fn score(
    path: &Path,
    target: f64,
    channel: &str,
    population: bool,
    open_fraction: Option<f64>,
    close_fraction: Option<f64>,
    profile: Option<&Path>,
) -> Result<(), CliError> {
    let channel =
        AngleChannel::parse(channel).ok_or_else(|| CliError::usage(format!("unknown channel {channel:?}")))?;
    let profile = load_profile(profile)?;
    let defaults = ScoreConfig::default();
    let cfg = ScoreConfig {
        open_fraction: pick(open_fraction, profile.config.score_open_fraction, defaults.open_fraction),
        close_fraction: pick(close_fraction, profile.config.score_close_fraction, defaults.close_fraction),
        std_kind: if population { StdKind::Population } else { StdKind::Sample },
    };
    let session = load_session(path)?;
    let report = score_rows(&session.rows, target, channel, &cfg).map_err(|e| CliError::usage(e.to_string()))?;
    print!("{}", report.render());
    Ok(())
}
