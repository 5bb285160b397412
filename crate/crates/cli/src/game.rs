//! Headless game runs over device readings.

use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use wise_core::bridge::Event;
use wise_core::game::progress::append_progress;
use wise_core::game::{
    fork_step, grasp_step, DeviceInputs, ForkConfig, ForkLevelState, GraspConfig, GraspLevelState, Outcome,
    ProgressRecord,
};

use crate::error::CliError;
use crate::ingest::{Ingest, Input, Next};
use crate::settings::{load_profile, window_ms};
use crate::{GameKind, StreamArgs};

const POLL: Duration = Duration::from_millis(200);

fn game_event(game: &str, level: u8, status: &str, score: u32, event: impl ToString) -> String {
    Event::Game { game: game.into(), level, status: status.into(), score, event: event.to_string() }.render()
}

pub fn run(kind: GameKind, args: &StreamArgs, progress: &Path, level: u8) -> Result<(), CliError> {
    if !(1..=3).contains(&level) {
        return Err(CliError::usage(format!("--level must be 1, 2 or 3, got {level}")));
    }
    let profile = load_profile(args.profile.as_deref())?;
    let mut ingest = Ingest::open(&args.source, window_ms(args, &profile), profile.offsets)?;
    let mut out = io::stdout().lock();
    let mut inputs = DeviceInputs::default();
    let mut last_t: Option<u64> = None;
    let record = match kind {
        GameKind::Fork => {
            let mut cfg = ForkConfig::new(profile.calib_force_n());
            cfg.poke_fraction = profile.config.poke_fraction.unwrap_or(cfg.poke_fraction);
            cfg.cut_fraction = profile.config.cut_fraction.unwrap_or(cfg.cut_fraction);
            let mut state = ForkLevelState::new(cfg)?;
            state.level = level;
            writeln!(out, "{}", game_event("fork", state.level, state.phase.as_str(), state.score, "START"))?;
            while !state.is_complete() {
                let frame = match ingest.next(POLL)? {
                    Next::Item(Input::Force(f)) => f,
                    Next::Item(Input::Set(_)) | Next::Idle => continue,
                    Next::End => break,
                };
                inputs.apply(&frame);
                let dt = last_t.map_or(0, |t| frame.t_ms.saturating_sub(t));
                last_t = Some(inputs.t_ms);
                let (next, events) = fork_step(&state, &inputs.fork, dt)?;
                state = next;
                for e in events {
                    writeln!(out, "{}", game_event("fork", state.level, state.phase.as_str(), state.score, e))?;
                }
            }
            ProgressRecord {
                timestamp_ms: inputs.t_ms,
                game: "fork".into(),
                level: state.level,
                completions: state.total_completions,
                elapsed_ms: state.timer_ms,
                peak_grasp_n: state.peaks.grasp_n,
                peak_secondary_n: state.peaks.poke_n.max(state.peaks.cut_n),
                score: state.score,
            }
        }
        GameKind::Grasp => {
            let defaults = GraspConfig::default();
            let cfg = GraspConfig {
                grasp_limit_n: profile.config.grasp_limit_n.unwrap_or(defaults.grasp_limit_n),
                jump_k_m_per_n: profile.config.jump_k_m_per_n.unwrap_or(defaults.jump_k_m_per_n),
                ..defaults
            };
            let mut state = GraspLevelState::new(level, &cfg);
            writeln!(out, "{}", game_event("grasp", state.level, state.outcome.as_str(), state.stars, "START"))?;
            while !state.is_over() {
                let frame = match ingest.next(POLL)? {
                    Next::Item(Input::Force(f)) => f,
                    Next::Item(Input::Set(_)) | Next::Idle => continue,
                    Next::End => break,
                };
                inputs.apply(&frame);
                if inputs.grasp.is_none() {
                    continue;
                }
                let dt = last_t.map_or(0, |t| frame.t_ms.saturating_sub(t));
                last_t = Some(inputs.t_ms);
                let (next, events) = grasp_step(&state, &inputs.grasp_input(), dt, &cfg)?;
                state = next;
                for e in events {
                    writeln!(out, "{}", game_event("grasp", state.level, state.outcome.as_str(), state.stars, e))?;
                }
            }
            ProgressRecord {
                timestamp_ms: inputs.t_ms,
                game: "grasp".into(),
                level: state.level,
                completions: u32::from(state.outcome == Outcome::Win),
                elapsed_ms: state.elapsed_ms,
                peak_grasp_n: state.peak_grasp_n,
                peak_secondary_n: state.peak_lift_n,
                score: state.stars,
            }
        }
    };
    append_progress(progress, &record).map_err(|e| CliError::io(&progress.display().to_string(), e))?;
    writeln!(out, "PROGRESS {}", record.render())?;
    Ok(())
}
