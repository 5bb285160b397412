//! Keypoint capture driven by stdin commands:
//!
//! ```text
//! capture [t_ms]      add the current pose (scripted poses need t_ms)
//! undo                drop the last keypoint
//! interval <i> <s>    seconds between keypoints i and i+1
//! save                write the exercise to --out
//! quit
//! ```
//!
//! Every command is answered with one `OK ...` or `ERR <CODE> ...` line.

use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use wise_core::exercise::Exercise;
use wise_core::stream::MotionScript;
use wise_core::{retarget, RetargetSet};

use crate::error::CliError;
use crate::ingest::{Ingest, Input, Next};
use crate::settings::{load_profile, read_text};

enum PoseSource {
    Script(MotionScript),
    Live(Arc<Mutex<Option<RetargetSet>>>),
}

impl PoseSource {
    fn pose(&self, arg: Option<&str>) -> Result<RetargetSet, String> {
        match self {
            PoseSource::Script(script) => {
                let t: u64 = arg
                    .ok_or("NEED_TIME capture needs t_ms with a script")?
                    .parse()
                    .map_err(|_| "BAD_ARGUMENT t_ms must be a non-negative integer")?;
                Ok(retarget(&script.synthesize(t).0))
            }
            PoseSource::Live(latest) => {
                let pose = *latest.lock().unwrap_or_else(|p| p.into_inner());
                pose.ok_or_else(|| "NO_POSE no frame set received yet".to_string())
            }
        }
    }
}

fn spawn_live(source: &str, profile: Option<&Path>) -> Result<PoseSource, CliError> {
    let profile = load_profile(profile)?;
    let window = profile.config.window_ms.unwrap_or(wise_core::stream::assemble::DEFAULT_WINDOW_MS);
    let mut ingest = Ingest::open(source, window, profile.offsets)?;
    let latest = Arc::new(Mutex::new(None));
    let shared = Arc::clone(&latest);
    std::thread::spawn(move || loop {
        match ingest.next(Duration::from_millis(200)) {
            Ok(Next::Item(Input::Set(set))) => {
                *shared.lock().unwrap_or_else(|p| p.into_inner()) = Some(retarget(&set));
            }
            Ok(Next::End) => break,
            Err(e) => {
                eprintln!("{e}");
                break;
            }
            Ok(_) => {}
        }
    });
    Ok(PoseSource::Live(latest))
}

pub fn run(
    out_path: &Path,
    source: Option<&str>,
    script: Option<&Path>,
    name: &str,
    profile: Option<&Path>,
) -> Result<(), CliError> {
    let poses = match (source, script) {
        (_, Some(p)) => PoseSource::Script(MotionScript::from_toml(&read_text(p)?)?),
        (Some(s), None) => spawn_live(s, profile)?,
        (None, None) => return Err(CliError::usage("author needs --source or --script")),
    };
    let mut exercise = Exercise::new(name);
    let mut out = io::stdout().lock();
    for line in io::stdin().lock().lines() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let reply = match words.as_slice() {
            [] => continue,
            ["capture"] | ["capture", _] => poses.pose(words.get(1).copied()).map(|pose| {
                exercise.add_keypoint(&pose);
                format!("keypoints={}", exercise.keypoints.len())
            }),
            ["undo"] => {
                if exercise.undo() {
                    Ok(format!("keypoints={}", exercise.keypoints.len()))
                } else {
                    Err("NOTHING_TO_UNDO no keypoints".to_string())
                }
            }
            ["interval", i, s] => match (i.parse::<usize>(), s.parse::<f64>()) {
                (Ok(i), Ok(s)) => exercise
                    .set_interval(i, s)
                    .map(|()| format!("interval {i}={s}"))
                    .map_err(|e| format!("BAD_INTERVAL {e}")),
                _ => Err("BAD_ARGUMENT interval <index> <seconds>".to_string()),
            },
            ["save"] => match exercise.validate() {
                Ok(()) => {
                    std::fs::write(out_path, exercise.to_text())
                        .map_err(|e| CliError::io(&out_path.display().to_string(), e))?;
                    Ok(format!("saved {} keypoints={}", out_path.display(), exercise.keypoints.len()))
                }
                Err(e) => Err(format!("BAD_EXERCISE {e}")),
            },
            ["quit"] => break,
            _ => Err(format!("UNKNOWN_COMMAND {line}")),
        };
        match reply {
            Ok(msg) => writeln!(out, "OK {msg}")?,
            Err(msg) => writeln!(out, "ERR {msg}")?,
        }
        out.flush()?;
    }
    Ok(())
}
