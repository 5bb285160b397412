//! `wise`: operator entry point for calibration, mounting, recording,
//! playback, exercise authoring, scoring, simulation, games and the UI
//! bridge.

mod author;
mod error;
mod game;
mod ingest;
mod serve;
mod settings;
mod simulate;
mod workflows;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "wise", version, about = "Inertial motion capture and exergame engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Source and profile options shared by the streaming subcommands.
#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    /// `-` for stdin, `host:port`, or a file or device path.
    #[arg(long)]
    pub source: String,
    /// Subject profile (TOML).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Frame-set assembly window, milliseconds.
    #[arg(long)]
    pub window_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "L")]
    L,
    #[value(name = "R")]
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameKind {
    Fork,
    Grasp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Follow sensor calibration until every level reaches 3.
    Calibrate {
        #[command(flatten)]
        stream: StreamArgs,
        /// Give up after this many seconds of stream or wall time.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Stream mounting cues for one arm until the alignment is confirmed.
    Mount {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        hold_ms: Option<u64>,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Record a session file from a live or replayed stream.
    Record {
        #[command(flatten)]
        stream: StreamArgs,
        /// Session file, or `-` for stdout.
        #[arg(long)]
        out: String,
        /// Exercise whose instructor trajectory is streamed alongside.
        #[arg(long)]
        exercise: Option<PathBuf>,
        /// Subject alias written into the session metadata.
        #[arg(long)]
        subject: Option<String>,
    },
    /// Replay a session as bridge events on stdout.
    Play {
        session: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Start position, milliseconds from the first row.
        #[arg(long)]
        seek: Option<f64>,
        /// Pace output by the wall clock.
        #[arg(long)]
        realtime: bool,
        /// Playback tick, milliseconds of wall time.
        #[arg(long, default_value_t = 20.0)]
        tick_ms: f64,
    },
    /// Capture exercise keypoints from stdin commands.
    Author {
        #[arg(long)]
        out: PathBuf,
        /// Live pose source.
        #[arg(long, conflicts_with = "script", required_unless_present = "script")]
        source: Option<String>,
        /// Simulated pose source; `capture <t_ms>` samples it.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value = "untitled")]
        name: String,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Score a recorded session against a target angle.
    Score {
        session: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        /// Angle channel, for example `L_shoulder_elevation`.
        #[arg(long)]
        channel: String,
        /// Population instead of sample standard deviation.
        #[arg(long)]
        population: bool,
        #[arg(long)]
        open_fraction: Option<f64>,
        #[arg(long)]
        close_fraction: Option<f64>,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Emit wire lines from a motion script.
    Simulate {
        #[arg(long)]
        script: PathBuf,
        /// `-` for stdout, `host:port` to serve one client, or a file path.
        #[arg(long, default_value = "-")]
        out: String,
        /// Append a CRC to every line.
        #[arg(long)]
        crc: bool,
        /// Pace output by the script's frame rate.
        #[arg(long)]
        realtime: bool,
    },
    /// Run a game headless on device readings.
    Game {
        #[arg(value_enum)]
        kind: GameKind,
        #[command(flatten)]
        stream: StreamArgs,
        /// Progress log to append to.
        #[arg(long, default_value = ".wise-progress")]
        progress: PathBuf,
        /// Starting level (grasp game).
        #[arg(long, default_value_t = 1)]
        level: u8,
    },
    /// Host the UI bridge on a local socket.
    Serve {
        #[arg(long)]
        listen: String,
        #[arg(long)]
        session: Option<PathBuf>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long, default_value = ".")]
        exercise_dir: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Exit once the last client disconnects.
        #[arg(long)]
        exit_when_idle: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Calibrate { stream, timeout } => workflows::calibrate(&stream, timeout),
        Command::Mount { stream, side, hold_ms, timeout } => workflows::mount(&stream, side, hold_ms, timeout),
        Command::Record { stream, out, exercise, subject } => {
            workflows::record(&stream, &out, exercise.as_deref(), subject.as_deref())
        }
        Command::Play { session, rate, seek, realtime, tick_ms } => {
            workflows::play(&session, rate, seek, realtime, tick_ms)
        }
        Command::Author { out, source, script, name, profile } => {
            author::run(&out, source.as_deref(), script.as_deref(), &name, profile.as_deref())
        }
        Command::Score { session, target, channel, population, open_fraction, close_fraction, profile } => {
            workflows::score(&session, target, &channel, population, open_fraction, close_fraction, profile.as_deref())
        }
        Command::Simulate { script, out, crc, realtime } => simulate::run(&script, &out, crc, realtime),
        Command::Game { kind, stream, progress, level } => game::run(kind, &stream, &progress, level),
        Command::Serve { listen, session, source, exercise_dir, profile, exit_when_idle } => serve::run(serve::Options {
            listen,
            session,
            source,
            exercise_dir,
            profile,
            exit_when_idle,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprint!("{text}");
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::usage(first));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
