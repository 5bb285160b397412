//! Wire output synthesized from a motion script.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::Path;
use std::time::{Duration, Instant};

use wise_core::stream::source::looks_like_host_port;
use wise_core::stream::{MotionScript, WireFrame};
use wise_core::SegmentId;

use crate::error::CliError;
use crate::settings::read_text;

/// Writes every frame of `script` as five module lines.
pub fn write_script(script: &MotionScript, crc: bool, realtime: bool, out: &mut impl Write) -> io::Result<()> {
    let started = Instant::now();
    for t in script.frame_times() {
        if realtime {
            let due = Duration::from_millis(t);
            std::thread::sleep(due.saturating_sub(started.elapsed()));
        }
        let (frames, _) = script.synthesize(t);
        for seg in SegmentId::ALL {
            let line = WireFrame::from_quat(seg, t, &frames.q(seg), frames.calib[seg]).with_crc(crc).render();
            writeln!(out, "{line}")?;
        }
        if realtime {
            out.flush()?;
        }
    }
    out.flush()
}

pub fn run(script_path: &Path, out: &str, crc: bool, realtime: bool) -> Result<(), CliError> {
    let script = MotionScript::from_toml(&read_text(script_path)?)?;
    let result = if out == "-" {
        write_script(&script, crc, realtime, &mut BufWriter::new(io::stdout().lock()))
    } else if looks_like_host_port(out) {
        let listener = TcpListener::bind(out).map_err(|e| CliError::io(out, e))?;
        eprintln!("LISTENING {}", listener.local_addr()?);
        let (stream, _) = listener.accept().map_err(|e| CliError::io(out, e))?;
        write_script(&script, crc, realtime, &mut BufWriter::new(stream))
    } else {
        let file = File::create(out).map_err(|e| CliError::io(out, e))?;
        write_script(&script, crc, realtime, &mut BufWriter::new(file))
    };
    result.map_err(|e| CliError::io(out, e))
}
