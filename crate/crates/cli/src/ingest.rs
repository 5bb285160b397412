//! Stream ingestion: a reader thread feeds the bounded queue, and the
//! workflow thread pulls assembled frame sets and device readings from it.

use std::io;
use std::thread::JoinHandle;
use std::time::Duration;

use wise_core::retarget::correct;
use wise_core::stream::queue::DEFAULT_CAPACITY;
use wise_core::stream::source::{spawn_reader, Delivery};
use wise_core::stream::{Assembler, ForceFrame, FrameQueue, Pop, SourceSpec, WireMessage};
use wise_core::{PerSegment, SensorFrameSet, UnitQuat};

use crate::error::CliError;

/// Warnings printed per stream before going quiet.
const WARN_LIMIT: u64 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Set(SensorFrameSet),
    Force(ForceFrame),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Next {
    Item(Input),
    /// Nothing arrived within the wait.
    Idle,
    End,
}

pub struct Ingest {
    source: String,
    queue: FrameQueue<Delivery>,
    reader: Option<JoinHandle<io::Result<()>>>,
    assembler: Assembler,
    offsets: PerSegment<UnitQuat>,
    warnings: u64,
}

impl Ingest {
    pub fn open(source: &str, window_ms: u64, offsets: PerSegment<UnitQuat>) -> Result<Ingest, CliError> {
        let spec = SourceSpec::parse(source);
        let reader = spec.open().map_err(|e| CliError::io(source, e))?;
        let queue = FrameQueue::new(DEFAULT_CAPACITY);
        let handle = spawn_reader(reader, queue.clone(), spec.is_replay());
        Ok(Ingest {
            source: source.to_string(),
            queue,
            reader: Some(handle),
            assembler: Assembler::new(window_ms),
            offsets,
            warnings: 0,
        })
    }

    fn warn(&mut self, code: &str, detail: impl std::fmt::Display) {
        self.warnings += 1;
        if self.warnings <= WARN_LIMIT {
            eprintln!("WARN {code} {detail}");
        } else if self.warnings == WARN_LIMIT + 1 {
            eprintln!("WARN MORE further warnings suppressed");
        }
    }

    /// Waits up to `wait` for the next usable item. Malformed lines and
    /// incomplete sets are reported on stderr and skipped.
    pub fn next(&mut self, wait: Duration) -> Result<Next, CliError> {
        loop {
            match self.queue.pop_timeout(wait) {
                Pop::Item(Ok(WireMessage::Module(frame))) => match self.assembler.offer(frame) {
                    None => continue,
                    Some(Ok(set)) => return Ok(Next::Item(Input::Set(correct(&set, &self.offsets)))),
                    Some(Err(e)) => self.warn("INCOMPLETE_SET", e),
                },
                Pop::Item(Ok(WireMessage::Force(f))) => return Ok(Next::Item(Input::Force(f))),
                Pop::Item(Err(e)) => self.warn(e.code(), e),
                Pop::Timeout => return Ok(Next::Idle),
                Pop::Closed => return self.end(),
            }
        }
    }

    fn end(&mut self) -> Result<Next, CliError> {
        if let Some(h) = self.reader.take() {
            match h.join() {
                Ok(Ok(())) => {}
                Ok(Err(e)) => return Err(CliError::io(&self.source, e)),
                Err(_) => return Err(CliError::io(&self.source, io::Error::other("reader thread panicked"))),
            }
        }
        let dropped = self.queue.dropped();
        if dropped > 0 {
            eprintln!("WARN QUEUE_OVERFLOW {dropped} messages dropped");
        }
        Ok(Next::End)
    }

    /// Malformed lines and incomplete sets seen so far.
    pub fn warnings(&self) -> u64 {
        self.warnings
    }
}
