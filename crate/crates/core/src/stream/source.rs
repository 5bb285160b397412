//! Byte sources: stdin, files or serial-like device paths, and TCP streams.

use std::fs::File;
use std::io::{self, Read};
use std::net::TcpStream;
use std::thread::{self, JoinHandle};

use super::framing::MessageReader;
use super::queue::FrameQueue;
use super::wire::{WireError, WireMessage};

/// Where wire lines come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    Stdin,
    /// A file replay or a device node; both are read as a byte stream.
    Path(String),
    /// `host:port`, connected as a client.
    Tcp(String),
}

impl SourceSpec {
    /// `-` is stdin; `host:port` with a numeric port and no path separator is
    /// TCP; anything else is a path.
    pub fn parse(s: &str) -> SourceSpec {
        if s == "-" {
            return SourceSpec::Stdin;
        }
        if looks_like_host_port(s) {
            SourceSpec::Tcp(s.to_string())
        } else {
            SourceSpec::Path(s.to_string())
        }
    }

    /// Replays (files and pipes) must not lose lines; live devices and
    /// sockets drop the oldest frames instead of falling behind.
    pub fn is_replay(&self) -> bool {
        match self {
            SourceSpec::Stdin => true,
            SourceSpec::Path(p) => std::fs::metadata(p).map(|m| m.is_file()).unwrap_or(false),
            SourceSpec::Tcp(_) => false,
        }
    }

    pub fn open(&self) -> io::Result<Box<dyn Read + Send>> {
        Ok(match self {
            SourceSpec::Stdin => Box::new(io::stdin()),
            SourceSpec::Path(p) => Box::new(File::open(p)?),
            SourceSpec::Tcp(addr) => Box::new(TcpStream::connect(addr)?),
        })
    }
}

pub fn looks_like_host_port(s: &str) -> bool {
    if s.contains('/') || s.contains('\\') {
        return false;
    }
    match s.rsplit_once(':') {
        Some((host, port)) => {
            !host.is_empty() && !port.is_empty() && port.chars().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}

/// Item delivered by a reader thread.
pub type Delivery = Result<WireMessage, WireError>;

/// Spawns a thread that parses `reader` into `queue` and closes it at end of
/// stream. With `lossless` the thread waits for queue space instead of
/// evicting. The handle yields the I/O error that ended the stream, if any.
pub fn spawn_reader(
    reader: Box<dyn Read + Send>,
    queue: FrameQueue<Delivery>,
    lossless: bool,
) -> JoinHandle<io::Result<()>> {
    thread::spawn(move || {
        let mut messages = MessageReader::new(reader);
        let result = loop {
            match messages.next_message() {
                Ok(Some(m)) if lossless => queue.push_wait(m),
                Ok(Some(m)) => queue.push(m),
                Ok(None) => break Ok(()),
                Err(e) => break Err(e),
            }
        };
        queue.close();
        result
    })
}
