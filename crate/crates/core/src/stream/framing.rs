//! Splits a byte stream into protocol lines with bounded buffering.

use std::io::{self, Read};

use super::wire::{parse_message, WireError, WireMessage};

/// Longest accepted line, excluding the terminator.
pub const MAX_LINE_LEN: usize = 256;

/// Incremental LF framer. Overlong lines are discarded up to the next LF and
/// reported once as [`WireError::LineTooLong`].
#[derive(Debug, Default)]
pub struct LineFramer {
    buf: Vec<u8>,
    overflowed: bool,
}

impl LineFramer {
    pub fn new() -> Self {
        LineFramer::default()
    }

    /// Feeds bytes, calling `on_line` for every complete line.
    pub fn push(&mut self, bytes: &[u8], mut on_line: impl FnMut(Result<&[u8], WireError>)) {
        for &b in bytes {
            if b == b'\n' {
                if self.overflowed {
                    on_line(Err(WireError::LineTooLong));
                } else if !self.buf.is_empty() {
                    on_line(Ok(&self.buf));
                }
                self.buf.clear();
                self.overflowed = false;
            } else if self.overflowed {
                continue;
            } else if self.buf.len() >= MAX_LINE_LEN {
                self.overflowed = true;
                self.buf.clear();
            } else {
                self.buf.push(b);
            }
        }
    }

    /// Bytes of the unterminated tail, if any.
    pub fn pending(&self) -> &[u8] {
        &self.buf
    }

    /// Emits an unterminated final line at end of stream.
    pub fn finish(&mut self, mut on_line: impl FnMut(Result<&[u8], WireError>)) {
        if self.overflowed {
            on_line(Err(WireError::LineTooLong));
        } else if !self.buf.is_empty() {
            on_line(Ok(&self.buf));
        }
        self.buf.clear();
        self.overflowed = false;
    }
}

/// Iterator of parsed messages over a byte source.
pub struct MessageReader<R> {
    inner: R,
    framer: LineFramer,
    ready: std::collections::VecDeque<Result<WireMessage, WireError>>,
    eof: bool,
}

impl<R: Read> MessageReader<R> {
    pub fn new(inner: R) -> Self {
        MessageReader { inner, framer: LineFramer::new(), ready: Default::default(), eof: false }
    }

    /// Next message, `Ok(None)` at end of stream.
    pub fn next_message(&mut self) -> io::Result<Option<Result<WireMessage, WireError>>> {
        let mut chunk = [0u8; 4096];
        loop {
            if let Some(m) = self.ready.pop_front() {
                return Ok(Some(m));
            }
            if self.eof {
                return Ok(None);
            }
            let n = match self.inner.read(&mut chunk) {
                Ok(n) => n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            let ready = &mut self.ready;
            if n == 0 {
                self.eof = true;
                self.framer.finish(|l| ready.push_back(l.and_then(parse_message)));
            } else {
                self.framer.push(&chunk[..n], |l| ready.push_back(l.and_then(parse_message)));
            }
        }
    }
}

impl<R: Read> Iterator for MessageReader<R> {
    type Item = io::Result<Result<WireMessage, WireError>>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_message().transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_across_chunks() {
        let mut f = LineFramer::new();
        let mut lines = Vec::new();
        f.push(b"ab", |l| lines.push(l.unwrap().to_vec()));
        f.push(b"c\nd", |l| lines.push(l.unwrap().to_vec()));
        f.push(b"\n\n", |l| lines.push(l.unwrap().to_vec()));
        assert_eq!(lines, vec![b"abc".to_vec(), b"d".to_vec()]);
    }

    #[test]
    fn overlong_line_dropped() {
        let mut f = LineFramer::new();
        let mut out = Vec::new();
        let long = vec![b'x'; MAX_LINE_LEN * 3];
        f.push(&long, |l| out.push(l.map(|b| b.to_vec())));
        f.push(b"\nok\n", |l| out.push(l.map(|b| b.to_vec())));
        assert_eq!(out, vec![Err(WireError::LineTooLong), Ok(b"ok".to_vec())]);
        assert!(f.pending().is_empty());
    }

    #[test]
    fn reader_yields_messages_and_errors() {
        let text = "WISE1,KN,1,2.0\ngarbage\nWISE1,KN,2,3.0";
        let out: Vec<_> = MessageReader::new(text.as_bytes()).map(|r| r.unwrap()).collect();
        assert_eq!(out.len(), 3);
        assert!(out[0].is_ok() && out[1].is_err() && out[2].is_ok());
    }
}
