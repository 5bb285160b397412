//! Line protocol for module and force-device readings.
//!
//! One ASCII frame per LF-terminated line:
//!
//! ```text
//! WISE1,<SEG>,<T>,<QW>,<QX>,<QY>,<QZ>,<G>,<A>,<M>[*<CRC>]
//! WISE1,FK,<T>,<GRASP_N>,<ROT_DEG>[*<CRC>]
//! WISE1,KN,<T>,<GRASP_N>[*<CRC>]
//! WISE1,PD,<T>,<POKE_N>,<CUT_N>[*<CRC>]
//! WISE1,GR,<T>,<GRASP_N>,<LIFT_N>[*<CRC>]
//! ```
//!
//! The optional CRC is CRC-32 (IEEE) over every byte before the `*`, as
//! eight uppercase hex digits.

use std::fmt;

use thiserror::Error;

use crate::calib::CalibStatus;
use crate::quat::UnitQuat;
use crate::segment::SegmentId;

pub const MAGIC: &str = "WISE1";

/// Allowed deviation of a wire quaternion from unit norm.
pub const WIRE_NORM_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("BAD_MAGIC")]
    BadMagic,
    #[error("BAD_SEGMENT {0:?}")]
    BadSegment(String),
    #[error("BAD_NUMBER in field {field}")]
    BadNumber { field: &'static str },
    #[error("BAD_CRC")]
    BadCrc,
    #[error("NORM_OUT_OF_RANGE")]
    NormOutOfRange,
    #[error("BAD_FIELD_COUNT expected {expected} found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("LINE_TOO_LONG")]
    LineTooLong,
}

impl WireError {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            WireError::BadMagic => "BAD_MAGIC",
            WireError::BadSegment(_) => "BAD_SEGMENT",
            WireError::BadNumber { .. } => "BAD_NUMBER",
            WireError::BadCrc => "BAD_CRC",
            WireError::NormOutOfRange => "NORM_OUT_OF_RANGE",
            WireError::FieldCount { .. } => "BAD_FIELD_COUNT",
            WireError::LineTooLong => "LINE_TOO_LONG",
        }
    }
}

/// A module reading as it appears on the wire.
///
/// `q` holds the decimal values exactly as parsed; [`WireFrame::quat`]
/// renormalizes on ingest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireFrame {
    pub module: SegmentId,
    pub t_ms: u64,
    pub q: [f64; 4],
    pub calib: CalibStatus,
    pub with_crc: bool,
}

impl WireFrame {
    /// Builds a frame from a unit quaternion, quantized to the wire's six
    /// fractional digits.
    pub fn from_quat(module: SegmentId, t_ms: u64, q: &UnitQuat, calib: CalibStatus) -> Self {
        WireFrame { module, t_ms, q: q.to_array().map(quantize6), calib, with_crc: false }
    }

    pub fn with_crc(mut self, on: bool) -> Self {
        self.with_crc = on;
        self
    }

    pub fn quat(&self) -> UnitQuat {
        UnitQuat::from_array(self.q).unwrap_or(UnitQuat::IDENTITY)
    }

    pub fn render(&self) -> String {
        let [w, x, y, z] = self.q;
        let body = format!(
            "{MAGIC},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{}",
            self.module, self.t_ms, w, x, y, z, self.calib.gyro, self.calib.accel, self.calib.mag
        );
        finish(body, self.with_crc)
    }
}

/// Rounds to the nearest multiple of 1e-6, as the parser would read it back.
pub fn quantize6(v: f64) -> f64 {
    let m = (v * 1e6).round();
    if m == 0.0 {
        0.0
    } else {
        m / 1e6
    }
}

fn finish(mut body: String, with_crc: bool) -> String {
    if with_crc {
        let crc = crc32fast::hash(body.as_bytes());
        body.push_str(&format!("*{crc:08X}"));
    }
    body
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceId {
    /// Instrumented fork.
    Fork,
    /// Instrumented knife.
    Knife,
    /// Pressure pad.
    Pad,
    /// Grasp rehabilitation device.
    Grasp,
}

impl DeviceId {
    pub fn tag(self) -> &'static str {
        match self {
            DeviceId::Fork => "FK",
            DeviceId::Knife => "KN",
            DeviceId::Pad => "PD",
            DeviceId::Grasp => "GR",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        match s {
            "FK" => Some(DeviceId::Fork),
            "KN" => Some(DeviceId::Knife),
            "PD" => Some(DeviceId::Pad),
            "GR" => Some(DeviceId::Grasp),
            _ => None,
        }
    }

    pub fn fields(self) -> &'static [&'static str] {
        match self {
            DeviceId::Fork => &["GRASP_N", "ROT_DEG"],
            DeviceId::Knife => &["GRASP_N"],
            DeviceId::Pad => &["POKE_N", "CUT_N"],
            DeviceId::Grasp => &["GRASP_N", "LIFT_N"],
        }
    }
}

/// A force/rotation reading from one of the game devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceFrame {
    pub device: DeviceId,
    pub t_ms: u64,
    /// One or two payload values, in the device's field order.
    pub values: [f64; 2],
    pub with_crc: bool,
}

impl ForceFrame {
    pub fn new(device: DeviceId, t_ms: u64, values: [f64; 2]) -> Self {
        ForceFrame { device, t_ms, values, with_crc: false }
    }

    pub fn render(&self) -> String {
        let mut body = format!("{MAGIC},{},{}", self.device.tag(), self.t_ms);
        for v in &self.values[..self.device.fields().len()] {
            body.push_str(&format!(",{v:.3}"));
        }
        finish(body, self.with_crc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WireMessage {
    Module(WireFrame),
    Force(ForceFrame),
}

impl WireMessage {
    pub fn t_ms(&self) -> u64 {
        match self {
            WireMessage::Module(f) => f.t_ms,
            WireMessage::Force(f) => f.t_ms,
        }
    }

    pub fn render(&self) -> String {
        match self {
            WireMessage::Module(f) => f.render(),
            WireMessage::Force(f) => f.render(),
        }
    }
}

impl fmt::Display for WireMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Splits off and verifies the CRC suffix, returning the body.
fn strip_crc(line: &str) -> Result<(&str, bool), WireError> {
    match line.rfind('*') {
        None => Ok((line, false)),
        Some(star) => {
            let (body, suffix) = (&line[..star], &line[star + 1..]);
            let well_formed = suffix.len() == 8
                && suffix.bytes().all(|b| b.is_ascii_digit() || (b'A'..=b'F').contains(&b));
            if !well_formed {
                return Err(WireError::BadCrc);
            }
            let claimed = u32::from_str_radix(suffix, 16).map_err(|_| WireError::BadCrc)?;
            if crc32fast::hash(body.as_bytes()) != claimed {
                return Err(WireError::BadCrc);
            }
            Ok((body, true))
        }
    }
}

fn line_str(bytes: &[u8]) -> Result<&str, WireError> {
    let bytes = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if !bytes.starts_with(MAGIC.as_bytes()) {
        return Err(WireError::BadMagic);
    }
    std::str::from_utf8(bytes).map_err(|_| WireError::BadNumber { field: "LINE" })
}

fn parse_time(s: &str) -> Result<u64, WireError> {
    let err = WireError::BadNumber { field: "T" };
    if s.is_empty() || s.len() > 20 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err);
    }
    s.parse().map_err(|_| err)
}

/// `[+-]? digit? '.' digit{6}`
fn parse_quat_component(s: &str, field: &'static str) -> Result<f64, WireError> {
    let err = WireError::BadNumber { field };
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = digits.split_once('.').ok_or(err.clone())?;
    let ok = int.len() <= 1
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.len() == 6
        && frac.bytes().all(|b| b.is_ascii_digit());
    if !ok {
        return Err(err);
    }
    s.parse().map_err(|_| err)
}

fn parse_level(s: &str, field: &'static str) -> Result<u8, WireError> {
    match s.as_bytes() {
        [b @ b'0'..=b'3'] => Ok(b - b'0'),
        _ => Err(WireError::BadNumber { field }),
    }
}

/// `[+-]? digit+ ('.' digit+)?`
fn parse_decimal(s: &str, field: &'static str) -> Result<f64, WireError> {
    let err = WireError::BadNumber { field };
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let good = |p: &str| !p.is_empty() && p.len() <= 12 && p.bytes().all(|b| b.is_ascii_digit());
    if !good(int) || !frac.is_none_or(good) {
        return Err(err);
    }
    s.parse().map_err(|_| err)
}

const MODULE_FIELDS: [&str; 10] = ["MAGIC", "SEG", "T", "QW", "QX", "QY", "QZ", "G", "A", "M"];

fn parse_module(seg: SegmentId, fields: &[&str], with_crc: bool) -> Result<WireFrame, WireError> {
    if fields.len() != MODULE_FIELDS.len() {
        return Err(WireError::FieldCount { expected: MODULE_FIELDS.len(), found: fields.len() });
    }
    let t_ms = parse_time(fields[2])?;
    let mut q = [0.0; 4];
    for (i, slot) in q.iter_mut().enumerate() {
        *slot = parse_quat_component(fields[3 + i], MODULE_FIELDS[3 + i])?;
    }
    let calib = CalibStatus {
        gyro: parse_level(fields[7], "G")?,
        accel: parse_level(fields[8], "A")?,
        mag: parse_level(fields[9], "M")?,
    };
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > WIRE_NORM_TOLERANCE {
        return Err(WireError::NormOutOfRange);
    }
    Ok(WireFrame { module: seg, t_ms, q, calib, with_crc })
}

fn parse_force(device: DeviceId, fields: &[&str], with_crc: bool) -> Result<ForceFrame, WireError> {
    let names = device.fields();
    let expected = 3 + names.len();
    if fields.len() != expected {
        return Err(WireError::FieldCount { expected, found: fields.len() });
    }
    let t_ms = parse_time(fields[2])?;
    let mut values = [0.0; 2];
    for (i, name) in names.iter().enumerate() {
        values[i] = parse_decimal(fields[3 + i], name)?;
    }
    Ok(ForceFrame { device, t_ms, values, with_crc })
}

/// Parses any protocol line (module or device).
pub fn parse_message(bytes: &[u8]) -> Result<WireMessage, WireError> {
    let line = line_str(bytes)?;
    let (body, with_crc) = strip_crc(line)?;
    let fields: Vec<&str> = body.split(',').collect();
    if fields[0] != MAGIC {
        return Err(WireError::BadMagic);
    }
    let tag = fields.get(1).copied().unwrap_or("");
    if let Ok(seg) = tag.parse::<SegmentId>() {
        return parse_module(seg, &fields, with_crc).map(WireMessage::Module);
    }
    if let Some(device) = DeviceId::from_tag(tag) {
        return parse_force(device, &fields, with_crc).map(WireMessage::Force);
    }
    Err(WireError::BadSegment(tag.to_string()))
}

/// Parses a module line. Device lines are rejected as a bad segment.
pub fn parse_line(bytes: &[u8]) -> Result<WireFrame, WireError> {
    match parse_message(bytes)? {
        WireMessage::Module(f) => Ok(f),
        WireMessage::Force(f) => Err(WireError::BadSegment(f.device.tag().to_string())),
    }
}
