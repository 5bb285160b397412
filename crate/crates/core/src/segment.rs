//! The five body segments carrying an inertial module.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SegmentId {
    /// Back.
    B,
    /// Left upper arm.
    LA,
    /// Right upper arm.
    RA,
    /// Left forearm.
    LF,
    /// Right forearm.
    RF,
}

impl SegmentId {
    pub const ALL: [SegmentId; 5] =
        [SegmentId::B, SegmentId::LA, SegmentId::RA, SegmentId::LF, SegmentId::RF];

    pub fn as_str(self) -> &'static str {
        match self {
            SegmentId::B => "B",
            SegmentId::LA => "LA",
            SegmentId::RA => "RA",
            SegmentId::LF => "LF",
            SegmentId::RF => "RF",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSegment(pub String);

impl fmt::Display for UnknownSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown segment {:?}", self.0)
    }
}

impl std::error::Error for UnknownSegment {}

impl FromStr for SegmentId {
    type Err = UnknownSegment;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "B" => Ok(SegmentId::B),
            "LA" => Ok(SegmentId::LA),
            "RA" => Ok(SegmentId::RA),
            "LF" => Ok(SegmentId::LF),
            "RF" => Ok(SegmentId::RF),
            other => Err(UnknownSegment(other.to_string())),
        }
    }
}

/// Body side, for the paired joints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(alias = "L")]
    Left,
    #[serde(alias = "R")]
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn arm(self) -> SegmentId {
        match self {
            Side::Left => SegmentId::LA,
            Side::Right => SegmentId::RA,
        }
    }

    pub fn forearm(self) -> SegmentId {
        match self {
            Side::Left => SegmentId::LF,
            Side::Right => SegmentId::RF,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" | "l" | "left" | "Left" => Ok(Side::Left),
            "R" | "r" | "right" | "Right" => Ok(Side::Right),
            other => Err(format!("unknown side {other:?}")),
        }
    }
}

/// One value per segment, indexable by [`SegmentId`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerSegment<T> {
    #[serde(rename = "B")]
    pub b: T,
    #[serde(rename = "LA")]
    pub la: T,
    #[serde(rename = "RA")]
    pub ra: T,
    #[serde(rename = "LF")]
    pub lf: T,
    #[serde(rename = "RF")]
    pub rf: T,
}

impl<T> PerSegment<T> {
    pub fn from_fn(mut f: impl FnMut(SegmentId) -> T) -> Self {
        PerSegment {
            b: f(SegmentId::B),
            la: f(SegmentId::LA),
            ra: f(SegmentId::RA),
            lf: f(SegmentId::LF),
            rf: f(SegmentId::RF),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(SegmentId, &T) -> U) -> PerSegment<U> {
        PerSegment::from_fn(|s| f(s, &self[s]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SegmentId, &T)> {
        SegmentId::ALL.into_iter().map(move |s| (s, &self[s]))
    }
}

impl<T: Clone> PerSegment<T> {
    pub fn splat(v: T) -> Self {
        PerSegment::from_fn(|_| v.clone())
    }
}

impl<T> Index<SegmentId> for PerSegment<T> {
    type Output = T;
    fn index(&self, s: SegmentId) -> &T {
        match s {
            SegmentId::B => &self.b,
            SegmentId::LA => &self.la,
            SegmentId::RA => &self.ra,
            SegmentId::LF => &self.lf,
            SegmentId::RF => &self.rf,
        }
    }
}

impl<T> IndexMut<SegmentId> for PerSegment<T> {
    fn index_mut(&mut self, s: SegmentId) -> &mut T {
        match s {
            SegmentId::B => &mut self.b,
            SegmentId::LA => &mut self.la,
            SegmentId::RA => &mut self.ra,
            SegmentId::LF => &mut self.lf,
            SegmentId::RF => &mut self.rf,
        }
    }
}
