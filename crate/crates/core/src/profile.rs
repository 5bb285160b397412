//! Per-subject profile: correction offsets, calibrated hand forces and
//! configuration overrides, stored as TOML.
//!
//! ```toml
//! alias = "S01"
//! unaffected_hand = "L"
//!
//! [offsets]
//! LA = [1.0, 0.0, 0.0, 0.0]
//!
//! [forces]
//! left_n = 22.0
//! right_n = 14.5
//!
//! [config]
//! confirm_hold_ms = 1500
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jcs::JcsConfig;
use crate::quat::UnitQuat;
use crate::segment::{PerSegment, SegmentId, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("profile syntax: {0}")]
    Syntax(String),
    #[error("unknown segment {0:?} in offsets")]
    UnknownSegment(String),
    #[error("offset for {0} is not a unit quaternion")]
    NonUnitOffset(SegmentId),
    #[error("hand force {0} must be finite and non-negative")]
    BadForce(f64),
}

/// Calibrated average grasp force of each hand, newtons.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandForces {
    #[serde(default)]
    pub left_n: f64,
    #[serde(default)]
    pub right_n: f64,
}

impl HandForces {
    pub fn of(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.left_n,
            Side::Right => self.right_n,
        }
    }
}

/// Settings that replace built-in defaults when present.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub window_ms: Option<u64>,
    pub confirm_hold_ms: Option<u64>,
    pub poke_fraction: Option<f64>,
    pub cut_fraction: Option<f64>,
    pub grasp_limit_n: Option<f64>,
    pub jump_k_m_per_n: Option<f64>,
    pub score_open_fraction: Option<f64>,
    pub score_close_fraction: Option<f64>,
    pub jcs: Option<JcsConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub alias: String,
    pub offsets: PerSegment<UnitQuat>,
    pub forces: HandForces,
    pub unaffected_hand: Side,
    pub config: Overrides,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            alias: String::new(),
            offsets: PerSegment::splat(UnitQuat::IDENTITY),
            forces: HandForces::default(),
            unaffected_hand: Side::Left,
            config: Overrides::default(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(default)]
    alias: String,
    #[serde(default)]
    unaffected_hand: Option<String>,
    #[serde(default)]
    offsets: BTreeMap<String, [f64; 4]>,
    #[serde(default)]
    forces: HandForces,
    #[serde(default)]
    config: Overrides,
}

impl Profile {
    /// Calibrated force of the unaffected hand, the reference for game
    /// thresholds.
    pub fn calib_force_n(&self) -> f64 {
        self.forces.of(self.unaffected_hand)
    }

    pub fn jcs(&self) -> JcsConfig {
        self.config.jcs.unwrap_or_default()
    }

    pub fn from_toml(text: &str) -> Result<Profile, ProfileError> {
        let file: ProfileFile = toml::from_str(text).map_err(|e| ProfileError::Syntax(e.to_string()))?;
        let mut offsets = PerSegment::splat(UnitQuat::IDENTITY);
        for (name, c) in &file.offsets {
            let seg: SegmentId = name.parse().map_err(|_| ProfileError::UnknownSegment(name.clone()))?;
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(ProfileError::NonUnitOffset(seg));
            }
            offsets[seg] = UnitQuat::from_array(*c).map_err(|_| ProfileError::NonUnitOffset(seg))?;
        }
        for f in [file.forces.left_n, file.forces.right_n] {
            if !(f.is_finite() && f >= 0.0) {
                return Err(ProfileError::BadForce(f));
            }
        }
        let unaffected_hand = match file.unaffected_hand.as_deref() {
            None => Side::Left,
            Some(s) => s.parse().map_err(|_| ProfileError::Syntax(format!("unaffected_hand {s:?}")))?,
        };
        Ok(Profile { alias: file.alias, offsets, forces: file.forces, unaffected_hand, config: file.config })
    }

    pub fn to_toml(&self) -> String {
        let offsets = self
            .offsets
            .iter()
            .filter(|(_, q)| **q != UnitQuat::IDENTITY)
            .map(|(s, q)| (s.as_str().to_string(), q.to_array()))
            .collect();
        let file = ProfileFile {
            alias: self.alias.clone(),
            unaffected_hand: Some(self.unaffected_hand.letter().to_string()),
            offsets,
            forces: self.forces,
            config: self.config.clone(),
        };
        toml::to_string(&file).expect("profile serializes")
    }
}
