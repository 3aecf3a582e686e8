//! Damage models for the four attenuator classes.
//!
//! The models are phenomenological. Random draws are tuned to match the
//! measured aggregate behaviour, and curve shapes are fits rather than
//! physics.

pub mod curves;
mod profile;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use profile::{DamageProfile, DamageProfileOverride, ProfileOverrides, ProfileSet};
pub use state::{
    new_attenuator, AttenuatorState, ExposureKind, ExposureOutcome, Fate, PermanentOffset,
    VdmcSpot, SUCCESS_DROP_FLOOR_DB,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttenuatorClass {
    /// Screw-blocked free-space bench.
    ManualVoa,
    /// Absorbing ceramic inline fixed attenuator, nominal 25 dB.
    Fixed,
    /// Voltage-tilted micromirror VOA.
    MemsVoa,
    /// Rotating variable-density metal-coated disk VOA.
    VdmcVoa,
}

impl AttenuatorClass {
    pub const ALL: [AttenuatorClass; 4] = [
        AttenuatorClass::ManualVoa,
        AttenuatorClass::Fixed,
        AttenuatorClass::MemsVoa,
        AttenuatorClass::VdmcVoa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttenuatorClass::ManualVoa => "manual-voa",
            AttenuatorClass::Fixed => "fixed",
            AttenuatorClass::MemsVoa => "mems-voa",
            AttenuatorClass::VdmcVoa => "vdmc-voa",
        }
    }

    /// Allowed settings in dB of nominal attenuation.
    pub fn setting_range_db(self) -> (f64, f64) {
        match self {
            AttenuatorClass::ManualVoa => (1.5, 80.0),
            AttenuatorClass::Fixed => (25.0, 25.0),
            AttenuatorClass::MemsVoa => (curves::MEMS_MIN_DB, curves::MEMS_MAX_DB),
            AttenuatorClass::VdmcVoa => (0.0, 80.0),
        }
    }

    /// Setpoint used in the reference tests of each class.
    pub fn default_setpoint_db(self) -> f64 {
        match self {
            AttenuatorClass::ManualVoa => 31.0,
            AttenuatorClass::Fixed => 25.0,
            AttenuatorClass::MemsVoa => 30.0,
            AttenuatorClass::VdmcVoa => 53.0,
        }
    }
}

impl fmt::Display for AttenuatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttenuatorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttenuatorClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                format!("unknown attenuator class '{s}' (expected manual-voa, fixed, mems-voa or vdmc-voa)")
            })
    }
}
