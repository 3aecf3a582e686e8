use serde::{Deserialize, Serialize};

use super::AttenuatorClass;
use crate::error::{Error, Result};

/// Statistical damage behaviour of one attenuator class.
///
/// Thresholds are the class means; each sample draws its own thresholds
/// uniformly within `±threshold_dispersion_dbm`. `None` means the class
/// showed no such threshold within the available power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DamageProfile {
    pub attack_threshold_dbm: Option<f64>,
    pub failure_threshold_dbm: Option<f64>,
    pub threshold_dispersion_dbm: f64,
    /// Mean attenuation change of a successful attack at the exposure
    /// setpoint after a standard 10 s dwell (negative).
    pub success_delta_db_mean: f64,
    pub success_delta_db_spread: f64,
    pub success_probability: f64,
    pub failure_probability: f64,
    pub permanent: bool,
    /// Thermal recovery time constant after the laser is switched off.
    pub recovery_tau_s: f64,
    /// Thermal time constant while the laser is on (temporary-drop classes).
    pub heating_tau_s: f64,
    pub insertion_loss_floor_db: f64,
}

impl DamageProfile {
    pub fn manual_voa() -> Self {
        Self {
            attack_threshold_dbm: None,
            failure_threshold_dbm: None,
            threshold_dispersion_dbm: 0.0,
            success_delta_db_mean: 0.0,
            success_delta_db_spread: 0.0,
            success_probability: 0.0,
            failure_probability: 0.0,
            permanent: false,
            recovery_tau_s: 0.0,
            heating_tau_s: 0.0,
            insertion_loss_floor_db: 0.0,
        }
    }

    pub fn fixed() -> Self {
        Self {
            attack_threshold_dbm: Some(34.0),
            failure_threshold_dbm: Some(37.2),
            threshold_dispersion_dbm: 1.0,
            success_delta_db_mean: -1.37,
            success_delta_db_spread: 0.15,
            success_probability: 4.0 / 12.0,
            failure_probability: 6.0 / 12.0,
            permanent: false,
            recovery_tau_s: 150.0,
            heating_tau_s: 8.0,
            insertion_loss_floor_db: 0.0,
        }
    }

    pub fn mems_voa() -> Self {
        Self {
            attack_threshold_dbm: Some(36.2),
            failure_threshold_dbm: Some(36.6),
            threshold_dispersion_dbm: 1.0,
            success_delta_db_mean: -5.34,
            success_delta_db_spread: 2.5,
            success_probability: 8.0 / 13.0,
            failure_probability: 4.0 / 13.0,
            permanent: true,
            recovery_tau_s: 150.0,
            heating_tau_s: 8.0,
            insertion_loss_floor_db: 0.0,
        }
    }

    pub fn vdmc_voa() -> Self {
        Self {
            attack_threshold_dbm: Some(34.5),
            failure_threshold_dbm: Some(36.5),
            threshold_dispersion_dbm: 1.0,
            success_delta_db_mean: -9.59,
            success_delta_db_spread: 3.5,
            success_probability: 18.0 / 25.0,
            failure_probability: 0.0,
            permanent: true,
            recovery_tau_s: 10.0,
            heating_tau_s: 8.0,
            insertion_loss_floor_db: 1.7,
        }
    }

    pub fn for_class(class: AttenuatorClass) -> Self {
        match class {
            AttenuatorClass::ManualVoa => Self::manual_voa(),
            AttenuatorClass::Fixed => Self::fixed(),
            AttenuatorClass::MemsVoa => Self::mems_voa(),
            AttenuatorClass::VdmcVoa => Self::vdmc_voa(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidProfile(msg));
        let finite_opt = |v: Option<f64>| v.is_none_or(f64::is_finite);
        if !finite_opt(self.attack_threshold_dbm) || !finite_opt(self.failure_threshold_dbm) {
            return err("thresholds must be finite".into());
        }
        if let (Some(a), Some(f)) = (self.attack_threshold_dbm, self.failure_threshold_dbm) {
            if a > f {
                return err(format!(
                    "attack threshold {a} dBm above failure threshold {f} dBm"
                ));
            }
        }
        for (name, v) in [
            ("threshold_dispersion_dbm", self.threshold_dispersion_dbm),
            ("success_delta_db_spread", self.success_delta_db_spread),
            ("recovery_tau_s", self.recovery_tau_s),
            ("heating_tau_s", self.heating_tau_s),
            ("insertion_loss_floor_db", self.insertion_loss_floor_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(self.success_delta_db_mean.is_finite() && self.success_delta_db_mean <= 0.0) {
            return err(format!(
                "success_delta_db_mean must be <= 0, got {}",
                self.success_delta_db_mean
            ));
        }
        for (name, p) in [
            ("success_probability", self.success_probability),
            ("failure_probability", self.failure_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.success_probability + self.failure_probability > 1.0 + 1e-12 {
            return err("success_probability + failure_probability exceeds 1".into());
        }
        Ok(())
    }
}

/// Partial override of a [`DamageProfile`]; absent fields keep the class
/// default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DamageProfileOverride {
    pub attack_threshold_dbm: Option<f64>,
    pub failure_threshold_dbm: Option<f64>,
    pub threshold_dispersion_dbm: Option<f64>,
    pub success_delta_db_mean: Option<f64>,
    pub success_delta_db_spread: Option<f64>,
    pub success_probability: Option<f64>,
    pub failure_probability: Option<f64>,
    pub permanent: Option<bool>,
    pub recovery_tau_s: Option<f64>,
    pub heating_tau_s: Option<f64>,
    pub insertion_loss_floor_db: Option<f64>,
}

impl DamageProfileOverride {
    pub fn apply(&self, base: DamageProfile) -> DamageProfile {
        DamageProfile {
            attack_threshold_dbm: self.attack_threshold_dbm.or(base.attack_threshold_dbm),
            failure_threshold_dbm: self.failure_threshold_dbm.or(base.failure_threshold_dbm),
            threshold_dispersion_dbm: self
                .threshold_dispersion_dbm
                .unwrap_or(base.threshold_dispersion_dbm),
            success_delta_db_mean: self
                .success_delta_db_mean
                .unwrap_or(base.success_delta_db_mean),
            success_delta_db_spread: self
                .success_delta_db_spread
                .unwrap_or(base.success_delta_db_spread),
            success_probability: self.success_probability.unwrap_or(base.success_probability),
            failure_probability: self.failure_probability.unwrap_or(base.failure_probability),
            permanent: self.permanent.unwrap_or(base.permanent),
            recovery_tau_s: self.recovery_tau_s.unwrap_or(base.recovery_tau_s),
            heating_tau_s: self.heating_tau_s.unwrap_or(base.heating_tau_s),
            insertion_loss_floor_db: self
                .insertion_loss_floor_db
                .unwrap_or(base.insertion_loss_floor_db),
        }
    }
}

/// Per-class profile overrides as stored in a config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileOverrides {
    pub manual_voa: DamageProfileOverride,
    pub fixed: DamageProfileOverride,
    pub mems_voa: DamageProfileOverride,
    pub vdmc_voa: DamageProfileOverride,
}

impl ProfileOverrides {
    pub fn profile(&self, class: AttenuatorClass) -> DamageProfile {
        let o = match class {
            AttenuatorClass::ManualVoa => &self.manual_voa,
            AttenuatorClass::Fixed => &self.fixed,
            AttenuatorClass::MemsVoa => &self.mems_voa,
            AttenuatorClass::VdmcVoa => &self.vdmc_voa,
        };
        o.apply(DamageProfile::for_class(class))
    }
}

/// The shipped baseline, one full profile per class, as written to
/// `qla profiles`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub manual_voa: DamageProfile,
    pub fixed: DamageProfile,
    pub mems_voa: DamageProfile,
    pub vdmc_voa: DamageProfile,
}

impl Default for ProfileSet {
    fn default() -> Self {
        Self {
            manual_voa: DamageProfile::manual_voa(),
            fixed: DamageProfile::fixed(),
            mems_voa: DamageProfile::mems_voa(),
            vdmc_voa: DamageProfile::vdmc_voa(),
        }
    }
}
