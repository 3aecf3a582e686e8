use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::curves::{self, MemsBand, VdmcDip};
use super::{AttenuatorClass, DamageProfile};
use crate::error::{Error, Result};
use crate::fiber::{dbm_to_watts, watts_to_dbm};

/// Smallest drop a successful attack produces at its exposure setpoint.
/// Sits just past the 1 dB detection threshold so a drawn success is always
/// observed as one.
pub const SUCCESS_DROP_FLOOR_DB: f64 = 1.05;

/// Dwell at which the class-mean success deltas were measured.
const REFERENCE_DWELL_S: f64 = 10.0;

const FIXED_FAILURE_INCREASE_DB: (f64, f64) = (20.0, 30.0);
/// Warm-up drift of fixed samples that never cross the detection threshold.
const FIXED_SUBTHRESHOLD_DROP_DB: (f64, f64) = (0.2, 0.9);
const MEMS_BLOCKED_DB: (f64, f64) = (70.5, 75.0);
const VDMC_BLOCKED_DB: f64 = 90.0;

const SETTING_TOLERANCE_DB: f64 = 1e-9;

/// What a sample does once it is driven past its attack threshold.
/// Drawn once per sample, on the first exposure that reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    /// Attenuation drops at the attack threshold.
    Compromisable,
    /// No drop; fails catastrophically at the failure threshold.
    Fragile,
    /// Neither within the available power.
    Robust,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExposureKind {
    NoChange,
    TemporaryDrop,
    PermanentDrop,
    CriticalFailure,
}

/// Result of one exposure, with the attenuation change at the setpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureOutcome {
    pub kind: ExposureKind,
    pub delta_db: f64,
}

/// Permanent attenuation change as a function of setting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PermanentOffset {
    pub mems_band: Option<MemsBand>,
    pub vdmc_dips: Vec<VdmcDip>,
}

impl PermanentOffset {
    pub fn at(&self, setting_db: f64) -> f64 {
        let band = self.mems_band.map_or(0.0, |b| b.offset_at(setting_db));
        let dips: f64 = self.vdmc_dips.iter().map(|d| d.offset_at(setting_db)).sum();
        band + dips
    }

    pub fn is_zero(&self) -> bool {
        self.mems_band.is_none() && self.vdmc_dips.is_empty()
    }
}

/// Exposure bookkeeping for one point on a VDMC disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdmcSpot {
    pub setting_db: f64,
    /// Summed duration of bursts strong enough to ablate the coating.
    pub cumulative_s: f64,
    pub max_power_w: f64,
}

/// One attenuator sample under attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttenuatorState {
    pub class: AttenuatorClass,
    pub profile: DamageProfile,
    /// Setting the sample is operated (and attacked) at, in dB.
    pub setpoint_db: f64,
    pub sampled_attack_threshold_dbm: Option<f64>,
    pub sampled_failure_threshold_dbm: Option<f64>,
    pub fate: Option<Fate>,
    pub permanent_offset: PermanentOffset,
    pub thermal_offset_db: f64,
    /// Magnitude of the drop the thermal offset relaxes to under exposure.
    pub thermal_saturation_db: Option<f64>,
    pub vdmc_spots: Vec<VdmcSpot>,
    pub destroyed: bool,
    pub blocked_attenuation_db: Option<f64>,
    pub clock_s: f64,
}

/// A fresh sample with its thresholds drawn from `seed`.
pub fn new_attenuator(
    class: AttenuatorClass,
    profile: DamageProfile,
    setpoint_db: f64,
    seed: u64,
) -> Result<AttenuatorState> {
    profile.validate()?;
    check_setting(class, setpoint_db)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = profile.threshold_dispersion_dbm;
    let mut jitter = |mean: f64| mean + spread * (2.0 * rng.random::<f64>() - 1.0);
    let attack = profile.attack_threshold_dbm.map(&mut jitter);
    let failure = profile
        .failure_threshold_dbm
        .map(&mut jitter)
        .map(|f| attack.map_or(f, |a| f.max(a)));
    Ok(AttenuatorState {
        class,
        profile,
        setpoint_db,
        sampled_attack_threshold_dbm: attack,
        sampled_failure_threshold_dbm: failure,
        fate: None,
        permanent_offset: PermanentOffset::default(),
        thermal_offset_db: 0.0,
        thermal_saturation_db: None,
        vdmc_spots: Vec::new(),
        destroyed: false,
        blocked_attenuation_db: None,
        clock_s: 0.0,
    })
}

fn check_setting(class: AttenuatorClass, setting_db: f64) -> Result<()> {
    let (min, max) = class.setting_range_db();
    if setting_db.is_finite()
        && setting_db >= min - SETTING_TOLERANCE_DB
        && setting_db <= max + SETTING_TOLERANCE_DB
    {
        Ok(())
    } else {
        Err(Error::SetpointOutOfRange {
            class: class.name(),
            setpoint: setting_db,
            min,
            max,
        })
    }
}

/// Normal draw of a drop magnitude, truncated below at `min_mag`.
fn draw_magnitude<R: Rng + ?Sized>(rng: &mut R, mean: f64, spread: f64, min_mag: f64) -> f64 {
    if spread <= 0.0 {
        return mean.max(min_mag);
    }
    let normal = Normal::new(mean, spread).expect("spread validated as finite and positive");
    for _ in 0..64 {
        let x = normal.sample(rng);
        if x >= min_mag {
            return x;
        }
    }
    min_mag
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

impl AttenuatorState {
    /// Attenuation of the undamaged device at `setting_db`.
    pub fn baseline_db(&self, setting_db: f64) -> f64 {
        match self.class {
            AttenuatorClass::Fixed => 25.0,
            AttenuatorClass::VdmcVoa => setting_db.max(self.profile.insertion_loss_floor_db),
            AttenuatorClass::ManualVoa | AttenuatorClass::MemsVoa => setting_db,
        }
    }

    /// Reported attenuation at `setting_db`: baseline plus permanent and
    /// thermal offsets, never below the insertion-loss floor. A destroyed
    /// sample reports its blocked value everywhere.
    pub fn attenuation(&self, setting_db: f64) -> Result<f64> {
        check_setting(self.class, setting_db)?;
        Ok(self.attenuation_unchecked(setting_db))
    }

    fn attenuation_unchecked(&self, setting_db: f64) -> f64 {
        if let Some(blocked) = self.blocked_attenuation_db {
            return blocked;
        }
        let raw = self.baseline_db(setting_db)
            + self.permanent_offset.at(setting_db)
            + self.thermal_offset_db;
        raw.max(self.profile.insertion_loss_floor_db)
    }

    pub fn attenuation_at_setpoint(&self) -> f64 {
        self.attenuation_unchecked(self.setpoint_db)
    }

    /// MEMS only: attenuation at a control voltage.
    pub fn attenuation_at_voltage(&self, voltage: f64) -> Result<f64> {
        if self.class != AttenuatorClass::MemsVoa {
            return Err(Error::NotApplicable(format!(
                "voltage control does not apply to {}",
                self.class
            )));
        }
        if !(voltage.is_finite() && (0.0..=curves::MEMS_MAX_VOLTAGE).contains(&voltage)) {
            return Err(Error::NotApplicable(format!(
                "voltage {voltage} V outside [0, {}] V",
                curves::MEMS_MAX_VOLTAGE
            )));
        }
        Ok(self.attenuation_unchecked(curves::mems_setting_for_voltage(voltage)))
    }

    fn roll_fate<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Fate {
        if let Some(f) = self.fate {
            return f;
        }
        let u: f64 = rng.random();
        let p = &self.profile;
        let fate = if u < p.success_probability {
            Fate::Compromisable
        } else if u < p.success_probability + p.failure_probability {
            Fate::Fragile
        } else {
            Fate::Robust
        };
        self.fate = Some(fate);
        fate
    }

    fn fails_at(&self, power_dbm: f64) -> bool {
        let reached = self
            .sampled_failure_threshold_dbm
            .is_some_and(|t| power_dbm >= t);
        reached && matches!(self.fate, Some(Fate::Fragile | Fate::Compromisable))
    }

    /// Expose the sample to `power_w` of c.w. light for `duration_s`.
    pub fn apply_exposure<R: Rng + ?Sized>(
        &self,
        power_w: f64,
        duration_s: f64,
        rng: &mut R,
    ) -> Result<(AttenuatorState, ExposureOutcome)> {
        if !(power_w.is_finite() && power_w >= 0.0) {
            return Err(Error::NegativePower(power_w));
        }
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(Error::InvalidExposure(format!(
                "duration must be positive, got {duration_s} s"
            )));
        }
        if self.destroyed {
            return Err(Error::Destroyed);
        }
        let power_dbm = if power_w > 0.0 {
            watts_to_dbm(power_w)?
        } else {
            f64::NEG_INFINITY
        };
        let before = self.attenuation_at_setpoint();
        let mut next = self.clone();
        next.clock_s += duration_s;
        let kind = match self.class {
            AttenuatorClass::ManualVoa => ExposureKind::NoChange,
            AttenuatorClass::Fixed => next.expose_fixed(power_dbm, duration_s, rng),
            AttenuatorClass::MemsVoa => next.expose_mems(power_dbm, rng),
            AttenuatorClass::VdmcVoa => next.expose_vdmc(power_w, power_dbm, duration_s, rng),
        };
        let delta_db = next.attenuation_at_setpoint() - before;
        let kind = match kind {
            ExposureKind::TemporaryDrop | ExposureKind::PermanentDrop if delta_db >= 0.0 => {
                ExposureKind::NoChange
            }
            k => k,
        };
        Ok((next, ExposureOutcome { kind, delta_db }))
    }

    fn destroy(&mut self, blocked_db: f64) -> ExposureKind {
        self.destroyed = true;
        self.blocked_attenuation_db = Some(blocked_db);
        self.thermal_offset_db = 0.0;
        ExposureKind::CriticalFailure
    }

    fn expose_fixed<R: Rng + ?Sized>(
        &mut self,
        power_dbm: f64,
        duration_s: f64,
        rng: &mut R,
    ) -> ExposureKind {
        let above_attack = self
            .sampled_attack_threshold_dbm
            .is_some_and(|t| power_dbm >= t);
        if !above_attack {
            self.relax_thermal(duration_s);
            return ExposureKind::NoChange;
        }
        let fate = self.roll_fate(rng);
        if self.fails_at(power_dbm) {
            let blocked =
                self.baseline_db(self.setpoint_db) + uniform(rng, FIXED_FAILURE_INCREASE_DB);
            return self.destroy(blocked);
        }
        let heating_tau = self.profile.heating_tau_s;
        let saturation = match self.thermal_saturation_db {
            Some(s) => s,
            None => {
                let s = if fate == Fate::Compromisable {
                    // Scale the drop seen after a reference dwell up to the
                    // saturated (long-exposure) value.
                    let at_reference = draw_magnitude(
                        rng,
                        -self.profile.success_delta_db_mean,
                        self.profile.success_delta_db_spread,
                        SUCCESS_DROP_FLOOR_DB,
                    );
                    at_reference / heating_fraction(REFERENCE_DWELL_S, heating_tau)
                } else {
                    uniform(rng, FIXED_SUBTHRESHOLD_DROP_DB)
                };
                self.thermal_saturation_db = Some(s);
                s
            }
        };
        let target = -saturation;
        let keep = 1.0 - heating_fraction(duration_s, heating_tau);
        self.thermal_offset_db = target + (self.thermal_offset_db - target) * keep;
        ExposureKind::TemporaryDrop
    }

    fn expose_mems<R: Rng + ?Sized>(&mut self, power_dbm: f64, rng: &mut R) -> ExposureKind {
        let above_attack = self
            .sampled_attack_threshold_dbm
            .is_some_and(|t| power_dbm >= t);
        if !above_attack {
            return ExposureKind::NoChange;
        }
        let fate = self.roll_fate(rng);
        if fate == Fate::Compromisable && self.permanent_offset.mems_band.is_none() {
            let depth = draw_magnitude(
                rng,
                -self.profile.success_delta_db_mean,
                self.profile.success_delta_db_spread,
                SUCCESS_DROP_FLOOR_DB,
            );
            self.permanent_offset.mems_band = Some(MemsBand::new(depth, self.setpoint_db));
            return ExposureKind::PermanentDrop;
        }
        if self.fails_at(power_dbm) {
            let blocked = uniform(rng, MEMS_BLOCKED_DB);
            return self.destroy(blocked);
        }
        ExposureKind::NoChange
    }

    fn expose_vdmc<R: Rng + ?Sized>(
        &mut self,
        power_w: f64,
        power_dbm: f64,
        duration_s: f64,
        rng: &mut R,
    ) -> ExposureKind {
        let Some(threshold_dbm) = self.sampled_attack_threshold_dbm else {
            return ExposureKind::NoChange;
        };
        let relative = power_w / dbm_to_watts(threshold_dbm);
        let required = curves::vdmc_required_exposure_s(relative);
        let effective = required.is_some();
        let setpoint = self.setpoint_db;
        let spot_index = match self
            .vdmc_spots
            .iter()
            .position(|s| (s.setting_db - setpoint).abs() < SETTING_TOLERANCE_DB)
        {
            Some(i) => i,
            None => {
                self.vdmc_spots.push(VdmcSpot {
                    setting_db: setpoint,
                    cumulative_s: 0.0,
                    max_power_w: 0.0,
                });
                self.vdmc_spots.len() - 1
            }
        };
        {
            let spot = &mut self.vdmc_spots[spot_index];
            spot.max_power_w = spot.max_power_w.max(power_w);
            if effective {
                spot.cumulative_s += duration_s;
            }
        }
        if !effective {
            return ExposureKind::NoChange;
        }
        let fate = self.roll_fate(rng);
        if fate != Fate::Compromisable {
            if self.fails_at(power_dbm) {
                return self.destroy(VDMC_BLOCKED_DB);
            }
            return ExposureKind::NoChange;
        }

        let floor = self.profile.insertion_loss_floor_db;
        let available = (self.baseline_db(setpoint) - floor).max(0.0);
        let cumulative = self.vdmc_spots[spot_index].cumulative_s;
        let existing = self
            .permanent_offset
            .vdmc_dips
            .iter()
            .position(|d| (d.center_db - setpoint).abs() < SETTING_TOLERANCE_DB);
        match existing {
            None => {
                let Some(required) = required else {
                    return ExposureKind::NoChange;
                };
                // Summed bursts are compared with a little slack for round-off.
                if cumulative < required * (1.0 - 1e-9) {
                    return ExposureKind::NoChange;
                }
                let drawn = draw_magnitude(
                    rng,
                    -self.profile.success_delta_db_mean,
                    self.profile.success_delta_db_spread,
                    SUCCESS_DROP_FLOOR_DB,
                );
                let depth = (drawn * curves::vdmc_coating_factor(setpoint, floor)).min(available);
                let magnitude = curves::vdmc_shift_magnitude(relative);
                let shift = if magnitude > 0.0 && rng.random::<bool>() {
                    -magnitude
                } else {
                    magnitude
                };
                self.permanent_offset.vdmc_dips.push(VdmcDip {
                    center_db: setpoint,
                    depth_db: depth,
                    shift_db: shift,
                    initial_depth_db: depth,
                });
                ExposureKind::PermanentDrop
            }
            Some(i) => {
                let dip = &mut self.permanent_offset.vdmc_dips[i];
                let onset = curves::VDMC_DEEPENING_RELATIVE_POWER;
                if relative <= onset {
                    return ExposureKind::NoChange;
                }
                // Further ablation saturates towards the bare-glass floor.
                let gain = 1.0 - (onset / relative).powi(2);
                let target = dip.initial_depth_db + (available - dip.initial_depth_db) * gain;
                if target > dip.depth_db {
                    dip.depth_db = target.min(available);
                    ExposureKind::PermanentDrop
                } else {
                    ExposureKind::NoChange
                }
            }
        }
    }

    fn relax_thermal(&mut self, elapsed_s: f64) {
        let tau = self.profile.recovery_tau_s;
        self.thermal_offset_db = if tau > 0.0 {
            self.thermal_offset_db * (-elapsed_s / tau).exp()
        } else {
            0.0
        };
    }

    /// Let the sample cool for `elapsed_s` with the laser off. Only the
    /// thermal offset changes; permanent damage stays.
    pub fn cool_down(&self, elapsed_s: f64) -> AttenuatorState {
        let elapsed = elapsed_s.max(0.0);
        let mut next = self.clone();
        if elapsed > 0.0 {
            next.relax_thermal(elapsed);
            next.clock_s += elapsed;
        }
        next
    }
}

fn heating_fraction(duration_s: f64, tau_s: f64) -> f64 {
    if tau_s > 0.0 {
        -(-duration_s / tau_s).exp_m1()
    } else {
        1.0
    }
}
