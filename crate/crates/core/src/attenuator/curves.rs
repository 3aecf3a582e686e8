//! Phenomenological curve shapes: MEMS voltage response, the MEMS damaged
//! band, VDMC damage dips and the VDMC exposure-time requirement.

use serde::{Deserialize, Serialize};

pub const MEMS_MIN_DB: f64 = 1.0;
pub const MEMS_MAX_DB: f64 = 34.0;
pub const MEMS_MAX_VOLTAGE: f64 = 15.0;
/// Fraction of the MEMS range, from the top, where damage shows up.
pub const MEMS_DAMAGED_BAND_FRACTION: f64 = 0.3;
/// Taper width of the MEMS damaged band relative to its depth. Keeping it
/// above 1 keeps the damaged curve monotone in the setting.
pub const MEMS_TAPER_PER_DB: f64 = 1.25;

/// Attenuation setting reached at control voltage `v` (electrostatic tilt
/// grows with V²).
pub fn mems_setting_for_voltage(v: f64) -> f64 {
    let x = (v / MEMS_MAX_VOLTAGE).clamp(0.0, 1.0);
    MEMS_MIN_DB + (MEMS_MAX_DB - MEMS_MIN_DB) * x * x
}

pub fn mems_voltage_for_setting(setting_db: f64) -> f64 {
    let x = ((setting_db - MEMS_MIN_DB) / (MEMS_MAX_DB - MEMS_MIN_DB)).clamp(0.0, 1.0);
    MEMS_MAX_VOLTAGE * x.sqrt()
}

/// Permanent drop over the high-attenuation end of a MEMS VOA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemsBand {
    /// Full drop inside the band (positive dB).
    pub depth_db: f64,
    /// Lowest setting that sees the full drop.
    pub band_start_db: f64,
    pub taper_db: f64,
}

impl MemsBand {
    /// Band covering the top of the range, stretched down to include the
    /// setpoint the damage was done at.
    pub fn new(depth_db: f64, exposure_setpoint_db: f64) -> Self {
        let top = MEMS_MIN_DB + (1.0 - MEMS_DAMAGED_BAND_FRACTION) * (MEMS_MAX_DB - MEMS_MIN_DB);
        Self {
            depth_db,
            band_start_db: top.min(exposure_setpoint_db),
            taper_db: MEMS_TAPER_PER_DB * depth_db,
        }
    }

    pub fn offset_at(&self, setting_db: f64) -> f64 {
        if self.taper_db <= 0.0 {
            return 0.0;
        }
        let ramp = (setting_db - (self.band_start_db - self.taper_db)) / self.taper_db;
        -self.depth_db * ramp.clamp(0.0, 1.0)
    }
}

/// Half-width of an optimally burnt VDMC dip, in dB of setting.
pub const VDMC_DIP_HALF_WIDTH_DB: f64 = 0.5;
/// Largest displacement of the dip minimum under suboptimal exposure.
pub const VDMC_MAX_SHIFT_DB: f64 = 0.3;

/// A localized permanent attenuation dip burnt into the VDMC disk.
///
/// `depth_db` is the drop at the damage point itself. When `shift_db` is
/// non-zero the minimum sits at `center + shift` and is correspondingly
/// deeper, so the curve still passes through `-depth_db` at the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdmcDip {
    pub center_db: f64,
    pub depth_db: f64,
    pub shift_db: f64,
    /// Depth reached at the first successful exposure, before deepening.
    pub initial_depth_db: f64,
}

impl VdmcDip {
    pub fn min_depth_db(&self) -> f64 {
        self.depth_db * (VDMC_DIP_HALF_WIDTH_DB + self.shift_db.abs()) / VDMC_DIP_HALF_WIDTH_DB
    }

    pub fn offset_at(&self, setting_db: f64) -> f64 {
        let h = VDMC_DIP_HALF_WIDTH_DB;
        // Work in coordinates where the minimum is displaced to the right.
        let s = if self.shift_db >= 0.0 {
            setting_db - self.center_db
        } else {
            self.center_db - setting_db
        };
        let shift = self.shift_db.abs();
        let d_min = self.min_depth_db();
        if s <= -h || s >= shift + h {
            0.0
        } else if s <= shift {
            -d_min * (s + h) / (shift + h)
        } else {
            -d_min * (shift + h - s) / h
        }
    }
}

/// (power relative to the sample's 10 s threshold, cumulative seconds needed)
///
/// Anchored on 2.0 W / 200 s, 2.2 W / 30 to 50 s and 2.8 W / 10 s.
const VDMC_EXPOSURE_ANCHORS: [(f64, f64); 3] = [(2.0 / 2.8, 200.0), (2.2 / 2.8, 40.0), (1.0, 10.0)];

/// Lowest relative power that damages the coating at all.
pub fn vdmc_min_relative_power() -> f64 {
    VDMC_EXPOSURE_ANCHORS[0].0
}

/// Cumulative exposure needed at `relative_power` (power divided by the
/// sample's attack threshold), or `None` below the minimum effective power.
/// Log-linear between anchors, flat at 10 s above the threshold.
pub fn vdmc_required_exposure_s(relative_power: f64) -> Option<f64> {
    // Tolerate round-off from a dBm round trip at the anchor powers.
    let r = relative_power * (1.0 + 1e-9);
    let [first, .., last] = VDMC_EXPOSURE_ANCHORS;
    if r < first.0 {
        return None;
    }
    if r >= last.0 {
        return Some(last.1);
    }
    VDMC_EXPOSURE_ANCHORS.windows(2).find_map(|w| {
        let ((p0, t0), (p1, t1)) = (w[0], w[1]);
        (r >= p0 && r <= p1).then(|| {
            let f = (r - p0) / (p1 - p0);
            (t0.ln() + f * (t1.ln() - t0.ln())).exp()
        })
    })
}

/// Displacement of the dip minimum. Zero at or above the 10 s threshold
/// power, growing linearly to the maximum at the weakest effective power.
pub fn vdmc_shift_magnitude(relative_power: f64) -> f64 {
    let lo = vdmc_min_relative_power();
    let x = ((1.0 - relative_power) / (1.0 - lo)).clamp(0.0, 1.0);
    VDMC_MAX_SHIFT_DB * x
}

/// Thinner coating at low settings limits how much can be ablated away.
pub const VDMC_COATING_SCALE_DB: f64 = 10.0;

pub fn vdmc_coating_factor(setting_db: f64, floor_db: f64) -> f64 {
    let excess = (setting_db - floor_db).max(0.0);
    1.0 - (-excess / VDMC_COATING_SCALE_DB).exp()
}

/// Relative power above which a repeat exposure ablates further.
pub const VDMC_DEEPENING_RELATIVE_POWER: f64 = 1.6;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mems_voltage_round_trip_and_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=150 {
            let v = i as f64 * 0.1;
            let s = mems_setting_for_voltage(v);
            assert!(s >= prev);
            prev = s;
            assert_relative_eq!(mems_voltage_for_setting(s), v, epsilon = 1e-9);
        }
        assert_eq!(mems_setting_for_voltage(0.0), MEMS_MIN_DB);
        assert_eq!(mems_setting_for_voltage(MEMS_MAX_VOLTAGE), MEMS_MAX_DB);
    }

    #[test]
    fn mems_band_taper() {
        let band = MemsBand::new(5.0, 30.0);
        assert_relative_eq!(band.band_start_db, 24.1, epsilon = 1e-12);
        assert_eq!(band.offset_at(30.0), -5.0);
        assert_eq!(band.offset_at(24.1), -5.0);
        assert!(band.offset_at(24.1 - 6.25).abs() < 1e-12);
        assert!(band.offset_at(21.0) < 0.0 && band.offset_at(21.0) > -5.0);
        let low = MemsBand::new(3.0, 12.0);
        assert_eq!(low.band_start_db, 12.0);
        assert_eq!(low.offset_at(12.0), -3.0);
    }

    #[test]
    fn symmetric_dip() {
        let dip = VdmcDip {
            center_db: 53.0,
            depth_db: 10.0,
            shift_db: 0.0,
            initial_depth_db: 10.0,
        };
        assert_eq!(dip.offset_at(53.0), -10.0);
        assert_eq!(dip.offset_at(52.5), 0.0);
        assert_eq!(dip.offset_at(53.5), 0.0);
        assert_relative_eq!(dip.offset_at(53.25), -5.0, epsilon = 1e-12);
        assert_relative_eq!(dip.offset_at(52.75), -5.0, epsilon = 1e-12);
    }

    #[test]
    fn skewed_dip_passes_through_center_depth() {
        for shift in [0.2, -0.2, 0.3] {
            let dip = VdmcDip {
                center_db: 70.0,
                depth_db: 8.0,
                shift_db: shift,
                initial_depth_db: 8.0,
            };
            assert_relative_eq!(dip.offset_at(70.0), -8.0, epsilon = 1e-12);
            let min = dip.offset_at(70.0 + shift);
            assert!(min < -8.0);
            assert_relative_eq!(min, -dip.min_depth_db(), epsilon = 1e-12);
        }
    }

    #[test]
    fn exposure_anchors() {
        assert_relative_eq!(
            vdmc_required_exposure_s(2.0 / 2.8).unwrap(),
            200.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            vdmc_required_exposure_s(2.2 / 2.8).unwrap(),
            40.0,
            max_relative = 1e-6
        );
        assert_eq!(vdmc_required_exposure_s(1.0), Some(10.0));
        assert_eq!(vdmc_required_exposure_s(1.5), Some(10.0));
        assert_eq!(vdmc_required_exposure_s(0.6), None);
        let t = vdmc_required_exposure_s(2.5 / 2.8).unwrap();
        assert!(t > 10.0 && t < 40.0);
    }

    #[test]
    fn shift_vanishes_at_threshold() {
        assert_eq!(vdmc_shift_magnitude(1.0), 0.0);
        assert_eq!(vdmc_shift_magnitude(1.3), 0.0);
        assert_relative_eq!(
            vdmc_shift_magnitude(vdmc_min_relative_power()),
            0.3,
            epsilon = 1e-12
        );
    }
}
