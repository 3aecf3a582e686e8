//! Power handling of standard single-mode fiber.
//!
//! Backward stimulated Raman and Brillouin scattering put an upper bound on
//! the continuous-wave power that can be pushed down a fiber before the
//! backward Stokes wave matches the transmitted power. Everything here is
//! computed in SI units internally (W, m, m²); kilometres, µm², GHz/MHz and
//! dBm only appear on the public fields and helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical prefactor of the backward SRS threshold.
pub const SRS_PREFACTOR: f64 = 20.0;
/// Numerical prefactor of the backward SBS threshold.
pub const SBS_PREFACTOR: f64 = 21.0;

const UM2_TO_M2: f64 = 1e-12;
const KM_TO_M: f64 = 1e3;

/// Geometry and material constants of the injection fiber.
///
/// `alpha_per_km` is a natural-log (power) attenuation coefficient, i.e.
/// transmitted power is `P·exp(-alpha·L)`. It is *not* a dB/km figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberLink {
    pub length_km: f64,
    pub alpha_per_km: f64,
    pub a_eff_um2: f64,
    pub g_r_m_per_w: f64,
    pub g_b_m_per_w: f64,
    pub delta_nu_b_mhz: f64,
}

impl Default for FiberLink {
    /// 20 m of SMF-28 at 1550 nm.
    fn default() -> Self {
        Self {
            length_km: 0.02,
            alpha_per_km: 0.05,
            a_eff_um2: 50.0,
            g_r_m_per_w: 6.67e-14,
            g_b_m_per_w: 5e-11,
            delta_nu_b_mhz: 16.0,
        }
    }
}

impl FiberLink {
    /// Default constants with a different length.
    pub fn with_length_km(length_km: f64) -> Self {
        Self {
            length_km,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidLink(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("length_km", self.length_km)?;
        positive("a_eff_um2", self.a_eff_um2)?;
        positive("g_r_m_per_w", self.g_r_m_per_w)?;
        positive("g_b_m_per_w", self.g_b_m_per_w)?;
        positive("delta_nu_b_mhz", self.delta_nu_b_mhz)?;
        if !(self.alpha_per_km.is_finite() && self.alpha_per_km >= 0.0) {
            return Err(Error::InvalidLink(format!(
                "alpha_per_km must be >= 0, got {}",
                self.alpha_per_km
            )));
        }
        Ok(())
    }

    fn alpha_per_m(&self) -> f64 {
        self.alpha_per_km / KM_TO_M
    }

    fn length_m(&self) -> f64 {
        self.length_km * KM_TO_M
    }

    fn a_eff_m2(&self) -> f64 {
        self.a_eff_um2 * UM2_TO_M2
    }
}

/// The attacker's high-power source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaserSource {
    pub max_power_w: f64,
    pub linewidth_ghz: f64,
    pub wavelength_nm: f64,
}

impl Default for LaserSource {
    /// The 9 W EDFA seeded by a ~10 GHz wide laser diode.
    fn default() -> Self {
        Self {
            max_power_w: 9.0,
            linewidth_ghz: 10.0,
            wavelength_nm: 1550.0,
        }
    }
}

impl LaserSource {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_power_w.is_finite() && self.max_power_w >= 0.0) {
            return Err(Error::InvalidLaser(format!(
                "max_power_w must be >= 0, got {}",
                self.max_power_w
            )));
        }
        if !(self.linewidth_ghz.is_finite() && self.linewidth_ghz >= 0.0) {
            return Err(Error::InvalidLaser(format!(
                "linewidth_ghz must be >= 0, got {}",
                self.linewidth_ghz
            )));
        }
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return Err(Error::InvalidLaser(format!(
                "wavelength_nm must be positive, got {}",
                self.wavelength_nm
            )));
        }
        Ok(())
    }
}

/// Loss-weighted interaction length `(1 - exp(-αL))/α`, in metres.
///
/// Reduces to `L` for a lossless fiber and saturates at `1/α` for long ones.
pub fn effective_length(link: &FiberLink) -> Result<f64> {
    link.validate()?;
    Ok(effective_length_m(link))
}

fn effective_length_m(link: &FiberLink) -> f64 {
    let alpha = link.alpha_per_m();
    let length = link.length_m();
    let attenuation = alpha * length;
    if attenuation == 0.0 {
        length
    } else {
        // -expm1 keeps precision when αL is tiny (metre-scale fibers).
        -(-attenuation).exp_m1() / alpha
    }
}

/// Backward SRS threshold `20·A_eff/(g_R·L_eff)` in watts.
pub fn srs_threshold(link: &FiberLink) -> Result<f64> {
    link.validate()?;
    Ok(SRS_PREFACTOR * link.a_eff_m2() / (link.g_r_m_per_w * effective_length_m(link)))
}

/// Multiplier on the SBS threshold for a pump wider than the Brillouin gain
/// bandwidth: `1 + Δν_p/Δν_B`.
pub fn sbs_broadening_factor(link: &FiberLink, laser: &LaserSource) -> f64 {
    1.0 + (laser.linewidth_ghz * 1e3) / link.delta_nu_b_mhz
}

/// Backward SBS threshold `21·A_eff/(g_B·L_eff)` in watts, including the
/// linewidth broadening factor of the pump.
pub fn sbs_threshold(link: &FiberLink, laser: &LaserSource) -> Result<f64> {
    link.validate()?;
    laser.validate()?;
    let narrowband =
        SBS_PREFACTOR * link.a_eff_m2() / (link.g_b_m_per_w * effective_length_m(link));
    Ok(narrowband * sbs_broadening_factor(link, laser))
}

/// Which limit caps the injectable power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerLimit {
    Srs,
    Sbs,
    Laser,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectableLimit {
    pub power_w: f64,
    pub limited_by: PowerLimit,
}

/// `min(SRS threshold, SBS threshold, laser maximum)` and the binding
/// constraint. Ties resolve in the order laser, SRS, SBS.
pub fn max_injectable_power(link: &FiberLink, laser: &LaserSource) -> Result<InjectableLimit> {
    let srs = srs_threshold(link)?;
    let sbs = sbs_threshold(link, laser)?;
    let mut limit = InjectableLimit {
        power_w: laser.max_power_w,
        limited_by: PowerLimit::Laser,
    };
    for (power_w, limited_by) in [(srs, PowerLimit::Srs), (sbs, PowerLimit::Sbs)] {
        if power_w < limit.power_w {
            limit = InjectableLimit {
                power_w,
                limited_by,
            };
        }
    }
    Ok(limit)
}

/// Power reaching the far end of the link, `P_in·exp(-αL)`.
pub fn delivered_power(link: &FiberLink, p_in_w: f64) -> Result<f64> {
    link.validate()?;
    if !(p_in_w.is_finite() && p_in_w >= 0.0) {
        return Err(Error::NegativePower(p_in_w));
    }
    Ok(p_in_w * (-link.alpha_per_m() * link.length_m()).exp())
}

/// One row of a threshold-versus-length table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub length_km: f64,
    pub p_srs_w: f64,
    pub p_sbs_w: f64,
}

/// Tabulate both thresholds on a log-spaced length grid. The first and last
/// rows are exactly `l_min_km` and `l_max_km`.
pub fn threshold_curve(
    link_template: &FiberLink,
    laser: &LaserSource,
    l_min_km: f64,
    l_max_km: f64,
    n_points: usize,
) -> Result<Vec<ThresholdPoint>> {
    if !(l_min_km.is_finite() && l_max_km.is_finite() && l_min_km > 0.0 && l_min_km < l_max_km) {
        return Err(Error::InvalidGrid(format!(
            "need 0 < l_min_km < l_max_km, got [{l_min_km}, {l_max_km}]"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {n_points}"
        )));
    }
    let (lo, hi) = (l_min_km.ln(), l_max_km.ln());
    let last = n_points - 1;
    (0..n_points)
        .map(|i| {
            let length_km = match i {
                0 => l_min_km,
                i if i == last => l_max_km,
                i => (lo + (hi - lo) * i as f64 / last as f64).exp(),
            };
            let link = FiberLink {
                length_km,
                ..*link_template
            };
            Ok(ThresholdPoint {
                length_km,
                p_srs_w: srs_threshold(&link)?,
                p_sbs_w: sbs_threshold(&link, laser)?,
            })
        })
        .collect()
}

pub const THRESHOLD_CSV_HEADER: &str = "length_km,p_srs_w,p_sbs_w";

/// Render a threshold table as CSV (header plus one line per point).
pub fn threshold_curve_csv(points: &[ThresholdPoint]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(THRESHOLD_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.length_km, p.p_srs_w, p.p_sbs_w));
    }
    out
}

/// dBm to watts.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf(p_dbm / 10.0) / 1000.0
}

/// Watts to dBm; rejects non-positive power.
pub fn watts_to_dbm(p_w: f64) -> Result<f64> {
    if !(p_w.is_finite() && p_w > 0.0) {
        return Err(Error::NonPositivePower(p_w));
    }
    Ok(10.0 * (p_w * 1000.0).log10())
}
