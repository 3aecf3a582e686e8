//! Mean-photon-number consequences of an attenuation change.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SUCCESS_THRESHOLD_DB: f64 = -1.0;
pub const DEFAULT_FAILURE_THRESHOLD_DB: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Attenuation fell far enough to inflate the mean photon number.
    Compromised,
    /// Attenuation rose far enough that the source effectively blocks light.
    DenialOfService,
    Unaffected,
}

/// Multiplicative change of the mean photon number, `10^(-Δ/10)`.
pub fn mpn_ratio(delta_attenuation_db: f64) -> f64 {
    10f64.powf(-delta_attenuation_db / 10.0)
}

pub fn adjusted_mu(mu0: f64, delta_attenuation_db: f64) -> Result<f64> {
    if !(mu0.is_finite() && mu0 > 0.0) {
        return Err(Error::NonPositiveMu(mu0));
    }
    Ok(mu0 * mpn_ratio(delta_attenuation_db))
}

pub fn validate_thresholds(success_threshold_db: f64, failure_threshold_db: f64) -> Result<()> {
    if success_threshold_db < 0.0 && 0.0 < failure_threshold_db {
        Ok(())
    } else {
        Err(Error::InvalidThresholds(format!(
            "need success < 0 < failure, got {success_threshold_db} and {failure_threshold_db}"
        )))
    }
}

/// Three-way split of the real line: `(-inf, success]`, `(success, failure)`,
/// `[failure, +inf)`. NaN counts as unaffected.
pub fn classify(
    delta_attenuation_db: f64,
    success_threshold_db: f64,
    failure_threshold_db: f64,
) -> Result<Classification> {
    validate_thresholds(success_threshold_db, failure_threshold_db)?;
    Ok(if delta_attenuation_db <= success_threshold_db {
        Classification::Compromised
    } else if delta_attenuation_db >= failure_threshold_db {
        Classification::DenialOfService
    } else {
        Classification::Unaffected
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub delta_attenuation_db: f64,
    pub mpn_ratio: f64,
    pub mu_before: f64,
    pub mu_after: f64,
    pub classification: Classification,
}

impl ImpactReport {
    /// Build a report using the default ±thresholds (−1 dB / +3 dB).
    pub fn new(mu_before: f64, delta_attenuation_db: f64) -> Result<Self> {
        Self::with_thresholds(
            mu_before,
            delta_attenuation_db,
            DEFAULT_SUCCESS_THRESHOLD_DB,
            DEFAULT_FAILURE_THRESHOLD_DB,
        )
    }

    pub fn with_thresholds(
        mu_before: f64,
        delta_attenuation_db: f64,
        success_threshold_db: f64,
        failure_threshold_db: f64,
    ) -> Result<Self> {
        if !delta_attenuation_db.is_finite() {
            return Err(Error::InvalidThresholds(format!(
                "attenuation change must be finite, got {delta_attenuation_db}"
            )));
        }
        let mu_after = adjusted_mu(mu_before, delta_attenuation_db)?;
        Ok(Self {
            delta_attenuation_db,
            mpn_ratio: mpn_ratio(delta_attenuation_db),
            mu_before,
            mu_after,
            classification: classify(
                delta_attenuation_db,
                success_threshold_db,
                failure_threshold_db,
            )?,
        })
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let pct = (self.mpn_ratio - 1.0) * 100.0;
        format!(
            "{:+.2} dB attenuation change: mean photon number x{:.3} ({:+.1}%), {:.4} -> {:.4}, {:?}",
            self.delta_attenuation_db, self.mpn_ratio, pct, self.mu_before, self.mu_after,
            self.classification
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ratio_anchors() {
        assert!((mpn_ratio(-1.0) - 1.259).abs() < 0.001);
        assert_eq!(mpn_ratio(0.0), 1.0);
        assert!((mpn_ratio(3.0) - 0.501).abs() < 0.001);
    }

    #[test]
    fn adjusted_mu_examples() {
        assert!((adjusted_mu(0.5, -9.59).unwrap() - 4.55).abs() < 0.005);
        assert_eq!(adjusted_mu(0.5, 0.0).unwrap(), 0.5);
        assert!((adjusted_mu(0.1, -5.34).unwrap() - 0.342).abs() < 0.0005);
        assert!(adjusted_mu(0.0, -1.0).is_err());
        assert!(adjusted_mu(-0.1, -1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = |d| classify(d, -1.0, 3.0).unwrap();
        assert_eq!(c(-6.47), Classification::Compromised);
        assert_eq!(c(31.47), Classification::DenialOfService);
        assert_eq!(c(-0.5), Classification::Unaffected);
        assert_eq!(c(-1.0), Classification::Compromised);
        assert_eq!(c(3.0), Classification::DenialOfService);
        assert!(classify(0.0, 1.0, 3.0).is_err());
        assert!(classify(0.0, -1.0, -0.5).is_err());
    }

    #[test]
    fn report_fields() {
        let r = ImpactReport::new(0.5, -9.59).unwrap();
        assert_relative_eq!(r.mu_after, r.mu_before * r.mpn_ratio, max_relative = 1e-15);
        assert_eq!(r.classification, Classification::Compromised);
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json.as_object().unwrap().len(), 5);
        assert_eq!(json["classification"], "Compromised");
    }

    proptest! {
        #[test]
        fn db_additivity(a in -40.0f64..40.0, b in -40.0f64..40.0) {
            let lhs = mpn_ratio(a + b);
            let rhs = mpn_ratio(a) * mpn_ratio(b);
            prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ratio_strictly_decreasing(a in -40.0f64..40.0, d in 1e-6f64..10.0) {
            prop_assert!(mpn_ratio(a + d) < mpn_ratio(a));
        }

        #[test]
        fn classification_partitions_line(
            d in -100.0f64..100.0,
            s in -10.0f64..-1e-3,
            f in 1e-3f64..10.0,
        ) {
            let class = classify(d, s, f).unwrap();
            let expected = [d <= s, d >= f, d > s && d < f];
            prop_assert_eq!(expected.iter().filter(|&&x| x).count(), 1);
            match class {
                Classification::Compromised => prop_assert!(expected[0]),
                Classification::DenialOfService => prop_assert!(expected[1]),
                Classification::Unaffected => prop_assert!(expected[2]),
            }
        }
    }
}
