//! Bayesian risk prediction for systems that have not been tested yet.
//!
//! Each tested system is a Bernoulli trial (compromised or not; a
//! denial-of-service outcome counts as "not compromised"). A beta prior is
//! updated with the observed counts, and the posterior predictive for the
//! finite pool of untested systems is beta-binomial.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRecord {
    pub n_tested: u64,
    pub n_compromised: u64,
    pub n_dos: u64,
}

impl TestRecord {
    /// Two systems compromised earlier plus the three attenuator-bearing
    /// systems of this study (one counted as denial of service).
    pub const CURRENT: TestRecord = TestRecord {
        n_tested: 5,
        n_compromised: 4,
        n_dos: 1,
    };

    pub fn validate(&self) -> Result<()> {
        match self.n_compromised.checked_add(self.n_dos) {
            Some(sum) if sum <= self.n_tested => Ok(()),
            _ => Err(Error::InconsistentRecord(format!(
                "compromised ({}) + dos ({}) exceeds tested ({})",
                self.n_compromised, self.n_dos, self.n_tested
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    /// Beta(1/2, 1/2)
    #[default]
    Jeffreys,
    /// Beta(1, 1)
    Uniform,
}

impl Prior {
    pub fn parameters(self) -> (f64, f64) {
        match self {
            Prior::Jeffreys => (0.5, 0.5),
            Prior::Uniform => (1.0, 1.0),
        }
    }
}

/// How "more than a fraction f of the m untested systems" is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConvention {
    /// count > floor(f·m)
    #[default]
    StrictlyGreater,
    /// count >= floor(f·m)
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskQuery {
    pub record: TestRecord,
    pub population_total: u64,
    pub vulnerable_fraction: f64,
    pub prior: Prior,
    pub boundary: BoundaryConvention,
}

impl Default for RiskQuery {
    fn default() -> Self {
        Self {
            record: TestRecord::CURRENT,
            population_total: 50,
            vulnerable_fraction: 0.2,
            prior: Prior::Jeffreys,
            boundary: BoundaryConvention::StrictlyGreater,
        }
    }
}

impl RiskQuery {
    pub fn validate(&self) -> Result<()> {
        self.record.validate()?;
        if self.population_total < self.record.n_tested {
            return Err(Error::InvalidQuery(format!(
                "population {} smaller than tested count {}",
                self.population_total, self.record.n_tested
            )));
        }
        if !(self.vulnerable_fraction > 0.0 && self.vulnerable_fraction <= 1.0) {
            return Err(Error::InvalidQuery(format!(
                "vulnerable_fraction must lie in (0, 1], got {}",
                self.vulnerable_fraction
            )));
        }
        Ok(())
    }

    pub fn untested(&self) -> u64 {
        self.population_total - self.record.n_tested
    }
}

/// Beta posterior parameters after observing `record`.
pub fn posterior(record: &TestRecord, prior: Prior) -> Result<(f64, f64)> {
    record.validate()?;
    let (a0, b0) = prior.parameters();
    let failures = record.n_tested - record.n_compromised;
    Ok((a0 + record.n_compromised as f64, b0 + failures as f64))
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn ln_choose(m: u64, k: u64) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((m - k) as f64 + 1.0)
}

fn check_shape(alpha: f64, beta: f64) -> Result<()> {
    if alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "shape parameters must be positive, got ({alpha}, {beta})"
        )))
    }
}

fn ln_pmf_unchecked(k: u64, m: u64, alpha: f64, beta: f64, ln_norm: f64) -> f64 {
    ln_choose(m, k) + ln_beta(k as f64 + alpha, (m - k) as f64 + beta) - ln_norm
}

/// `C(m,k)·B(k+α, m−k+β)/B(α, β)`, evaluated in log space.
pub fn beta_binomial_pmf(k: u64, m: u64, alpha: f64, beta: f64) -> Result<f64> {
    check_shape(alpha, beta)?;
    if k > m {
        return Err(Error::Domain(format!("k = {k} exceeds m = {m}")));
    }
    Ok(ln_pmf_unchecked(k, m, alpha, beta, ln_beta(alpha, beta)).exp())
}

/// First count that qualifies as "more than the fraction".
fn first_exceeding(query: &RiskQuery) -> u64 {
    let m = query.untested();
    let cutoff = (query.vulnerable_fraction * m as f64).floor() as u64;
    match query.boundary {
        BoundaryConvention::StrictlyGreater => cutoff + 1,
        BoundaryConvention::AtLeast => cutoff,
    }
}

/// Posterior-predictive probability that the number of vulnerable systems
/// among the untested ones exceeds the requested fraction.
pub fn prob_fraction_vulnerable_exceeds(query: &RiskQuery) -> Result<f64> {
    query.validate()?;
    let (alpha, beta) = posterior(&query.record, query.prior)?;
    let m = query.untested();
    let start = first_exceeding(query);
    if start > m {
        return Ok(0.0);
    }
    let ln_norm = ln_beta(alpha, beta);
    // Sum the shorter tail to limit cancellation.
    let tail = |range: std::ops::RangeInclusive<u64>| -> f64 {
        range
            .map(|k| ln_pmf_unchecked(k, m, alpha, beta, ln_norm).exp())
            .sum()
    };
    let p = if start > m / 2 {
        tail(start..=m)
    } else if start == 0 {
        1.0
    } else {
        1.0 - tail(0..=start - 1)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// `1 − I_f(α, β)`: the same question for an unbounded population.
pub fn infinite_population_prob(query: &RiskQuery) -> Result<f64> {
    query.validate()?;
    let (alpha, beta) = posterior(&query.record, query.prior)?;
    Ok((1.0 - beta_reg(alpha, beta, query.vulnerable_fraction)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPosterior {
    pub alpha: f64,
    pub beta: f64,
    pub prob_exceeds: f64,
}

/// Serialized form of a risk computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub record: TestRecord,
    pub prior: Prior,
    pub alpha: f64,
    pub beta: f64,
    pub population_total: u64,
    pub untested: u64,
    pub vulnerable_fraction: f64,
    pub boundary: BoundaryConvention,
    pub prob_exceeds: f64,
    pub infinite_population_prob: f64,
}

impl RiskReport {
    pub fn posterior(&self) -> RiskPosterior {
        RiskPosterior {
            alpha: self.alpha,
            beta: self.beta,
            prob_exceeds: self.prob_exceeds,
        }
    }
}

pub fn risk_report(query: &RiskQuery) -> Result<RiskReport> {
    let (alpha, beta) = posterior(&query.record, query.prior)?;
    Ok(RiskReport {
        record: query.record,
        prior: query.prior,
        alpha,
        beta,
        population_total: query.population_total,
        untested: query.untested(),
        vulnerable_fraction: query.vulnerable_fraction,
        boundary: query.boundary,
        prob_exceeds: prob_fraction_vulnerable_exceeds(query)?,
        infinite_population_prob: infinite_population_prob(query)?,
    })
}
