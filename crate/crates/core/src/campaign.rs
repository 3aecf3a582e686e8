//! Stepwise laser-damage test procedure.
//!
//! Each step sets the amplifier power, delivers it through the injection
//! fiber, holds it for the dwell time, switches off, lets the sample cool and
//! measures the attenuation at the monitored setpoint. Power climbs by a
//! fixed dBm step until the attenuation drops past the success threshold,
//! rises past the failure threshold, a fiber fuse trips the interlock, or the
//! maximum power has been applied.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attenuator::{
    new_attenuator, AttenuatorClass, AttenuatorState, DamageProfile, ExposureKind,
};
use crate::error::{Error, Result};
use crate::fiber::{dbm_to_watts, delivered_power, max_injectable_power, FiberLink, LaserSource};

pub const CAMPAIGN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub start_power_dbm: f64,
    pub step_dbm: f64,
    pub dwell_s: f64,
    pub success_delta_db: f64,
    pub failure_delta_db: f64,
    pub max_power_dbm: f64,
    pub cooldown_s: f64,
    /// The attacked port meets the injection fiber at a connector rather
    /// than a splice, so a fiber fuse can ignite there.
    pub connectorized_output: bool,
    pub fuse_threshold_w: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            start_power_dbm: 25.0,
            step_dbm: 0.5,
            dwell_s: 10.0,
            success_delta_db: -1.0,
            failure_delta_db: 3.0,
            max_power_dbm: 39.5,
            cooldown_s: 10.0,
            connectorized_output: false,
            fuse_threshold_w: 4.5,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidConfig(msg));
        let all_finite = [
            self.start_power_dbm,
            self.step_dbm,
            self.dwell_s,
            self.success_delta_db,
            self.failure_delta_db,
            self.max_power_dbm,
            self.cooldown_s,
            self.fuse_threshold_w,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return err("all fields must be finite".into());
        }
        if !(0.5..=1.0).contains(&self.step_dbm) {
            return err(format!(
                "step_dbm must lie in [0.5, 1], got {}",
                self.step_dbm
            ));
        }
        if self.dwell_s < 10.0 {
            return err(format!("dwell_s must be >= 10, got {}", self.dwell_s));
        }
        if self.start_power_dbm > self.max_power_dbm {
            return err(format!(
                "start power {} dBm above max power {} dBm",
                self.start_power_dbm, self.max_power_dbm
            ));
        }
        if !(self.success_delta_db < 0.0 && 0.0 < self.failure_delta_db) {
            return err(format!(
                "need success_delta_db < 0 < failure_delta_db, got {} and {}",
                self.success_delta_db, self.failure_delta_db
            ));
        }
        if self.cooldown_s < 0.0 {
            return err(format!("cooldown_s must be >= 0, got {}", self.cooldown_s));
        }
        if self.fuse_threshold_w <= 0.0 {
            return err(format!(
                "fuse_threshold_w must be positive, got {}",
                self.fuse_threshold_w
            ));
        }
        Ok(())
    }

    /// Number of power levels between start and max inclusive.
    pub fn max_steps(&self) -> usize {
        ((self.max_power_dbm - self.start_power_dbm) / self.step_dbm + 1e-9).floor() as usize + 1
    }
}

/// Whether a fiber fuse ignites at the output connector. Deterministic: a
/// connectorized output trips at or above the threshold, a spliced one never.
pub fn check_fuse(config: &CampaignConfig, power_w_at_connector: f64) -> bool {
    config.connectorized_output && power_w_at_connector >= config.fuse_threshold_w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StepEvent {
    Exposure { kind: ExposureKind, delta_db: f64 },
    FuseTrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignStep {
    pub power_dbm_set: f64,
    /// Power after clamping to the fiber and laser limits.
    pub power_w_applied: f64,
    pub power_w_delivered: f64,
    pub duration_s: f64,
    pub attenuation_before_db: f64,
    /// Reading taken right at laser shutoff, before the cool-down.
    pub attenuation_shutoff_db: f64,
    pub attenuation_after_db: f64,
    pub delta_db: f64,
    pub shutoff_delta_db: f64,
    pub event: StepEvent,
}

impl CampaignStep {
    /// Largest drop observed during the step (shutoff or after cool-down).
    pub fn detected_delta_db(&self) -> f64 {
        self.delta_db.min(self.shutoff_delta_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CampaignOutcome {
    Success,
    CriticalFailure,
    Inconclusive,
    FiberFuseDoS,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub outcome: CampaignOutcome,
    pub steps: Vec<CampaignStep>,
    pub final_state: AttenuatorState,
}

impl CampaignResult {
    /// The step that ended the campaign with a success, if any.
    pub fn success_step(&self) -> Option<&CampaignStep> {
        match self.outcome {
            CampaignOutcome::Success => self.steps.last(),
            _ => None,
        }
    }
}

/// Run the stepwise procedure against `state`.
pub fn run_campaign<R: RngCore + ?Sized>(
    config: &CampaignConfig,
    state: AttenuatorState,
    link: &FiberLink,
    laser: &LaserSource,
    rng: &mut R,
) -> Result<CampaignResult> {
    config.validate()?;
    if state.destroyed {
        return Err(Error::Destroyed);
    }
    let limit_w = max_injectable_power(link, laser)?.power_w;
    let start_w = dbm_to_watts(config.start_power_dbm);
    if start_w > limit_w {
        return Err(Error::StartPowerNotDeliverable { start_w, limit_w });
    }

    let mut state = state;
    let mut steps = Vec::with_capacity(config.max_steps());
    let mut outcome = CampaignOutcome::Inconclusive;
    for i in 0..config.max_steps() {
        let power_dbm_set = config.start_power_dbm + i as f64 * config.step_dbm;
        let set_w = dbm_to_watts(power_dbm_set);
        let clamped = set_w >= limit_w;
        let power_w_applied = set_w.min(limit_w);
        if steps
            .last()
            .is_some_and(|prev: &CampaignStep| power_w_applied <= prev.power_w_applied)
        {
            // Already at the injectable limit; no higher level is reachable.
            break;
        }
        let power_w_delivered = delivered_power(link, power_w_applied)?;
        let before = state.attenuation_at_setpoint();

        if check_fuse(config, power_w_delivered) {
            steps.push(CampaignStep {
                power_dbm_set,
                power_w_applied,
                power_w_delivered,
                duration_s: 0.0,
                attenuation_before_db: before,
                attenuation_shutoff_db: before,
                attenuation_after_db: before,
                delta_db: 0.0,
                shutoff_delta_db: 0.0,
                event: StepEvent::FuseTrip,
            });
            outcome = CampaignOutcome::FiberFuseDoS;
            break;
        }

        let (exposed, exposure) = state.apply_exposure(power_w_delivered, config.dwell_s, rng)?;
        let shutoff = exposed.attenuation_at_setpoint();
        state = exposed.cool_down(config.cooldown_s);
        let after = state.attenuation_at_setpoint();
        let step = CampaignStep {
            power_dbm_set,
            power_w_applied,
            power_w_delivered,
            duration_s: config.dwell_s,
            attenuation_before_db: before,
            attenuation_shutoff_db: shutoff,
            attenuation_after_db: after,
            delta_db: after - before,
            shutoff_delta_db: shutoff - before,
            event: StepEvent::Exposure {
                kind: exposure.kind,
                delta_db: exposure.delta_db,
            },
        };
        steps.push(step);

        if state.destroyed || step.delta_db >= config.failure_delta_db {
            outcome = CampaignOutcome::CriticalFailure;
            break;
        }
        if step.detected_delta_db() <= config.success_delta_db {
            outcome = CampaignOutcome::Success;
            break;
        }
        if clamped {
            break;
        }
    }
    Ok(CampaignResult {
        outcome,
        steps,
        final_state: state,
    })
}

/// Serialized campaign log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: u32,
    pub class: AttenuatorClass,
    pub setpoint_db: f64,
    pub sample_seed: u64,
    pub campaign_seed: u64,
    pub config: CampaignConfig,
    pub link: FiberLink,
    pub laser: LaserSource,
    pub outcome: CampaignOutcome,
    pub steps: Vec<CampaignStep>,
    pub final_state: AttenuatorState,
}

/// Seeds for trial `index` of a run with master seed `seed`.
///
/// Each trial owns ChaCha8 stream `index` of the master seed. The first
/// output word seeds the sample, the second seeds the campaign RNG. Trials
/// therefore do not depend on each other or on evaluation order.
pub fn trial_seeds(seed: u64, index: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (rng.next_u64(), rng.next_u64())
}

/// Everything needed to run one seeded campaign from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub config: CampaignConfig,
    pub class: AttenuatorClass,
    pub profile: DamageProfile,
    pub setpoint_db: f64,
    pub link: FiberLink,
    pub laser: LaserSource,
}

impl TrialSpec {
    pub fn new(class: AttenuatorClass) -> Self {
        Self {
            config: CampaignConfig::default(),
            class,
            profile: DamageProfile::for_class(class),
            setpoint_db: class.default_setpoint_db(),
            link: FiberLink::default(),
            laser: LaserSource::default(),
        }
    }

    pub fn run(&self, sample_seed: u64, campaign_seed: u64) -> Result<CampaignReport> {
        let state = new_attenuator(self.class, self.profile, self.setpoint_db, sample_seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(campaign_seed);
        let result = run_campaign(&self.config, state, &self.link, &self.laser, &mut rng)?;
        Ok(CampaignReport {
            schema: CAMPAIGN_SCHEMA_VERSION,
            class: self.class,
            setpoint_db: self.setpoint_db,
            sample_seed,
            campaign_seed,
            config: self.config,
            link: self.link,
            laser: self.laser,
            outcome: result.outcome,
            steps: result.steps,
            final_state: result.final_state,
        })
    }

    pub fn run_trial(&self, seed: u64, index: u64) -> Result<CampaignReport> {
        let (sample_seed, campaign_seed) = trial_seeds(seed, index);
        self.run(sample_seed, campaign_seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub schema: u32,
    pub class: AttenuatorClass,
    pub setpoint_db: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub success_rate: f64,
    pub critical_failure_rate: f64,
    pub inconclusive_rate: f64,
    pub fiber_fuse_rate: f64,
    /// Mean detected attenuation change over successful trials.
    pub mean_success_delta_db: Option<f64>,
    /// Mean power at which successful trials first showed the drop.
    pub mean_attack_threshold_dbm: Option<f64>,
}

/// Run `n_trials` independent seeded campaigns and aggregate them. Trials
/// run in parallel; results are gathered in trial order.
pub fn monte_carlo(
    spec: &TrialSpec,
    n_trials: u64,
    seed: u64,
) -> Result<(MonteCarloSummary, Vec<CampaignReport>)> {
    if n_trials == 0 {
        return Err(Error::InvalidConfig("n_trials must be >= 1".into()));
    }
    spec.config.validate()?;
    spec.profile.validate()?;
    let reports = (0..n_trials)
        .into_par_iter()
        .map(|i| spec.run_trial(seed, i))
        .collect::<Result<Vec<_>>>()?;

    let n = n_trials as f64;
    let rate = |o: CampaignOutcome| reports.iter().filter(|r| r.outcome == o).count() as f64 / n;
    let successes: Vec<&CampaignStep> = reports
        .iter()
        .filter(|r| r.outcome == CampaignOutcome::Success)
        .filter_map(|r| r.steps.last())
        .collect();
    let mean = |values: Vec<f64>| {
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    };
    let summary = MonteCarloSummary {
        schema: CAMPAIGN_SCHEMA_VERSION,
        class: spec.class,
        setpoint_db: spec.setpoint_db,
        n_trials,
        seed,
        success_rate: rate(CampaignOutcome::Success),
        critical_failure_rate: rate(CampaignOutcome::CriticalFailure),
        inconclusive_rate: rate(CampaignOutcome::Inconclusive),
        fiber_fuse_rate: rate(CampaignOutcome::FiberFuseDoS),
        mean_success_delta_db: mean(successes.iter().map(|s| s.detected_delta_db()).collect()),
        mean_attack_threshold_dbm: mean(successes.iter().map(|s| s.power_dbm_set).collect()),
    };
    Ok((summary, reports))
}
