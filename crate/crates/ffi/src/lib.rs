//! C ABI for the laser-damage attack simulator.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`QlaStatus`] and writes its result
//!   through an out-pointer. The out-pointer is left untouched on error.
//! * Simulator objects are opaque handles created by a `*_new` or `*_run`
//!   function and released by the matching `*_free`. Passing NULL to a
//!   `*_free` function is a no-op.
//! * Strings returned by the library are NUL-terminated UTF-8 and must be
//!   released with [`qla_string_free`].
//! * After an error, [`qla_last_error`] describes it on the calling thread.
//! * Enum arguments must hold one of the declared values.
//!
//! Handles are not synchronized. A handle may move between threads but must
//! not be used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qla_core::attenuator::{new_attenuator, AttenuatorClass, AttenuatorState, ExposureKind};
use qla_core::campaign::{monte_carlo, CampaignOutcome, CampaignReport, TrialSpec};
use qla_core::config::QlaConfig;
use qla_core::fiber::{
    dbm_to_watts, max_injectable_power, sbs_threshold, srs_threshold, watts_to_dbm, FiberLink,
    LaserSource,
};
use qla_core::impact::{adjusted_mu, classify, mpn_ratio, Classification};
use qla_core::risk::{
    prob_fraction_vulnerable_exceeds, BoundaryConvention, Prior, RiskQuery, TestRecord,
};
use qla_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument is out of range or inconsistent.
    InvalidArgument = 2,
    /// The attenuator has failed catastrophically and accepts no exposures.
    Destroyed = 3,
    /// A configuration document failed to parse or validate.
    ConfigError = 4,
    /// A string argument is not valid UTF-8.
    InvalidUtf8 = 5,
    /// Unexpected internal failure. Please report it.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaClass {
    ManualVoa = 0,
    Fixed = 1,
    MemsVoa = 2,
    VdmcVoa = 3,
}

impl From<QlaClass> for AttenuatorClass {
    fn from(c: QlaClass) -> Self {
        match c {
            QlaClass::ManualVoa => AttenuatorClass::ManualVoa,
            QlaClass::Fixed => AttenuatorClass::Fixed,
            QlaClass::MemsVoa => AttenuatorClass::MemsVoa,
            QlaClass::VdmcVoa => AttenuatorClass::VdmcVoa,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaExposureKind {
    NoChange = 0,
    TemporaryDrop = 1,
    PermanentDrop = 2,
    CriticalFailure = 3,
}

impl From<ExposureKind> for QlaExposureKind {
    fn from(k: ExposureKind) -> Self {
        match k {
            ExposureKind::NoChange => QlaExposureKind::NoChange,
            ExposureKind::TemporaryDrop => QlaExposureKind::TemporaryDrop,
            ExposureKind::PermanentDrop => QlaExposureKind::PermanentDrop,
            ExposureKind::CriticalFailure => QlaExposureKind::CriticalFailure,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaOutcome {
    Success = 0,
    CriticalFailure = 1,
    Inconclusive = 2,
    FiberFuseDos = 3,
}

impl From<CampaignOutcome> for QlaOutcome {
    fn from(o: CampaignOutcome) -> Self {
        match o {
            CampaignOutcome::Success => QlaOutcome::Success,
            CampaignOutcome::CriticalFailure => QlaOutcome::CriticalFailure,
            CampaignOutcome::Inconclusive => QlaOutcome::Inconclusive,
            CampaignOutcome::FiberFuseDoS => QlaOutcome::FiberFuseDos,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaClassification {
    Compromised = 0,
    DenialOfService = 1,
    Unaffected = 2,
}

impl From<Classification> for QlaClassification {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Compromised => QlaClassification::Compromised,
            Classification::DenialOfService => QlaClassification::DenialOfService,
            Classification::Unaffected => QlaClassification::Unaffected,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlaPrior {
    Jeffreys = 0,
    Uniform = 1,
}

/// Opaque attenuator sample with its own exposure RNG stream.
pub struct QlaAttenuator {
    state: AttenuatorState,
    rng: ChaCha8Rng,
}

/// Opaque log of one finished campaign.
pub struct QlaCampaign {
    report: CampaignReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> QlaStatus {
    match err {
        Error::Destroyed => QlaStatus::Destroyed,
        Error::Config(_) => QlaStatus::ConfigError,
        _ => QlaStatus::InvalidArgument,
    }
}

fn fail(status: QlaStatus, msg: impl Into<String>) -> QlaStatus {
    set_last_error(msg);
    status
}

fn from_core(err: Error) -> QlaStatus {
    fail(status_of(&err), err.to_string())
}

/// Run `body`, mapping a panic to [`QlaStatus::Internal`].
fn guard(body: impl FnOnce() -> QlaStatus) -> QlaStatus {
    catch_unwind(AssertUnwindSafe(body))
        .unwrap_or_else(|_| fail(QlaStatus::Internal, "internal panic"))
}

/// Write `value` through `out`, or report a NULL out-pointer.
///
/// # Safety
/// `out` must be NULL or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, value: T) -> QlaStatus {
    if out.is_null() {
        return fail(QlaStatus::NullPointer, "output pointer is NULL");
    }
    out.write(value);
    QlaStatus::Ok
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Parse an optional config document; NULL means the shipped defaults.
///
/// # Safety
/// `config_json` must be NULL or a valid NUL-terminated string.
unsafe fn read_config(config_json: *const c_char) -> Result<QlaConfig, QlaStatus> {
    if config_json.is_null() {
        return Ok(QlaConfig::default());
    }
    let text = CStr::from_ptr(config_json)
        .to_str()
        .map_err(|_| fail(QlaStatus::InvalidUtf8, "config is not valid UTF-8"))?;
    QlaConfig::from_json(text).map_err(|e| fail(QlaStatus::ConfigError, e.to_string()))
}

fn trial_spec(class: QlaClass, setpoint_db: f64, config: QlaConfig) -> TrialSpec {
    let class = AttenuatorClass::from(class);
    TrialSpec {
        config: config.campaign,
        class,
        profile: config.profiles.profile(class),
        setpoint_db: if setpoint_db.is_nan() {
            class.default_setpoint_db()
        } else {
            setpoint_db
        },
        link: config.link,
        laser: config.laser,
    }
}

/// Description of the most recent error on this thread. Valid until the
/// next library call on the same thread. Never NULL.
#[no_mangle]
pub extern "C" fn qla_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code. Never NULL.
#[no_mangle]
pub extern "C" fn qla_status_name(status: QlaStatus) -> *const c_char {
    let name: &'static CStr = match status {
        QlaStatus::Ok => c"ok",
        QlaStatus::NullPointer => c"null pointer",
        QlaStatus::InvalidArgument => c"invalid argument",
        QlaStatus::Destroyed => c"attenuator destroyed",
        QlaStatus::ConfigError => c"config error",
        QlaStatus::InvalidUtf8 => c"invalid UTF-8",
        QlaStatus::Internal => c"internal error",
    };
    name.as_ptr()
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn qla_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// dBm to watts.
#[no_mangle]
pub extern "C" fn qla_dbm_to_watts(p_dbm: f64) -> f64 {
    dbm_to_watts(p_dbm)
}

/// Watts to dBm. Non-positive power is rejected.
///
/// # Safety
/// `out_dbm` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_watts_to_dbm(p_w: f64, out_dbm: *mut f64) -> QlaStatus {
    guard(|| match watts_to_dbm(p_w) {
        Ok(v) => write_out(out_dbm, v),
        Err(e) => from_core(e),
    })
}

/// Backward SRS threshold (W) of the default fiber cut to `length_km`.
///
/// # Safety
/// `out_w` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_srs_threshold_w(length_km: f64, out_w: *mut f64) -> QlaStatus {
    guard(
        || match srs_threshold(&FiberLink::with_length_km(length_km)) {
            Ok(v) => write_out(out_w, v),
            Err(e) => from_core(e),
        },
    )
}

/// Backward SBS threshold (W) of the default fiber cut to `length_km`,
/// pumped by a source of the given linewidth.
///
/// # Safety
/// `out_w` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_sbs_threshold_w(
    length_km: f64,
    linewidth_ghz: f64,
    out_w: *mut f64,
) -> QlaStatus {
    guard(|| {
        let laser = LaserSource {
            linewidth_ghz,
            ..LaserSource::default()
        };
        if let Err(e) = laser.validate() {
            return from_core(e);
        }
        match sbs_threshold(&FiberLink::with_length_km(length_km), &laser) {
            Ok(v) => write_out(out_w, v),
            Err(e) => from_core(e),
        }
    })
}

/// Largest power (W) that can be injected through the default fiber cut to
/// `length_km` with a laser of the given maximum power and linewidth.
///
/// # Safety
/// `out_w` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_max_injectable_power_w(
    length_km: f64,
    laser_max_w: f64,
    linewidth_ghz: f64,
    out_w: *mut f64,
) -> QlaStatus {
    guard(|| {
        let laser = LaserSource {
            max_power_w: laser_max_w,
            linewidth_ghz,
            ..LaserSource::default()
        };
        match max_injectable_power(&FiberLink::with_length_km(length_km), &laser) {
            Ok(limit) => write_out(out_w, limit.power_w),
            Err(e) => from_core(e),
        }
    })
}

/// Factor by which the mean photon number changes for an attenuation
/// change of `delta_db` (negative means less attenuation).
#[no_mangle]
pub extern "C" fn qla_mpn_ratio(delta_db: f64) -> f64 {
    mpn_ratio(delta_db)
}

/// Mean photon number after an attenuation change.
///
/// # Safety
/// `out_mu` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_adjusted_mu(mu0: f64, delta_db: f64, out_mu: *mut f64) -> QlaStatus {
    guard(|| match adjusted_mu(mu0, delta_db) {
        Ok(v) => write_out(out_mu, v),
        Err(e) => from_core(e),
    })
}

/// Classify an attenuation change against the success (negative) and
/// failure (positive) thresholds.
///
/// # Safety
/// `out` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_classify(
    delta_db: f64,
    success_threshold_db: f64,
    failure_threshold_db: f64,
    out: *mut QlaClassification,
) -> QlaStatus {
    guard(
        || match classify(delta_db, success_threshold_db, failure_threshold_db) {
            Ok(c) => write_out(out, c.into()),
            Err(e) => from_core(e),
        },
    )
}

/// Posterior predictive probability that more than `fraction` of the
/// untested systems in a population of `population` are vulnerable.
///
/// # Safety
/// `out_prob` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qla_risk_prob_exceeds(
    tested: u64,
    compromised: u64,
    dos: u64,
    population: u64,
    fraction: f64,
    prior: QlaPrior,
    out_prob: *mut f64,
) -> QlaStatus {
    guard(|| {
        let query = RiskQuery {
            record: TestRecord {
                n_tested: tested,
                n_compromised: compromised,
                n_dos: dos,
            },
            population_total: population,
            vulnerable_fraction: fraction,
            prior: match prior {
                QlaPrior::Jeffreys => Prior::Jeffreys,
                QlaPrior::Uniform => Prior::Uniform,
            },
            boundary: BoundaryConvention::StrictlyGreater,
        };
        match prob_fraction_vulnerable_exceeds(&query) {
            Ok(p) => write_out(out_prob, p),
            Err(e) => from_core(e),
        }
    })
}

/// Create a fresh sample of `class` with its class-default damage profile,
/// monitored at `setpoint_db`. `seed` fixes both the sampled thresholds and
/// the exposure RNG stream.
///
/// # Safety
/// `out` must be NULL or valid for writing a handle pointer.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_new(
    class: QlaClass,
    setpoint_db: f64,
    seed: u64,
    out: *mut *mut QlaAttenuator,
) -> QlaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QlaStatus::NullPointer, "output pointer is NULL");
        }
        let class = AttenuatorClass::from(class);
        let profile = qla_core::attenuator::DamageProfile::for_class(class);
        match new_attenuator(class, profile, setpoint_db, seed) {
            Ok(state) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                write_out(out, Box::into_raw(Box::new(QlaAttenuator { state, rng })))
            }
            Err(e) => from_core(e),
        }
    })
}

/// Release an attenuator handle. NULL is a no-op.
///
/// # Safety
/// `handle` must be NULL or a live handle from [`qla_attenuator_new`].
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_free(handle: *mut QlaAttenuator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Attenuation (dB) reported at `setting_db`.
///
/// # Safety
/// `handle` must be a live handle; `out_db` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_attenuation(
    handle: *const QlaAttenuator,
    setting_db: f64,
    out_db: *mut f64,
) -> QlaStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(QlaStatus::NullPointer, "handle is NULL");
        };
        match h.state.attenuation(setting_db) {
            Ok(v) => write_out(out_db, v),
            Err(e) => from_core(e),
        }
    })
}

/// Expose the sample to `power_w` for `duration_s`, updating the handle in
/// place. Either out-pointer may be NULL if the caller does not need it.
///
/// # Safety
/// `handle` must be a live handle; out-pointers must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_expose(
    handle: *mut QlaAttenuator,
    power_w: f64,
    duration_s: f64,
    out_kind: *mut QlaExposureKind,
    out_delta_db: *mut f64,
) -> QlaStatus {
    guard(|| {
        let Some(h) = handle.as_mut() else {
            return fail(QlaStatus::NullPointer, "handle is NULL");
        };
        match h.state.apply_exposure(power_w, duration_s, &mut h.rng) {
            Ok((next, outcome)) => {
                h.state = next;
                if !out_kind.is_null() {
                    out_kind.write(outcome.kind.into());
                }
                if !out_delta_db.is_null() {
                    out_delta_db.write(outcome.delta_db);
                }
                QlaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Let the sample cool with the laser off for `elapsed_s`.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_cool_down(
    handle: *mut QlaAttenuator,
    elapsed_s: f64,
) -> QlaStatus {
    guard(|| {
        let Some(h) = handle.as_mut() else {
            return fail(QlaStatus::NullPointer, "handle is NULL");
        };
        if !(elapsed_s.is_finite() && elapsed_s >= 0.0) {
            return fail(
                QlaStatus::InvalidArgument,
                format!("elapsed time must be >= 0, got {elapsed_s}"),
            );
        }
        h.state = h.state.cool_down(elapsed_s);
        QlaStatus::Ok
    })
}

/// Whether the sample has failed catastrophically.
///
/// # Safety
/// `handle` must be a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_is_destroyed(
    handle: *const QlaAttenuator,
    out: *mut bool,
) -> QlaStatus {
    guard(|| match handle.as_ref() {
        Some(h) => write_out(out, h.state.destroyed),
        None => fail(QlaStatus::NullPointer, "handle is NULL"),
    })
}

/// The full sample state as JSON. Free with [`qla_string_free`].
///
/// # Safety
/// `handle` must be a live handle; `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_attenuator_to_json(
    handle: *const QlaAttenuator,
    out_json: *mut *mut c_char,
) -> QlaStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(QlaStatus::NullPointer, "handle is NULL");
        };
        match serde_json::to_string(&h.state) {
            Ok(s) => write_out(out_json, into_c_string(s)),
            Err(e) => fail(QlaStatus::Internal, e.to_string()),
        }
    })
}

/// Run one seeded campaign. `setpoint_db` may be NaN for the class default;
/// `config_json` may be NULL for the shipped defaults. Trial `index` of
/// master seed `seed` is run, so `index = i` reproduces the i-th trial of a
/// Monte Carlo batch with the same seed.
///
/// # Safety
/// `config_json` must be NULL or a NUL-terminated string; `out` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_campaign_run(
    class: QlaClass,
    setpoint_db: f64,
    seed: u64,
    index: u64,
    config_json: *const c_char,
    out: *mut *mut QlaCampaign,
) -> QlaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QlaStatus::NullPointer, "output pointer is NULL");
        }
        let config = match read_config(config_json) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match trial_spec(class, setpoint_db, config).run_trial(seed, index) {
            Ok(report) => write_out(out, Box::into_raw(Box::new(QlaCampaign { report }))),
            Err(e) => from_core(e),
        }
    })
}

/// Release a campaign handle. NULL is a no-op.
///
/// # Safety
/// `handle` must be NULL or a live handle from [`qla_campaign_run`].
#[no_mangle]
pub unsafe extern "C" fn qla_campaign_free(handle: *mut QlaCampaign) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// How the campaign ended.
///
/// # Safety
/// `handle` must be a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_campaign_outcome(
    handle: *const QlaCampaign,
    out: *mut QlaOutcome,
) -> QlaStatus {
    guard(|| match handle.as_ref() {
        Some(h) => write_out(out, h.report.outcome.into()),
        None => fail(QlaStatus::NullPointer, "handle is NULL"),
    })
}

/// Number of power steps the campaign applied.
///
/// # Safety
/// `handle` must be a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_campaign_step_count(
    handle: *const QlaCampaign,
    out: *mut usize,
) -> QlaStatus {
    guard(|| match handle.as_ref() {
        Some(h) => write_out(out, h.report.steps.len()),
        None => fail(QlaStatus::NullPointer, "handle is NULL"),
    })
}

/// The campaign log as JSON. Free with [`qla_string_free`].
///
/// # Safety
/// `handle` must be a live handle; `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_campaign_to_json(
    handle: *const QlaCampaign,
    out_json: *mut *mut c_char,
) -> QlaStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(QlaStatus::NullPointer, "handle is NULL");
        };
        match serde_json::to_string(&h.report) {
            Ok(s) => write_out(out_json, into_c_string(s)),
            Err(e) => fail(QlaStatus::Internal, e.to_string()),
        }
    })
}

/// Run `n_trials` seeded campaigns and return the aggregate summary as
/// JSON. Free with [`qla_string_free`].
///
/// # Safety
/// `config_json` must be NULL or a NUL-terminated string; `out_json` must
/// be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qla_monte_carlo_json(
    class: QlaClass,
    setpoint_db: f64,
    n_trials: u64,
    seed: u64,
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> QlaStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(QlaStatus::NullPointer, "output pointer is NULL");
        }
        let config = match read_config(config_json) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match monte_carlo(&trial_spec(class, setpoint_db, config), n_trials, seed) {
            Ok((summary, _)) => match serde_json::to_string(&summary) {
                Ok(s) => write_out(out_json, into_c_string(s)),
                Err(e) => fail(QlaStatus::Internal, e.to_string()),
            },
            Err(e) => from_core(e),
        }
    })
}
