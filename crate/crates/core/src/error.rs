use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid fiber link: {0}")]
    InvalidLink(String),

    #[error("invalid laser source: {0}")]
    InvalidLaser(String),

    #[error("power must be finite and non-negative, got {0} W")]
    NegativePower(f64),

    #[error("power must be positive for a logarithmic conversion, got {0} W")]
    NonPositivePower(f64),

    #[error("invalid length grid: {0}")]
    InvalidGrid(String),

    #[error("invalid damage profile: {0}")]
    InvalidProfile(String),

    #[error("setpoint {setpoint} dB outside the {class} range [{min}, {max}] dB")]
    SetpointOutOfRange {
        class: &'static str,
        setpoint: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid exposure: {0}")]
    InvalidExposure(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("attenuator is destroyed")]
    Destroyed,

    #[error("invalid campaign configuration: {0}")]
    InvalidConfig(String),

    #[error("start power {start_w} W exceeds the injectable limit {limit_w} W")]
    StartPowerNotDeliverable { start_w: f64, limit_w: f64 },

    #[error("mean photon number must be positive, got {0}")]
    NonPositiveMu(f64),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("inconsistent test record: {0}")]
    InconsistentRecord(String),

    #[error("invalid risk query: {0}")]
    InvalidQuery(String),

    #[error("beta-binomial domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
