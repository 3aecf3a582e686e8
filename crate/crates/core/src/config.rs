//! JSON configuration file: campaign parameters, per-class damage profile
//! overrides and the fiber/laser testbed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attenuator::ProfileOverrides;
use crate::campaign::CampaignConfig;
use crate::error::{Error, Result};
use crate::fiber::{FiberLink, LaserSource};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
/// Environment variable consulted when no `--config` flag is given.
pub const CONFIG_ENV_VAR: &str = "QLA_CONFIG";

/// Every section is optional; missing sections keep the shipped defaults.
/// Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QlaConfig {
    pub schema: u32,
    pub campaign: CampaignConfig,
    pub profiles: ProfileOverrides,
    pub link: FiberLink,
    pub laser: LaserSource,
}

impl Default for QlaConfig {
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA_VERSION,
            campaign: CampaignConfig::default(),
            profiles: ProfileOverrides::default(),
            link: FiberLink::default(),
            laser: LaserSource::default(),
        }
    }
}

impl QlaConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: QlaConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => Error::Config(format!("{}: {other}", path.display())),
        })
    }

    /// Schema version plus the semantic checks of every section.
    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema
            )));
        }
        self.campaign.validate()?;
        self.link.validate()?;
        self.laser.validate()?;
        for class in crate::attenuator::AttenuatorClass::ALL {
            self.profiles.profile(class).validate()?;
        }
        Ok(())
    }
}

/// The explicit path if given, else the environment fallback.
pub fn resolve_config_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(CONFIG_ENV_VAR)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

/// Load the resolved config, or the defaults when none is configured.
pub fn load_config(flag: Option<&Path>) -> Result<QlaConfig> {
    match resolve_config_path(flag) {
        Some(path) => QlaConfig::load(&path),
        None => Ok(QlaConfig::default()),
    }
}
