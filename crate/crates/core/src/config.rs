//! Run configuration: programmatic defaults, the TOML config file, and
//! the merge order (defaults, then file, then command-line flags).

use std::path::PathBuf;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::client::{BackendProfile, ClientConfig, ScriptStep};
use crate::economics::Money;
use crate::report::ReportFormat;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Which backend the pipeline talks to.
#[derive(Debug, Clone)]
pub enum BackendChoice {
    /// Deterministic offline mock.
    Mock { seed: u64 },
    /// Mock with a scripted call plan (library/testing use).
    MockScripted { seed: u64, script: Vec<ScriptStep> },
    /// Real HTTP endpoint from the client config.
    Http,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub backend: BackendChoice,
    pub client: ClientConfig,
    pub backend_profile: BackendProfile,
    pub batch_dir: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub formats: Vec<ReportFormat>,
    pub scenario_path: Option<PathBuf>,
    pub horizon_years: u32,
    pub shitsuke_window: usize,
    pub attention_threshold: u8,
    pub prompt_template: Option<PathBuf>,
    pub history_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendChoice::Mock { seed: 0 },
            client: ClientConfig::default(),
            backend_profile: BackendProfile::default(),
            batch_dir: None,
            ground_truth: None,
            out_dir: PathBuf::from("out"),
            formats: vec![ReportFormat::Json, ReportFormat::Html],
            scenario_path: None,
            horizon_years: 5,
            shitsuke_window: 5,
            attention_threshold: 2,
            prompt_template: None,
            history_path: None,
        }
    }
}

impl RunConfig {
    /// History store location; defaults to the output directory.
    pub fn history_path(&self) -> PathBuf {
        self.history_path
            .clone()
            .unwrap_or_else(|| self.out_dir.join("audit_history.jsonl"))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.formats.is_empty() {
            return Err(ConfigError::Invalid(
                "at least one report format is required".to_string(),
            ));
        }
        if self.shitsuke_window < 2 {
            return Err(ConfigError::Invalid(
                "shitsuke window must be at least 2".to_string(),
            ));
        }
        Ok(())
    }

    /// Overlay values from a config file. Flags are applied afterwards
    /// by the CLI, so flags win over the file and the file over defaults.
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<(), ConfigError> {
        if let Some(client) = &file.client {
            if let Some(endpoint) = &client.endpoint {
                self.client.endpoint = endpoint.clone();
            }
            if let Some(var) = &client.credential_var {
                self.client.credential_var = var.clone();
            }
            if let Some(retries) = client.max_retries {
                self.client.max_retries = retries;
            }
            if let Some(delay) = client.delay_seconds {
                self.client.inter_request_delay =
                    duration_from_secs(delay, "client.delay_seconds")?;
            }
            if let Some(timeout) = client.timeout_seconds {
                self.client.request_timeout =
                    duration_from_secs(timeout, "client.timeout_seconds")?;
            }
            if let Some(cost) = &client.cost_per_request {
                let money = Money::parse(cost)
                    .map_err(|e| ConfigError::Invalid(format!("client.cost_per_request: {e}")))?;
                self.client.cost_per_request_cents = Some(money.cents);
            }
            if let Some(currency) = &client.currency {
                self.client.cost_currency = currency.clone();
            }
        }
        if let Some(profile) = &file.backend_profile {
            self.backend_profile = profile.clone();
        }
        if let Some(audit) = &file.audit {
            if let Some(backend) = &audit.backend {
                self.backend = parse_backend(backend, audit.seed.unwrap_or(0))?;
            } else if let Some(seed) = audit.seed {
                if let BackendChoice::Mock { seed: s } = &mut self.backend {
                    *s = seed;
                }
            }
            if let Some(dir) = &audit.batch_dir {
                self.batch_dir = Some(PathBuf::from(dir));
            }
            if let Some(dir) = &audit.out_dir {
                self.out_dir = PathBuf::from(dir);
            }
            if let Some(formats) = &audit.formats {
                self.formats = parse_formats(formats)?;
            }
            if let Some(window) = audit.window {
                self.shitsuke_window = window;
            }
            if let Some(threshold) = audit.attention_threshold {
                self.attention_threshold = threshold;
            }
            if let Some(path) = &audit.prompt_template {
                self.prompt_template = Some(PathBuf::from(path));
            }
            if let Some(path) = &audit.history {
                self.history_path = Some(PathBuf::from(path));
            }
        }
        if let Some(validate) = &file.validate {
            if let Some(path) = &validate.ground_truth {
                self.ground_truth = Some(PathBuf::from(path));
            }
        }
        if let Some(economics) = &file.economics {
            if let Some(path) = &economics.scenario {
                self.scenario_path = Some(PathBuf::from(path));
            }
            if let Some(horizon) = economics.horizon_years {
                self.horizon_years = horizon;
            }
        }
        Ok(())
    }
}

pub fn parse_backend(name: &str, seed: u64) -> Result<BackendChoice, ConfigError> {
    match name {
        "mock" => Ok(BackendChoice::Mock { seed }),
        "http" => Ok(BackendChoice::Http),
        other => Err(ConfigError::Invalid(format!(
            "unknown backend {other:?} (expected mock or http)"
        ))),
    }
}

pub fn parse_formats<S: AsRef<str>>(names: &[S]) -> Result<Vec<ReportFormat>, ConfigError> {
    let mut formats = Vec::new();
    for name in names {
        let format =
            ReportFormat::parse(name.as_ref()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !formats.contains(&format) {
            formats.push(format);
        }
    }
    formats.sort();
    Ok(formats)
}

pub fn duration_from_secs(secs: f64, field: &str) -> Result<Duration, ConfigError> {
    if !secs.is_finite() || secs < 0.0 {
        return Err(ConfigError::Invalid(format!(
            "{field} must be a non-negative number of seconds"
        )));
    }
    Ok(Duration::from_secs_f64(secs))
}

/// The on-disk config file: a flat key/value TOML document with one
/// section per concern. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub client: Option<ClientFileSection>,
    pub backend_profile: Option<BackendProfile>,
    pub audit: Option<AuditFileSection>,
    pub validate: Option<ValidateFileSection>,
    pub economics: Option<EconomicsFileSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientFileSection {
    pub endpoint: Option<String>,
    pub credential_var: Option<String>,
    pub max_retries: Option<u32>,
    pub delay_seconds: Option<f64>,
    pub timeout_seconds: Option<f64>,
    pub cost_per_request: Option<String>,
    pub currency: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditFileSection {
    pub backend: Option<String>,
    pub seed: Option<u64>,
    pub batch_dir: Option<String>,
    pub out_dir: Option<String>,
    pub formats: Option<Vec<String>>,
    pub window: Option<usize>,
    pub attention_threshold: Option<u8>,
    pub prompt_template: Option<String>,
    pub history: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateFileSection {
    pub ground_truth: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicsFileSection {
    pub scenario: Option<String>,
    pub horizon_years: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_overlay_defaults() {
        let text = r#"
[client]
max_retries = 5
delay_seconds = 1.5
cost_per_request = "0.17"

[audit]
backend = "mock"
seed = 42
batch_dir = "imgs"
formats = ["csv", "json", "csv"]
window = 7
"#;
        let file: FileConfig = toml::from_str(text).unwrap();
        let mut config = RunConfig::default();
        config.apply_file(&file).unwrap();
        assert_eq!(config.client.max_retries, 5);
        assert_eq!(
            config.client.inter_request_delay,
            Duration::from_millis(1500)
        );
        assert_eq!(config.client.cost_per_request_cents, Some(17));
        assert!(matches!(config.backend, BackendChoice::Mock { seed: 42 }));
        assert_eq!(config.batch_dir, Some(PathBuf::from("imgs")));
        assert_eq!(config.formats, vec![ReportFormat::Json, ReportFormat::Csv]);
        assert_eq!(config.shitsuke_window, 7);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<FileConfig>("[audit]\nbackendd = \"mock\"\n").unwrap_err();
        assert!(err.to_string().contains("backendd"));
    }

    #[test]
    fn defaults_follow_the_stated_values() {
        let config = RunConfig::default();
        assert_eq!(config.client.max_retries, 3);
        assert_eq!(config.client.inter_request_delay, Duration::from_secs(3));
        assert_eq!(config.client.request_timeout, Duration::from_secs(60));
        assert_eq!(config.shitsuke_window, 5);
        assert_eq!(config.attention_threshold, 2);
        assert_eq!(
            config.history_path(),
            PathBuf::from("out/audit_history.jsonl")
        );
        config.validate().unwrap();
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut config = RunConfig::default();
        config.formats.clear();
        assert!(config.validate().is_err());

        let config = RunConfig {
            shitsuke_window: 1,
            ..RunConfig::default()
        };
        assert!(config.validate().is_err());

        assert!(parse_backend("grpc", 0).is_err());
        assert!(parse_formats(&["pdf"]).is_err());
        assert!(duration_from_secs(-1.0, "x").is_err());
    }
}
