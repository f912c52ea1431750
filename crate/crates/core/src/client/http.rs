//! HTTP backend: POSTs the prompt and base64 image as JSON and pulls the
//! completion text out of the JSON reply. Field names are configurable
//! because hosted model APIs disagree on wire schemas.

use serde::{Deserialize, Serialize};

use super::{Backend, BackendError, BackendRequest, ClientConfig, ClientError};

/// Wire-schema field names for the request body and the reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendProfile {
    pub prompt_field: String,
    pub image_field: String,
    pub media_type_field: String,
    /// Dot-separated path to the completion text inside the JSON reply.
    pub reply_field: String,
    /// Name reported in records and reports.
    pub backend_name: String,
}

impl Default for BackendProfile {
    fn default() -> Self {
        BackendProfile {
            prompt_field: "prompt".to_string(),
            image_field: "image".to_string(),
            media_type_field: "media_type".to_string(),
            reply_field: "text".to_string(),
            backend_name: "http".to_string(),
        }
    }
}

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
    profile: BackendProfile,
}

impl HttpBackend {
    /// Build from config: requires a non-empty endpoint and the
    /// credential in the configured environment variable. Both are
    /// pre-flight (config) errors, distinct from transport failures.
    pub fn from_config(
        config: &ClientConfig,
        profile: BackendProfile,
    ) -> Result<HttpBackend, ClientError> {
        if config.endpoint.trim().is_empty() {
            return Err(ClientError::InvalidConfig(
                "http backend requires an endpoint URL".to_string(),
            ));
        }
        let api_key = std::env::var(&config.credential_var).map_err(|_| {
            ClientError::InvalidConfig(format!(
                "credential environment variable {} is not set",
                config.credential_var
            ))
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|e| ClientError::InvalidConfig(e.to_string()))?;
        Ok(HttpBackend {
            client,
            endpoint: config.endpoint.clone(),
            api_key,
            profile,
        })
    }
}

impl Backend for HttpBackend {
    fn name(&self) -> &str {
        &self.profile.backend_name
    }

    fn send(&self, request: &BackendRequest) -> Result<String, BackendError> {
        let body = serde_json::json!({
            &self.profile.prompt_field: request.prompt_text,
            &self.profile.image_field: request.image_payload,
            &self.profile.media_type_field: request.image_media_type.as_str(),
        });
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    BackendError::Timeout
                } else {
                    BackendError::Connectivity(e.to_string())
                }
            })?;

        let status = response.status();
        let text = response
            .text()
            .map_err(|e| BackendError::Connectivity(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Status {
                code: status.as_u16(),
                body: truncate(&text, 200),
            });
        }

        let json: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| BackendError::Protocol(format!("reply is not JSON: {e}")))?;
        let mut value = &json;
        for key in self.profile.reply_field.split('.') {
            value = value.get(key).ok_or_else(|| {
                BackendError::Protocol(format!(
                    "reply is missing field {:?}",
                    self.profile.reply_field
                ))
            })?;
        }
        value.as_str().map(str::to_string).ok_or_else(|| {
            BackendError::Protocol(format!(
                "reply field {:?} is not a string",
                self.profile.reply_field
            ))
        })
    }
}

fn truncate(text: &str, limit: usize) -> String {
    if text.len() <= limit {
        text.to_string()
    } else {
        let mut cut = limit;
        while !text.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}...", &text[..cut])
    }
}
