//! Pluggable model-backend client: fixed-delay rate limiting, bounded
//! retries and per-attempt timeouts around any [`Backend`].

mod clock;
mod encode;
mod http;
mod mock;

pub use clock::{Clock, SystemClock, TestClock};
pub use encode::{encode_image, encode_image_as, EncodeError, MediaType};
pub use http::{BackendProfile, HttpBackend};
pub use mock::{FailureKind, MockBackend, ScriptStep};

use std::sync::{Arc, Mutex};
use std::time::Duration;

use thiserror::Error;

pub const DEFAULT_CREDENTIAL_VAR: &str = "AUDIT_API_KEY";

/// Transport-level failure of a single attempt. Every variant is
/// retryable; score-parsing outcomes never appear here.
#[derive(Debug, Error)]
pub enum BackendError {
    #[error("connectivity failure: {0}")]
    Connectivity(String),
    #[error("request timed out")]
    Timeout,
    #[error("backend returned status {code}: {body}")]
    Status { code: u16, body: String },
    #[error("malformed backend reply: {0}")]
    Protocol(String),
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid client configuration: {0}")]
    InvalidConfig(String),
    #[error("retries exhausted after {attempts} attempts: {cause}")]
    RetriesExhausted {
        attempts: u32,
        #[source]
        cause: BackendError,
    },
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Encoded image plus prompt, ready for dispatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendRequest {
    pub prompt_text: String,
    pub image_payload: String,
    pub image_media_type: MediaType,
}

/// Free-text reply from a backend. The text may be empty; emptiness is a
/// parsing concern, not a transport failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendResponse {
    pub text: String,
    pub latency: Duration,
    pub backend_name: String,
}

/// A multimodal model endpoint. Implementations return the raw reply
/// text; the client wraps it with timing and retry bookkeeping.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn send(&self, request: &BackendRequest) -> Result<String, BackendError>;
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    /// Additional attempts after the first failure.
    pub max_retries: u32,
    /// Minimum spacing between consecutive dispatches, across all images.
    pub inter_request_delay: Duration,
    /// Upper bound for a single attempt (enforced by the HTTP transport;
    /// scripted backends simulate it).
    pub request_timeout: Duration,
    pub endpoint: String,
    /// Name of the environment variable holding the API credential.
    pub credential_var: String,
    /// Optional bookkeeping cost attributed to each successful request,
    /// in cents of `cost_currency`.
    pub cost_per_request_cents: Option<i64>,
    pub cost_currency: String,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            max_retries: 3,
            inter_request_delay: Duration::from_secs(3),
            request_timeout: Duration::from_secs(60),
            endpoint: String::new(),
            credential_var: DEFAULT_CREDENTIAL_VAR.to_string(),
            cost_per_request_cents: None,
            cost_currency: "BRL".to_string(),
        }
    }
}

/// Serializes dispatches so adjacent requests are at least `delay`
/// apart. Callers block until their slot.
struct RateGate {
    delay: Duration,
    last_dispatch: Mutex<Option<Duration>>,
}

impl RateGate {
    fn new(delay: Duration) -> RateGate {
        RateGate {
            delay,
            last_dispatch: Mutex::new(None),
        }
    }

    /// Returns the dispatch timestamp granted to this caller.
    fn wait_turn(&self, clock: &dyn Clock) -> Duration {
        let mut last = self.last_dispatch.lock().unwrap();
        if let Some(prev) = *last {
            let next_allowed = prev + self.delay;
            let now = clock.now();
            if now < next_allowed {
                clock.sleep(next_allowed - now);
            }
        }
        let granted = clock.now();
        *last = Some(granted);
        granted
    }
}

/// Rate-limited, retrying dispatcher. One instance serializes all
/// traffic of a run; share it across workers rather than constructing
/// one per image.
pub struct ModelClient {
    config: ClientConfig,
    gate: RateGate,
    clock: Arc<dyn Clock>,
    dispatch_log: Mutex<Vec<Duration>>,
}

impl ModelClient {
    pub fn new(config: ClientConfig, clock: Arc<dyn Clock>) -> ModelClient {
        let gate = RateGate::new(config.inter_request_delay);
        ModelClient {
            config,
            gate,
            clock,
            dispatch_log: Mutex::new(Vec::new()),
        }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// Dispatch timestamps of every attempt so far, in order. A batch of
    /// n images keeps n + retries entries; negligible at audit scale.
    pub fn dispatch_log(&self) -> Vec<Duration> {
        self.dispatch_log.lock().unwrap().clone()
    }

    /// Send one request, retrying transport failures up to
    /// `max_retries` times. Every attempt goes through the rate gate.
    pub fn evaluate_image(
        &self,
        backend: &dyn Backend,
        request: &BackendRequest,
    ) -> Result<(BackendResponse, u32), ClientError> {
        let max_attempts = 1 + self.config.max_retries;
        let mut last_error = None;
        for attempt in 1..=max_attempts {
            let granted = self.gate.wait_turn(self.clock.as_ref());
            self.dispatch_log.lock().unwrap().push(granted);
            match backend.send(request) {
                Ok(text) => {
                    let latency = self.clock.now().saturating_sub(granted);
                    return Ok((
                        BackendResponse {
                            text,
                            latency,
                            backend_name: backend.name().to_string(),
                        },
                        attempt,
                    ));
                }
                Err(err) => last_error = Some(err),
            }
        }
        Err(ClientError::RetriesExhausted {
            attempts: max_attempts,
            cause: last_error.expect("loop ran at least once"),
        })
    }
}
