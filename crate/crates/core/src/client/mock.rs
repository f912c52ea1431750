//! Deterministic mock backend for offline runs and tests.
//!
//! Without a script it derives a well-formed five-criterion reply from
//! the seed and the request content alone, so identical requests always
//! get byte-identical replies. With a script it replays the scripted
//! sequence of responses and failures exactly, falling back to seeded
//! generation once the script is exhausted.

use std::collections::VecDeque;
use std::sync::Mutex;

use crate::domain::Sense;

use super::{Backend, BackendError, BackendRequest};

/// One scripted call outcome.
#[derive(Debug, Clone)]
pub enum ScriptStep {
    /// Reply with this exact text.
    Respond(String),
    /// Reply with the seeded well-formed text.
    Generate,
    /// Fail the call.
    Fail(FailureKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Connectivity,
    Timeout,
    Status(u16),
}

impl FailureKind {
    fn to_error(self) -> BackendError {
        match self {
            FailureKind::Connectivity => {
                BackendError::Connectivity("scripted connection failure".to_string())
            }
            FailureKind::Timeout => BackendError::Timeout,
            FailureKind::Status(code) => BackendError::Status {
                code,
                body: "scripted failure".to_string(),
            },
        }
    }
}

pub struct MockBackend {
    seed: u64,
    script: Mutex<VecDeque<ScriptStep>>,
}

impl MockBackend {
    /// Unscripted mock: every call generates from the seed.
    pub fn seeded(seed: u64) -> MockBackend {
        MockBackend {
            seed,
            script: Mutex::new(VecDeque::new()),
        }
    }

    /// Scripted mock: replays `steps`, then generates from the seed.
    pub fn scripted(seed: u64, steps: Vec<ScriptStep>) -> MockBackend {
        MockBackend {
            seed,
            script: Mutex::new(steps.into()),
        }
    }

    fn generate(&self, request: &BackendRequest) -> String {
        let h = request_hash(self.seed, request);
        let scores: [u8; 5] = std::array::from_fn(|i| 1 + ((h >> (8 * i)) % 5) as u8);
        render_reply(h, scores)
    }
}

impl Backend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn send(&self, request: &BackendRequest) -> Result<String, BackendError> {
        let step = self.script.lock().unwrap().pop_front();
        match step {
            None | Some(ScriptStep::Generate) => Ok(self.generate(request)),
            Some(ScriptStep::Respond(text)) => Ok(text),
            Some(ScriptStep::Fail(kind)) => Err(kind.to_error()),
        }
    }
}

/// FNV-1a over the seed and the full request, finalized with the
/// splitmix64 mixer. Stable across platforms.
fn request_hash(seed: u64, request: &BackendRequest) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(&seed.to_le_bytes());
    eat(request.prompt_text.as_bytes());
    eat(request.image_payload.as_bytes());
    eat(request.image_media_type.as_str().as_bytes());

    // splitmix64 finalizer
    h = h.wrapping_add(0x9e3779b97f4a7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d049bb133111eb);
    h ^ (h >> 31)
}

fn render_reply(h: u64, scores: [u8; 5]) -> String {
    let tokens = Sense::ALL.map(Sense::token);
    match (h >> 41) % 3 {
        0 => {
            let mut out = String::from("5S AUDIT RESULT\n");
            for (token, score) in tokens.iter().zip(scores) {
                out.push_str(&format!("{token}: {score}\n"));
            }
            out.push_str("End of assessment.\n");
            out
        }
        1 => {
            let remarks = [
                "checked against the area standard",
                "verified from the image",
                "visual inspection",
                "compared with the posted layout",
                "inferred from recent compliance",
            ];
            let mut out = String::from("Assessment of the work area follows.\n");
            for ((token, score), remark) in tokens.iter().zip(scores).zip(remarks) {
                out.push_str(&format!("{token} - {score} ({remark})\n"));
            }
            out
        }
        _ => {
            let mut out = String::new();
            for (token, score) in tokens.iter().zip(scores) {
                out.push_str(&format!("{token} | {score}\n"));
            }
            out.push_str("Overall the area meets the expected standard.\n");
            out
        }
    }
}
