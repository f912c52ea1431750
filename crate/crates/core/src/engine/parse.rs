//! Extraction of per-sense scores from free-text model replies.
//!
//! Parsing is a total function: any input, including empty or binary
//! garbage, yields five scores. A criterion whose value cannot be used
//! (absent, non-numeric, out of the 1..=5 range) is defaulted to the
//! 0 sentinel and flagged.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

use crate::domain::{Sense, SenseScore};

/// One pattern per criterion token: the token, an optional `:`/`-`/`|`
/// separator with optional surrounding whitespace, then an unsigned
/// integer. Case-insensitive, first match wins.
static SCORE_PATTERNS: LazyLock<[Regex; 5]> = LazyLock::new(|| {
    Sense::ALL.map(|sense| {
        Regex::new(&format!(r"(?i){}\s*[:|-]?\s*([0-9]+)", sense.token()))
            .expect("score pattern is valid")
    })
});

/// Result of parsing one model reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub scores: [SenseScore; 5],
    /// Senses whose score was not extracted (in canonical order).
    pub defaulted: Vec<Sense>,
    /// Byte span of the matched region per sense, for audit trails.
    /// Present even when the matched value was demoted to the sentinel.
    pub matched_spans: [Option<Range<usize>>; 5],
}

impl ParseOutcome {
    pub fn parse_complete(&self) -> bool {
        self.defaulted.is_empty()
    }
}

/// Parse a model reply into five sense scores. Never fails.
pub fn parse_response(text: &str) -> ParseOutcome {
    let mut scores = Sense::ALL.map(SenseScore::defaulted);
    let mut defaulted = Vec::new();
    let mut matched_spans: [Option<Range<usize>>; 5] = [None, None, None, None, None];

    for sense in Sense::ALL {
        let idx = sense.index();
        match SCORE_PATTERNS[idx].captures(text) {
            Some(caps) => {
                let whole = caps.get(0).expect("capture 0 always present");
                matched_spans[idx] = Some(whole.range());
                let value = caps
                    .get(1)
                    .and_then(|m| m.as_str().parse::<u32>().ok())
                    .filter(|v| (1..=5).contains(v));
                match value {
                    Some(v) => {
                        scores[idx] =
                            SenseScore::extracted(sense, v as u8).expect("value filtered to 1..=5");
                    }
                    None => defaulted.push(sense),
                }
            }
            None => defaulted.push(sense),
        }
    }

    ParseOutcome {
        scores,
        defaulted,
        matched_spans,
    }
}
