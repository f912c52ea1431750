//! History-based temporal-consistency index for Shitsuke.
//!
//! Discipline is inferred from how stable the other four senses have been
//! across the most recent audits: the mean per-sense sample standard
//! deviation, normalized by the conservative bound 2 and inverted. The
//! index is reported next to the model-assigned DISCIPLINA score and never
//! overwrites it.

use crate::domain::{AuditRecord, Sense};

use super::EngineError;

/// Maximum standard deviation used for normalization of scores in [1, 5].
const SIGMA_MAX: f64 = 2.0;

/// Temporal-consistency index over a window of audits.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConsistencyIndex {
    pub window: usize,
    /// 1.0 means zero variance across the window; clamped to [0, 1].
    pub value: f64,
    /// The index mapped onto the 1..=5 audit scale.
    pub mapped_score: u8,
}

/// Compute the index over the last `window` records of `history`.
pub fn shitsuke_consistency(
    history: &[AuditRecord],
    window: usize,
) -> Result<ConsistencyIndex, EngineError> {
    if window < 2 || history.len() < window {
        return Err(EngineError::InsufficientHistory {
            have: history.len(),
            window,
        });
    }
    let recent = &history[history.len() - window..];

    let observed_senses = [Sense::Seiri, Sense::Seiton, Sense::Seiso, Sense::Seiketsu];
    let mean_sigma: f64 = observed_senses
        .iter()
        .map(|&sense| {
            let values: Vec<f64> = recent
                .iter()
                .map(|r| r.evaluation.points(sense) as f64)
                .collect();
            sample_std_dev(&values)
        })
        .sum::<f64>()
        / observed_senses.len() as f64;

    let value = (1.0 - mean_sigma / SIGMA_MAX).clamp(0.0, 1.0);
    let mapped_score = 1 + (4.0 * value).round() as u8;
    Ok(ConsistencyIndex {
        window,
        value,
        mapped_score,
    })
}

fn sample_std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}
