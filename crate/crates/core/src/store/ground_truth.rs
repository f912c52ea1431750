//! Human ground-truth loading and validation.
//!
//! CSV schema (header required):
//! `image_id,seiri,seiton,seiso,seiketsu,shitsuke[,class][,factor]`
//! with scores in 1..=5, class in {J,K,L} and factor in the closed
//! disagreement vocabulary. When the class column is absent it is
//! derived from the scores.

use std::collections::HashMap;
use std::path::Path;

use crate::domain::{classify, Classification};
use crate::stats::DisagreementFactor;

use super::StoreError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthRow {
    pub image_id: String,
    pub scores: [u8; 5],
    pub class: Classification,
    /// True when the class column was absent and the class was derived.
    pub class_derived: bool,
    pub factor: Option<DisagreementFactor>,
    /// False when the declared class does not match the scores.
    pub consistent: bool,
}

impl GroundTruthRow {
    pub fn final_percent(&self) -> u8 {
        self.scores.iter().map(|&s| s as u16).sum::<u16>() as u8 * 4
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruthSet {
    pub rows: Vec<GroundTruthRow>,
}

impl GroundTruthSet {
    pub fn by_id(&self) -> HashMap<&str, &GroundTruthRow> {
        self.rows.iter().map(|r| (r.image_id.as_str(), r)).collect()
    }

    pub fn inconsistent_rows(&self) -> Vec<&GroundTruthRow> {
        self.rows.iter().filter(|r| !r.consistent).collect()
    }
}

const SCORE_COLUMNS: [&str; 5] = ["seiri", "seiton", "seiso", "seiketsu", "shitsuke"];

pub fn load_ground_truth(path: &Path) -> Result<GroundTruthSet, StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| StoreError::Csv {
            path: path.display().to_string(),
            source,
        })?;

    let headers = reader
        .headers()
        .map_err(|source| StoreError::Csv {
            path: path.display().to_string(),
            source,
        })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let id_col = column("image_id").ok_or(StoreError::MalformedRow {
        line: 1,
        reason: "header must contain image_id".to_string(),
    })?;
    let mut score_cols = [0usize; 5];
    for (i, name) in SCORE_COLUMNS.iter().enumerate() {
        score_cols[i] = column(name).ok_or(StoreError::MalformedRow {
            line: 1,
            reason: format!("header must contain {name}"),
        })?;
    }
    let class_col = column("class");
    let factor_col = column("factor");

    let mut rows = Vec::new();
    let mut seen = HashMap::new();
    for result in reader.records() {
        let record = result.map_err(|source| StoreError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize| record.get(idx).unwrap_or("").to_string();

        let image_id = field(id_col);
        if image_id.is_empty() {
            return Err(StoreError::MalformedRow {
                line,
                reason: "empty image_id".to_string(),
            });
        }
        if let Some(previous) = seen.insert(image_id.clone(), line) {
            return Err(StoreError::MalformedRow {
                line,
                reason: format!("duplicate image_id {image_id:?} (first seen at line {previous})"),
            });
        }

        let mut scores = [0u8; 5];
        for (i, &col) in score_cols.iter().enumerate() {
            let raw = field(col);
            let value: u8 = raw.parse().map_err(|_| StoreError::MalformedRow {
                line,
                reason: format!("{} score {raw:?} is not an integer", SCORE_COLUMNS[i]),
            })?;
            if !(1..=5).contains(&value) {
                return Err(StoreError::MalformedRow {
                    line,
                    reason: format!("{} score {value} is out of range 1..=5", SCORE_COLUMNS[i]),
                });
            }
            scores[i] = value;
        }

        let derived_class = classify(scores.iter().copied().sum::<u8>() * 4)
            .expect("five scores in 1..=5 stay within 0..=100");
        let (class, class_derived) = match class_col {
            Some(col) => {
                let raw = field(col);
                let mut chars = raw.chars();
                let class = chars
                    .next()
                    .and_then(Classification::from_letter)
                    .filter(|_| chars.next().is_none())
                    .ok_or_else(|| StoreError::MalformedRow {
                        line,
                        reason: format!("class {raw:?} is not one of J, K, L"),
                    })?;
                (class, false)
            }
            None => (derived_class, true),
        };

        let factor = match factor_col {
            Some(col) => {
                let raw = field(col);
                if raw.is_empty() {
                    None
                } else {
                    Some(
                        DisagreementFactor::parse(&raw).map_err(|e| StoreError::MalformedRow {
                            line,
                            reason: e.to_string(),
                        })?,
                    )
                }
            }
            None => None,
        };

        rows.push(GroundTruthRow {
            image_id,
            scores,
            consistent: class == derived_class,
            class,
            class_derived,
            factor,
        });
    }

    Ok(GroundTruthSet { rows })
}
