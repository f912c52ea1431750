//! Shared fixtures for the integration and acceptance suites.

#![allow(dead_code)]

use std::path::Path;

use audit5s::domain::{AuditEvaluation, AuditRecord, Classification, Sense, SenseScore};
use audit5s::stats::LabelPair;
use chrono::{TimeZone, Utc};

pub const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// The 75-audit reference cross-tabulation (system rows, human columns).
pub const REFERENCE_COUNTS: [[u64; 3]; 3] = [[28, 3, 0], [2, 35, 4], [0, 1, 2]];

/// Per-sense kappa targets in canonical sense order.
pub const SENSE_KAPPA_TARGETS: [f64; 5] = [0.83, 0.65, 0.79, 0.72, 0.71];

/// Write `count` synthetic PNG files with ISO-timestamp names so batch
/// ordering and record timestamps are fully deterministic. Returns the
/// image ids in capture order.
pub fn write_synthetic_batch(dir: &Path, count: usize) -> Vec<String> {
    let mut ids = Vec::with_capacity(count);
    for i in 0..count {
        let minute = i % 60;
        let hour = 8 + (i / 60) % 12;
        let day = 10 + i / 720;
        let stem = format!("2025-03-{day:02}T{hour:02}-{minute:02}-00_img{i:03}");
        let mut bytes = PNG_MAGIC.to_vec();
        bytes.extend_from_slice(format!("synthetic payload {i}").as_bytes());
        std::fs::write(dir.join(format!("{stem}.png")), bytes).unwrap();
        ids.push(stem);
    }
    ids
}

/// Expand a 3x3 count matrix into (system, human) label pairs, row-major.
pub fn pairs_from_counts(counts: [[u64; 3]; 3]) -> Vec<LabelPair> {
    let classes = Classification::ALL;
    let mut pairs = Vec::new();
    for (i, row) in counts.iter().enumerate() {
        for (j, &cell) in row.iter().enumerate() {
            for _ in 0..cell {
                pairs.push(LabelPair::new(classes[i], classes[j]));
            }
        }
    }
    pairs
}

/// Independent kappa for the search and oracle checks: straight from the
/// marginal definition, no crate code involved.
pub fn kappa_oracle(counts: [[u64; 3]; 3]) -> Option<f64> {
    let n: u64 = counts.iter().flatten().sum();
    if n == 0 {
        return None;
    }
    let trace = counts[0][0] + counts[1][1] + counts[2][2];
    let rows: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..3).map(|j| (0..3).map(|i| counts[i][j]).sum()).collect();
    let s: u64 = (0..3).map(|i| rows[i] * cols[i]).sum();
    let denom = (n * n) as f64 - s as f64;
    if denom == 0.0 {
        return None;
    }
    Some(((n * trace) as f64 - s as f64) / denom)
}

/// Brute-force search over symmetric tridiagonal 75-item matrices
/// [[a,e,0],[e,b,f],[0,f,c]] for the matrix whose kappa is closest to
/// `target`.
pub fn search_matrix_for_kappa(target: f64) -> [[u64; 3]; 3] {
    let n = 75u64;
    let mut best: Option<([[u64; 3]; 3], f64)> = None;
    for e in 0..=12u64 {
        for f in 0..=12u64 {
            let used = 2 * e + 2 * f;
            if used > n {
                continue;
            }
            let rem = n - used;
            for a in 0..=rem {
                for b in 0..=(rem - a) {
                    let c = rem - a - b;
                    let counts = [[a, e, 0], [e, b, f], [0, f, c]];
                    let Some(kappa) = kappa_oracle(counts) else {
                        continue;
                    };
                    let delta = (kappa - target).abs();
                    if best.as_ref().is_none_or(|(_, d)| delta < *d) {
                        best = Some((counts, delta));
                    }
                }
            }
        }
    }
    let (counts, delta) = best.expect("search space is nonempty");
    assert!(
        delta <= 0.005,
        "no matrix within 0.005 of {target} (best delta {delta})"
    );
    counts
}

/// Representative points for a sense-level class: classify_sense_points
/// maps 5 -> J, 4 -> K, 1 -> L.
pub fn sense_points_for_class(class: Classification) -> u8 {
    match class {
        Classification::J => 5,
        Classification::K => 4,
        Classification::L => 1,
    }
}

pub fn evaluation_from_points(points: [u8; 5]) -> AuditEvaluation {
    let scores: [SenseScore; 5] = std::array::from_fn(|i| {
        if points[i] == 0 {
            SenseScore::defaulted(Sense::ALL[i])
        } else {
            SenseScore::extracted(Sense::ALL[i], points[i]).unwrap()
        }
    });
    AuditEvaluation::from_scores(scores)
}

pub fn record_with_points(image_id: &str, seq: usize, points: [u8; 5]) -> AuditRecord {
    AuditRecord {
        id: format!("{seq:04}-{image_id}"),
        captured_at: Utc.with_ymd_and_hms(2025, 3, 10, 8, 0, 0).unwrap()
            + chrono::Duration::minutes(seq as i64),
        image_path: format!("{image_id}.png"),
        evaluation: evaluation_from_points(points),
        raw_response: String::new(),
        attempts: 1,
        backend_name: "mock".to_string(),
        notes: None,
    }
}

/// Tiny deterministic RNG for fixture generation.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}
