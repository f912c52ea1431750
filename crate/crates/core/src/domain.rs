//! Shared domain vocabulary for 5S audits: the five senses, per-sense
//! scores, classification bands and the Landis-Koch kappa interpretation
//! scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("final percent {0} is out of range 0..=100")]
    PercentOutOfRange(u32),
    #[error("score {0} is out of range (expected 1..=5)")]
    ScoreOutOfRange(u32),
    #[error("kappa {0} is outside [-1, 1]")]
    KappaOutOfRange(f64),
}

/// The five senses of the 5S method, in canonical order.
///
/// Each sense carries the uppercase token used both in the audit prompt
/// and by the response parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sense {
    Seiri,
    Seiton,
    Seiso,
    Seiketsu,
    Shitsuke,
}

impl Sense {
    pub const ALL: [Sense; 5] = [
        Sense::Seiri,
        Sense::Seiton,
        Sense::Seiso,
        Sense::Seiketsu,
        Sense::Shitsuke,
    ];

    /// Canonical wire token, matched case-insensitively by the parser.
    pub fn token(self) -> &'static str {
        match self {
            Sense::Seiri => "UTILIZACAO",
            Sense::Seiton => "ORDENACAO",
            Sense::Seiso => "LIMPEZA",
            Sense::Seiketsu => "SAUDE",
            Sense::Shitsuke => "DISCIPLINA",
        }
    }

    /// English gloss used in report headings.
    pub fn label(self) -> &'static str {
        match self {
            Sense::Seiri => "Seiri (Utilization)",
            Sense::Seiton => "Seiton (Organization)",
            Sense::Seiso => "Seiso (Cleanliness)",
            Sense::Seiketsu => "Seiketsu (Health)",
            Sense::Shitsuke => "Shitsuke (Discipline)",
        }
    }

    pub fn from_token(token: &str) -> Option<Sense> {
        Sense::ALL.iter().copied().find(|s| s.token() == token)
    }

    pub fn index(self) -> usize {
        match self {
            Sense::Seiri => 0,
            Sense::Seiton => 1,
            Sense::Seiso => 2,
            Sense::Seiketsu => 3,
            Sense::Shitsuke => 4,
        }
    }
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A single sense score.
///
/// `points == 0` is a reserved sentinel meaning the score could not be
/// extracted from the model reply; `extracted` is false exactly then.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseScore {
    pub sense: Sense,
    pub points: u8,
    pub extracted: bool,
}

impl SenseScore {
    /// A successfully extracted score in 1..=5.
    pub fn extracted(sense: Sense, points: u8) -> Result<SenseScore, DomainError> {
        if !(1..=5).contains(&points) {
            return Err(DomainError::ScoreOutOfRange(points as u32));
        }
        Ok(SenseScore {
            sense,
            points,
            extracted: true,
        })
    }

    /// The sentinel score recorded when extraction failed.
    pub fn defaulted(sense: Sense) -> SenseScore {
        SenseScore {
            sense,
            points: 0,
            extracted: false,
        }
    }
}

/// Final audit grade band. Bands are inclusive on both ends and
/// partition 0..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    J,
    K,
    L,
}

impl Classification {
    pub const ALL: [Classification; 3] = [Classification::J, Classification::K, Classification::L];

    /// Inclusive percentage band.
    pub fn band(self) -> (u8, u8) {
        match self {
            Classification::J => (85, 100),
            Classification::K => (50, 84),
            Classification::L => (0, 49),
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Classification::J => "Excellent",
            Classification::K => "Regular",
            Classification::L => "Needs Improvement",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Classification::J => 'J',
            Classification::K => 'K',
            Classification::L => 'L',
        }
    }

    pub fn from_letter(c: char) -> Option<Classification> {
        match c.to_ascii_uppercase() {
            'J' => Some(Classification::J),
            'K' => Some(Classification::K),
            'L' => Some(Classification::L),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Classification::J => 0,
            Classification::K => 1,
            Classification::L => 2,
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.letter(), self.description())
    }
}

/// Map a final percentage to its grade band.
pub fn classify(final_percent: u8) -> Result<Classification, DomainError> {
    match final_percent {
        85..=100 => Ok(Classification::J),
        50..=84 => Ok(Classification::K),
        0..=49 => Ok(Classification::L),
        p => Err(DomainError::PercentOutOfRange(p as u32)),
    }
}

/// Grade band of a single sense score, treating the score as a
/// 20-points-per-unit percentage. The sentinel 0 maps to L.
pub fn classify_sense_points(points: u8) -> Result<Classification, DomainError> {
    if points > 5 {
        return Err(DomainError::ScoreOutOfRange(points as u32));
    }
    classify(points * 20)
}

/// Complete evaluation of one image: five scores plus the aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEvaluation {
    pub scores: [SenseScore; 5],
    pub total_points: u8,
    pub final_percent: u8,
    pub classification: Classification,
    pub parse_complete: bool,
}

impl AuditEvaluation {
    /// Aggregate five per-sense scores. Total is out of 25, the percent
    /// is exactly total x 4.
    pub fn from_scores(scores: [SenseScore; 5]) -> AuditEvaluation {
        let total_points: u8 = scores.iter().map(|s| s.points).sum();
        let final_percent = total_points * 4;
        let classification =
            classify(final_percent).expect("total of five scores in 0..=5 stays within 0..=100");
        AuditEvaluation {
            scores,
            total_points,
            final_percent,
            classification,
            parse_complete: scores.iter().all(|s| s.extracted),
        }
    }

    pub fn points(&self, sense: Sense) -> u8 {
        self.scores[sense.index()].points
    }
}

/// Persisted result of one audited image; the unit of the append-only
/// history store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub id: String,
    pub captured_at: chrono::DateTime<chrono::Utc>,
    pub image_path: String,
    pub evaluation: AuditEvaluation,
    pub raw_response: String,
    pub attempts: u32,
    pub backend_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Verbal interpretation band for a kappa value (Landis & Koch).
/// Serializes as its label string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LandisKochBand {
    pub label: &'static str,
}

impl Serialize for LandisKochBand {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label)
    }
}

impl<'de> Deserialize<'de> for LandisKochBand {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = String::deserialize(deserializer)?;
        LANDIS_KOCH_LABELS
            .iter()
            .find(|l| **l == value)
            .map(|l| LandisKochBand { label: l })
            .ok_or_else(|| serde::de::Error::custom(format!("unknown agreement label {value:?}")))
    }
}

const LANDIS_KOCH_LABELS: [&str; 6] = [
    "Poor agreement",
    "Slight agreement",
    "Fair agreement",
    "Moderate agreement",
    "Substantial agreement",
    "Almost perfect agreement",
];

/// Look up the interpretation band for a kappa in [-1, 1].
///
/// The printed scale is given in hundredths (0.21-0.40 etc.); bands are
/// treated as half-open on the left so every real kappa falls in exactly
/// one band: (<0 Poor], [0, 0.20], (0.20, 0.40], (0.40, 0.60],
/// (0.60, 0.80], (0.80, 1.00].
pub fn interpret_kappa(kappa: f64) -> Result<LandisKochBand, DomainError> {
    if !kappa.is_finite() || !(-1.0..=1.0).contains(&kappa) {
        return Err(DomainError::KappaOutOfRange(kappa));
    }
    let label = if kappa < 0.0 {
        LANDIS_KOCH_LABELS[0]
    } else if kappa <= 0.20 {
        LANDIS_KOCH_LABELS[1]
    } else if kappa <= 0.40 {
        LANDIS_KOCH_LABELS[2]
    } else if kappa <= 0.60 {
        LANDIS_KOCH_LABELS[3]
    } else if kappa <= 0.80 {
        LANDIS_KOCH_LABELS[4]
    } else {
        LANDIS_KOCH_LABELS[5]
    };
    Ok(LandisKochBand { label })
}
