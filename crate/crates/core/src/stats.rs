//! Validation mathematics: confusion matrices over the J/K/L grade
//! labels, Cohen's kappa with confidence intervals, per-class metrics,
//! the per-sense kappa breakdown and disagreement-factor tallies.
//!
//! Observed and expected agreement are carried as exact integer ratios
//! until the final division, so reference tabulations reproduce without
//! float-accumulation doubt.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{interpret_kappa, Classification, LandisKochBand, Sense};

/// Two-sided 97.5% quantiles used for 95% intervals.
const Z_975: f64 = 1.96;
/// Student t, 4 degrees of freedom (five sense groups).
const T_975_DF4: f64 = 2.7764451051977987;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("at least one label pair is required")]
    EmptyInput,
    #[error("kappa is undefined: expected agreement is 1 (all mass in one class)")]
    UndefinedKappa,
    #[error("the mean-of-groups interval is defined over per-sense groups, not a single matrix")]
    CiMethodRequiresGroups,
    #[error("unknown disagreement factor {0:?} (expected lighting, ambiguity, temporary, out_of_range or other)")]
    UnknownFactor(String),
    #[error("kappa for {sense} group: {source}")]
    SenseGroup {
        sense: Sense,
        #[source]
        source: Box<StatsError>,
    },
}

/// One system/human label pairing for the same item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPair {
    pub system: Classification,
    pub human: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

impl LabelPair {
    pub fn new(system: Classification, human: Classification) -> LabelPair {
        LabelPair {
            system,
            human,
            context: None,
        }
    }
}

/// 3x3 cross-tabulation: rows are system labels, columns human labels,
/// both in J, K, L order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
    pub n: u64,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 3]; 3]) -> Result<ConfusionMatrix, StatsError> {
        let n: u64 = counts.iter().flatten().sum();
        if n == 0 {
            return Err(StatsError::EmptyInput);
        }
        Ok(ConfusionMatrix { counts, n })
    }

    pub fn row_total(&self, class: Classification) -> u64 {
        self.counts[class.index()].iter().sum()
    }

    pub fn col_total(&self, class: Classification) -> u64 {
        self.counts.iter().map(|row| row[class.index()]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn transposed(&self) -> ConfusionMatrix {
        let counts = std::array::from_fn(|i| std::array::from_fn(|j| self.counts[j][i]));
        ConfusionMatrix { counts, n: self.n }
    }

    /// Expand back into one pair per counted item (row-major order).
    pub fn to_pairs(&self) -> Vec<LabelPair> {
        let mut pairs = Vec::with_capacity(self.n as usize);
        for sys in Classification::ALL {
            for hum in Classification::ALL {
                for _ in 0..self.counts[sys.index()][hum.index()] {
                    pairs.push(LabelPair::new(sys, hum));
                }
            }
        }
        pairs
    }

    /// Sum over classes of row marginal x column marginal; the exact
    /// numerator of expected agreement over n^2.
    fn marginal_product_sum(&self) -> u64 {
        Classification::ALL
            .iter()
            .map(|&c| self.row_total(c) * self.col_total(c))
            .sum()
    }
}

/// Tabulate label pairs into a confusion matrix.
pub fn build_matrix(pairs: &[LabelPair]) -> Result<ConfusionMatrix, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut counts = [[0u64; 3]; 3];
    for pair in pairs {
        counts[pair.system.index()][pair.human.index()] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        n: pairs.len() as u64,
    })
}

/// How a reported confidence interval was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    /// Large-sample interval from a single matrix.
    Asymptotic,
    /// Dispersion of the five per-sense kappas around their mean.
    MeanOfGroups,
}

/// Cohen's kappa with its ingredients and interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub p_observed: f64,
    pub p_expected: f64,
    pub kappa: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_method: CiMethod,
    pub interpretation: LandisKochBand,
}

/// Chance-corrected agreement for a matrix: kappa = (P0 - Pe)/(1 - Pe).
///
/// P0 and Pe come from exact integer arithmetic; the kappa itself is the
/// single closing division (n*trace - S) / (n^2 - S) with
/// S = sum of row x column marginal products.
pub fn cohen_kappa(
    matrix: &ConfusionMatrix,
    ci_method: CiMethod,
) -> Result<AgreementResult, StatsError> {
    if matrix.n == 0 {
        return Err(StatsError::EmptyInput);
    }
    if ci_method == CiMethod::MeanOfGroups {
        return Err(StatsError::CiMethodRequiresGroups);
    }
    let n = matrix.n as i128;
    let trace = matrix.trace() as i128;
    let s = matrix.marginal_product_sum() as i128;
    let denom = n * n - s;
    if denom == 0 {
        return Err(StatsError::UndefinedKappa);
    }
    let kappa = (n * trace - s) as f64 / denom as f64;

    let p_observed = trace as f64 / n as f64;
    let p_expected = s as f64 / (n * n) as f64;

    // kappa +/- 1.96 * sqrt(P0 (1 - P0) / (n (1 - Pe)^2))
    let se = (p_observed * (1.0 - p_observed) / (n as f64 * (1.0 - p_expected).powi(2))).sqrt();
    let ci_low = kappa - Z_975 * se;
    let ci_high = kappa + Z_975 * se;

    Ok(AgreementResult {
        p_observed,
        p_expected,
        kappa,
        ci_low,
        ci_high,
        ci_method,
        interpretation: interpret_kappa(kappa.clamp(-1.0, 1.0))
            .expect("kappa is within [-1, 1] by construction"),
    })
}

/// Precision (row accuracy) and sensitivity (column recall) for one class.
/// A class with no mass on the relevant marginal has no defined value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClassMetrics {
    pub class: Classification,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub per_class: [PerClassMetrics; 3],
    pub overall_accuracy: f64,
}

pub fn class_metrics(matrix: &ConfusionMatrix) -> Result<ClassMetrics, StatsError> {
    if matrix.n == 0 {
        return Err(StatsError::EmptyInput);
    }
    let per_class = Classification::ALL.map(|class| {
        let diag = matrix.counts[class.index()][class.index()];
        let row = matrix.row_total(class);
        let col = matrix.col_total(class);
        PerClassMetrics {
            class,
            precision: (row > 0).then(|| diag as f64 / row as f64),
            sensitivity: (col > 0).then(|| diag as f64 / col as f64),
        }
    });
    Ok(ClassMetrics {
        per_class,
        overall_accuracy: matrix.trace() as f64 / matrix.n as f64,
    })
}

/// Per-sense kappas plus the mean-of-groups summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseKappaReport {
    /// One result per sense, in canonical sense order (asymptotic CIs).
    pub per_sense: Vec<(Sense, AgreementResult)>,
    pub mean_kappa: f64,
    /// Mean-of-groups 95% interval with the Student t multiplier (df = 4).
    pub ci_t: (f64, f64),
    /// The same interval with the normal multiplier.
    pub ci_z: (f64, f64),
    pub interpretation: LandisKochBand,
}

/// Kappa per sense over that sense's own pair set, plus the summary
/// mean and its mean-of-groups interval: mean +/- t(0.025, 4) * s / sqrt(5).
pub fn kappa_by_sense(groups: [&[LabelPair]; 5]) -> Result<SenseKappaReport, StatsError> {
    let mut per_sense = Vec::with_capacity(5);
    for (sense, pairs) in Sense::ALL.into_iter().zip(groups) {
        let matrix = build_matrix(pairs).map_err(|source| StatsError::SenseGroup {
            sense,
            source: Box::new(source),
        })?;
        let result = cohen_kappa(&matrix, CiMethod::Asymptotic).map_err(|source| {
            StatsError::SenseGroup {
                sense,
                source: Box::new(source),
            }
        })?;
        per_sense.push((sense, result));
    }

    let kappas: Vec<f64> = per_sense.iter().map(|(_, r)| r.kappa).collect();
    let mean = kappas.iter().sum::<f64>() / 5.0;
    let var = kappas.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / 4.0;
    let sem = var.sqrt() / 5.0_f64.sqrt();

    Ok(SenseKappaReport {
        per_sense,
        mean_kappa: mean,
        ci_t: (mean - T_975_DF4 * sem, mean + T_975_DF4 * sem),
        ci_z: (mean - Z_975 * sem, mean + Z_975 * sem),
        interpretation: interpret_kappa(mean.clamp(-1.0, 1.0))
            .expect("mean of kappas stays within [-1, 1]"),
    })
}

/// Closed vocabulary of disagreement factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisagreementFactor {
    Lighting,
    Ambiguity,
    Temporary,
    OutOfRange,
    Other,
}

impl DisagreementFactor {
    pub const ALL: [DisagreementFactor; 5] = [
        DisagreementFactor::Lighting,
        DisagreementFactor::Ambiguity,
        DisagreementFactor::Temporary,
        DisagreementFactor::OutOfRange,
        DisagreementFactor::Other,
    ];

    pub fn parse(label: &str) -> Result<DisagreementFactor, StatsError> {
        match label.trim() {
            "lighting" => Ok(DisagreementFactor::Lighting),
            "ambiguity" => Ok(DisagreementFactor::Ambiguity),
            "temporary" => Ok(DisagreementFactor::Temporary),
            "out_of_range" => Ok(DisagreementFactor::OutOfRange),
            "other" => Ok(DisagreementFactor::Other),
            other => Err(StatsError::UnknownFactor(other.to_string())),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            DisagreementFactor::Lighting => "lighting",
            DisagreementFactor::Ambiguity => "ambiguity",
            DisagreementFactor::Temporary => "temporary",
            DisagreementFactor::OutOfRange => "out_of_range",
            DisagreementFactor::Other => "other",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            DisagreementFactor::Lighting => "Inadequate lighting conditions",
            DisagreementFactor::Ambiguity => "Contextual ambiguity",
            DisagreementFactor::Temporary => "Temporary variations",
            DisagreementFactor::OutOfRange => "Elements out of visual range",
            DisagreementFactor::Other => "Other factors",
        }
    }
}

/// Share of total evaluations attributed to each disagreement factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisagreementTally {
    pub n: u64,
    /// (factor, count, percent of n), all factors present in fixed order.
    pub factors: Vec<(DisagreementFactor, u64, f64)>,
}

/// Tally annotated disagreement factors against the total evaluation
/// count. Labels outside the closed vocabulary are rejected.
pub fn tally_disagreements<'a, I>(labels: I, n: u64) -> Result<DisagreementTally, StatsError>
where
    I: IntoIterator<Item = &'a str>,
{
    if n == 0 {
        return Err(StatsError::EmptyInput);
    }
    let mut counts = [0u64; 5];
    for label in labels {
        let factor = DisagreementFactor::parse(label)?;
        counts[factor as usize] += 1;
    }
    let factors = DisagreementFactor::ALL
        .iter()
        .map(|&f| {
            let count = counts[f as usize];
            (f, count, count as f64 / n as f64 * 100.0)
        })
        .collect();
    Ok(DisagreementTally { n, factors })
}
