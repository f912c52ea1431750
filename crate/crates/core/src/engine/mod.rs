//! Audit engine: prompt construction, reply parsing, score aggregation
//! and the Shitsuke temporal-consistency index.

mod consistency;
mod parse;
mod prompt;

pub use consistency::{shitsuke_consistency, ConsistencyIndex};
pub use parse::{parse_response, ParseOutcome};
pub use prompt::{build_prompt, PromptError, PromptTemplate, DEFAULT_TEMPLATE};

use thiserror::Error;

use crate::domain::AuditEvaluation;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("history holds {have} audits, need at least {window} (window >= 2)")]
    InsufficientHistory { have: usize, window: usize },
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// Aggregate a parse outcome into a full evaluation.
pub fn aggregate(outcome: &ParseOutcome) -> AuditEvaluation {
    AuditEvaluation::from_scores(outcome.scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Classification;

    #[test]
    fn aggregate_examples() {
        let max = aggregate(&parse_response(
            "UTILIZACAO: 5 ORDENACAO: 5 LIMPEZA: 5 SAUDE: 5 DISCIPLINA: 5",
        ));
        assert_eq!(max.final_percent, 100);
        assert_eq!(max.classification, Classification::J);

        let min = aggregate(&parse_response(
            "UTILIZACAO: 1 ORDENACAO: 1 LIMPEZA: 1 SAUDE: 1 DISCIPLINA: 1",
        ));
        assert_eq!(min.final_percent, 20);
        assert_eq!(min.classification, Classification::L);

        let mid = aggregate(&parse_response(
            "UTILIZACAO: 4\nORDENACAO: 3\nLIMPEZA: 5\nSAUDE: 4\nDISCIPLINA: 3",
        ));
        assert_eq!(mid.total_points, 19);
        assert_eq!(mid.final_percent, 76);
        assert_eq!(mid.classification, Classification::K);
    }

    #[test]
    fn aggregate_percent_is_always_a_multiple_of_four() {
        for text in ["", "UTILIZACAO: 2", "LIMPEZA: 9 SAUDE: 4"] {
            let eval = aggregate(&parse_response(text));
            assert_eq!(eval.final_percent % 4, 0);
        }
    }

    #[test]
    fn raising_one_score_adds_four_points_and_never_lowers_the_grade() {
        use crate::domain::{AuditEvaluation, Sense, SenseScore};
        // band rank: higher is better
        let rank = |c: Classification| match c {
            Classification::L => 0,
            Classification::K => 1,
            Classification::J => 2,
        };
        for base in 1..=4u8 {
            for bumped in 0..5usize {
                for filler in [1u8, 3, 5] {
                    let scores: [SenseScore; 5] = std::array::from_fn(|i| {
                        let points = if i == bumped { base } else { filler };
                        SenseScore::extracted(Sense::ALL[i], points).unwrap()
                    });
                    let before = AuditEvaluation::from_scores(scores);
                    let raised: [SenseScore; 5] = std::array::from_fn(|i| {
                        let points = if i == bumped { base + 1 } else { filler };
                        SenseScore::extracted(Sense::ALL[i], points).unwrap()
                    });
                    let after = AuditEvaluation::from_scores(raised);
                    assert_eq!(after.final_percent, before.final_percent + 4);
                    assert!(rank(after.classification) >= rank(before.classification));
                }
            }
        }
    }
}
