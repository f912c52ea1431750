//! # audit5s
//!
//! Automated 5S workplace audits from images. A batch pipeline encodes
//! each image, sends it to a pluggable multimodal-model backend behind a
//! rate-limited retrying client, parses the free-text reply into the five
//! sense scores, aggregates them into a graded evaluation and appends the
//! result to an auditable history. Validation compares automated results
//! against human ground truth (confusion matrix, Cohen's kappa,
//! per-class metrics) and the economics module quantifies what replacing
//! manual audits is worth.
//!
//! ## Modules
//!
//! - [`domain`] - the 5S vocabulary: senses, scores, grade bands
//! - [`client`] - backend abstraction, rate limiting, retries, mock
//! - [`engine`] - prompt, reply parser, aggregation, consistency index
//! - [`stats`] - agreement statistics against human ground truth
//! - [`economics`] - cost model, ROI and payback
//! - [`store`] - batch ingestion, ground truth, append-only history
//! - [`report`] - JSON/CSV/HTML report rendering
//! - [`pipeline`] - the audit/validate/economics commands behind the CLI

pub mod client;
pub mod config;
pub mod domain;
pub mod economics;
pub mod engine;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod store;
