//! A reputation engine for communities where members rate each other's
//! work over time.
//!
//! The model discounts old evidence with a configurable half-life, weighs
//! each evaluator's stance by how far it sits from the consensus on that
//! worker, and reports every score together with the weight of evidence
//! behind it. Two baselines (flat averaging and score-weighted adaptive
//! averaging) and a vote-injection harness support robustness comparisons.
//!
//! Pipeline: [`ingest`] parses logs into evaluations, [`graph`] groups them
//! into pairwise sequences, [`reputation::compute_all`] annotates the graph
//! and scores every actor, and [`report`] serializes the results. All of it
//! is deterministic: the same input bytes and configuration produce the
//! same output bytes, regardless of thread count.

pub mod attack;
pub mod baselines;
pub mod config;
pub mod error;
pub mod fairness;
pub mod graph;
pub mod ingest;
pub mod report;
pub mod reputation;
pub mod trust;

/// Actors are identified by the verbatim name they carry in the input.
pub type ActorId = String;

pub use config::{CreditFn, EngineConfig, IntervalWidth};
pub use error::{Error, Result};
pub use graph::{build_graph, PairwiseEdge, RelationGraph};
pub use ingest::{Evaluation, IngestOutcome, IntervalScheme};
pub use reputation::{compute_all, ComputeOptions, ComputeOutput};
