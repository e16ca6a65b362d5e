//! Consensus per worker and the degree of fairness of each evaluator's
//! stance toward that consensus.
//!
//! An evaluator whose mean rating of a worker falls inside one standard
//! deviation of the consensus is fully fair (1). Outside the band the
//! fairness is the distance from the band edge scaled by the width of the
//! rating scale, which deliberately rewards distance in the raw form of the
//! definition; the complement mode inverts that so fairness falls off with
//! distance instead.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{PairwiseEdge, RelationGraph};
use crate::ActorId;

/// How the consensus statistics for a worker are formed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsensusMode {
    /// Mean and deviation over the per-evaluator mean ratings, one datum
    /// per evaluator regardless of how often they rated.
    #[default]
    PerEvaluator,
    /// Mean and deviation over every raw rating of the worker.
    Flat,
}

impl fmt::Display for ConsensusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsensusMode::PerEvaluator => f.write_str("per-evaluator"),
            ConsensusMode::Flat => f.write_str("flat"),
        }
    }
}

impl FromStr for ConsensusMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-evaluator" => Ok(ConsensusMode::PerEvaluator),
            "flat" => Ok(ConsensusMode::Flat),
            other => Err(Error::InvalidConfig(format!(
                "unknown consensus mode `{other}` (expected per-evaluator or flat)"
            ))),
        }
    }
}

/// Shape of the fairness function outside the consensus band.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FairnessMode {
    /// Distance from the band edge over the scale width.
    #[default]
    Literal,
    /// One minus that distance: fairness decays as the stance drifts away.
    Complement,
}

impl fmt::Display for FairnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FairnessMode::Literal => f.write_str("literal"),
            FairnessMode::Complement => f.write_str("complement"),
        }
    }
}

impl FromStr for FairnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(FairnessMode::Literal),
            "complement" => Ok(FairnessMode::Complement),
            other => Err(Error::InvalidConfig(format!(
                "unknown fairness mode `{other}` (expected literal or complement)"
            ))),
        }
    }
}

/// Consensus statistics for one worker. The band is the closed interval
/// `[mean - sd, mean + sd]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkerConsensus {
    pub worker: ActorId,
    pub mean: f64,
    pub sd: f64,
}

impl WorkerConsensus {
    pub fn band(&self) -> (f64, f64) {
        (self.mean - self.sd, self.mean + self.sd)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.band();
        lo <= x && x <= hi
    }
}

/// Mean and population standard deviation (divide by n, not n - 1).
fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Plain mean of one evaluator's ratings of one worker.
pub fn pair_mean(edge: &PairwiseEdge) -> Result<f64> {
    if edge.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(edge.values().sum::<f64>() / edge.len() as f64)
}

/// Consensus for one worker under the default per-evaluator mode.
pub fn worker_consensus(graph: &RelationGraph, worker: &str) -> Result<WorkerConsensus> {
    worker_consensus_with(graph, worker, ConsensusMode::PerEvaluator)
}

/// Consensus for one worker. Fails on workers absent from the graph;
/// a worker in the graph has at least one evaluation, so the statistics
/// always exist (a single datum gives sd = 0).
pub fn worker_consensus_with(
    graph: &RelationGraph,
    worker: &str,
    mode: ConsensusMode,
) -> Result<WorkerConsensus> {
    let edges = graph.worker_edges(worker)?;
    let data: Vec<f64> = match mode {
        ConsensusMode::PerEvaluator => edges
            .iter()
            .map(|e| pair_mean(e))
            .collect::<Result<Vec<f64>>>()?,
        ConsensusMode::Flat => edges.iter().flat_map(|e| e.values()).collect(),
    };
    let (mean, sd) = mean_and_sd(&data);
    Ok(WorkerConsensus { worker: worker.to_string(), mean, sd })
}

/// Consensus for every worker in the graph.
pub fn all_consensus(
    graph: &RelationGraph,
    mode: ConsensusMode,
) -> Result<BTreeMap<ActorId, WorkerConsensus>> {
    graph
        .workers()
        .map(|w| worker_consensus_with(graph, w, mode).map(|c| (w.clone(), c)))
        .collect()
}

/// Degree of fairness of a stance `pair_mean` toward `consensus` on a
/// `[0, scale_max]` scale, literal mode.
pub fn degree_of_fairness(
    pair_mean: f64,
    consensus: &WorkerConsensus,
    scale_max: f64,
) -> Result<f64> {
    degree_of_fairness_with(pair_mean, consensus, scale_max, FairnessMode::Literal)
}

/// Degree of fairness in the requested mode. Inside the closed band the
/// result is exactly 1; outside it depends on the mode. For stances on the
/// scale the result always lies in `[0, 1]`.
pub fn degree_of_fairness_with(
    pair_mean: f64,
    consensus: &WorkerConsensus,
    scale_max: f64,
    mode: FairnessMode,
) -> Result<f64> {
    if !scale_max.is_finite() || scale_max <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "scale maximum must be positive, got {scale_max}"
        )));
    }
    let (lo, hi) = consensus.band();
    let deviation = if pair_mean < lo {
        lo - pair_mean
    } else if pair_mean <= hi {
        return Ok(1.0);
    } else {
        pair_mean - hi
    };
    match mode {
        FairnessMode::Literal => Ok(deviation / scale_max),
        FairnessMode::Complement => Ok(1.0 - deviation / scale_max),
    }
}
