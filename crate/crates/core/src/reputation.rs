//! The annotation pass and the two aggregate scores: worker reputation and
//! evaluator fairness.
//!
//! Parallelism never changes results: work is distributed as order-preserving
//! maps over sorted ids, and every floating-point sum runs sequentially
//! inside one task. A run with 1 thread and a run with 16 produce identical
//! bits.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::fairness::{
    degree_of_fairness_with, pair_mean, worker_consensus_with, ConsensusMode, FairnessMode,
    WorkerConsensus,
};
use crate::graph::RelationGraph;
use crate::trust::{trust_rank, trust_weight};
use crate::ActorId;

/// Knobs for a full computation. `threads = 0` uses the ambient thread pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComputeOptions {
    pub consensus: ConsensusMode,
    pub fairness: FairnessMode,
    pub threads: usize,
}

/// Reputation of one worker: the fairness-and-trust weighted rank plus the
/// total mass behind it. `degenerate` marks the all-zero-fairness corner
/// where the pair collapses to (0, 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkerReputation {
    pub worker: ActorId,
    pub rho: f64,
    pub weight: f64,
    pub degenerate: bool,
}

/// Fairness of one evaluator: the weight-averaged fairness of their stances
/// plus the total weight of those stances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluatorFairness {
    pub evaluator: ActorId,
    pub gamma: f64,
    pub weight: f64,
}

/// Output of a full run over one graph.
#[derive(Debug)]
pub struct ComputeOutput {
    pub workers: Vec<WorkerReputation>,
    pub evaluators: Vec<EvaluatorFairness>,
    pub consensus: BTreeMap<ActorId, WorkerConsensus>,
    pub diagnostics: Vec<String>,
}

fn with_thread_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Reputation kernel over `(tau, omega, phi)` terms:
/// `rho = sum(omega phi tau) / sum(omega phi)`, `weight = sum(omega phi)`.
/// When the normalizer vanishes the pair degenerates to (0, 0).
pub fn aggregate_reputation(terms: &[(f64, f64, f64)]) -> (f64, f64, bool) {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(tau, omega, phi) in terms {
        num += omega * phi * tau;
        den += omega * phi;
    }
    if den > 0.0 {
        (num / den, den, false)
    } else {
        (0.0, 0.0, true)
    }
}

/// Fairness kernel over `(omega, phi)` terms:
/// `gamma = sum(omega phi) / sum(omega)`, `weight = sum(omega)`.
pub fn aggregate_fairness(terms: &[(f64, f64)]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(omega, phi) in terms {
        num += omega * phi;
        den += omega;
    }
    if den > 0.0 {
        (num / den, den)
    } else {
        (0.0, 0.0)
    }
}

/// Computes tau, omega, and phi for every edge and stores them on the graph.
/// Returns the consensus per worker, which phi was measured against.
pub fn annotate_edges(
    graph: &mut RelationGraph,
    config: &EngineConfig,
    opts: &ComputeOptions,
) -> Result<BTreeMap<ActorId, WorkerConsensus>> {
    let q = config.q();
    let horizon = graph.horizon();
    let credit_fn = config.credit_fn();
    let scale_max = config.scale_max();

    let consensus: BTreeMap<ActorId, WorkerConsensus> =
        with_thread_pool(opts.threads, || -> Result<_> {
            let workers: Vec<&ActorId> = graph.workers().collect();
            workers
                .par_iter()
                .map(|w| {
                    worker_consensus_with(graph, w, opts.consensus).map(|c| ((*w).clone(), c))
                })
                .collect()
        })??;

    let annotations: Vec<(f64, f64, f64)> = with_thread_pool(opts.threads, || {
        let edges: Vec<_> = graph.edges().collect();
        edges
            .par_iter()
            .map(|edge| {
                let tau = trust_rank(&edge.rank_inputs(), q)?;
                let omega = trust_weight(&edge.weight_inputs(), horizon, q, credit_fn)?;
                let stance = pair_mean(edge)?;
                let cons = consensus
                    .get(&edge.worker)
                    .expect("every edge's worker has a consensus");
                let phi = degree_of_fairness_with(stance, cons, scale_max, opts.fairness)?;
                Ok((tau, omega, phi))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    for (edge, (tau, omega, phi)) in graph.edges_mut().zip(annotations) {
        edge.tau = Some(tau);
        edge.omega = Some(omega);
        edge.phi = Some(phi);
    }
    Ok(consensus)
}

/// Reputation of one worker from an annotated graph.
pub fn worker_reputation(graph: &RelationGraph, worker: &str) -> Result<WorkerReputation> {
    let terms = graph
        .worker_edges(worker)?
        .iter()
        .map(|e| match (e.tau, e.omega, e.phi) {
            (Some(tau), Some(omega), Some(phi)) => Ok((tau, omega, phi)),
            _ => Err(Error::NotAnnotated),
        })
        .collect::<Result<Vec<_>>>()?;
    let (rho, weight, degenerate) = aggregate_reputation(&terms);
    Ok(WorkerReputation { worker: worker.to_string(), rho, weight, degenerate })
}

/// Fairness of one evaluator from an annotated graph.
pub fn evaluator_fairness(graph: &RelationGraph, evaluator: &str) -> Result<EvaluatorFairness> {
    let terms = graph
        .evaluator_edges(evaluator)?
        .iter()
        .map(|e| match (e.omega, e.phi) {
            (Some(omega), Some(phi)) => Ok((omega, phi)),
            _ => Err(Error::NotAnnotated),
        })
        .collect::<Result<Vec<_>>>()?;
    let (gamma, weight) = aggregate_fairness(&terms);
    Ok(EvaluatorFairness { evaluator: evaluator.to_string(), gamma, weight })
}

/// Annotates the graph and scores every worker and evaluator.
pub fn compute_all(
    graph: &mut RelationGraph,
    config: &EngineConfig,
    opts: &ComputeOptions,
) -> Result<ComputeOutput> {
    let consensus = annotate_edges(graph, config, opts)?;

    let (workers, evaluators) = with_thread_pool(opts.threads, || -> Result<_> {
        let worker_ids: Vec<&ActorId> = graph.workers().collect();
        let workers = worker_ids
            .par_iter()
            .map(|w| worker_reputation(graph, w))
            .collect::<Result<Vec<_>>>()?;
        let evaluator_ids: Vec<&ActorId> = graph.evaluators().collect();
        let evaluators = evaluator_ids
            .par_iter()
            .map(|r| evaluator_fairness(graph, r))
            .collect::<Result<Vec<_>>>()?;
        Ok((workers, evaluators))
    })??;

    let diagnostics: Vec<String> = workers
        .iter()
        .filter(|w| w.degenerate)
        .map(|w| {
            format!(
                "worker `{}`: every stance has zero fairness weight; reputation degenerates to 0",
                w.worker
            )
        })
        .collect();

    Ok(ComputeOutput { workers, evaluators, consensus, diagnostics })
}
