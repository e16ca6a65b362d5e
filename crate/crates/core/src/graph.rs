//! The pairwise relation graph: for every (evaluator, worker) pair that ever
//! interacted, the time-ordered sequence of evaluations, plus both adjacency
//! directions.
//!
//! All containers are ordered maps keyed by actor id, so every iteration
//! order is fixed by the data alone. That property is what makes whole runs
//! reproducible byte for byte.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ingest::Evaluation;
use crate::ActorId;

/// Role flags for one actor. An actor can hold both roles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Roles {
    pub is_evaluator: bool,
    pub is_worker: bool,
}

/// Every actor seen in the input and the roles it appeared in.
#[derive(Debug, Default)]
pub struct ActorRegistry {
    roles: BTreeMap<ActorId, Roles>,
}

impl ActorRegistry {
    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn contains(&self, actor: &str) -> bool {
        self.roles.contains_key(actor)
    }

    pub fn roles_of(&self, actor: &str) -> Option<Roles> {
        self.roles.get(actor).copied()
    }

    pub fn actors(&self) -> impl Iterator<Item = &ActorId> {
        self.roles.keys()
    }

    fn mark_evaluator(&mut self, actor: &str) {
        self.roles.entry(actor.to_string()).or_default().is_evaluator = true;
    }

    fn mark_worker(&mut self, actor: &str) {
        self.roles.entry(actor.to_string()).or_default().is_worker = true;
    }
}

/// One evaluation inside a pairwise sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceEntry {
    pub time_label: u32,
    pub value: f64,
    pub credit: f64,
    pub source_row: u64,
}

/// The full history of one evaluator rating one worker, oldest first.
/// The trust annotations are filled in by the annotation pass; `None` until
/// then.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseEdge {
    pub evaluator: ActorId,
    pub worker: ActorId,
    /// Sorted by time label, ties broken by source row.
    pub sequence: Vec<SequenceEntry>,
    pub tau: Option<f64>,
    pub omega: Option<f64>,
    pub phi: Option<f64>,
}

impl PairwiseEdge {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.sequence.iter().map(|e| e.value)
    }

    pub fn first_label(&self) -> u32 {
        self.sequence.first().map_or(0, |e| e.time_label)
    }

    pub fn last_label(&self) -> u32 {
        self.sequence.last().map_or(0, |e| e.time_label)
    }

    /// `(label, value)` pairs for the trust rank.
    pub fn rank_inputs(&self) -> Vec<(u32, f64)> {
        self.sequence.iter().map(|e| (e.time_label, e.value)).collect()
    }

    /// `(label, credit)` pairs for the weight of trust.
    pub fn weight_inputs(&self) -> Vec<(u32, f64)> {
        self.sequence.iter().map(|e| (e.time_label, e.credit)).collect()
    }
}

/// Relation graph at a fixed horizon. `horizon` is the interval the scores
/// are computed "as of"; every evaluation must lie at or before it.
#[derive(Debug)]
pub struct RelationGraph {
    edges: BTreeMap<(ActorId, ActorId), PairwiseEdge>,
    /// Worker -> the set of evaluators who rated them.
    evaluators_of: BTreeMap<ActorId, BTreeSet<ActorId>>,
    /// Evaluator -> the set of workers they rated.
    workers_of: BTreeMap<ActorId, BTreeSet<ActorId>>,
    registry: ActorRegistry,
    horizon: u32,
}

/// Groups evaluations into pairwise sequences. Fails if any evaluation lies
/// after `horizon`; an empty input yields an empty graph.
pub fn build_graph(evaluations: &[Evaluation], horizon: u32) -> Result<RelationGraph> {
    let mut edges: BTreeMap<(ActorId, ActorId), PairwiseEdge> = BTreeMap::new();
    let mut evaluators_of: BTreeMap<ActorId, BTreeSet<ActorId>> = BTreeMap::new();
    let mut workers_of: BTreeMap<ActorId, BTreeSet<ActorId>> = BTreeMap::new();
    let mut registry = ActorRegistry::default();

    for e in evaluations {
        if e.time_label > horizon {
            return Err(Error::AfterHorizon { label: e.time_label, horizon });
        }
        let key = (e.evaluator.clone(), e.worker.clone());
        edges
            .entry(key)
            .or_insert_with(|| PairwiseEdge {
                evaluator: e.evaluator.clone(),
                worker: e.worker.clone(),
                sequence: Vec::new(),
                tau: None,
                omega: None,
                phi: None,
            })
            .sequence
            .push(SequenceEntry {
                time_label: e.time_label,
                value: e.value,
                credit: e.credit,
                source_row: e.source_row,
            });
        evaluators_of
            .entry(e.worker.clone())
            .or_default()
            .insert(e.evaluator.clone());
        workers_of
            .entry(e.evaluator.clone())
            .or_default()
            .insert(e.worker.clone());
        registry.mark_evaluator(&e.evaluator);
        registry.mark_worker(&e.worker);
    }

    for edge in edges.values_mut() {
        edge.sequence
            .sort_by(|a, b| (a.time_label, a.source_row).cmp(&(b.time_label, b.source_row)));
    }

    Ok(RelationGraph { edges, evaluators_of, workers_of, registry, horizon })
}

impl RelationGraph {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn registry(&self) -> &ActorRegistry {
        &self.registry
    }

    pub fn edge(&self, evaluator: &str, worker: &str) -> Option<&PairwiseEdge> {
        self.edges
            .get(&(evaluator.to_string(), worker.to_string()))
    }

    pub fn edge_mut(&mut self, evaluator: &str, worker: &str) -> Option<&mut PairwiseEdge> {
        self.edges
            .get_mut(&(evaluator.to_string(), worker.to_string()))
    }

    /// All edges in (evaluator, worker) order.
    pub fn edges(&self) -> impl Iterator<Item = &PairwiseEdge> {
        self.edges.values()
    }

    pub fn edges_mut(&mut self) -> impl Iterator<Item = &mut PairwiseEdge> {
        self.edges.values_mut()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn evaluation_count(&self) -> usize {
        self.edges.values().map(|e| e.sequence.len()).sum()
    }

    /// Workers in id order.
    pub fn workers(&self) -> impl Iterator<Item = &ActorId> {
        self.evaluators_of.keys()
    }

    pub fn worker_count(&self) -> usize {
        self.evaluators_of.len()
    }

    /// Evaluators in id order.
    pub fn evaluators(&self) -> impl Iterator<Item = &ActorId> {
        self.workers_of.keys()
    }

    pub fn evaluator_count(&self) -> usize {
        self.workers_of.len()
    }

    /// Evaluators who rated `worker`.
    pub fn evaluators_of(&self, worker: &str) -> Result<&BTreeSet<ActorId>> {
        self.evaluators_of
            .get(worker)
            .ok_or_else(|| Error::UnknownWorker(worker.to_string()))
    }

    /// Workers rated by `evaluator`.
    pub fn workers_of(&self, evaluator: &str) -> Result<&BTreeSet<ActorId>> {
        self.workers_of
            .get(evaluator)
            .ok_or_else(|| Error::UnknownEvaluator(evaluator.to_string()))
    }

    /// Edges pointing at `worker`, in evaluator order.
    pub fn worker_edges(&self, worker: &str) -> Result<Vec<&PairwiseEdge>> {
        let evaluators = self.evaluators_of(worker)?;
        Ok(evaluators
            .iter()
            .map(|ev| {
                self.edges
                    .get(&(ev.clone(), worker.to_string()))
                    .expect("adjacency index matches edge map")
            })
            .collect())
    }

    /// Edges leaving `evaluator`, in worker order.
    pub fn evaluator_edges(&self, evaluator: &str) -> Result<Vec<&PairwiseEdge>> {
        let workers = self.workers_of(evaluator)?;
        Ok(workers
            .iter()
            .map(|w| {
                self.edges
                    .get(&(evaluator.to_string(), w.clone()))
                    .expect("adjacency index matches edge map")
            })
            .collect())
    }
}
