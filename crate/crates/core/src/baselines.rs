//! Two reference scoring rules the main model is measured against: the
//! flat average every marketplace uses, and an adaptive average where a
//! vote counts in proportion to the voter's own current score.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RelationGraph;
use crate::ActorId;

/// Scoring rules available for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineModel {
    NormalAvg,
    AdaptiveAvg,
}

impl fmt::Display for BaselineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineModel::NormalAvg => f.write_str("normal-avg"),
            BaselineModel::AdaptiveAvg => f.write_str("adaptive-avg"),
        }
    }
}

/// Plain mean of every rating the worker ever received, no weighting of any
/// kind.
pub fn normal_average(graph: &RelationGraph, worker: &str) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for edge in graph.worker_edges(worker)? {
        for entry in &edge.sequence {
            sum += entry.value;
            count += 1;
        }
    }
    // A worker in the graph has at least one rating.
    Ok(sum / count as f64)
}

/// Normal average for every worker.
pub fn normal_averages(graph: &RelationGraph) -> Result<BTreeMap<ActorId, f64>> {
    graph
        .workers()
        .map(|w| normal_average(graph, w).map(|s| (w.clone(), s)))
        .collect()
}

/// Fixed-point iteration controls for the adaptive average. Damping 1 means
/// undamped updates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdaptiveParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        AdaptiveParams { damping: 1.0, tol: 1e-8, max_iter: 100 }
    }
}

impl AdaptiveParams {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of the adaptive-average iteration. Non-workers keep the initial
/// score; `converged` is false when `max_iter` ran out first.
#[derive(Debug)]
pub struct AdaptiveOutcome {
    pub scores: BTreeMap<ActorId, f64>,
    pub iterations: u32,
    pub converged: bool,
}

impl AdaptiveOutcome {
    /// Scores restricted to actors that are workers in `graph`.
    pub fn worker_scores(&self, graph: &RelationGraph) -> BTreeMap<ActorId, f64> {
        graph
            .workers()
            .map(|w| (w.clone(), self.scores[w]))
            .collect()
    }
}

/// Adaptive average: every actor starts at `initial` and each round a
/// worker's score becomes the score-weighted mean of their ratings, where
/// each rating counts with its evaluator's score from the previous round.
/// Updates are synchronous; a worker whose incoming weight sums to zero
/// keeps their previous score.
pub fn adaptive_average(
    graph: &RelationGraph,
    initial: f64,
    params: &AdaptiveParams,
) -> Result<AdaptiveOutcome> {
    params.validate()?;
    if !initial.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "initial score must be finite, got {initial}"
        )));
    }

    let mut scores: BTreeMap<ActorId, f64> = graph
        .registry()
        .actors()
        .map(|a| (a.clone(), initial))
        .collect();
    let workers: Vec<&ActorId> = graph.workers().collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        let mut next: Vec<(&ActorId, f64)> = Vec::with_capacity(workers.len());
        let mut delta = 0.0f64;
        for &worker in &workers {
            let old = scores[worker];
            let mut num = 0.0;
            let mut den = 0.0;
            for edge in graph.worker_edges(worker)? {
                let voter_score = scores[&edge.evaluator];
                for entry in &edge.sequence {
                    num += voter_score * entry.value;
                    den += voter_score;
                }
            }
            let target = if den != 0.0 { num / den } else { old };
            let new = params.damping * target + (1.0 - params.damping) * old;
            delta = delta.max((new - old).abs());
            next.push((worker, new));
        }
        for (worker, new) in next {
            *scores.get_mut(worker).expect("worker is registered") = new;
        }
        if delta < params.tol {
            converged = true;
            break;
        }
    }

    Ok(AdaptiveOutcome { scores, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::Evaluation;
    use chrono::NaiveDate;

    fn eval(evaluator: &str, worker: &str, value: f64, label: u32, row: u64) -> Evaluation {
        Evaluation {
            evaluator: evaluator.to_string(),
            worker: worker.to_string(),
            value,
            timestamp: NaiveDate::from_ymd_opt(2010, 1, 1)
                .unwrap()
                .and_hms_opt(0, 0, 0)
                .unwrap(),
            time_label: label,
            credit: 1.0,
            source_row: row,
        }
    }

    #[test]
    fn normal_average_ignores_time_and_identity() {
        let evals = vec![
            eval("a", "w", 3.0, 1, 1),
            eval("a", "w", 3.0, 2, 2),
            eval("b", "w", 2.0, 2, 3),
        ];
        let g = build_graph(&evals, 2).unwrap();
        let avg = normal_average(&g, "w").unwrap();
        assert!((avg - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_chain_reaches_the_hand_computed_fixed_point() {
        // a rates b 3; b rates c 1. From everyone at 1.5: b's only voter is
        // a, so b -> 3; c's only voter is b, so c -> 1. One more round
        // changes nothing.
        let evals = vec![eval("a", "b", 3.0, 1, 1), eval("b", "c", 1.0, 1, 2)];
        let g = build_graph(&evals, 1).unwrap();
        let out = adaptive_average(&g, 1.5, &AdaptiveParams::default()).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 20);
        assert_eq!(out.scores["a"], 1.5);
        assert_eq!(out.scores["b"], 3.0);
        assert_eq!(out.scores["c"], 1.0);
        let workers_only = out.worker_scores(&g);
        assert_eq!(workers_only.len(), 2);
        assert!(!workers_only.contains_key("a"));
    }

    #[test]
    fn adaptive_weights_votes_by_voter_score() {
        // c is rated 3 by a and 1 by b. a is rated 3 (score 3 after round
        // one), b is rated 1. Fixed point: c = (3*3 + 1*1) / (3 + 1) = 2.5.
        let evals = vec![
            eval("x", "a", 3.0, 1, 1),
            eval("x", "b", 1.0, 1, 2),
            eval("a", "c", 3.0, 1, 3),
            eval("b", "c", 1.0, 1, 4),
        ];
        let g = build_graph(&evals, 1).unwrap();
        let out = adaptive_average(&g, 1.5, &AdaptiveParams::default()).unwrap();
        assert!(out.converged);
        assert!((out.scores["c"] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn damping_converges_to_the_same_fixed_point() {
        let evals = vec![
            eval("x", "a", 3.0, 1, 1),
            eval("x", "b", 1.0, 1, 2),
            eval("a", "c", 3.0, 1, 3),
            eval("b", "c", 1.0, 1, 4),
        ];
        let g = build_graph(&evals, 1).unwrap();
        let params = AdaptiveParams { damping: 0.5, ..AdaptiveParams::default() };
        let out = adaptive_average(&g, 1.5, &params).unwrap();
        assert!(out.converged);
        assert!((out.scores["c"] - 2.5).abs() < 1e-6);
    }

    #[test]
    fn adaptive_rejects_bad_params() {
        let g = build_graph(&[eval("a", "b", 3.0, 1, 1)], 1).unwrap();
        let bad = AdaptiveParams { damping: 0.0, ..AdaptiveParams::default() };
        assert!(adaptive_average(&g, 1.5, &bad).is_err());
        let bad = AdaptiveParams { tol: 0.0, ..AdaptiveParams::default() };
        assert!(adaptive_average(&g, 1.5, &bad).is_err());
        let bad = AdaptiveParams { max_iter: 0, ..AdaptiveParams::default() };
        assert!(adaptive_average(&g, 1.5, &bad).is_err());
    }

    #[test]
    fn zero_weight_worker_keeps_previous_score() {
        // b's only voter is a, whose score stays 0 when initial is 0, so
        // b's denominator is 0 and b keeps the initial score.
        let evals = vec![eval("a", "b", 3.0, 1, 1)];
        let g = build_graph(&evals, 1).unwrap();
        let out = adaptive_average(&g, 0.0, &AdaptiveParams::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.scores["b"], 0.0);
    }
}
