//! Result serialization: CSV tables with six significant digits for humans,
//! JSON with full round-trip precision for machines. Every writer iterates
//! ordered containers, so identical inputs produce identical bytes.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Value};

use crate::attack::{AttackSpec, ChangeReport, ExperimentReport};
use crate::baselines::BaselineModel;
use crate::error::Result;
use crate::fairness::WorkerConsensus;
use crate::graph::RelationGraph;
use crate::reputation::{ComputeOutput, EvaluatorFairness, WorkerReputation};
use crate::ActorId;

/// Formats with `sig` significant digits and no trailing zeros.
pub fn fmt_sig(x: f64, sig: u32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - exponent;
    let s = if decimals >= 0 {
        format!("{x:.*}", decimals as usize)
    } else {
        let pow = 10f64.powi(-decimals);
        format!("{:.0}", (x / pow).round() * pow)
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn sig6(x: f64) -> String {
    fmt_sig(x, 6)
}

/// `worker,rho,weight,degenerate` rows.
pub fn write_workers_csv(workers: &[WorkerReputation], writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["worker", "rho", "weight", "degenerate"])?;
    for w in workers {
        out.write_record([
            w.worker.as_str(),
            &sig6(w.rho),
            &sig6(w.weight),
            if w.degenerate { "true" } else { "false" },
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `evaluator,gamma,weight` rows.
pub fn write_evaluators_csv(evaluators: &[EvaluatorFairness], writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["evaluator", "gamma", "weight"])?;
    for e in evaluators {
        out.write_record([e.evaluator.as_str(), &sig6(e.gamma), &sig6(e.weight)])?;
    }
    out.flush()?;
    Ok(())
}

/// One JSON object keyed by actor id, with a `reputation` entry for workers
/// and a `fairness` entry for evaluators. Actors holding both roles carry
/// both. Numbers keep full precision here.
pub fn combined_report(output: &ComputeOutput) -> Value {
    let mut actors: BTreeMap<&ActorId, Value> = BTreeMap::new();
    for w in &output.workers {
        actors.entry(&w.worker).or_insert_with(|| json!({}))["reputation"] = json!({
            "rho": w.rho,
            "weight": w.weight,
            "degenerate": w.degenerate,
        });
    }
    for e in &output.evaluators {
        actors.entry(&e.evaluator).or_insert_with(|| json!({}))["fairness"] = json!({
            "gamma": e.gamma,
            "weight": e.weight,
        });
    }
    json!(actors)
}

/// `worker,model,score` rows, one section per model.
pub fn write_baselines_csv(
    sections: &[(BaselineModel, &BTreeMap<ActorId, f64>)],
    writer: impl Write,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["worker", "model", "score"])?;
    for (model, scores) in sections {
        let name = model.to_string();
        for (worker, score) in *scores {
            out.write_record([worker.as_str(), &name, &sig6(*score)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `evaluator,worker,n_evals,first_label,last_label` rows, one per edge.
pub fn write_graph_csv(graph: &RelationGraph, writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["evaluator", "worker", "n_evals", "first_label", "last_label"])?;
    for edge in graph.edges() {
        out.write_record([
            edge.evaluator.as_str(),
            edge.worker.as_str(),
            &edge.len().to_string(),
            &edge.first_label().to_string(),
            &edge.last_label().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `worker,mean,sd,band_low,band_high` rows.
pub fn write_consensus_csv(
    consensus: &BTreeMap<ActorId, WorkerConsensus>,
    writer: impl Write,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["worker", "mean", "sd", "band_low", "band_high"])?;
    for (worker, c) in consensus {
        let (lo, hi) = c.band();
        out.write_record([worker.as_str(), &sig6(c.mean), &sig6(c.sd), &sig6(lo), &sig6(hi)])?;
    }
    out.flush()?;
    Ok(())
}

/// `evaluator,worker,tau,omega,phi` rows from an annotated graph. Fields of
/// unannotated edges are left empty.
pub fn write_edges_csv(graph: &RelationGraph, writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["evaluator", "worker", "tau", "omega", "phi"])?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, sig6);
    for edge in graph.edges() {
        out.write_record([
            edge.evaluator.as_str(),
            edge.worker.as_str(),
            &opt(edge.tau),
            &opt(edge.omega),
            &opt(edge.phi),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `worker,before,after,rel_change` rows of one change report.
pub fn write_changes_csv(report: &ChangeReport, writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["worker", "before", "after", "rel_change"])?;
    for (worker, c) in &report.changes {
        out.write_record([
            worker.as_str(),
            &sig6(c.before),
            &sig6(c.after),
            &sig6(c.rel_change),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `bucket_low_pct,bucket_high_pct,count,fraction` rows. The last bucket
/// collects every change of 100% or more; its upper bound is written `inf`.
pub fn write_histogram_csv(report: &ChangeReport, writer: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["bucket_low_pct", "bucket_high_pct", "count", "fraction"])?;
    let total = report.cohort_size() as f64;
    for (i, &count) in report.buckets.iter().enumerate() {
        let low = (i * 10).to_string();
        let high = if i < 10 { ((i + 1) * 10).to_string() } else { "inf".to_string() };
        out.write_record([
            low.as_str(),
            high.as_str(),
            &count.to_string(),
            &sig6(count as f64 / total),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn change_summary(report: &ChangeReport) -> Value {
    json!({
        "cohort_size": report.cohort_size(),
        "mean": report.mean,
        "sd": report.sd,
        "fraction_below_10pct": report.fraction_below_10pct(),
        "buckets": report.buckets.to_vec(),
    })
}

/// Experiment summary: the injection settings that ran, per-model change statistics over
/// the full cohort and over the changed cohort. Per-worker detail lives in
/// the CSV outputs, not here.
pub fn attack_report_json(report: &ExperimentReport, spec: &AttackSpec) -> Value {
    let mut models = serde_json::Map::new();
    for (model, outcome) in &report.models {
        models.insert(
            model.to_string(),
            json!({
                "full": change_summary(&outcome.full),
                "changed": outcome.changed.as_ref().map(change_summary),
            }),
        );
    }
    json!({
        "spec": spec,
        "injected_count": report.injected_count,
        "worker_count": report.worker_count,
        "changed_cohort_size": report.changed_cohort.len(),
        "warnings": report.warnings,
        "models": models,
    })
}
