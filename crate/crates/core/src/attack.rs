//! Vote-injection experiments: flood every worker with fabricated votes from
//! fresh identities and measure how far each scoring rule moves.
//!
//! The injected votes push against the crowd: workers below the threshold
//! get support votes, workers above it get attack votes. Robust rules should
//! barely move; a flat average must move by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{adaptive_average, normal_averages, AdaptiveParams};
use crate::config::{EngineConfig, IntervalWidth};
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::ingest::{max_label, Evaluation};
use crate::reputation::{compute_all, ComputeOptions};
use crate::ActorId;

/// Prefix of fabricated evaluator identities. Each injected vote comes from
/// a fresh identity, so injected voters never accumulate history.
pub const INJECTED_PREFIX: &str = "atk:";

/// Shape of one injection experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AttackSpec {
    /// Injected votes per worker as a fraction of their real vote count,
    /// rounded up.
    pub noise_fraction: f64,
    /// Value injected for workers averaging below the threshold.
    pub support_value: f64,
    /// Value injected for workers averaging at or above the threshold.
    pub attack_value: f64,
    /// Normal-average cutoff separating supported from attacked workers.
    pub threshold: f64,
    /// Seed recorded with the experiment so reruns are reproducible.
    pub seed: u64,
}

impl Default for AttackSpec {
    /// 20% injection on the three-point scale: boost weak workers with 3s,
    /// drag strong workers with 1s.
    fn default() -> Self {
        AttackSpec {
            noise_fraction: 0.2,
            support_value: 3.0,
            attack_value: 1.0,
            threshold: 2.0,
            seed: 0,
        }
    }
}

impl AttackSpec {
    fn validate(&self) -> Result<()> {
        if !(self.noise_fraction >= 0.0 && self.noise_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "noise fraction must lie in [0, 1], got {}",
                self.noise_fraction
            )));
        }
        for (name, v) in [
            ("support value", self.support_value),
            ("attack value", self.attack_value),
            ("threshold", self.threshold),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// How the injection budget is allocated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectionBudget {
    /// Ceil of the fraction of each worker's own vote count.
    PerWorker,
    /// One global budget, ceil of the fraction of all votes, spread over
    /// workers by largest remainder of their fractional shares.
    Global,
}

/// Appends injected votes to a copy of `evaluations`. Injected votes land in
/// the newest interval, carry unit credit, and come from numbered fresh
/// identities; the original records are kept verbatim.
pub fn inject_noise(evaluations: &[Evaluation], spec: &AttackSpec) -> Result<Vec<Evaluation>> {
    inject_noise_with(evaluations, spec, InjectionBudget::PerWorker)
}

pub fn inject_noise_with(
    evaluations: &[Evaluation],
    spec: &AttackSpec,
    budget: InjectionBudget,
) -> Result<Vec<Evaluation>> {
    spec.validate()?;
    let mut result = evaluations.to_vec();
    let Some(horizon) = max_label(evaluations) else {
        return Ok(result);
    };
    let stamp = evaluations
        .iter()
        .map(|e| e.timestamp)
        .max()
        .expect("non-empty evaluations have a newest timestamp");
    let next_row = evaluations.iter().map(|e| e.source_row).max().unwrap_or(0) + 1;

    let graph = build_graph(evaluations, horizon)?;
    let averages = normal_averages(&graph)?;
    let counts: BTreeMap<&ActorId, usize> = graph
        .workers()
        .map(|w| {
            let n = graph
                .worker_edges(w)
                .expect("worker is in the graph")
                .iter()
                .map(|e| e.len())
                .sum();
            (w, n)
        })
        .collect();

    let quotas: BTreeMap<&ActorId, usize> = match budget {
        InjectionBudget::PerWorker => counts
            .iter()
            .map(|(&w, &n)| (w, (spec.noise_fraction * n as f64).ceil() as usize))
            .collect(),
        InjectionBudget::Global => {
            let total: usize = counts.values().sum();
            let budget_total = (spec.noise_fraction * total as f64).ceil() as usize;
            largest_remainder(&counts, spec.noise_fraction, budget_total)
        }
    };

    let mut serial = 0u64;
    for (worker, &quota) in &quotas {
        let value = if averages[worker.as_str()] < spec.threshold {
            spec.support_value
        } else {
            spec.attack_value
        };
        for _ in 0..quota {
            result.push(Evaluation {
                evaluator: format!("{INJECTED_PREFIX}{serial:06}"),
                worker: (*worker).clone(),
                value,
                timestamp: stamp,
                time_label: horizon,
                credit: 1.0,
                source_row: next_row + serial,
            });
            serial += 1;
        }
    }
    Ok(result)
}

/// Splits `budget_total` votes over workers proportionally to their vote
/// counts: floor of each share first, then one extra vote each to the
/// largest fractional remainders (ties in id order).
fn largest_remainder<'a>(
    counts: &BTreeMap<&'a ActorId, usize>,
    fraction: f64,
    budget_total: usize,
) -> BTreeMap<&'a ActorId, usize> {
    let mut quotas: BTreeMap<&ActorId, usize> = BTreeMap::new();
    let mut remainders: Vec<(&ActorId, f64)> = Vec::with_capacity(counts.len());
    let mut assigned = 0usize;
    for (&w, &n) in counts {
        let share = fraction * n as f64;
        let base = share.floor() as usize;
        quotas.insert(w, base);
        assigned += base;
        remainders.push((w, share - share.floor()));
    }
    let mut leftover = budget_total.saturating_sub(assigned);
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
    for (w, _) in remainders {
        if leftover == 0 {
            break;
        }
        *quotas.get_mut(w).expect("quota was inserted above") += 1;
        leftover -= 1;
    }
    quotas
}

/// Before/after score of one worker under one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangeEntry {
    pub before: f64,
    pub after: f64,
    pub rel_change: f64,
}

/// Relative changes of a cohort under one model, with the 11-bucket decile
/// histogram: ten buckets of 10 percentage points and an overflow bucket for
/// changes of 100% or more, so the counts always sum to the cohort size.
#[derive(Debug, Clone, Serialize)]
pub struct ChangeReport {
    pub changes: BTreeMap<ActorId, ChangeEntry>,
    pub buckets: [u64; 11],
    pub mean: f64,
    pub sd: f64,
}

pub(crate) fn bucket_index(rel: f64) -> usize {
    ((rel * 10.0).floor() as usize).min(10)
}

impl ChangeReport {
    pub fn cohort_size(&self) -> usize {
        self.changes.len()
    }

    /// Fraction of the cohort in the first histogram bucket, i.e. with a
    /// relative change under 10%.
    pub fn fraction_below_10pct(&self) -> f64 {
        self.buckets[0] as f64 / self.changes.len() as f64
    }
}

/// Relative change of each cohort member: `|after - before| / before`, with
/// the scale width as denominator when the before score is 0. Both score
/// maps must cover the cohort.
pub fn measure_changes(
    before: &BTreeMap<ActorId, f64>,
    after: &BTreeMap<ActorId, f64>,
    cohort: &BTreeSet<ActorId>,
    scale_max: f64,
) -> Result<ChangeReport> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let mut changes = BTreeMap::new();
    let mut buckets = [0u64; 11];
    let mut rels = Vec::with_capacity(cohort.len());
    for worker in cohort {
        let b = *before
            .get(worker)
            .ok_or_else(|| Error::UnknownWorker(worker.clone()))?;
        let a = *after
            .get(worker)
            .ok_or_else(|| Error::UnknownWorker(worker.clone()))?;
        let denom = if b != 0.0 { b } else { scale_max };
        let rel = (a - b).abs() / denom;
        buckets[bucket_index(rel)] += 1;
        rels.push(rel);
        changes.insert(worker.clone(), ChangeEntry { before: b, after: a, rel_change: rel });
    }
    let n = rels.len() as f64;
    let mean = rels.iter().sum::<f64>() / n;
    let var = rels.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok(ChangeReport { changes, buckets, mean, sd: var.sqrt() })
}

/// Scoring rules an experiment can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Ours,
    NormalAvg,
    AdaptiveAvg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Ours, ModelKind::NormalAvg, ModelKind::AdaptiveAvg];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Ours => f.write_str("ours"),
            ModelKind::NormalAvg => f.write_str("normal-avg"),
            ModelKind::AdaptiveAvg => f.write_str("adaptive-avg"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(ModelKind::Ours),
            "normal-avg" => Ok(ModelKind::NormalAvg),
            "adaptive-avg" => Ok(ModelKind::AdaptiveAvg),
            other => Err(Error::InvalidConfig(format!(
                "unknown model `{other}` (expected ours, normal-avg, or adaptive-avg)"
            ))),
        }
    }
}

/// Controls for a full experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub compute: ComputeOptions,
    pub adaptive: AdaptiveParams,
    pub models: BTreeSet<ModelKind>,
    pub budget: InjectionBudget,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            compute: ComputeOptions::default(),
            adaptive: AdaptiveParams::default(),
            models: ModelKind::ALL.into_iter().collect(),
            budget: InjectionBudget::PerWorker,
        }
    }
}

/// Per-model outcome: changes over all workers and, when the main model ran,
/// over the cohort whose main-model reputation actually moved.
#[derive(Debug)]
pub struct ModelOutcome {
    pub full: ChangeReport,
    pub changed: Option<ChangeReport>,
}

/// Everything one experiment produced.
#[derive(Debug)]
pub struct ExperimentReport {
    pub models: BTreeMap<ModelKind, ModelOutcome>,
    pub injected_count: usize,
    pub worker_count: usize,
    /// Workers whose main-model reputation moved at all. Empty when the main
    /// model was not among the compared models.
    pub changed_cohort: BTreeSet<ActorId>,
    pub warnings: Vec<String>,
}

/// Runs one injection experiment: score everything, inject, rescore, and
/// measure per-model relative changes.
pub fn run_experiment(
    evaluations: &[Evaluation],
    spec: &AttackSpec,
    config: &EngineConfig,
    opts: &ExperimentOptions,
) -> Result<ExperimentReport> {
    if evaluations.is_empty() {
        return Err(Error::NoRecords);
    }
    if opts.models.is_empty() {
        return Err(Error::InvalidConfig("no models selected".into()));
    }
    let horizon = max_label(evaluations).expect("non-empty");
    let attacked = inject_noise_with(evaluations, spec, opts.budget)?;
    let injected_count = attacked.len() - evaluations.len();

    let mut graph_before = build_graph(evaluations, horizon)?;
    let mut graph_after = build_graph(&attacked, horizon)?;
    let cohort: BTreeSet<ActorId> = graph_before.workers().cloned().collect();

    let mut warnings = Vec::new();
    let mut scores: BTreeMap<ModelKind, (BTreeMap<ActorId, f64>, BTreeMap<ActorId, f64>)> =
        BTreeMap::new();
    for model in &opts.models {
        let pair = match model {
            ModelKind::Ours => {
                let out_b = compute_all(&mut graph_before, config, &opts.compute)?;
                let out_a = compute_all(&mut graph_after, config, &opts.compute)?;
                let to_map = |ws: Vec<crate::reputation::WorkerReputation>| {
                    ws.into_iter().map(|w| (w.worker, w.rho)).collect()
                };
                (to_map(out_b.workers), to_map(out_a.workers))
            }
            ModelKind::NormalAvg => (
                normal_averages(&graph_before)?,
                normal_averages(&graph_after)?,
            ),
            ModelKind::AdaptiveAvg => {
                let initial = config.scale_max() / 2.0;
                let out_b = adaptive_average(&graph_before, initial, &opts.adaptive)?;
                if !out_b.converged {
                    warnings.push(format!(
                        "adaptive average did not converge in {} iterations before injection",
                        out_b.iterations
                    ));
                }
                let out_a = adaptive_average(&graph_after, initial, &opts.adaptive)?;
                if !out_a.converged {
                    warnings.push(format!(
                        "adaptive average did not converge in {} iterations after injection",
                        out_a.iterations
                    ));
                }
                (
                    out_b.worker_scores(&graph_before),
                    out_a.worker_scores(&graph_before),
                )
            }
        };
        scores.insert(*model, pair);
    }

    let changed_cohort: BTreeSet<ActorId> = match scores.get(&ModelKind::Ours) {
        Some((before, after)) => cohort
            .iter()
            .filter(|w| before[*w] != after[*w])
            .cloned()
            .collect(),
        None => BTreeSet::new(),
    };

    let mut models = BTreeMap::new();
    for (model, (before, after)) in &scores {
        let full = measure_changes(before, after, &cohort, config.scale_max())?;
        let changed = if changed_cohort.is_empty() {
            None
        } else {
            Some(measure_changes(before, after, &changed_cohort, config.scale_max())?)
        };
        models.insert(*model, ModelOutcome { full, changed });
    }

    Ok(ExperimentReport {
        models,
        injected_count,
        worker_count: cohort.len(),
        changed_cohort,
        warnings,
    })
}

// ---------------- synthetic data ----------------

/// Shape of a generated dataset on the three-point scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SynthSpec {
    pub workers: u32,
    pub evaluators: u32,
    pub intervals: u32,
    pub votes_per_worker: u32,
    /// Fraction of evaluators who vote near the worker's latent quality.
    pub honest_fraction: f64,
    /// Half-width of the uniform noise honest voters add before rounding.
    pub noise_width: f64,
    pub seed: u64,
    pub interval_width: IntervalWidth,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            workers: 500,
            evaluators: 200,
            intervals: 8,
            votes_per_worker: 10,
            honest_fraction: 0.8,
            noise_width: 0.5,
            seed: 0,
            interval_width: IntervalWidth::HALF_YEAR,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("workers", self.workers),
            ("evaluators", self.evaluators),
            ("intervals", self.intervals),
            ("votes-per-worker", self.votes_per_worker),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !(self.honest_fraction >= 0.0 && self.honest_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "honest fraction must lie in [0, 1], got {}",
                self.honest_fraction
            )));
        }
        if !self.noise_width.is_finite() || self.noise_width < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise width must be non-negative, got {}",
                self.noise_width
            )));
        }
        Ok(())
    }
}

/// A generated dataset plus the ground truth behind it.
#[derive(Debug)]
pub struct SynthData {
    pub evaluations: Vec<Evaluation>,
    /// Latent quality in [1, 3] per worker.
    pub latent: BTreeMap<ActorId, f64>,
    /// Evaluators who vote against the latent quality.
    pub dishonest: BTreeSet<ActorId>,
}

fn synth_epoch() -> NaiveDateTime {
    chrono::NaiveDate::from_ymd_opt(2004, 1, 1)
        .expect("valid date")
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
}

/// Generates evaluations from a fixed seed. Part of the evaluator pool
/// doubles as workers, so score changes can ripple through adaptive models.
/// Honest voters rate the worker's latent quality blurred by noise and
/// rounded to the scale; dishonest voters invert it: 1 for good workers,
/// 3 for bad ones. The same spec always yields the identical dataset.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let worker_ids: Vec<ActorId> = (0..spec.workers).map(|i| format!("w{i:05}")).collect();
    // Half the evaluator pool (capped at the worker count) reuses worker
    // identities; the rest are pure evaluators.
    let overlap = ((spec.evaluators / 2) as usize).min(worker_ids.len());
    let evaluator_ids: Vec<ActorId> = (0..spec.evaluators as usize)
        .map(|k| {
            if k < overlap {
                worker_ids[k].clone()
            } else {
                format!("e{:05}", k - overlap)
            }
        })
        .collect();

    let mut latent = BTreeMap::new();
    for w in &worker_ids {
        latent.insert(w.clone(), rng.gen_range(1.0..=3.0));
    }

    let dishonest_count = ((1.0 - spec.honest_fraction) * spec.evaluators as f64).round() as usize;
    let mut dishonest_idx =
        rand::seq::index::sample(&mut rng, spec.evaluators as usize, dishonest_count).into_vec();
    dishonest_idx.sort_unstable();
    let dishonest: BTreeSet<ActorId> = dishonest_idx
        .iter()
        .map(|&i| evaluator_ids[i].clone())
        .collect();

    let width_secs = spec.interval_width.seconds();
    let epoch = synth_epoch();
    let mut evaluations = Vec::with_capacity((spec.workers * spec.votes_per_worker) as usize);
    let mut row = 0u64;
    for w in &worker_ids {
        let quality = latent[w];
        for _ in 0..spec.votes_per_worker {
            let evaluator = loop {
                let pick = &evaluator_ids[rng.gen_range(0..evaluator_ids.len())];
                if pick != w {
                    break pick.clone();
                }
            };
            let label = rng.gen_range(1..=spec.intervals);
            let offset = rng.gen_range(0..width_secs);
            let value = if dishonest.contains(&evaluator) {
                if quality >= 2.0 {
                    1.0
                } else {
                    3.0
                }
            } else {
                let noise = if spec.noise_width > 0.0 {
                    rng.gen_range(-spec.noise_width..=spec.noise_width)
                } else {
                    0.0
                };
                (quality + noise).round().clamp(1.0, 3.0)
            };
            row += 1;
            evaluations.push(Evaluation {
                evaluator,
                worker: w.clone(),
                value,
                timestamp: epoch
                    + chrono::Duration::seconds((label - 1) as i64 * width_secs + offset),
                time_label: label,
                credit: 1.0,
                source_row: row,
            });
        }
    }

    Ok(SynthData { evaluations, latent, dishonest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn eval(evaluator: &str, worker: &str, value: f64, label: u32, row: u64) -> Evaluation {
        Evaluation {
            evaluator: evaluator.to_string(),
            worker: worker.to_string(),
            value,
            timestamp: NaiveDate::from_ymd_opt(2010, 1, 1)
                .unwrap()
                .and_hms_opt(label, 0, 0)
                .unwrap(),
            time_label: label,
            credit: 1.0,
            source_row: row,
        }
    }

    fn votes(worker: &str, n: usize, value: f64, first_row: u64) -> Vec<Evaluation> {
        (0..n)
            .map(|k| eval(&format!("v{:03}", first_row + k as u64), worker, value, 1, first_row + k as u64))
            .collect()
    }

    #[test]
    fn injection_counts_round_up_per_worker() {
        // 10 votes at 20% -> 2 injected; a single vote still draws 1.
        let mut evals = votes("big", 10, 3.0, 1);
        evals.extend(votes("small", 1, 1.0, 100));
        let out = inject_noise(&evals, &AttackSpec::default()).unwrap();
        let injected: Vec<&Evaluation> = out
            .iter()
            .filter(|e| e.evaluator.starts_with(INJECTED_PREFIX))
            .collect();
        assert_eq!(injected.len(), 3);
        assert_eq!(injected.iter().filter(|e| e.worker == "big").count(), 2);
        assert_eq!(injected.iter().filter(|e| e.worker == "small").count(), 1);
        assert_eq!(out.len(), evals.len() + 3);
        assert_eq!(&out[..evals.len()], &evals[..]);
    }

    #[test]
    fn injected_votes_push_against_the_average() {
        // avg 2.5 >= threshold -> attacked with 1s; avg 1.5 -> supported with 3s.
        let mut evals = votes("good", 5, 3.0, 1);
        evals.extend(votes("good", 5, 2.0, 10));
        evals.extend(votes("bad", 5, 2.0, 20));
        evals.extend(votes("bad", 5, 1.0, 30));
        let out = inject_noise(&evals, &AttackSpec::default()).unwrap();
        for e in out.iter().filter(|e| e.evaluator.starts_with(INJECTED_PREFIX)) {
            let expected = if e.worker == "good" { 1.0 } else { 3.0 };
            assert_eq!(e.value, expected, "worker {}", e.worker);
        }
    }

    #[test]
    fn injected_votes_land_at_the_horizon_with_fresh_identities() {
        let evals = [eval("a", "w", 3.0, 2, 1), eval("b", "w", 3.0, 5, 2)];
        let out = inject_noise(&evals, &AttackSpec::default()).unwrap();
        let injected: Vec<&Evaluation> = out
            .iter()
            .filter(|e| e.evaluator.starts_with(INJECTED_PREFIX))
            .collect();
        assert_eq!(injected.len(), 1);
        assert_eq!(injected[0].time_label, 5);
        assert_eq!(injected[0].credit, 1.0);
        let mut ids: Vec<&str> = injected.iter().map(|e| e.evaluator.as_str()).collect();
        ids.dedup();
        assert_eq!(ids.len(), injected.len());
    }

    #[test]
    fn zero_fraction_injects_nothing() {
        let evals = votes("w", 4, 2.0, 1);
        let spec = AttackSpec { noise_fraction: 0.0, ..AttackSpec::default() };
        let out = inject_noise(&evals, &spec).unwrap();
        assert_eq!(out.len(), evals.len());
    }

    #[test]
    fn global_budget_matches_total_and_favors_large_remainders() {
        // 7 + 5 = 12 votes at 25% -> ceil(3.0) = 3 total. Shares 1.75 and
        // 1.25: floors give 1 + 1, the leftover goes to the larger
        // remainder.
        let mut evals = votes("pig", 7, 3.0, 1);
        evals.extend(votes("hen", 5, 3.0, 50));
        let spec = AttackSpec { noise_fraction: 0.25, ..AttackSpec::default() };
        let out = inject_noise_with(&evals, &spec, InjectionBudget::Global).unwrap();
        let count = |w: &str| {
            out.iter()
                .filter(|e| e.evaluator.starts_with(INJECTED_PREFIX) && e.worker == w)
                .count()
        };
        assert_eq!(count("pig") + count("hen"), 3);
        assert_eq!(count("pig"), 2);
        assert_eq!(count("hen"), 1);
    }

    #[test]
    fn injection_is_deterministic() {
        let evals = votes("w", 9, 2.0, 1);
        let a = inject_noise(&evals, &AttackSpec::default()).unwrap();
        let b = inject_noise(&evals, &AttackSpec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bucket_edges() {
        assert_eq!(bucket_index(0.0), 0);
        assert_eq!(bucket_index(0.05), 0);
        assert_eq!(bucket_index(0.1), 1);
        assert_eq!(bucket_index(0.95), 9);
        assert_eq!(bucket_index(1.0), 10);
        assert_eq!(bucket_index(7.3), 10);
    }

    #[test]
    fn relative_change_uses_scale_when_before_is_zero() {
        let before: BTreeMap<ActorId, f64> =
            [("a".into(), 2.0), ("b".into(), 0.0)].into();
        let after: BTreeMap<ActorId, f64> =
            [("a".into(), 1.5), ("b".into(), 1.5)].into();
        let cohort: BTreeSet<ActorId> = ["a".into(), "b".into()].into();
        let report = measure_changes(&before, &after, &cohort, 3.0).unwrap();
        assert_eq!(report.changes["a"].rel_change, 0.25);
        assert_eq!(report.changes["b"].rel_change, 0.5);
        assert_eq!(report.buckets[2], 1);
        assert_eq!(report.buckets[5], 1);
        assert_eq!(report.buckets.iter().sum::<u64>(), 2);
        assert!((report.mean - 0.375).abs() < 1e-15);
        assert!((report.sd - 0.125).abs() < 1e-15);
    }

    #[test]
    fn empty_cohort_is_an_error() {
        let empty = BTreeMap::new();
        assert!(matches!(
            measure_changes(&empty, &empty, &BTreeSet::new(), 3.0),
            Err(Error::EmptyCohort)
        ));
    }

    #[test]
    fn experiment_with_zero_noise_reports_zero_change_everywhere() {
        let data = generate_synthetic(&SynthSpec {
            workers: 20,
            evaluators: 10,
            votes_per_worker: 6,
            ..SynthSpec::default()
        })
        .unwrap();
        let spec = AttackSpec { noise_fraction: 0.0, ..AttackSpec::default() };
        let report = run_experiment(
            &data.evaluations,
            &spec,
            &EngineConfig::default(),
            &ExperimentOptions::default(),
        )
        .unwrap();
        assert_eq!(report.injected_count, 0);
        assert!(report.changed_cohort.is_empty());
        for (model, outcome) in &report.models {
            assert_eq!(outcome.full.buckets[0] as usize, report.worker_count, "{model}");
            assert_eq!(outcome.full.mean, 0.0, "{model}");
            assert!(outcome.changed.is_none());
        }
    }

    #[test]
    fn synthetic_generation_is_deterministic_and_in_range() {
        let spec = SynthSpec { workers: 30, evaluators: 12, seed: 9, ..SynthSpec::default() };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.dishonest, b.dishonest);
        assert_eq!(a.evaluations.len(), 300);
        for e in &a.evaluations {
            assert!(e.value >= 1.0 && e.value <= 3.0);
            assert!(e.time_label >= 1 && e.time_label <= spec.intervals);
            assert_ne!(e.evaluator, e.worker, "no self votes");
        }
        let c = generate_synthetic(&SynthSpec { seed: 10, ..spec }).unwrap();
        assert_ne!(a.evaluations, c.evaluations);
    }

    #[test]
    fn exact_votes_track_latent_quality_without_noise() {
        let spec = SynthSpec {
            workers: 10,
            evaluators: 6,
            honest_fraction: 1.0,
            noise_width: 0.0,
            seed: 3,
            ..SynthSpec::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        assert!(data.dishonest.is_empty());
        for e in &data.evaluations {
            assert_eq!(e.value, data.latent[&e.worker].round().clamp(1.0, 3.0));
        }
    }

    #[test]
    fn dishonest_votes_invert_quality() {
        let spec = SynthSpec {
            workers: 10,
            evaluators: 6,
            honest_fraction: 0.0,
            seed: 3,
            ..SynthSpec::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        assert_eq!(data.dishonest.len(), 6);
        for e in &data.evaluations {
            let quality = data.latent[&e.worker];
            let expected = if quality >= 2.0 { 1.0 } else { 3.0 };
            assert_eq!(e.value, expected);
        }
    }
}
