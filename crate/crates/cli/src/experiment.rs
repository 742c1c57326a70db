//! Repeated runs of portfolios on a problem list, with per-run CSV output,
//! summaries and pairwise comparisons.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use moeapap::algorithms::RunBudget;
use moeapap::construction::Manifest;
use moeapap::indicators::{igd, ihvr_from_hv, HvContext};
use moeapap::par::{with_workers, Execution};
use moeapap::portfolio::{restructure, run_pap_with, PapRunResult, Portfolio};
use moeapap::problems::{self, Benchmark, BenchmarkId};
use moeapap::rng::derive_seed;
use moeapap::SolutionSet;
use serde::Serialize;

use crate::error::CliError;
use crate::stats::{self, Outcome, Wdl};

/// How a compared algorithm's budget is changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Base,
    /// `N` times the generations.
    Ngen,
    /// `N` times the population, final set restructured back to the
    /// original population size.
    Nsize,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Base => "BASE",
            Variant::Ngen => "NGEN",
            Variant::Nsize => "NSIZE",
        })
    }
}

impl FromStr for Variant {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BASE" => Ok(Variant::Base),
            "NGEN" => Ok(Variant::Ngen),
            "NSIZE" => Ok(Variant::Nsize),
            _ => Err(CliError::Usage(format!(
                "unknown variant {s:?} (expected BASE, NGEN or NSIZE)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indicator {
    Hv,
    Igd,
    Ihvr,
}

impl Indicator {
    pub fn higher_is_better(self) -> bool {
        !matches!(self, Indicator::Igd)
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Indicator::Hv => "HV",
            Indicator::Igd => "IGD",
            Indicator::Ihvr => "IHVR",
        })
    }
}

impl FromStr for Indicator {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HV" => Ok(Indicator::Hv),
            "IGD" => Ok(Indicator::Igd),
            "IHVR" => Ok(Indicator::Ihvr),
            _ => Err(CliError::Usage(format!(
                "unknown indicator {s:?} (expected HV, IGD or IHVR)"
            ))),
        }
    }
}

/// One compared algorithm: a portfolio (possibly of one member) and the
/// budget variant it runs under.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub portfolio: Portfolio,
    pub variant: Variant,
    /// Multiplier `N` of the NGEN and NSIZE variants.
    pub factor: usize,
}

impl Entry {
    pub fn base(name: impl Into<String>, portfolio: Portfolio) -> Self {
        Self {
            name: name.into(),
            portfolio,
            variant: Variant::Base,
            factor: 1,
        }
    }

    fn budget(&self, base: RunBudget) -> RunBudget {
        match self.variant {
            Variant::Base => base,
            Variant::Ngen => base.scaled(1, self.factor),
            Variant::Nsize => base.scaled(self.factor, 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub entries: Vec<Entry>,
    pub problems: Vec<(BenchmarkId, RunBudget)>,
    pub repetitions: usize,
    pub indicators: Vec<Indicator>,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Record measured wall time; otherwise `wall_ms` is 0 so output is
    /// byte-for-byte reproducible.
    pub record_wall: bool,
}

/// Problems and budgets of a manifest.
pub fn manifest_problems(manifest: &Manifest) -> Result<Vec<(BenchmarkId, RunBudget)>, CliError> {
    Ok(manifest
        .training_set(1, 1)?
        .problems
        .into_iter()
        .map(|p| (p.id, p.budget))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub run_id: usize,
    pub seed: u64,
    pub algorithm: String,
    pub problem: String,
    pub variant: String,
    pub indicator: String,
    pub value: f64,
    pub wall_ms: u64,
}

/// Seed of repetition `rep` on the `pi`-th problem, shared by every
/// algorithm.
pub fn run_seed(master: u64, pi: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(master, pi as u64), rep as u64)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.entries.is_empty() {
            return Err(CliError::Usage("no algorithms to run".into()));
        }
        if self.problems.is_empty() {
            return Err(CliError::Usage("no problems to run".into()));
        }
        if self.repetitions == 0 {
            return Err(CliError::Usage("repetitions must be at least 1".into()));
        }
        if self.indicators.is_empty() {
            return Err(CliError::Usage("at least one indicator is required".into()));
        }
        let mut names: Vec<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Usage("algorithm names must be unique".into()));
        }
        for e in &self.entries {
            if e.factor == 0 {
                return Err(CliError::Usage(format!("{}: N must be at least 1", e.name)));
            }
            e.portfolio.validate()?;
        }
        Ok(())
    }
}

/// One run of `entry` under its variant. Returns the output set (cut back
/// to `base.pop_size` for NSIZE) and the underlying portfolio run.
pub fn run_once(
    entry: &Entry,
    problem: &Benchmark,
    ctx: &HvContext,
    base: RunBudget,
    seed: u64,
) -> Result<(SolutionSet, PapRunResult), moeapap::Error> {
    let run = run_pap_with(
        &entry.portfolio,
        problem,
        ctx,
        entry.budget(base),
        seed,
        Execution::Sequential,
    )?;
    let output = if entry.variant == Variant::Nsize {
        restructure([&run.output], base.pop_size)?
    } else {
        run.output.clone()
    };
    Ok((output, run))
}

/// Runs every `(algorithm, problem, repetition)` and returns one row per
/// indicator, ordered by algorithm, problem, repetition and indicator.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRow>, CliError> {
    cfg.validate()?;
    let contexts: Vec<(Arc<HvContext>, Arc<problems::ProblemSpec>)> = cfg
        .problems
        .iter()
        .map(|(id, _)| Ok((HvContext::for_problem(*id)?, problems::spec(*id)?)))
        .collect::<Result<_, moeapap::Error>>()?;
    let benchmarks: Vec<Benchmark> = cfg.problems.iter().map(|(id, _)| Benchmark::new(*id)).collect();

    let mut tasks = Vec::new();
    for ei in 0..cfg.entries.len() {
        for pi in 0..cfg.problems.len() {
            for rep in 0..cfg.repetitions {
                tasks.push((ei, pi, rep));
            }
        }
    }
    let results = with_workers(cfg.workers, || {
        Execution::Parallel.map(&tasks, |&(ei, pi, rep)| {
            let entry = &cfg.entries[ei];
            let (ctx, spec) = &contexts[pi];
            let seed = run_seed(cfg.seed, pi, rep);
            let (output, run) = run_once(entry, &benchmarks[pi], ctx, cfg.problems[pi].1, seed)?;
            let hv = ctx.hv(output.members())?;
            let values: Vec<f64> = cfg
                .indicators
                .iter()
                .map(|ind| match ind {
                    Indicator::Hv => hv,
                    Indicator::Igd => igd(output.members(), &spec.reference_front),
                    Indicator::Ihvr => ihvr_from_hv(hv, ctx),
                })
                .collect();
            Ok::<_, moeapap::Error>((seed, values, run.wall))
        })
    });

    let mut rows = Vec::with_capacity(tasks.len() * cfg.indicators.len());
    for (run_id, (&(ei, pi, _), result)) in tasks.iter().zip(results).enumerate() {
        let (seed, values, wall) = result?;
        let entry = &cfg.entries[ei];
        for (ind, value) in cfg.indicators.iter().zip(values) {
            rows.push(RunRow {
                run_id,
                seed,
                algorithm: entry.name.clone(),
                problem: cfg.problems[pi].0.to_string(),
                variant: entry.variant.to_string(),
                indicator: ind.to_string(),
                value,
                wall_ms: if cfg.record_wall { wall.as_millis() as u64 } else { 0 },
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub problem: String,
    pub variant: String,
    pub indicator: String,
    pub mean: f64,
    /// Population variance (divisor n).
    pub variance: f64,
    pub runs: usize,
}

type Key = (String, String, String);

/// Per-run values grouped by (algorithm, problem, indicator), in first
/// appearance order of algorithms and problems.
fn grouped(rows: &[RunRow]) -> (Vec<String>, Vec<String>, BTreeMap<Key, (String, Vec<f64>)>) {
    let mut algs: Vec<String> = Vec::new();
    let mut probs: Vec<String> = Vec::new();
    let mut map: BTreeMap<Key, (String, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        if !algs.contains(&r.algorithm) {
            algs.push(r.algorithm.clone());
        }
        if !probs.contains(&r.problem) {
            probs.push(r.problem.clone());
        }
        map.entry((r.algorithm.clone(), r.problem.clone(), r.indicator.clone()))
            .or_insert_with(|| (r.variant.clone(), Vec::new()))
            .1
            .push(r.value);
    }
    (algs, probs, map)
}

fn indicators_in(rows: &[RunRow]) -> Vec<String> {
    let mut inds: Vec<String> = Vec::new();
    for r in rows {
        if !inds.contains(&r.indicator) {
            inds.push(r.indicator.clone());
        }
    }
    inds
}

pub fn summarize(rows: &[RunRow]) -> Vec<SummaryRow> {
    let (algs, probs, map) = grouped(rows);
    let mut out = Vec::new();
    for a in &algs {
        for p in &probs {
            for ind in indicators_in(rows) {
                if let Some((variant, v)) = map.get(&(a.clone(), p.clone(), ind.clone())) {
                    out.push(SummaryRow {
                        algorithm: a.clone(),
                        problem: p.clone(),
                        variant: variant.clone(),
                        indicator: ind,
                        mean: stats::mean(v),
                        variance: stats::variance(v),
                        runs: v.len(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub baseline: String,
    pub opponent: String,
    pub problem: String,
    pub indicator: String,
    pub p_value: f64,
    pub significant: bool,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WdlRow {
    pub opponent: String,
    pub indicator: String,
    pub wdl: Wdl,
}

/// Compares `baseline` with every other algorithm on every problem.
pub fn compare(rows: &[RunRow], baseline: &str) -> Result<(Vec<ComparisonRow>, Vec<WdlRow>), CliError> {
    let (algs, probs, map) = grouped(rows);
    if !algs.iter().any(|a| a == baseline) {
        return Err(CliError::Usage(format!("baseline {baseline:?} has no results")));
    }
    let mut comparisons = Vec::new();
    let mut tallies = Vec::new();
    for ind_name in indicators_in(rows) {
        let higher = ind_name.parse::<Indicator>()?.higher_is_better();
        for opp in algs.iter().filter(|a| *a != baseline) {
            let mut wdl = Wdl::default();
            for p in &probs {
                let get = |a: &str| map.get(&(a.to_string(), p.clone(), ind_name.clone())).map(|x| &x.1);
                let (Some(b), Some(o)) = (get(baseline), get(opp)) else {
                    return Err(CliError::Usage(format!("{p}: missing samples for {baseline} or {opp}")));
                };
                let (outcome, test) = stats::outcome(b, o, higher, 0.05)?;
                wdl.add(outcome);
                comparisons.push(ComparisonRow {
                    baseline: baseline.to_string(),
                    opponent: opp.clone(),
                    problem: p.clone(),
                    indicator: ind_name.clone(),
                    p_value: test.p_value,
                    significant: test.p_value < 0.05,
                    outcome,
                });
            }
            tallies.push(WdlRow {
                opponent: opp.clone(),
                indicator: ind_name.clone(),
                wdl,
            });
        }
    }
    Ok((comparisons, tallies))
}

/// Text table of `mean ± variance` per problem (rows) and algorithm
/// (columns) for one indicator.
pub fn format_table(summary: &[SummaryRow], indicator: &str) -> String {
    let mut algs: Vec<&str> = Vec::new();
    let mut probs: Vec<&str> = Vec::new();
    for s in summary.iter().filter(|s| s.indicator == indicator) {
        if !algs.contains(&s.algorithm.as_str()) {
            algs.push(&s.algorithm);
        }
        if !probs.contains(&s.problem.as_str()) {
            probs.push(&s.problem);
        }
    }
    let mut out = format!("{indicator}: mean ± variance (divisor n)\n{:<8}", "problem");
    for a in &algs {
        out.push_str(&format!(" | {a:>24}"));
    }
    out.push('\n');
    for p in &probs {
        out.push_str(&format!("{p:<8}"));
        for a in &algs {
            match summary
                .iter()
                .find(|s| s.indicator == indicator && s.problem == *p && s.algorithm == *a)
            {
                Some(s) => out.push_str(&format!(" | {:>11.4e} ± {:<10.2e}", s.mean, s.variance)),
                None => out.push_str(&format!(" | {:>24}", "-")),
            }
        }
        out.push('\n');
    }
    out
}
