//! Greedy portfolio construction.
//!
//! [`construct`] grows a portfolio one member at a time. Each round runs a
//! number of searches, rotating over the subspaces of a [`ConfigSpace`];
//! each search returns the configuration with the largest marginal
//! contribution to Ω(P, Z), the mean over training problems of the best
//! IHVR among member sets and their restructured union. The best candidate
//! is inserted if it strictly improves Ω, then members whose removal does
//! not lower Ω are dropped until none qualifies.
//!
//! Member runs are cached by configuration fingerprint, problem, budget and
//! seed. Every configuration is run with the same training seeds, so
//! candidates are compared under common random numbers.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::algorithms::{self, AlgorithmConfig, Foundation, OperatorConfig, RunBudget};
use crate::error::{Error, Result};
use crate::indicators::HvContext;
use crate::operators::{DeParams, DeVariant, PsoMutation, PsoParams, V_CHANGE_CHOICES};
use crate::par::Execution;
use crate::pareto::SolutionSet;
use crate::portfolio::{combine, Portfolio, MAX_MEMBERS};
use crate::problems::{Benchmark, BenchmarkId};
use crate::rng::{derive_seed, seeded};

// ---------------------------------------------------------------------------
// Configuration space

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Integers `lo..=hi`.
    Int { lo: i64, hi: i64 },
    /// Reals in `[lo, hi]`, sampled on a 0.001 grid.
    Real { lo: f64, hi: f64 },
    /// An ordered list of values; categorical parameters store indices.
    Values(Vec<f64>),
}

impl Domain {
    fn cardinality(&self) -> Option<usize> {
        match self {
            Domain::Int { lo, hi } => Some((hi - lo + 1).max(0) as usize),
            Domain::Real { .. } => None,
            Domain::Values(v) => Some(v.len()),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Domain::Int { lo, hi } => (*lo..=*hi).map(|v| v as f64).collect(),
            Domain::Real { .. } => Vec::new(),
            Domain::Values(v) => v.clone(),
        }
    }

    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Domain::Int { lo, hi } => rng.gen_range(*lo..=*hi) as f64,
            Domain::Real { lo, hi } => grid(rng.gen_range(*lo..=*hi), *lo, *hi),
            Domain::Values(v) => v[rng.gen_range(0..v.len())],
        }
    }

    /// One step away from `v`: 10% of the range for numbers, the adjacent
    /// entry for value lists.
    fn step<R: rand::Rng + ?Sized>(&self, v: f64, rng: &mut R) -> f64 {
        let up = rng.gen_bool(0.5);
        match self {
            Domain::Int { lo, hi } => {
                let s = (((hi - lo) as f64) * 0.1).round().max(1.0) as i64;
                let cur = v as i64;
                let next = if up { cur + s } else { cur - s };
                if next > *hi || next < *lo {
                    (if up { cur - s } else { cur + s }).clamp(*lo, *hi) as f64
                } else {
                    next as f64
                }
            }
            Domain::Real { lo, hi } => {
                let s = (hi - lo) * 0.1;
                let next = if up { v + s } else { v - s };
                let next = if next > *hi || next < *lo {
                    if up {
                        v - s
                    } else {
                        v + s
                    }
                } else {
                    next
                };
                grid(next, *lo, *hi)
            }
            Domain::Values(vals) => {
                let i = vals.iter().position(|x| *x == v).unwrap_or(0);
                let j = if (up && i + 1 < vals.len()) || i == 0 {
                    i + 1
                } else {
                    i - 1
                };
                vals[j.min(vals.len() - 1)]
            }
        }
    }
}

fn grid(v: f64, lo: f64, hi: f64) -> f64 {
    ((v * 1000.0).round() / 1000.0).clamp(lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub domain: Domain,
}

impl Param {
    pub fn new(name: &str, domain: Domain) -> Self {
        Self {
            name: name.to_string(),
            domain,
        }
    }
}

pub type Decoder = Arc<dyn Fn(&[f64]) -> AlgorithmConfig + Send + Sync>;

/// Parameter schema of one foundation algorithm.
#[derive(Clone)]
pub struct Subspace {
    pub name: String,
    pub foundation: Foundation,
    pub params: Vec<Param>,
    decode: Decoder,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("name", &self.name)
            .field("foundation", &self.foundation)
            .field("params", &self.params)
            .finish()
    }
}

impl Subspace {
    pub fn new(name: &str, foundation: Foundation, params: Vec<Param>, decode: Decoder) -> Self {
        Self {
            name: name.to_string(),
            foundation,
            params,
            decode,
        }
    }

    pub fn decode(&self, values: &[f64]) -> AlgorithmConfig {
        (self.decode)(values)
    }

    /// Number of parameter assignments, or `None` when a real parameter
    /// makes it unbounded.
    pub fn cardinality(&self) -> Option<usize> {
        self.params
            .iter()
            .try_fold(1usize, |acc, p| p.domain.cardinality().map(|c| acc.saturating_mul(c)))
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.params.iter().map(|p| p.domain.sample(rng)).collect()
    }

    /// Changes one parameter by one step, retrying a few times if the
    /// decoded configuration does not change.
    pub fn perturb<R: rand::Rng + ?Sized>(&self, values: &[f64], rng: &mut R) -> Vec<f64> {
        let before = self.decode(values);
        let mut out = values.to_vec();
        for _ in 0..16 {
            out = values.to_vec();
            let i = rng.gen_range(0..self.params.len());
            out[i] = self.params[i].domain.step(values[i], rng);
            if self.decode(&out) != before {
                break;
            }
        }
        out
    }

    /// Every distinct configuration, in lexicographic parameter order, if
    /// there are at most `limit` assignments.
    pub fn enumerate(&self, limit: usize) -> Option<Vec<AlgorithmConfig>> {
        if self.cardinality()? > limit {
            return None;
        }
        let mut rows: Vec<Vec<f64>> = vec![Vec::new()];
        for p in &self.params {
            let vals = p.domain.values();
            rows = rows
                .into_iter()
                .flat_map(|r| {
                    vals.iter().map(move |v| {
                        let mut r = r.clone();
                        r.push(*v);
                        r
                    })
                })
                .collect();
        }
        let mut seen = Vec::new();
        for r in rows {
            let c = self.decode(&r);
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        Some(seen)
    }
}

#[derive(Debug, Clone)]
pub struct ConfigSpace {
    pub subspaces: Vec<Subspace>,
}

const DE_ROWS: [DeVariant; 4] = [
    DeVariant::RandP,
    DeVariant::BestP,
    DeVariant::CurrentToRandP,
    DeVariant::CurrentToBestP,
];

fn de_params(variant: DeVariant, f: f64, k: f64, p: f64, cr: f64) -> DeParams {
    let current = variant.is_current_to();
    DeParams {
        variant,
        f,
        k: if current { k } else { 0.0 },
        p: if current { 1 } else { p as usize },
        cr,
    }
}

fn operator_params() -> Vec<Param> {
    vec![
        Param::new("eta_sbx", Domain::Int { lo: 1, hi: 100 }),
        Param::new("eta_pm", Domain::Int { lo: 1, hi: 100 }),
        Param::new("F", Domain::Real { lo: 0.001, hi: 2.0 }),
        Param::new("K", Domain::Real { lo: 0.001, hi: 1.0 }),
        Param::new("p", Domain::Int { lo: 1, hi: 2 }),
        Param::new("CR", Domain::Real { lo: 0.001, hi: 1.0 }),
    ]
}

/// Decodes `[row, eta_sbx, eta_pm, F, K, p, CR, ..]`; row 0 is SBX+PM and
/// row `j > 0` is the DE variant `variants[j - 1]`.
fn decode_operator(v: &[f64], variants: &[DeVariant]) -> OperatorConfig {
    match v[0] as usize {
        0 => OperatorConfig::SbxPm {
            eta_sbx: v[1],
            eta_pm: v[2],
        },
        j => OperatorConfig::De(de_params(variants[j - 1], v[3], v[4], v[5], v[6])),
    }
}

fn indices(n: usize) -> Domain {
    Domain::Values((0..n).map(|i| i as f64).collect())
}

impl ConfigSpace {
    /// NSGA-II, MOEA/D and MOPSO with their full parameter ranges.
    pub fn full() -> Self {
        let mut nsga2 = vec![Param::new("operator", indices(1 + DE_ROWS.len()))];
        nsga2.extend(operator_params());
        let nsga2 = Subspace::new(
            "NSGA-II",
            Foundation::Nsga2,
            nsga2,
            Arc::new(|v| AlgorithmConfig {
                foundation: Foundation::Nsga2,
                operator: decode_operator(v, &DE_ROWS),
                moead: None,
            }),
        );

        const MOEAD_DE: [DeVariant; 2] = [DeVariant::RandP, DeVariant::CurrentToRandP];
        let mut moead = vec![Param::new("operator", indices(1 + MOEAD_DE.len()))];
        moead.extend(operator_params());
        moead.extend([
            Param::new("Ps", Domain::Real { lo: 0.0, hi: 1.0 }),
            Param::new("n_r", Domain::Int { lo: 2, hi: 10 }),
            Param::new("neighborSize", Domain::Int { lo: 10, hi: 50 }),
        ]);
        let moead = Subspace::new(
            "MOEA/D",
            Foundation::Moead,
            moead,
            Arc::new(|v| AlgorithmConfig::moead(decode_operator(v, &MOEAD_DE), v[7], v[8] as usize, v[9] as usize)),
        );

        let mopso = Subspace::new(
            "MOPSO",
            Foundation::Mopso,
            vec![
                Param::new("mutation", indices(3)),
                Param::new("PMn", Domain::Int { lo: 1, hi: 100 }),
                Param::new("constriction", indices(2)),
                Param::new("b", Domain::Int { lo: 1, hi: 20 }),
                Param::new("w", Domain::Real { lo: 0.0, hi: 1.0 }),
                Param::new("C1", Domain::Real { lo: 0.5, hi: 2.5 }),
                Param::new("C2", Domain::Real { lo: 0.5, hi: 2.5 }),
                Param::new("Vmax", Domain::Real { lo: 0.5, hi: 10.0 }),
                Param::new("Vchange", indices(V_CHANGE_CHOICES.len())),
                Param::new("M", Domain::Int { lo: 5, hi: 20 }),
            ],
            Arc::new(|v| {
                let mutation = match v[0] as usize {
                    0 => PsoMutation::Smpso {
                        eta_pm: v[1],
                        constriction: v[2] == 1.0,
                    },
                    1 => PsoMutation::Omopso { b: v[3] },
                    _ => PsoMutation::None,
                };
                AlgorithmConfig::mopso(PsoParams {
                    w: v[4],
                    c1: v[5],
                    c2: v[6],
                    v_max: v[7],
                    v_change: V_CHANGE_CHOICES[v[8] as usize],
                    mutation,
                    grid_divisions: v[9] as usize,
                })
            }),
        );
        Self {
            subspaces: vec![nsga2, moead, mopso],
        }
    }

    /// Two foundations with four SBX+PM settings each.
    pub fn toy() -> Self {
        let two = || Domain::Values(vec![5.0, 20.0]);
        let nsga2 = Subspace::new(
            "NSGA-II",
            Foundation::Nsga2,
            vec![Param::new("eta_sbx", two()), Param::new("eta_pm", two())],
            Arc::new(|v| AlgorithmConfig::nsga2_sbx(v[0], v[1])),
        );
        let moead = Subspace::new(
            "MOEA/D",
            Foundation::Moead,
            vec![
                Param::new("eta_sbx", two()),
                Param::new("neighborSize", Domain::Values(vec![10.0, 15.0])),
            ],
            Arc::new(|v| {
                AlgorithmConfig::moead(
                    OperatorConfig::SbxPm {
                        eta_sbx: v[0],
                        eta_pm: 20.0,
                    },
                    0.9,
                    2,
                    v[1] as usize,
                )
            }),
        );
        Self {
            subspaces: vec![nsga2, moead],
        }
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Training set

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingProblem {
    pub id: BenchmarkId,
    pub budget: RunBudget,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub problems: Vec<TrainingProblem>,
}

/// Problem manifest: problems with optional budgets and seed lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    /// Seed from which per-problem seeds are derived.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Runs per problem when a problem lists no seeds.
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Listed for the record; these problems are not available here.
    #[serde(default)]
    pub unavailable: Vec<String>,
    pub problems: Vec<ManifestProblem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestProblem {
    pub id: BenchmarkId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

fn default_seed() -> u64 {
    1
}

fn default_runs() -> usize {
    3
}

pub const MANIFEST_VERSION: u32 = 1;

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::parse(line, e.message().trim().to_string())
        })?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::parse(0, format!("unsupported manifest version {}", m.version)));
        }
        if m.problems.is_empty() {
            return Err(Error::parse(0, "manifest lists no problems"));
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Io(format!("cannot serialize manifest: {e}")))
    }

    /// Resolves budgets (suite defaults when omitted, scaled by the given
    /// factors) and seeds.
    pub fn training_set(&self, pop_factor: usize, gen_factor: usize) -> Result<TrainingSet> {
        let problems = self
            .problems
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let base = RunBudget::for_problem(p.id);
                let budget = RunBudget::new(
                    p.pop_size.unwrap_or(base.pop_size),
                    p.max_generations.unwrap_or(base.max_generations),
                )?
                .scaled(pop_factor, gen_factor);
                let seeds = match &p.seeds {
                    Some(s) => s.clone(),
                    None => (0..self.runs)
                        .map(|j| derive_seed(derive_seed(self.seed, i as u64), j as u64))
                        .collect(),
                };
                Ok(TrainingProblem {
                    id: p.id,
                    budget,
                    seeds,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TrainingSet::new(problems)
    }
}

impl TrainingSet {
    pub fn new(problems: Vec<TrainingProblem>) -> Result<Self> {
        if problems.is_empty() {
            return Err(Error::config("training set is empty"));
        }
        if let Some(p) = problems.iter().find(|p| p.seeds.is_empty()) {
            return Err(Error::config(format!("{} has no seeds", p.id)));
        }
        Ok(Self { problems })
    }

    /// Same budget and seeds for every listed problem.
    pub fn uniform(ids: &[BenchmarkId], budget: RunBudget, seeds: &[u64]) -> Result<Self> {
        Self::new(
            ids.iter()
                .map(|&id| TrainingProblem {
                    id,
                    budget,
                    seeds: seeds.to_vec(),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Member runs and the evaluation cache

/// Produces the final set of one member run.
pub trait MemberRunner: Send + Sync {
    fn run(&self, config: &AlgorithmConfig, problem: &TrainingProblem, seed: u64) -> Result<SolutionSet>;
}

/// Runs the evolutionary engines on the benchmark problems.
#[derive(Debug, Clone, Copy, Default)]
pub struct EngineRunner;

impl MemberRunner for EngineRunner {
    fn run(&self, config: &AlgorithmConfig, problem: &TrainingProblem, seed: u64) -> Result<SolutionSet> {
        algorithms::run(config, &Benchmark::new(problem.id), problem.budget, seed).map(|r| r.set)
    }
}

/// Canonical text of a configuration, used as its cache identity.
pub fn fingerprint(config: &AlgorithmConfig) -> String {
    serde_json::to_string(config).unwrap_or_else(|_| format!("{config:?}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    fingerprint: String,
    problem: BenchmarkId,
    budget: RunBudget,
    seed: u64,
}

/// A stored member run; `set` is `None` when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedRun {
    pub set: Option<SolutionSet>,
    pub error: Option<String>,
}

#[derive(Debug, Default)]
pub struct EvalCache {
    map: RwLock<HashMap<CacheKey, Arc<CachedRun>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl EvalCache {
    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn get(&self, key: &CacheKey) -> Option<Arc<CachedRun>> {
        let hit = self.map.read().unwrap_or_else(|e| e.into_inner()).get(key).cloned();
        match hit {
            Some(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            None => self.misses.fetch_add(1, Ordering::Relaxed),
        };
        hit
    }

    fn insert(&self, key: CacheKey, run: Arc<CachedRun>) {
        self.map.write().unwrap_or_else(|e| e.into_inner()).insert(key, run);
    }
}

/// Marginal contribution of one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub value: f64,
    /// Mean improvement on each training problem.
    pub per_problem: Vec<f64>,
    /// `(problem, seed)` pairs on which the candidate's run failed.
    pub failures: Vec<(BenchmarkId, u64)>,
}

/// Scores portfolios on a training set.
pub struct Evaluator {
    training: TrainingSet,
    contexts: Vec<Arc<HvContext>>,
    runner: Box<dyn MemberRunner>,
    cache: Option<EvalCache>,
    exec: Execution,
}

impl Evaluator {
    /// Uses the engines and the benchmark metric contexts.
    pub fn new(training: TrainingSet) -> Result<Self> {
        let contexts = training
            .problems
            .iter()
            .map(|p| HvContext::for_problem(p.id))
            .collect::<Result<Vec<_>>>()?;
        Self::with_runner(training, contexts, Box::new(EngineRunner))
    }

    pub fn with_runner(
        training: TrainingSet,
        contexts: Vec<Arc<HvContext>>,
        runner: Box<dyn MemberRunner>,
    ) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::config("training set is empty"));
        }
        if contexts.len() != training.len() {
            return Err(Error::contract("one metric context per training problem is required"));
        }
        Ok(Self {
            training,
            contexts,
            runner,
            cache: Some(EvalCache::default()),
            exec: Execution::default(),
        })
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn training(&self) -> &TrainingSet {
        &self.training
    }

    pub fn cache(&self) -> Option<&EvalCache> {
        self.cache.as_ref()
    }

    /// The run of `config` on training problem `pi` with `seed`.
    pub fn member(&self, config: &AlgorithmConfig, pi: usize, seed: u64) -> Arc<CachedRun> {
        let problem = &self.training.problems[pi];
        let key = CacheKey {
            fingerprint: fingerprint(config),
            problem: problem.id,
            budget: problem.budget,
            seed,
        };
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return hit;
        }
        let run = Arc::new(match self.runner.run(config, problem, seed) {
            Ok(set) => CachedRun {
                set: Some(set),
                error: None,
            },
            Err(e) => {
                log::warn!("{config} failed on {} (seed {seed}): {e}", problem.id);
                CachedRun {
                    set: None,
                    error: Some(e.to_string()),
                }
            }
        });
        if let Some(c) = &self.cache {
            c.insert(key, run.clone());
        }
        run
    }

    fn cells(&self) -> Vec<(usize, u64)> {
        self.training
            .problems
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.seeds.iter().map(move |&s| (i, s)))
            .collect()
    }

    /// Ω of `members` on one `(problem, seed)` cell; 0 when nothing ran.
    fn omega_cell(&self, members: &[AlgorithmConfig], pi: usize, seed: u64) -> Result<f64> {
        if members.is_empty() {
            return Ok(0.0);
        }
        let runs: Vec<Arc<CachedRun>> = members.iter().map(|c| self.member(c, pi, seed)).collect();
        let sets: Vec<Option<&SolutionSet>> = runs.iter().map(|r| r.set.as_ref()).collect();
        match combine(&sets, &self.contexts[pi], self.training.problems[pi].budget.pop_size) {
            Ok(c) => Ok(c.omega()),
            Err(Error::AllMembersFailed(_)) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    /// Mean Ω over seeds, per training problem.
    pub fn omega_per_problem(&self, members: &[AlgorithmConfig]) -> Result<Vec<f64>> {
        let cells = self.cells();
        let values = self.exec.map(&cells, |&(pi, s)| self.omega_cell(members, pi, s));
        let mut sums = vec![0.0; self.training.len()];
        for (&(pi, _), v) in cells.iter().zip(values) {
            sums[pi] += v?;
        }
        Ok(sums
            .iter()
            .zip(&self.training.problems)
            .map(|(s, p)| s / p.seeds.len() as f64)
            .collect())
    }

    /// Ω(P, Z): the mean over training problems.
    pub fn omega(&self, members: &[AlgorithmConfig]) -> Result<f64> {
        let per = self.omega_per_problem(members)?;
        Ok(per.iter().sum::<f64>() / per.len() as f64)
    }

    fn failures_of(&self, config: &AlgorithmConfig) -> Vec<(BenchmarkId, u64)> {
        self.cells()
            .into_iter()
            .filter(|&(pi, s)| self.member(config, pi, s).set.is_none())
            .map(|(pi, s)| (self.training.problems[pi].id, s))
            .collect()
    }
}

/// Mean improvement of Ω over the training set from adding `theta`.
pub fn marginal_contribution(
    members: &[AlgorithmConfig],
    theta: &AlgorithmConfig,
    eval: &Evaluator,
) -> Result<Contribution> {
    let base = eval.omega_per_problem(members)?;
    contribution_against(members, &base, theta, eval)
}

fn contribution_against(
    members: &[AlgorithmConfig],
    base: &[f64],
    theta: &AlgorithmConfig,
    eval: &Evaluator,
) -> Result<Contribution> {
    if members.contains(theta) {
        return Ok(Contribution {
            value: 0.0,
            per_problem: vec![0.0; base.len()],
            failures: Vec::new(),
        });
    }
    let mut grown = members.to_vec();
    grown.push(*theta);
    let with = eval.omega_per_problem(&grown)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(Contribution {
        value: mean(&with) - mean(base),
        per_problem: with.iter().zip(base).map(|(a, b)| a - b).collect(),
        failures: eval.failures_of(theta),
    })
}

// ---------------------------------------------------------------------------
// Configurator

/// Candidates evaluated together; fixed so results do not depend on the
/// number of threads.
const BATCH: usize = 8;

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub config: AlgorithmConfig,
    pub contribution: Contribution,
    /// Candidates evaluated.
    pub evaluated: usize,
}

/// Searches `subspace` for the configuration with the largest marginal
/// contribution to `members`.
///
/// Subspaces with at most `budget` assignments are enumerated. Otherwise
/// random samples alternate with one-parameter perturbations of the
/// incumbent. Ties keep the earlier candidate.
pub fn configure_subspace(
    members: &[AlgorithmConfig],
    subspace: &Subspace,
    eval: &Evaluator,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::config("search budget must be at least 1"));
    }
    let base = eval.omega_per_problem(members)?;
    let score = |c: &AlgorithmConfig| contribution_against(members, &base, c, eval);

    if let Some(all) = subspace.enumerate(budget) {
        let scored = eval.exec.map(&all, score);
        let mut best: Option<(AlgorithmConfig, Contribution)> = None;
        for (c, s) in all.iter().zip(scored) {
            let s = s?;
            if best.as_ref().is_none_or(|(_, b)| s.value > b.value) {
                best = Some((*c, s));
            }
        }
        let (config, contribution) = best.ok_or_else(|| Error::config("subspace is empty"))?;
        return Ok(SearchOutcome {
            config,
            contribution,
            evaluated: all.len(),
        });
    }

    let mut rng = seeded(seed);
    let mut incumbent: Option<(Vec<f64>, AlgorithmConfig, Contribution)> = None;
    let mut evaluated = 0;
    while evaluated < budget {
        let n = BATCH.min(budget - evaluated);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|j| match &incumbent {
                Some((v, _, _)) if (evaluated + j) % 2 == 1 => subspace.perturb(v, &mut rng),
                _ => subspace.sample(&mut rng),
            })
            .collect();
        let configs: Vec<AlgorithmConfig> = points.iter().map(|p| subspace.decode(p)).collect();
        let scored = eval.exec.map(&configs, score);
        for ((p, c), s) in points.into_iter().zip(configs).zip(scored) {
            let s = s?;
            if incumbent.as_ref().is_none_or(|(_, _, b)| s.value > b.value) {
                incumbent = Some((p, c, s));
            }
        }
        evaluated += n;
    }
    let (_, config, contribution) = incumbent.ok_or_else(|| Error::config("no candidate evaluated"))?;
    Ok(SearchOutcome {
        config,
        contribution,
        evaluated,
    })
}

// ---------------------------------------------------------------------------
// Construction loop

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructSettings {
    /// Maximum number of members.
    pub k: usize,
    pub searches_per_iter: usize,
    /// Candidates evaluated per search.
    pub budget_per_search: usize,
    pub seed: u64,
    /// Safety cap on insertion rounds.
    pub max_rounds: usize,
}

impl ConstructSettings {
    pub fn new(k: usize, budget_per_search: usize, seed: u64) -> Self {
        Self {
            k,
            searches_per_iter: 10,
            budget_per_search,
            seed,
            max_rounds: 3 * k.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRecord {
    pub search: usize,
    pub subspace: String,
    pub config: AlgorithmConfig,
    pub contribution: f64,
    pub evaluated: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub config: AlgorithmConfig,
    pub omega_before: f64,
    pub omega_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub omega_before: f64,
    pub searches: Vec<SearchRecord>,
    pub inserted: Option<AlgorithmConfig>,
    /// Ω right after the insertion.
    pub omega_inserted: Option<f64>,
    pub removals: Vec<Removal>,
    /// Ω at the end of the round.
    pub omega_after: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The portfolio reached `k` members.
    Full,
    /// No candidate strictly improved Ω.
    NoImprovement,
    RoundLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionReport {
    pub rounds: Vec<RoundRecord>,
    pub portfolio: Portfolio,
    pub termination: Termination,
}

/// One flattened report line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub round: usize,
    pub event: &'static str,
    pub search: Option<usize>,
    pub subspace: String,
    pub member: String,
    pub contribution: Option<f64>,
    pub omega: Option<f64>,
}

impl ConstructionReport {
    /// Ω(P, Z) at the start and after every round.
    pub fn omega_trajectory(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.rounds.len() + 1);
        t.push(self.rounds.first().map_or(0.0, |r| r.omega_before));
        t.extend(self.rounds.iter().map(|r| r.omega_after));
        t
    }

    pub fn final_omega(&self) -> f64 {
        self.omega_trajectory().last().copied().unwrap_or(0.0)
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        for r in &self.rounds {
            for s in &r.searches {
                rows.push(ReportRow {
                    round: r.round,
                    event: "candidate",
                    search: Some(s.search),
                    subspace: s.subspace.clone(),
                    member: s.config.to_string(),
                    contribution: Some(s.contribution),
                    omega: None,
                });
            }
            if let (Some(c), Some(o)) = (r.inserted, r.omega_inserted) {
                rows.push(ReportRow {
                    round: r.round,
                    event: "insert",
                    search: None,
                    subspace: c.foundation.to_string(),
                    member: c.to_string(),
                    contribution: Some(o - r.omega_before),
                    omega: Some(o),
                });
            }
            for m in &r.removals {
                rows.push(ReportRow {
                    round: r.round,
                    event: "remove",
                    search: None,
                    subspace: m.config.foundation.to_string(),
                    member: m.config.to_string(),
                    contribution: Some(m.omega_after - m.omega_before),
                    omega: Some(m.omega_after),
                });
            }
        }
        rows
    }
}

/// Builds a portfolio of at most `settings.k` members.
pub fn construct(
    space: &ConfigSpace,
    eval: &Evaluator,
    settings: ConstructSettings,
) -> Result<(Portfolio, ConstructionReport)> {
    if settings.k == 0 || settings.k > MAX_MEMBERS {
        return Err(Error::config(format!(
            "k must be in 1..={MAX_MEMBERS}, got {}",
            settings.k
        )));
    }
    if space.is_empty() {
        return Err(Error::config("configuration space has no subspaces"));
    }
    if settings.searches_per_iter == 0 {
        return Err(Error::config("at least one search per round is required"));
    }
    let c = space.len();
    let mut members: Vec<AlgorithmConfig> = Vec::new();
    let mut omega = 0.0;
    let mut rounds = Vec::new();
    let mut termination = Termination::RoundLimit;

    for round in 0..settings.max_rounds {
        if members.len() >= settings.k {
            termination = Termination::Full;
            break;
        }
        let round_seed = derive_seed(settings.seed, round as u64);
        let mut searches = Vec::with_capacity(settings.searches_per_iter);
        let mut best: Option<(AlgorithmConfig, f64)> = None;
        for i in 1..=settings.searches_per_iter {
            let sub = &space.subspaces[i % c];
            let out = configure_subspace(
                &members,
                sub,
                eval,
                settings.budget_per_search,
                derive_seed(round_seed, i as u64),
            )?;
            if best.is_none_or(|(_, b)| out.contribution.value > b) {
                best = Some((out.config, out.contribution.value));
            }
            searches.push(SearchRecord {
                search: i,
                subspace: sub.name.clone(),
                config: out.config,
                contribution: out.contribution.value,
                evaluated: out.evaluated,
                failures: out.contribution.failures.len(),
            });
        }
        let omega_before = omega;
        let mut record = RoundRecord {
            round,
            omega_before,
            searches,
            inserted: None,
            omega_inserted: None,
            removals: Vec::new(),
            omega_after: omega_before,
        };
        let Some((theta, _)) = best else { break };
        let mut grown = members.clone();
        grown.push(theta);
        let grown_omega = eval.omega(&grown)?;
        if members.contains(&theta) || grown_omega <= omega {
            rounds.push(record);
            termination = Termination::NoImprovement;
            break;
        }
        members = grown;
        omega = grown_omega;
        record.inserted = Some(theta);
        record.omega_inserted = Some(omega);

        'simplify: loop {
            if members.len() < 2 {
                break;
            }
            for j in 0..members.len() {
                let mut rest = members.clone();
                let removed = rest.remove(j);
                let rest_omega = eval.omega(&rest)?;
                if rest_omega >= omega {
                    record.removals.push(Removal {
                        config: removed,
                        omega_before: omega,
                        omega_after: rest_omega,
                    });
                    members = rest;
                    omega = rest_omega;
                    continue 'simplify;
                }
            }
            break;
        }
        record.omega_after = omega;
        rounds.push(record);
        log::info!("round {round}: {} members, omega {omega:.6}", members.len());
    }
    if termination == Termination::RoundLimit && members.len() >= settings.k {
        termination = Termination::Full;
    }
    if members.is_empty() {
        return Err(Error::config(
            "construction found no configuration with positive contribution",
        ));
    }
    let portfolio = Portfolio::new("constructed", members)?;
    let report = ConstructionReport {
        rounds,
        portfolio: portfolio.clone(),
        termination,
    };
    Ok((portfolio, report))
}

// ---------------------------------------------------------------------------
// Portfolio files

pub fn save_portfolio(portfolio: &Portfolio, path: &Path) -> Result<()> {
    std::fs::write(path, portfolio.to_toml()?)?;
    Ok(())
}

pub fn load_portfolio(path: &Path) -> Result<Portfolio> {
    let text = std::fs::read_to_string(path)?;
    Portfolio::from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_samples_and_perturbations_validate() {
        let space = ConfigSpace::full();
        let mut rng = seeded(9);
        for sub in &space.subspaces {
            assert_eq!(sub.cardinality(), None);
            for _ in 0..300 {
                let v = sub.sample(&mut rng);
                sub.decode(&v).validate().unwrap();
                let w = sub.perturb(&v, &mut rng);
                sub.decode(&w).validate().unwrap();
            }
        }
    }

    #[test]
    fn toy_space_enumerates_four_configs_each() {
        for sub in &ConfigSpace::toy().subspaces {
            let all = sub.enumerate(4).unwrap();
            assert_eq!(all.len(), 4);
            assert!(sub.enumerate(3).is_none());
            all.iter().for_each(|c| c.validate().unwrap());
        }
    }

    #[test]
    fn steps_stay_in_range() {
        let mut rng = seeded(1);
        let d = Domain::Real { lo: 0.001, hi: 2.0 };
        for _ in 0..200 {
            let v = d.sample(&mut rng);
            let w = d.step(v, &mut rng);
            assert!((0.001..=2.0).contains(&w));
            assert!(((w - v).abs() - 0.1999).abs() < 2e-3);
        }
        let i = Domain::Int { lo: 2, hi: 10 };
        assert_eq!(i.step(10.0, &mut rng), 9.0);
        let c = Domain::Values(vec![1.0, 2.0, 3.0]);
        assert_eq!(c.step(1.0, &mut rng), 2.0);
        assert_eq!(c.step(3.0, &mut rng), 2.0);
    }

    #[test]
    fn fingerprints_distinguish_parameters() {
        let a = AlgorithmConfig::nsga2_sbx(20.0, 20.0);
        let b = AlgorithmConfig::nsga2_sbx(20.0, 21.0);
        assert_eq!(fingerprint(&a), fingerprint(&a));
        assert_ne!(fingerprint(&a), fingerprint(&b));
    }
}
