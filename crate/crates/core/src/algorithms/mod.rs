//! Foundation engines: NSGA-II, MOEA/D and MOPSO.
//!
//! An [`AlgorithmConfig`] names a foundation and one of its operator rows;
//! [`run`] dispatches on it. Every run is single-threaded and fully
//! determined by `(config, problem, budget, seed)`.

mod moead;
mod mopso;
mod nsga2;

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{DeParams, DeVariant, PsoMutation, PsoParams};
use crate::pareto::{crowding_truncate, nondominated_filter, Individual, SolutionSet};
use crate::problems::{BenchmarkId, Problem, Suite};

pub use moead::{simplex_lattice, tchebycheff, weight_vectors};
pub use mopso::GridArchive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Foundation {
    #[serde(rename = "NSGA-II")]
    Nsga2,
    #[serde(rename = "MOEA/D")]
    Moead,
    #[serde(rename = "MOPSO")]
    Mopso,
}

impl fmt::Display for Foundation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Foundation::Nsga2 => "NSGA-II",
            Foundation::Moead => "MOEA/D",
            Foundation::Mopso => "MOPSO",
        })
    }
}

/// Variation row of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "kebab-case")]
pub enum OperatorConfig {
    SbxPm { eta_sbx: f64, eta_pm: f64 },
    De(DeParams),
    Pso(PsoParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoeadParams {
    /// Probability of mating inside the neighborhood.
    pub ps: f64,
    /// Maximum number of replaced neighbors per offspring.
    pub n_r: usize,
    pub neighbor_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub foundation: Foundation,
    pub operator: OperatorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moead: Option<MoeadParams>,
}

fn int_in(v: f64, lo: f64, hi: f64) -> bool {
    v.fract() == 0.0 && (lo..=hi).contains(&v)
}

impl AlgorithmConfig {
    pub fn nsga2_sbx(eta_sbx: f64, eta_pm: f64) -> Self {
        Self {
            foundation: Foundation::Nsga2,
            operator: OperatorConfig::SbxPm { eta_sbx, eta_pm },
            moead: None,
        }
    }

    pub fn nsga2_de(de: DeParams) -> Self {
        Self {
            foundation: Foundation::Nsga2,
            operator: OperatorConfig::De(de),
            moead: None,
        }
    }

    pub fn moead(operator: OperatorConfig, ps: f64, n_r: usize, neighbor_size: usize) -> Self {
        Self {
            foundation: Foundation::Moead,
            operator,
            moead: Some(MoeadParams { ps, n_r, neighbor_size }),
        }
    }

    pub fn mopso(pso: PsoParams) -> Self {
        Self {
            foundation: Foundation::Mopso,
            operator: OperatorConfig::Pso(pso),
            moead: None,
        }
    }

    /// Checks the foundation/operator pairing and every parameter range.
    pub fn validate(&self) -> Result<()> {
        match (self.foundation, &self.operator) {
            (Foundation::Mopso, OperatorConfig::Pso(p)) => p.validate()?,
            (Foundation::Mopso, _) | (_, OperatorConfig::Pso(_)) => {
                return Err(Error::config(format!(
                    "{} cannot use operator {}",
                    self.foundation,
                    self.operator_label()
                )))
            }
            (_, OperatorConfig::SbxPm { eta_sbx, eta_pm }) => {
                if !int_in(*eta_sbx, 1.0, 100.0) || !int_in(*eta_pm, 1.0, 100.0) {
                    return Err(Error::config(format!(
                        "SBX/PM indices must be integers in 1..=100, got {eta_sbx}/{eta_pm}"
                    )));
                }
            }
            (f, OperatorConfig::De(de)) => {
                if f == Foundation::Moead && !de.variant.uses_random_base() {
                    return Err(Error::config(format!("MOEA/D does not admit {}/p", de.variant.label())));
                }
                de.validate()?;
            }
        }
        match (self.foundation, &self.moead) {
            (Foundation::Moead, Some(m)) => {
                if !(0.0..=1.0).contains(&m.ps) || !(2..=10).contains(&m.n_r) || !(10..=50).contains(&m.neighbor_size) {
                    return Err(Error::config(format!("MOEA/D parameters out of range: {m:?}")));
                }
            }
            (Foundation::Moead, None) => return Err(Error::config("MOEA/D needs Ps, n_r and neighborSize")),
            (_, Some(_)) => return Err(Error::config(format!("{} takes no MOEA/D parameters", self.foundation))),
            _ => {}
        }
        Ok(())
    }

    pub fn operator_label(&self) -> String {
        match &self.operator {
            OperatorConfig::SbxPm { .. } => "SBX+PM".to_string(),
            OperatorConfig::De(de) => format!("{}/{}", de.variant.label(), de.p),
            OperatorConfig::Pso(p) => match p.mutation {
                PsoMutation::Smpso { .. } => "SMPSO".to_string(),
                PsoMutation::Omopso { .. } => "OMOPSO".to_string(),
                PsoMutation::None => "NoMutate".to_string(),
            },
        }
    }
}

impl fmt::Display for AlgorithmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} (", self.foundation, self.operator_label())?;
        match &self.operator {
            OperatorConfig::SbxPm { eta_sbx, eta_pm } => write!(f, "eta_sbx={eta_sbx}, eta_pm={eta_pm}")?,
            OperatorConfig::De(de) => {
                write!(f, "F={}, CR={}", de.f, de.cr)?;
                if de.variant.is_current_to() {
                    write!(f, ", K={}", de.k)?;
                }
            }
            OperatorConfig::Pso(p) => {
                write!(
                    f,
                    "w={}, C1={}, C2={}, Vmax={}, Vchange={}, M={}",
                    p.w, p.c1, p.c2, p.v_max, p.v_change, p.grid_divisions
                )?;
                match p.mutation {
                    PsoMutation::Smpso { eta_pm, constriction } => {
                        write!(f, ", PMn={eta_pm}, constriction={constriction}")?
                    }
                    PsoMutation::Omopso { b } => write!(f, ", b={b}")?,
                    PsoMutation::None => {}
                }
            }
        }
        if let Some(m) = &self.moead {
            write!(f, ", Ps={}, n_r={}, neighborSize={}", m.ps, m.n_r, m.neighbor_size)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunBudget {
    pub pop_size: usize,
    pub max_generations: usize,
}

impl RunBudget {
    pub fn new(pop_size: usize, max_generations: usize) -> Result<Self> {
        if pop_size == 0 {
            return Err(Error::config("population size must be at least 1"));
        }
        Ok(Self {
            pop_size,
            max_generations,
        })
    }

    /// Default budget of a benchmark suite.
    pub fn for_problem(id: BenchmarkId) -> Self {
        let (pop_size, max_generations) = match (id.suite, id.index) {
            (Suite::Uf, 1..=7) => (100, 500),
            (Suite::Uf, _) => (150, 600),
            (Suite::Wfg, _) => (150, 250),
            _ => (100, 250),
        };
        Self {
            pop_size,
            max_generations,
        }
    }

    pub fn scaled(self, pop_factor: usize, gen_factor: usize) -> Self {
        Self {
            pop_size: self.pop_size * pop_factor,
            max_generations: self.max_generations * gen_factor,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub set: SolutionSet,
    pub evaluations: usize,
    /// Population size actually used (MOEA/D rounds it to a weight lattice).
    pub pop_size: usize,
    pub wall: Duration,
    pub seed: u64,
}

/// Called with `(generation, population)` after initialization and after
/// every generation.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[Individual]);

/// Runs `config` on `problem`.
pub fn run(config: &AlgorithmConfig, problem: &dyn Problem, budget: RunBudget, seed: u64) -> Result<RunResult> {
    run_observed(config, problem, budget, seed, &mut |_, _| {})
}

pub fn run_observed(
    config: &AlgorithmConfig,
    problem: &dyn Problem,
    budget: RunBudget,
    seed: u64,
    observer: Observer<'_>,
) -> Result<RunResult> {
    config.validate()?;
    if budget.pop_size == 0 {
        return Err(Error::config("population size must be at least 1"));
    }
    let start = Instant::now();
    let mut rng = crate::rng::seeded(seed);
    let (set, evaluations, pop_size) = match config.foundation {
        Foundation::Nsga2 => nsga2::run(config, problem, budget, &mut rng, observer)?,
        Foundation::Moead => moead::run(config, problem, budget, &mut rng, observer)?,
        Foundation::Mopso => mopso::run(config, problem, budget, &mut rng, observer)?,
    };
    Ok(RunResult {
        set,
        evaluations,
        pop_size,
        wall: start.elapsed(),
        seed,
    })
}

pub fn run_nsga2(problem: &dyn Problem, config: &AlgorithmConfig, budget: RunBudget, seed: u64) -> Result<RunResult> {
    expect_foundation(config, Foundation::Nsga2)?;
    run(config, problem, budget, seed)
}

pub fn run_moead(problem: &dyn Problem, config: &AlgorithmConfig, budget: RunBudget, seed: u64) -> Result<RunResult> {
    expect_foundation(config, Foundation::Moead)?;
    run(config, problem, budget, seed)
}

pub fn run_mopso(problem: &dyn Problem, config: &AlgorithmConfig, budget: RunBudget, seed: u64) -> Result<RunResult> {
    expect_foundation(config, Foundation::Mopso)?;
    run(config, problem, budget, seed)
}

fn expect_foundation(config: &AlgorithmConfig, f: Foundation) -> Result<()> {
    if config.foundation != f {
        return Err(Error::config(format!(
            "expected a {f} configuration, got {}",
            config.foundation
        )));
    }
    Ok(())
}

pub(crate) fn random_individual<R: Rng + ?Sized>(problem: &dyn Problem, rng: &mut R) -> Individual {
    let x: Vec<f64> = problem.bounds().iter().map(|&(l, u)| rng.gen_range(l..=u)).collect();
    let f = problem.evaluate(&x);
    Individual::new(x, f)
}

pub(crate) fn evaluate(problem: &dyn Problem, x: Vec<f64>) -> Individual {
    let f = problem.evaluate(&x);
    Individual::new(x, f)
}

/// Non-dominated members of `pop`, crowding-truncated to `cap`.
pub(crate) fn final_set(pop: &[Individual], cap: usize) -> Result<SolutionSet> {
    let front = nondominated_filter(pop).into_members();
    let kept = if front.len() > cap {
        crowding_truncate(&front, cap)?
    } else {
        front
    };
    Ok(SolutionSet::from_nondominated(kept))
}

/// Per-variable PM rate `1 / n`.
pub(crate) fn pm_rate(problem: &dyn Problem) -> f64 {
    1.0 / problem.num_variables().max(1) as f64
}

pub(crate) fn de_needs(de: &DeParams) -> usize {
    de.donor_count() + 1
}

pub(crate) fn is_best_variant(v: DeVariant) -> bool {
    !v.uses_random_base()
}
