//! Running a portfolio of member algorithms and choosing its output set.
//!
//! Members run independently, each with a seed derived from the run seed
//! and its position. Their final sets are merged by [`restructure`], and
//! the output is whichever candidate (a member set or the restructured
//! set) scores the highest IHVR.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algorithms::{self, AlgorithmConfig, OperatorConfig, RunBudget, RunResult};
use crate::error::{Error, Result};
use crate::indicators::{ihvr, HvContext};
use crate::operators::{DeParams, DeVariant};
use crate::par::Execution;
use crate::pareto::{crowding_truncate, nondominated_indices, Individual, SolutionSet};
use crate::problems::Problem;
use crate::rng::derive_seed;

/// Largest number of members a portfolio may hold.
pub const MAX_MEMBERS: usize = 10;

/// Version written to and expected in portfolio files.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    pub name: String,
    pub members: Vec<AlgorithmConfig>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortfolioFile {
    version: u32,
    name: String,
    #[serde(default)]
    members: Vec<AlgorithmConfig>,
}

impl Portfolio {
    pub fn new(name: impl Into<String>, members: Vec<AlgorithmConfig>) -> Result<Self> {
        let p = Self {
            name: name.into(),
            members,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() || self.members.len() > MAX_MEMBERS {
            return Err(Error::config(format!(
                "a portfolio needs 1 to {MAX_MEMBERS} members, got {}",
                self.members.len()
            )));
        }
        for (i, m) in self.members.iter().enumerate() {
            m.validate().map_err(|e| Error::config(format!("member {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The six-member portfolio reported for the full training set.
    pub fn published() -> Self {
        let sbx = |eta_sbx, eta_pm| OperatorConfig::SbxPm { eta_sbx, eta_pm };
        let rand1 = |f, cr| DeParams {
            variant: DeVariant::RandP,
            f,
            k: 0.0,
            p: 1,
            cr,
        };
        Self {
            name: "MOEAs/PAP".into(),
            members: vec![
                AlgorithmConfig::moead(sbx(1.0, 48.0), 0.903, 9, 50),
                AlgorithmConfig::nsga2_de(rand1(1.072, 0.026)),
                AlgorithmConfig::moead(sbx(62.0, 5.0), 0.794, 9, 29),
                AlgorithmConfig::nsga2_de(rand1(0.136, 0.681)),
                AlgorithmConfig::moead(OperatorConfig::De(rand1(0.753, 0.963)), 0.645, 3, 42),
                AlgorithmConfig::moead(sbx(89.0, 2.0), 0.303, 2, 38),
            ],
        }
    }

    /// Serializes to the versioned TOML portfolio format.
    pub fn to_toml(&self) -> Result<String> {
        let file = PortfolioFile {
            version: FORMAT_VERSION,
            name: self.name.clone(),
            members: self.members.clone(),
        };
        toml::to_string(&file).map_err(|e| Error::Io(format!("cannot serialize portfolio: {e}")))
    }

    /// Parses and validates a portfolio file.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: PortfolioFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
            Error::parse(line, e.message().trim().to_string())
        })?;
        if file.version != FORMAT_VERSION {
            return Err(Error::parse(
                line_of_key(text, "version"),
                format!(
                    "unsupported portfolio format version {} (expected {FORMAT_VERSION})",
                    file.version
                ),
            ));
        }
        if file.members.is_empty() {
            return Err(Error::parse(0, "portfolio has no members"));
        }
        if file.members.len() > MAX_MEMBERS {
            return Err(Error::parse(
                member_line(text, MAX_MEMBERS),
                format!(
                    "portfolio has {} members; at most {MAX_MEMBERS} are allowed",
                    file.members.len()
                ),
            ));
        }
        for (i, m) in file.members.iter().enumerate() {
            if let Err(e) = m.validate() {
                return Err(Error::parse(member_line(text, i), format!("member {i}: {e}")));
            }
        }
        Ok(Self {
            name: file.name,
            members: file.members,
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    let end = offset.min(text.len());
    text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| l.trim_start().starts_with(key))
        .map_or(0, |i| i + 1)
}

/// Line of the `i`-th `[[members]]` header, or 0 when absent.
fn member_line(text: &str, i: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim() == "[[members]]")
        .nth(i)
        .map_or(0, |(n, _)| n + 1)
}

/// Where the chosen output set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Member(usize),
    Restructure,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Member(i) => write!(f, "member {i}"),
            Source::Restructure => f.write_str("RESTRUCTURE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub source: Source,
    pub metric: f64,
}

/// Merges member sets: union, exact objective duplicates removed, the
/// non-dominated front kept and crowding-truncated to `cap`.
///
/// Duplicates keep their first occurrence in input order.
pub fn restructure<'a, I>(sets: I, cap: usize) -> Result<SolutionSet>
where
    I: IntoIterator<Item = &'a SolutionSet>,
{
    let union = restructure_union(sets)?;
    let front: Vec<Individual> = nondominated_indices(&union)
        .into_iter()
        .map(|i| union[i].clone())
        .collect();
    if cap == 0 {
        return Err(Error::contract("restructure cap must be at least 1"));
    }
    let kept = if front.len() > cap {
        crowding_truncate(&front, cap)?
    } else {
        front
    };
    Ok(SolutionSet::from_nondominated(kept))
}

/// The de-duplicated union that [`restructure`] filters.
pub fn restructure_union<'a, I>(sets: I) -> Result<Vec<Individual>>
where
    I: IntoIterator<Item = &'a SolutionSet>,
{
    let mut m: Option<usize> = None;
    let mut count = 0;
    let mut seen = HashSet::new();
    let mut union = Vec::new();
    for set in sets {
        count += 1;
        for ind in set.iter() {
            match m {
                None => m = Some(ind.f.len()),
                Some(m) if m != ind.f.len() => {
                    return Err(Error::contract(format!(
                        "cannot restructure sets with {m} and {} objectives",
                        ind.f.len()
                    )))
                }
                _ => {}
            }
            let key: Vec<u64> = ind.f.iter().map(|v| (v + 0.0).to_bits()).collect();
            if seen.insert(key) {
                union.push(ind.clone());
            }
        }
    }
    if count == 0 {
        return Err(Error::contract("restructure needs at least one set"));
    }
    Ok(union)
}

/// Picks the best candidate; ties prefer the restructured set, then the
/// lowest member index. NaN metrics never win.
pub fn select(candidates: &[Candidate]) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for &c in candidates {
        if c.metric.is_nan() {
            continue;
        }
        best = match best {
            None => Some(c),
            Some(b) if c.metric > b.metric => Some(c),
            Some(b) if c.metric == b.metric && rank(c.source) < rank(b.source) => Some(c),
            keep => keep,
        };
    }
    best
}

fn rank(s: Source) -> (u8, usize) {
    match s {
        Source::Restructure => (0, 0),
        Source::Member(i) => (1, i),
    }
}

/// Outcome of combining member sets on one problem.
#[derive(Debug, Clone)]
pub struct Combined {
    pub restructured: SolutionSet,
    /// Member candidates in index order, then the restructured set.
    pub candidates: Vec<Candidate>,
    pub chosen: Candidate,
}

impl Combined {
    pub fn omega(&self) -> f64 {
        self.chosen.metric
    }
}

/// Scores member sets and their restructured union. `None` entries are
/// failed members and are skipped.
pub fn combine(sets: &[Option<&SolutionSet>], ctx: &HvContext, cap: usize) -> Result<Combined> {
    let present: Vec<&SolutionSet> = sets.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(Error::AllMembersFailed("no member produced a solution set".into()));
    }
    let restructured = restructure(present.iter().copied(), cap)?;
    let mut candidates = Vec::with_capacity(present.len() + 1);
    for (i, s) in sets.iter().enumerate() {
        if let Some(s) = s {
            candidates.push(Candidate {
                source: Source::Member(i),
                metric: ihvr(s.members(), ctx)?,
            });
        }
    }
    candidates.push(Candidate {
        source: Source::Restructure,
        metric: ihvr(restructured.members(), ctx)?,
    });
    let chosen = select(&candidates).ok_or_else(|| Error::contract("every candidate metric is NaN"))?;
    Ok(Combined {
        restructured,
        candidates,
        chosen,
    })
}

#[derive(Debug, Clone)]
pub struct PapRunResult {
    /// One entry per member, in portfolio order.
    pub members: Vec<std::result::Result<RunResult, Error>>,
    pub restructured: SolutionSet,
    pub output: SolutionSet,
    pub chosen: Source,
    pub candidates: Vec<Candidate>,
    pub wall: Duration,
}

impl PapRunResult {
    /// Metric of the chosen output set.
    pub fn metric(&self) -> f64 {
        self.candidates
            .iter()
            .find(|c| c.source == self.chosen)
            .map_or(f64::NAN, |c| c.metric)
    }

    pub fn member_metric(&self, i: usize) -> Option<f64> {
        self.candidates
            .iter()
            .find(|c| c.source == Source::Member(i))
            .map(|c| c.metric)
    }

    pub fn restructure_metric(&self) -> f64 {
        self.candidates
            .iter()
            .find(|c| c.source == Source::Restructure)
            .map_or(f64::NAN, |c| c.metric)
    }

    /// Best metric among members that completed.
    pub fn best_member_metric(&self) -> Option<f64> {
        self.candidates
            .iter()
            .filter(|c| matches!(c.source, Source::Member(_)))
            .map(|c| c.metric)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &Error)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
    }
}

/// Seed of member `index` for a portfolio run seeded with `seed`.
pub fn member_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Runs every member on `problem` and selects the output set.
pub fn run_pap(
    portfolio: &Portfolio,
    problem: &dyn Problem,
    ctx: &HvContext,
    budget: RunBudget,
    seed: u64,
) -> Result<PapRunResult> {
    run_pap_with(portfolio, problem, ctx, budget, seed, Execution::default())
}

pub fn run_pap_with(
    portfolio: &Portfolio,
    problem: &dyn Problem,
    ctx: &HvContext,
    budget: RunBudget,
    seed: u64,
    exec: Execution,
) -> Result<PapRunResult> {
    portfolio.validate()?;
    let start = Instant::now();
    let members = exec.map_range(portfolio.len(), |i| {
        algorithms::run(&portfolio.members[i], problem, budget, member_seed(seed, i))
    });
    for (i, r) in members.iter().enumerate() {
        if let Err(e) = r {
            log::warn!("portfolio member {i} failed: {e}");
        }
    }
    let sets: Vec<Option<&SolutionSet>> = members.iter().map(|r| r.as_ref().ok().map(|r| &r.set)).collect();
    let combined = match combine(&sets, ctx, budget.pop_size) {
        Err(Error::AllMembersFailed(_)) => {
            let msgs: Vec<String> = members
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.as_ref().err().map(|e| format!("member {i}: {e}")))
                .collect();
            return Err(Error::AllMembersFailed(msgs.join("; ")));
        }
        other => other?,
    };
    let output = match combined.chosen.source {
        Source::Restructure => combined.restructured.clone(),
        Source::Member(i) => sets[i].cloned().unwrap_or_else(SolutionSet::empty),
    };
    Ok(PapRunResult {
        members,
        restructured: combined.restructured,
        output,
        chosen: combined.chosen.source,
        candidates: combined.candidates,
        wall: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_prefers_restructure_then_low_index() {
        let c = |source, metric| Candidate { source, metric };
        let picked = select(&[
            c(Source::Member(0), 0.5),
            c(Source::Member(1), 0.7),
            c(Source::Member(2), 0.7),
        ])
        .unwrap();
        assert_eq!(picked.source, Source::Member(1));
        let picked = select(&[c(Source::Member(0), 0.7), c(Source::Restructure, 0.7)]).unwrap();
        assert_eq!(picked.source, Source::Restructure);
        assert!(select(&[c(Source::Restructure, f64::NAN)]).is_none());
    }

    #[test]
    fn published_portfolio_validates() {
        let p = Portfolio::published();
        assert_eq!(p.len(), 6);
        p.validate().unwrap();
    }

    #[test]
    fn member_count_limits() {
        assert!(Portfolio::new("x", vec![]).is_err());
        let one = AlgorithmConfig::nsga2_sbx(20.0, 20.0);
        assert!(Portfolio::new("x", vec![one; 11]).is_err());
        assert!(Portfolio::new("x", vec![one; 10]).is_ok());
    }

    #[test]
    fn negative_zero_counts_as_duplicate() {
        let a = SolutionSet::from_objectives(vec![vec![0.0, 1.0]]);
        let b = SolutionSet::from_objectives(vec![vec![-0.0, 1.0]]);
        assert_eq!(restructure([&a, &b], 10).unwrap().len(), 1);
    }
}
