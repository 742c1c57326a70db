//! Per-member breakdown of a portfolio: each member alone, the portfolio
//! restricted to member sets, and the full portfolio with the restructured
//! set.

use moeapap::algorithms::RunBudget;
use moeapap::indicators::HvContext;
use moeapap::par::{with_workers, Execution};
use moeapap::portfolio::{run_pap_with, select, Candidate, Portfolio, Source};
use moeapap::problems::{Benchmark, BenchmarkId};
use serde::Serialize;

use crate::error::CliError;
use crate::experiment::run_seed;
use crate::stats::mean;

#[derive(Debug, Clone, PartialEq)]
pub struct MemberRow {
    pub problem: String,
    /// Mean IHVR of each member; NaN when every run of the member failed.
    pub members: Vec<f64>,
    /// Mean of the best member IHVR per run.
    pub no_restructure: f64,
    /// Mean of the chosen output IHVR per run.
    pub full: f64,
    /// Index of the member with the highest mean.
    pub best_member: usize,
}

/// Builds a row from the candidate lists of several runs.
pub fn member_row(problem: &str, n_members: usize, runs: &[Vec<Candidate>]) -> MemberRow {
    let members: Vec<f64> = (0..n_members)
        .map(|i| {
            let v: Vec<f64> = runs
                .iter()
                .filter_map(|c| c.iter().find(|c| c.source == Source::Member(i)).map(|c| c.metric))
                .collect();
            if v.is_empty() {
                f64::NAN
            } else {
                mean(&v)
            }
        })
        .collect();
    let no_restructure: Vec<f64> = runs
        .iter()
        .map(|c| {
            let only: Vec<Candidate> = c.iter().copied().filter(|c| c.source != Source::Restructure).collect();
            select(&only).map_or(f64::NAN, |c| c.metric)
        })
        .collect();
    let full: Vec<f64> = runs.iter().map(|c| select(c).map_or(f64::NAN, |c| c.metric)).collect();
    let best_member = (0..n_members)
        .filter(|&i| !members[i].is_nan())
        .fold(None, |b: Option<usize>, i| match b {
            Some(j) if members[j] >= members[i] => Some(j),
            _ => Some(i),
        })
        .unwrap_or(0);
    MemberRow {
        problem: problem.to_string(),
        members,
        no_restructure: mean(&no_restructure),
        full: mean(&full),
        best_member,
    }
}

/// Runs `portfolio` `repetitions` times on every problem.
pub fn member_analysis(
    portfolio: &Portfolio,
    problems: &[(BenchmarkId, RunBudget)],
    repetitions: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<MemberRow>, CliError> {
    if repetitions == 0 {
        return Err(CliError::Usage("repetitions must be at least 1".into()));
    }
    portfolio.validate()?;
    let contexts = problems
        .iter()
        .map(|(id, _)| HvContext::for_problem(*id))
        .collect::<Result<Vec<_>, _>>()?;
    let tasks: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|pi| (0..repetitions).map(move |r| (pi, r)))
        .collect();
    let results = with_workers(workers, || {
        Execution::Parallel.map(&tasks, |&(pi, rep)| {
            let (id, budget) = problems[pi];
            run_pap_with(
                portfolio,
                &Benchmark::new(id),
                &contexts[pi],
                budget,
                run_seed(seed, pi, rep),
                Execution::Sequential,
            )
            .map(|r| r.candidates)
        })
    });
    let mut per_problem: Vec<Vec<Vec<Candidate>>> = vec![Vec::new(); problems.len()];
    for (&(pi, _), r) in tasks.iter().zip(results) {
        per_problem[pi].push(r?);
    }
    Ok(problems
        .iter()
        .zip(per_problem)
        .map(|((id, _), runs)| member_row(&id.to_string(), portfolio.len(), &runs))
        .collect())
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    problem: &'a str,
    column: String,
    ihvr: f64,
    best_member: bool,
}

/// Long-format rows: one per (problem, column).
pub fn write_member_csv(path: &std::path::Path, rows: &[MemberRow]) -> Result<(), CliError> {
    let mut out = Vec::new();
    for r in rows {
        for (i, v) in r.members.iter().enumerate() {
            out.push(CsvRow {
                problem: &r.problem,
                column: format!("member_{i}"),
                ihvr: *v,
                best_member: i == r.best_member,
            });
        }
        out.push(CsvRow {
            problem: &r.problem,
            column: "no_restructure".into(),
            ihvr: r.no_restructure,
            best_member: false,
        });
        out.push(CsvRow {
            problem: &r.problem,
            column: "full".into(),
            ihvr: r.full,
            best_member: false,
        });
    }
    crate::experiment::write_csv(path, &out)
}

/// Text table; `_` marks the best member and `*` the best column of a row.
pub fn format_member_table(rows: &[MemberRow]) -> String {
    let k = rows.first().map_or(0, |r| r.members.len());
    let mut out = format!("{:<8}", "problem");
    for i in 0..k {
        out.push_str(&format!(" | {:>9}", format!("m{i}")));
    }
    out.push_str(&format!(" | {:>9} | {:>9}\n", "no-restr", "PAP"));
    for r in rows {
        let best = r.full.max(r.no_restructure);
        let cell = |v: f64, member: bool| {
            let tag = if v == best {
                "*"
            } else if member {
                "_"
            } else {
                " "
            };
            format!(" | {v:>8.4}{tag}")
        };
        out.push_str(&format!("{:<8}", r.problem));
        for (i, v) in r.members.iter().enumerate() {
            out.push_str(&cell(*v, i == r.best_member));
        }
        out.push_str(&cell(r.no_restructure, false));
        out.push_str(&cell(r.full, false));
        out.push('\n');
    }
    out
}
