//! Wilcoxon rank-sum test, summary statistics and W-D-L tallies.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::CliError;

/// Samples with `n + m` up to this size use the exact null distribution.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Sum of the (mid)ranks of the first sample.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Midranks of `values` (1-based; ties share the mean rank).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test of `a` against `b`.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum, CliError> {
    if a.len() < 3 || b.len() < 3 {
        return Err(CliError::Usage(format!(
            "rank-sum test needs at least 3 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(CliError::Usage("rank-sum test got a NaN value".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    if pooled.iter().all(|v| *v == pooled[0]) {
        return Ok(RankSum {
            statistic,
            p_value: 1.0,
            exact: true,
        });
    }
    let exact = pooled.len() <= EXACT_LIMIT;
    let p_value = if exact {
        exact_p(&ranks, a.len(), statistic)
    } else {
        normal_p(&ranks, a.len(), b.len(), statistic)
    };
    Ok(RankSum {
        statistic,
        p_value,
        exact,
    })
}

/// Two-sided p-value from the exact null distribution, whatever the
/// sample sizes.
pub fn exact_p_value(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    exact_p(&ranks, a.len(), statistic)
}

/// Enumerates the null distribution of the rank sum over all ways of
/// drawing `n` of the pooled ranks, counting by doubled ranks so midranks
/// stay integral.
fn exact_p(ranks: &[f64], n: usize, observed: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: subsets of size k with doubled sum s.
    let mut counts = vec![vec![0f64; max_sum + 1]; n + 1];
    counts[0][0] = 1.0;
    for &d in &doubled {
        for k in (1..=n).rev() {
            for s in (d..=max_sum).rev() {
                let add = counts[k - 1][s - d];
                if add != 0.0 {
                    counts[k][s] += add;
                }
            }
        }
    }
    let total: f64 = counts[n].iter().sum();
    let mean2 = n as f64 * (ranks.len() as f64 + 1.0);
    let obs_dev = (observed * 2.0 - mean2).abs();
    let extreme: f64 = counts[n]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as f64 - mean2).abs() >= obs_dev - 1e-9)
        .map(|(_, c)| c)
        .sum();
    (extreme / total).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
fn normal_p(ranks: &[f64], n: usize, m: usize, observed: f64) -> f64 {
    let big_n = (n + m) as f64;
    let (nf, mf) = (n as f64, m as f64);
    let mean = nf * (big_n + 1.0) / 2.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = nf * mf / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((observed - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance (divisor `n`).
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Draw,
    Loss,
}

/// Outcome of the baseline against an opponent on one problem.
pub fn outcome(
    baseline: &[f64],
    opponent: &[f64],
    higher_is_better: bool,
    alpha: f64,
) -> Result<(Outcome, RankSum), CliError> {
    let test = wilcoxon_rank_sum(baseline, opponent)?;
    let diff = mean(baseline) - mean(opponent);
    let better = if higher_is_better { diff > 0.0 } else { diff < 0.0 };
    let worse = if higher_is_better { diff < 0.0 } else { diff > 0.0 };
    let o = if test.p_value < alpha && better {
        Outcome::Win
    } else if test.p_value < alpha && worse {
        Outcome::Loss
    } else {
        Outcome::Draw
    };
    Ok((o, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Wdl {
    pub win: usize,
    pub draw: usize,
    pub loss: usize,
}

impl Wdl {
    pub fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Win => self.win += 1,
            Outcome::Draw => self.draw += 1,
            Outcome::Loss => self.loss += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.win + self.draw + self.loss
    }
}

impl std::fmt::Display for Wdl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}-{}", self.win, self.draw, self.loss)
    }
}

/// Per-problem samples of the baseline and one opponent.
pub struct ProblemSamples<'a> {
    pub baseline: &'a [f64],
    pub opponent: &'a [f64],
}

/// W-D-L of the baseline over a list of problems.
pub fn wdl_summary(problems: &[ProblemSamples<'_>], higher_is_better: bool) -> Result<Wdl, CliError> {
    let mut t = Wdl::default();
    for p in problems {
        t.add(outcome(p.baseline, p.opponent, higher_is_better, 0.05)?.0);
    }
    Ok(t)
}
