use rand::seq::SliceRandom;
use rand::Rng;

use super::{evaluate, final_set, pm_rate, random_individual, AlgorithmConfig, Observer, OperatorConfig, RunBudget};
use crate::error::{Error, Result};
use crate::operators::{de_mutation, pick_donors, polynomial_mutation, sbx_crossover, PmParams, SbxParams};
use crate::pareto::{Individual, SolutionSet};
use crate::problems::Problem;
use crate::rng::Rng as Stream;

const MIN_WEIGHT: f64 = 1e-6;

/// Tchebycheff scalarization `max_i w_i |f_i - z_i|`; zero weights count as 1e-6.
pub fn tchebycheff(f: &[f64], w: &[f64], z: &[f64]) -> f64 {
    f.iter()
        .zip(w)
        .zip(z)
        .map(|((fi, wi), zi)| wi.max(MIN_WEIGHT) * (fi - zi).abs())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All weight vectors with components `k / h` summing to one.
pub fn simplex_lattice(m: usize, h: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, h: usize, prefix: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if m == 1 {
            prefix.push(left as f64 / h as f64);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k as f64 / h as f64);
            rec(m - 1, left - k, h, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, h, h, &mut Vec::new(), &mut out);
    out
}

fn lattice_size(m: usize, h: usize) -> usize {
    // C(h + m - 1, m - 1)
    (1..m).fold(1usize, |acc, i| acc * (h + i) / i)
}

/// Weight vectors for `m` objectives: `pop` evenly spaced vectors for two
/// objectives, otherwise the largest simplex lattice of size at most `pop`.
pub fn weight_vectors(m: usize, pop: usize) -> Result<Vec<Vec<f64>>> {
    match m {
        0 => Err(Error::contract("no objectives")),
        1 => Ok(vec![vec![1.0]; pop]),
        2 => {
            if pop < 2 {
                return Err(Error::config("MOEA/D needs at least 2 subproblems"));
            }
            Ok((0..pop)
                .map(|i| {
                    let a = i as f64 / (pop - 1) as f64;
                    vec![a, 1.0 - a]
                })
                .collect())
        }
        _ => {
            let mut h = 1;
            if lattice_size(m, 1) > pop {
                return Err(Error::config(format!(
                    "population {pop} too small for a {m}-objective lattice"
                )));
            }
            while lattice_size(m, h + 1) <= pop {
                h += 1;
            }
            Ok(simplex_lattice(m, h))
        }
    }
}

fn neighborhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|w| {
            let mut idx: Vec<(f64, usize)> = weights
                .iter()
                .enumerate()
                .map(|(j, v)| (w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), j))
                .collect();
            idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            idx.into_iter().take(t).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Replaces up to `n_r` members of `order`, in order, that the child strictly
/// improves on their own subproblem. Returns how many were replaced.
fn replace_neighbors(
    pop: &mut [Individual],
    child: &Individual,
    order: &[usize],
    weights: &[Vec<f64>],
    z: &[f64],
    n_r: usize,
) -> usize {
    let mut replaced = 0;
    for &j in order {
        if replaced >= n_r {
            break;
        }
        if tchebycheff(&child.f, &weights[j], z) < tchebycheff(&pop[j].f, &weights[j], z) {
            pop[j] = child.clone();
            replaced += 1;
        }
    }
    replaced
}

pub(super) fn run(
    config: &AlgorithmConfig,
    problem: &dyn Problem,
    budget: RunBudget,
    rng: &mut Stream,
    observer: Observer<'_>,
) -> Result<(SolutionSet, usize, usize)> {
    let params = config
        .moead
        .ok_or_else(|| Error::config("MOEA/D needs Ps, n_r and neighborSize"))?;
    let weights = weight_vectors(problem.num_objectives(), budget.pop_size)?;
    let n = weights.len();
    if n != budget.pop_size {
        log::info!(
            "MOEA/D population adjusted from {} to lattice size {n}",
            budget.pop_size
        );
    }
    if params.neighbor_size > n {
        return Err(Error::config(format!(
            "neighborSize {} exceeds the population size {n}",
            params.neighbor_size
        )));
    }
    if let OperatorConfig::De(de) = &config.operator {
        if params.neighbor_size < super::de_needs(de) {
            return Err(Error::config("neighborhood too small for the DE donors"));
        }
    }
    let hoods = neighborhoods(&weights, params.neighbor_size);
    let bounds = problem.bounds().to_vec();
    let pm = |eta: f64| PmParams {
        eta,
        p_m: pm_rate(problem),
    };

    let mut pop: Vec<Individual> = (0..n).map(|_| random_individual(problem, rng)).collect();
    let mut evaluations = n;
    let m = problem.num_objectives();
    let mut z: Vec<f64> = (0..m)
        .map(|k| pop.iter().map(|p| p.f[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let everyone: Vec<usize> = (0..n).collect();
    observer(0, &pop);

    for gen in 1..=budget.max_generations {
        for i in 0..n {
            let pool: &[usize] = if rng.gen::<f64>() < params.ps {
                &hoods[i]
            } else {
                &everyone
            };
            let child_x = match &config.operator {
                OperatorConfig::SbxPm { eta_sbx, eta_pm } => {
                    let mates = pick_donors(pool, usize::MAX, 2, rng)?;
                    let (c1, _) = sbx_crossover(
                        &pop[mates[0]].x,
                        &pop[mates[1]].x,
                        &SbxParams::new(*eta_sbx),
                        &bounds,
                        rng,
                    )?;
                    polynomial_mutation(&c1, &pm(*eta_pm), &bounds, rng)?
                }
                OperatorConfig::De(de) => {
                    let donors = pick_donors(pool, i, de.donor_count(), rng)?;
                    let refs: Vec<&[f64]> = donors.iter().map(|&d| pop[d].x.as_slice()).collect();
                    de_mutation(&pop[i].x, &refs, None, de, &bounds, rng)?
                }
                OperatorConfig::Pso(_) => return Err(Error::config("MOEA/D cannot use a PSO operator")),
            };
            let child = evaluate(problem, child_x);
            evaluations += 1;
            for (zk, fk) in z.iter_mut().zip(&child.f) {
                *zk = zk.min(*fk);
            }
            let mut order = pool.to_vec();
            order.shuffle(rng);
            replace_neighbors(&mut pop, &child, &order, &weights, &z, params.n_r);
        }
        observer(gen, &pop);
    }
    Ok((final_set(&pop, n)?, evaluations, n))
}
