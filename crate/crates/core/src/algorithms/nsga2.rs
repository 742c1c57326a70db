use rand::Rng;

use super::{evaluate, final_set, pm_rate, random_individual, AlgorithmConfig, Observer, OperatorConfig, RunBudget};
use crate::error::{Error, Result};
use crate::operators::{de_mutation, pick_donors, polynomial_mutation, sbx_crossover, PmParams, SbxParams};
use crate::pareto::{crowding_distance, crowding_truncate_indices, fast_nondominated_sort, Individual, SolutionSet};
use crate::problems::Problem;
use crate::rng::Rng as Stream;

struct Ranked {
    rank: Vec<usize>,
    crowding: Vec<f64>,
    first_front: Vec<usize>,
}

fn rank_population(pop: &[Individual]) -> Ranked {
    let fronts = fast_nondominated_sort(pop);
    let mut rank = vec![0; pop.len()];
    let mut crowding = vec![0.0; pop.len()];
    for (r, front) in fronts.iter().enumerate() {
        let members: Vec<&Individual> = front.iter().map(|&i| &pop[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members)) {
            rank[i] = r;
            crowding[i] = d;
        }
    }
    Ranked {
        rank,
        crowding,
        first_front: fronts.into_iter().next().unwrap_or_default(),
    }
}

fn tournament(ranked: &Ranked, rng: &mut Stream) -> usize {
    let n = ranked.rank.len();
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let better = |x: usize, y: usize| {
        ranked.rank[x] < ranked.rank[y] || (ranked.rank[x] == ranked.rank[y] && ranked.crowding[x] > ranked.crowding[y])
    };
    if better(b, a) {
        b
    } else {
        a
    }
}

/// (mu + lambda) survival: whole fronts first, crowding truncation on the last one.
fn survive(combined: Vec<Individual>, n: usize) -> Result<Vec<Individual>> {
    let fronts = fast_nondominated_sort(&combined);
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let members: Vec<&Individual> = front.iter().map(|&i| &combined[i]).collect();
            let chosen = crowding_truncate_indices(&members, n - keep.len())?;
            keep.extend(chosen.into_iter().map(|j| front[j]));
        }
        if keep.len() == n {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    Ok(keep.into_iter().filter_map(|i| slots[i].take()).collect())
}

pub(super) fn run(
    config: &AlgorithmConfig,
    problem: &dyn Problem,
    budget: RunBudget,
    rng: &mut Stream,
    observer: Observer<'_>,
) -> Result<(SolutionSet, usize, usize)> {
    let n = budget.pop_size;
    match &config.operator {
        OperatorConfig::SbxPm { .. } if n < 4 => {
            return Err(Error::config(format!(
                "NSGA-II with SBX needs a population of at least 4, got {n}"
            )))
        }
        OperatorConfig::De(de) if n < super::de_needs(de) => {
            return Err(Error::config(format!(
                "NSGA-II with {}/{} needs a population of at least {}, got {n}",
                de.variant.label(),
                de.p,
                super::de_needs(de)
            )))
        }
        _ => {}
    }
    let bounds = problem.bounds().to_vec();
    let mut pop: Vec<Individual> = (0..n).map(|_| random_individual(problem, rng)).collect();
    let mut evaluations = n;
    observer(0, &pop);
    let all: Vec<usize> = (0..n).collect();
    for gen in 1..=budget.max_generations {
        let ranked = rank_population(&pop);
        let mut offspring = Vec::with_capacity(n);
        match &config.operator {
            OperatorConfig::SbxPm { eta_sbx, eta_pm } => {
                let sbx = SbxParams::new(*eta_sbx);
                let pm = PmParams {
                    eta: *eta_pm,
                    p_m: pm_rate(problem),
                };
                while offspring.len() < n {
                    let a = tournament(&ranked, rng);
                    let b = tournament(&ranked, rng);
                    let (c1, c2) = sbx_crossover(&pop[a].x, &pop[b].x, &sbx, &bounds, rng)?;
                    for c in [c1, c2] {
                        if offspring.len() < n {
                            let y = polynomial_mutation(&c, &pm, &bounds, rng)?;
                            offspring.push(evaluate(problem, y));
                        }
                    }
                }
            }
            OperatorConfig::De(de) => {
                for i in 0..n {
                    let best = super::is_best_variant(de.variant)
                        .then(|| &pop[ranked.first_front[rng.gen_range(0..ranked.first_front.len())]].x);
                    let donors = pick_donors(&all, i, de.donor_count(), rng)?;
                    let refs: Vec<&[f64]> = donors.iter().map(|&d| pop[d].x.as_slice()).collect();
                    let trial = de_mutation(&pop[i].x, &refs, best.map(|b| b.as_slice()), de, &bounds, rng)?;
                    offspring.push(evaluate(problem, trial));
                }
            }
            OperatorConfig::Pso(_) => return Err(Error::config("NSGA-II cannot use a PSO operator")),
        }
        evaluations += offspring.len();
        pop.extend(offspring);
        pop = survive(pop, n)?;
        observer(gen, &pop);
    }
    Ok((final_set(&pop, n)?, evaluations, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_keeps_best_fronts() {
        let pts = [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5], [2.0, 2.0], [3.0, 3.0]];
        let pop: Vec<Individual> = pts.iter().map(|p| Individual::new(vec![], p.to_vec())).collect();
        let kept = survive(pop, 4).unwrap();
        assert_eq!(kept.len(), 4);
        assert!(kept.iter().all(|i| i.f != vec![3.0, 3.0]));
    }
}
