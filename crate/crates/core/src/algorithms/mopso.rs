use std::collections::BTreeMap;

use rand::Rng;

use super::{evaluate, final_set, random_individual, AlgorithmConfig, Observer, OperatorConfig, RunBudget};
use crate::error::{Error, Result};
use crate::operators::{pso_mutate, pso_update};
use crate::pareto::{compare, Dominance, Individual, SolutionSet};
use crate::problems::Problem;
use crate::rng::Rng as Stream;

/// Bounded non-dominated archive with an adaptive hypercube grid.
///
/// Dominated and duplicate candidates are rejected. On overflow a random
/// member of the most crowded cell is dropped; leaders are drawn by roulette
/// over occupied cells weighted by the inverse of their occupancy.
#[derive(Debug, Clone)]
pub struct GridArchive {
    members: Vec<Individual>,
    capacity: usize,
    divisions: usize,
}

impl GridArchive {
    pub fn new(capacity: usize, divisions: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity + 1),
            capacity: capacity.max(1),
            divisions: divisions.max(1),
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Offers a candidate; returns whether it entered the archive.
    pub fn insert(&mut self, cand: Individual, rng: &mut impl Rng) -> bool {
        for m in &self.members {
            if matches!(compare(&m.f, &cand.f), Dominance::ADominates | Dominance::Equal) {
                return false;
            }
        }
        self.members.retain(|m| compare(&cand.f, &m.f) != Dominance::ADominates);
        self.members.push(cand);
        if self.members.len() > self.capacity {
            let cells = self.cells();
            let crowded = cells
                .values()
                .fold(None::<&Vec<usize>>, |best, c| match best {
                    Some(b) if b.len() >= c.len() => Some(b),
                    _ => Some(c),
                })
                .cloned()
                .unwrap_or_default();
            let victim = crowded[rng.gen_range(0..crowded.len())];
            self.members.remove(victim);
        }
        true
    }

    /// Members grouped by grid cell.
    fn cells(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let m = self.members.first().map_or(0, |p| p.f.len());
        let lo: Vec<f64> = (0..m)
            .map(|k| self.members.iter().map(|p| p.f[k]).fold(f64::INFINITY, f64::min))
            .collect();
        let hi: Vec<f64> = (0..m)
            .map(|k| self.members.iter().map(|p| p.f[k]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let d = self.divisions;
        let mut cells: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.members.iter().enumerate() {
            let key = (0..m)
                .map(|k| {
                    let span = hi[k] - lo[k];
                    if span > 0.0 {
                        (((p.f[k] - lo[k]) / span * d as f64) as usize).min(d - 1)
                    } else {
                        0
                    }
                })
                .collect();
            cells.entry(key).or_default().push(i);
        }
        cells
    }

    pub fn select_leader(&self, rng: &mut impl Rng) -> Option<&Individual> {
        if self.members.is_empty() {
            return None;
        }
        let cells: Vec<Vec<usize>> = self.cells().into_values().collect();
        let total: f64 = cells.iter().map(|c| 1.0 / c.len() as f64).sum();
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = &cells[cells.len() - 1];
        for c in &cells {
            pick -= 1.0 / c.len() as f64;
            if pick <= 0.0 {
                chosen = c;
                break;
            }
        }
        Some(&self.members[chosen[rng.gen_range(0..chosen.len())]])
    }
}

pub(super) fn run(
    config: &AlgorithmConfig,
    problem: &dyn Problem,
    budget: RunBudget,
    rng: &mut Stream,
    observer: Observer<'_>,
) -> Result<(SolutionSet, usize, usize)> {
    let OperatorConfig::Pso(params) = &config.operator else {
        return Err(Error::config("MOPSO needs a PSO operator"));
    };
    let n = budget.pop_size;
    let bounds = problem.bounds().to_vec();
    let mut swarm: Vec<Individual> = (0..n).map(|_| random_individual(problem, rng)).collect();
    let mut velocity = vec![vec![0.0; bounds.len()]; n];
    let mut pbest = swarm.clone();
    let mut archive = GridArchive::new(n, params.grid_divisions);
    for p in &swarm {
        archive.insert(p.clone(), rng);
    }
    let mut evaluations = n;
    observer(0, &swarm);
    for gen in 1..=budget.max_generations {
        for i in 0..n {
            let leader = archive
                .select_leader(rng)
                .map(|l| l.x.clone())
                .unwrap_or_else(|| pbest[i].x.clone());
            let (v, x) = pso_update(&swarm[i].x, &velocity[i], &pbest[i].x, &leader, params, &bounds, rng)?;
            let x = pso_mutate(i, &x, params, gen, budget.max_generations, &bounds, rng);
            velocity[i] = v;
            swarm[i] = evaluate(problem, x);
        }
        evaluations += n;
        for i in 0..n {
            archive.insert(swarm[i].clone(), rng);
            match compare(&swarm[i].f, &pbest[i].f) {
                Dominance::ADominates => pbest[i] = swarm[i].clone(),
                Dominance::Incomparable if rng.gen::<bool>() => pbest[i] = swarm[i].clone(),
                _ => {}
            }
        }
        observer(gen, &swarm);
    }
    Ok((final_set(archive.members(), n)?, evaluations, n))
}
