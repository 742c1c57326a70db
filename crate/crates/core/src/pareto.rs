//! Pareto dominance, non-dominated sorting and crowding-distance truncation.
//!
//! All objectives are minimized. Comparisons are exact: no epsilon is used
//! anywhere in this module.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of comparing two objective vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    ADominates,
    BDominates,
    Incomparable,
    Equal,
}

/// Compares two objective vectors of equal length.
pub fn compare(a: &[f64], b: &[f64]) -> Dominance {
    debug_assert_eq!(a.len(), b.len());
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
        if a_better && b_better {
            return Dominance::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::ADominates,
        (false, true) => Dominance::BDominates,
        (false, false) => Dominance::Equal,
        (true, true) => Dominance::Incomparable,
    }
}

/// Checked form of [`compare`].
pub fn dominates(a: &[f64], b: &[f64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "objective vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::contract("objective vectors must be finite"));
    }
    Ok(compare(a, b))
}

/// `true` iff `a` dominates `b`.
#[inline]
pub fn strictly_dominates(a: &[f64], b: &[f64]) -> bool {
    compare(a, b) == Dominance::ADominates
}

/// Anything that carries an objective vector.
pub trait Objectives {
    fn objectives(&self) -> &[f64];
}

impl Objectives for Vec<f64> {
    fn objectives(&self) -> &[f64] {
        self
    }
}

impl Objectives for [f64] {
    fn objectives(&self) -> &[f64] {
        self
    }
}

impl<T: Objectives + ?Sized> Objectives for &T {
    fn objectives(&self) -> &[f64] {
        (**self).objectives()
    }
}

/// An evaluated decision vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

impl Individual {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Self {
        Self { x, f }
    }
}

impl Objectives for Individual {
    fn objectives(&self) -> &[f64] {
        &self.f
    }
}

/// A mutually non-dominated set of individuals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolutionSet {
    members: Vec<Individual>,
}

impl SolutionSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Keeps the non-dominated members of `pop`.
    pub fn from_population(pop: Vec<Individual>) -> Self {
        let keep = nondominated_indices(&pop);
        let mut flags = vec![false; pop.len()];
        for i in keep {
            flags[i] = true;
        }
        let members = pop
            .into_iter()
            .zip(flags)
            .filter_map(|(ind, k)| k.then_some(ind))
            .collect();
        Self { members }
    }

    /// Wraps members the caller knows to be mutually non-dominated.
    pub(crate) fn from_nondominated(members: Vec<Individual>) -> Self {
        debug_assert!(is_mutually_nondominated(&members));
        Self { members }
    }

    /// Builds a set from bare objective vectors (decision vectors left empty).
    pub fn from_objectives(points: Vec<Vec<f64>>) -> Self {
        Self::from_population(points.into_iter().map(|f| Individual::new(Vec::new(), f)).collect())
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn num_objectives(&self) -> Option<usize> {
        self.members.first().map(|i| i.f.len())
    }

    pub fn objective_vectors(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|i| i.f.clone()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Individual> {
        self.members.iter()
    }
}

impl<'a> IntoIterator for &'a SolutionSet {
    type Item = &'a Individual;
    type IntoIter = std::slice::Iter<'a, Individual>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Indices (ascending) of the members of `pop` not dominated by any other.
///
/// Points are scanned in lexicographic order; a point can only be dominated
/// by a lexicographically smaller one, so each candidate is checked against
/// the non-dominated points retained so far.
pub fn nondominated_indices<T: Objectives>(pop: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(pop[a].objectives(), pop[b].objectives()).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let fi = pop[i].objectives();
        if !kept.iter().any(|&j| strictly_dominates(pop[j].objectives(), fi)) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Non-dominated members of `pop`. Equal objective vectors are all kept.
pub fn nondominated_filter(pop: &[Individual]) -> SolutionSet {
    let members = nondominated_indices(pop).into_iter().map(|i| pop[i].clone()).collect();
    SolutionSet { members }
}

pub fn is_mutually_nondominated<T: Objectives>(pop: &[T]) -> bool {
    for (i, a) in pop.iter().enumerate() {
        for b in &pop[i + 1..] {
            match compare(a.objectives(), b.objectives()) {
                Dominance::ADominates | Dominance::BDominates => return false,
                _ => {}
            }
        }
    }
    true
}

/// Partitions `pop` into fronts of increasing rank (Deb's fast sort).
///
/// Each inner vector lists member indices in ascending order.
pub fn fast_nondominated_sort<T: Objectives>(pop: &[T]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            match compare(pop[i].objectives(), pop[j].objectives()) {
                Dominance::ADominates => {
                    dominates_list[i].push(j);
                    dominated_by_count[j] += 1;
                }
                Dominance::BDominates => {
                    dominates_list[j].push(i);
                    dominated_by_count[i] += 1;
                }
                _ => {}
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank of every member (0 = first front).
pub fn ranks<T: Objectives>(pop: &[T]) -> Vec<usize> {
    let mut r = vec![0; pop.len()];
    for (rank, front) in fast_nondominated_sort(pop).iter().enumerate() {
        for &i in front {
            r[i] = rank;
        }
    }
    r
}

/// Crowding distance of each member of a front.
///
/// Boundary members of every objective with non-zero range get `+inf`;
/// interior members sum the normalized side lengths of their enclosing
/// cuboid. Objectives with zero range contribute nothing.
pub fn crowding_distance<T: Objectives>(front: &[T]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let m = front[0].objectives().len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| {
            front[a].objectives()[k]
                .total_cmp(&front[b].objectives()[k])
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].objectives()[k];
        let hi = front[order[n - 1]].objectives()[k];
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for w in 1..n.saturating_sub(1) {
            let i = order[w];
            if dist[i].is_finite() {
                let prev = front[order[w - 1]].objectives()[k];
                let next = front[order[w + 1]].objectives()[k];
                dist[i] += (next - prev) / range;
            }
        }
    }
    dist
}

/// Indices of the `k` members kept by iterative crowding truncation.
///
/// The member with the smallest crowding distance is dropped one at a time,
/// recomputing distances after each removal. Among equal distances the
/// member appearing last in input order goes first. Returned indices are
/// ascending.
pub fn crowding_truncate_indices<T: Objectives>(front: &[T], k: usize) -> Result<Vec<usize>> {
    if k > front.len() {
        return Err(Error::contract(format!("cannot keep {k} of {} members", front.len())));
    }
    let mut alive: Vec<usize> = (0..front.len()).collect();
    while alive.len() > k {
        let view: Vec<&[f64]> = alive.iter().map(|&i| front[i].objectives()).collect();
        let d = crowding_distance(&view);
        let mut worst = 0;
        for (pos, &v) in d.iter().enumerate() {
            if v <= d[worst] {
                worst = pos;
            }
        }
        alive.remove(worst);
    }
    Ok(alive)
}

/// Keeps `k` members of `front`, retaining extremes and sparse regions.
pub fn crowding_truncate(front: &[Individual], k: usize) -> Result<Vec<Individual>> {
    Ok(crowding_truncate_indices(front, k)?
        .into_iter()
        .map(|i| front[i].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Vec<f64>> {
        v.iter().map(|&(a, b)| vec![a, b]).collect()
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(dominates(&[1.0, 2.0], &[2.0, 3.0]), Ok(Dominance::ADominates));
        assert_eq!(dominates(&[1.0, 2.0], &[1.0, 2.0]), Ok(Dominance::Equal));
        assert_eq!(dominates(&[1.0, 3.0], &[2.0, 2.0]), Ok(Dominance::Incomparable));
        assert_eq!(dominates(&[2.0, 3.0], &[1.0, 2.0]), Ok(Dominance::BDominates));
        assert!(matches!(dominates(&[1.0], &[1.0, 2.0]), Err(Error::Contract(_))));
        assert!(dominates(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let p = pts(&[(1.0, 2.0), (2.0, 1.0), (2.0, 2.0)]);
        assert_eq!(nondominated_indices(&p), vec![0, 1]);
        assert_eq!(nondominated_indices(&pts(&[(0.0, 0.0)])), vec![0]);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(nondominated_indices(&empty).is_empty());
        // equal vectors are mutually non-dominating
        assert_eq!(nondominated_indices(&pts(&[(1.0, 1.0), (1.0, 1.0)])), vec![0, 1]);
    }

    #[test]
    fn sort_examples() {
        let chain = pts(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert_eq!(fast_nondominated_sort(&chain), vec![vec![0], vec![1], vec![2]]);
        let flat = pts(&[(0.0, 3.0), (1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(fast_nondominated_sort(&flat), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn crowding_examples() {
        let line = pts(&[(0.0, 4.0), (1.0, 3.0), (2.0, 2.0), (3.0, 1.0), (4.0, 0.0)]);
        let d = crowding_distance(&line);
        assert!(d[0].is_infinite() && d[4].is_infinite());
        assert_eq!(&d[1..4], &[1.0, 1.0, 1.0]);
        assert_eq!(crowding_truncate_indices(&line, 5).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(crowding_truncate_indices(&line, 3).unwrap(), vec![0, 2, 4]);
        assert_eq!(crowding_truncate_indices(&line, 2).unwrap(), vec![0, 4]);
        assert!(crowding_truncate_indices(&line, 6).is_err());
    }

    #[test]
    fn zero_range_objective_contributes_nothing() {
        let p = pts(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]);
        let d = crowding_distance(&p);
        assert_eq!(d[1], 1.0);
    }

    fn arb_points(max: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0u8..20, m), 0..max)
            .prop_map(|v| v.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect())
    }

    proptest! {
        #[test]
        fn antisymmetry(a in prop::collection::vec(-5.0f64..5.0, 3), b in prop::collection::vec(-5.0f64..5.0, 3)) {
            if compare(&a, &b) == Dominance::ADominates {
                prop_assert_eq!(compare(&b, &a), Dominance::BDominates);
            }
        }

        #[test]
        fn transitivity(p in arb_points(3, 3)) {
            if p.len() == 3 && strictly_dominates(&p[0], &p[1]) && strictly_dominates(&p[1], &p[2]) {
                prop_assert!(strictly_dominates(&p[0], &p[2]));
            }
        }

        #[test]
        fn filter_idempotent(p in arb_points(60, 2)) {
            let once: Vec<Vec<f64>> = nondominated_indices(&p).into_iter().map(|i| p[i].clone()).collect();
            let twice = nondominated_indices(&once);
            prop_assert_eq!(twice.len(), once.len());
        }

        #[test]
        fn truncation_is_subset_of_size_k(p in arb_points(40, 3), k in 0usize..40) {
            let k = k.min(p.len());
            let kept = crowding_truncate_indices(&p, k).unwrap();
            prop_assert_eq!(kept.len(), k);
            prop_assert!(kept.iter().all(|&i| i < p.len()));
            prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
