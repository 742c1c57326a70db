use moeapap::pareto::{compare, Dominance};
use moeapap::problems::{spec, Benchmark, BenchmarkId, Problem};
use rand::Rng;

fn random_x(b: &Benchmark, rng: &mut impl Rng) -> Vec<f64> {
    b.bounds().iter().map(|&(l, u)| rng.gen_range(l..=u)).collect()
}

#[test]
fn objective_boxes_contain_random_evaluations() {
    let mut rng = moeapap::rng::seeded(2024);
    for id in BenchmarkId::all() {
        let s = spec(id).unwrap();
        let b = Benchmark::new(id);
        for _ in 0..10_000 {
            let f = b.evaluate(&random_x(&b, &mut rng));
            for (k, v) in f.iter().enumerate() {
                assert!(*v <= s.objective_box.upper[k], "{id}: f{k} = {v} above upper bound");
            }
        }
        assert!(s
            .objective_box
            .ideal
            .iter()
            .zip(&s.objective_box.upper)
            .all(|(l, u)| l < u));
    }
}

#[test]
fn reference_fronts_are_not_dominated_by_random_points() {
    let mut rng = moeapap::rng::seeded(99);
    for id in BenchmarkId::all() {
        let s = spec(id).unwrap();
        let b = Benchmark::new(id);
        for _ in 0..1_000 {
            let f = b.evaluate(&random_x(&b, &mut rng));
            // Shift the random point by a small tolerance to absorb rounding.
            let shifted: Vec<f64> = f.iter().map(|v| v + 1e-9).collect();
            for p in &s.reference_front {
                assert_ne!(
                    compare(&shifted, p),
                    Dominance::ADominates,
                    "{id}: random {f:?} dominates front point {p:?}"
                );
            }
        }
    }
}

#[test]
fn reference_fronts_are_mutually_nondominated() {
    for id in BenchmarkId::all() {
        let s = spec(id).unwrap();
        assert!(moeapap::pareto::is_mutually_nondominated(&s.reference_front), "{id}");
        assert!(s.reference_front.iter().all(|p| p.len() == s.m));
    }
}
