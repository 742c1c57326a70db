//! One test per acceptance criterion. Each prints a `PASS`/`FAIL` line
//! (visible with `--nocapture`) before asserting.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use moeapap::algorithms::{run, AlgorithmConfig, RunBudget};
use moeapap::construction::{construct, ConfigSpace, ConstructSettings, Evaluator, TrainingSet};
use moeapap::indicators::{hypervolume, igd, HvContext};
use moeapap::portfolio::{combine, restructure, run_pap, Portfolio, Source};
use moeapap::problems::{spec, Benchmark, BenchmarkId};
use moeapap::SolutionSet;
use moeapap_cli::experiment::{manifest_problems, run_experiment, write_csv, Entry, ExperimentConfig, Indicator};
use moeapap_cli::members::{member_analysis, member_row};
use moeapap_cli::stats::wilcoxon_rank_sum;
use moeapap_cli::{builtin_algorithm, load_manifest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, pass: bool, detail: String) {
    println!("{} criterion {n}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn id(s: &str) -> BenchmarkId {
    s.parse().unwrap()
}

fn weakly_dominated_by_other(p: &[f64], q: &[f64]) -> bool {
    q.iter().zip(p).all(|(a, b)| a <= b) && q.iter().zip(p).any(|(a, b)| a < b)
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|v| (v + 0.0).to_bits()).collect()
}

#[test]
fn criterion_1_restructure_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut mismatches, mut duplicates) = (0, 0);
    for _ in 0..500 {
        let m = rng.gen_range(2..=3);
        // A coarse grid on some instances forces ties and exact duplicates.
        let coarse = rng.gen_bool(0.5);
        let sets: Vec<SolutionSet> = (0..rng.gen_range(1..=6))
            .map(|_| {
                let n = rng.gen_range(1..=100);
                SolutionSet::from_objectives(
                    (0..n)
                        .map(|_| {
                            // Points near the simplex keep the fronts large.
                            let p: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
                            let s: f64 = p.iter().sum();
                            p.iter()
                                .map(|v| {
                                    if coarse {
                                        (v / s * 20.0).round() / 20.0
                                    } else {
                                        v / s + rng.gen::<f64>() * 0.01
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                )
            })
            .collect();
        let union: Vec<Vec<f64>> = sets.iter().flat_map(|s| s.objective_vectors()).collect();
        let mut expected: Vec<Vec<u64>> = union
            .iter()
            .filter(|p| !union.iter().any(|q| weakly_dominated_by_other(p, q)))
            .map(|p| key(p))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        expected.sort();
        let got = restructure(&sets, usize::MAX).unwrap();
        let mut got: Vec<Vec<u64>> = got.objective_vectors().iter().map(|p| key(p)).collect();
        got.sort();
        duplicates += union.len() - union.iter().map(|p| key(p)).collect::<HashSet<_>>().len();
        if got != expected {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    report(
        1,
        mismatches == 0 && t < Duration::from_secs(10),
        format!(
            "{mismatches} mismatches over 500 instances ({duplicates} duplicate points) in {:.2}s",
            t.as_secs_f64()
        ),
    );
}

fn rectangle_union(points: &[Vec<f64>], r: &[f64]) -> f64 {
    let inside: Vec<&Vec<f64>> = points.iter().filter(|p| p[0] < r[0] && p[1] < r[1]).collect();
    let mut xs: Vec<f64> = inside.iter().map(|p| p[0]).chain([r[0]]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let low = inside
            .iter()
            .filter(|p| p[0] <= w[0])
            .map(|p| p[1])
            .fold(r[1], f64::min);
        area += (w[1] - w[0]) * (r[1] - low);
    }
    area
}

fn monte_carlo(points: &[Vec<f64>], r: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let hits = (0..samples)
        .filter(|_| {
            let q: Vec<f64> = r.iter().map(|hi| rng.gen::<f64>() * hi).collect();
            points.iter().any(|p| p.iter().zip(&q).all(|(a, b)| a <= b))
        })
        .count();
    let vol: f64 = r.iter().product();
    let frac = hits as f64 / samples as f64;
    (frac * vol, vol * (frac * (1.0 - frac) / samples as f64).sqrt())
}

#[test]
fn criterion_2_hypervolume_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=100);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let r = [1.0, 1.0];
        let exact = rectangle_union(&pts, &r);
        let hv = hypervolume(&pts, &r).unwrap();
        worst = worst.max((hv - exact).abs() / exact.max(f64::MIN_POSITIVE));
    }
    let mut outside = 0;
    let mut worst_z = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=30);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let r = [1.0, 1.0, 1.0];
        let hv = hypervolume(&pts, &r).unwrap();
        let (est, se) = monte_carlo(&pts, &r, 1_000_000, &mut rng);
        let z = (hv - est).abs() / se;
        worst_z = worst_z.max(z);
        if z > 3.0 {
            outside += 1;
        }
    }
    let t = start.elapsed();
    report(
        2,
        worst <= 1e-12 && outside == 0 && t < Duration::from_secs(120),
        format!(
            "2D worst relative error {worst:.1e}; 3D {outside}/100 beyond 3 SE (max {worst_z:.2} SE) in {:.1}s",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_output_dominates_members_and_omega_grows() {
    let space = ConfigSpace::full();
    let problems = ["ZDT1", "ZDT2", "ZDT3", "DTLZ2", "UF1", "WFG4"];
    let budget = RunBudget::new(30, 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut below_member, mut omega_drops, mut checks) = (0, 0, 0);
    let mut drops = Vec::new();
    for r in 0..20 {
        let pid = id(problems[rng.gen_range(0..problems.len())]);
        let members: Vec<AlgorithmConfig> = (0..4)
            .map(|_| {
                let sub = &space.subspaces[rng.gen_range(0..space.subspaces.len())];
                sub.decode(&sub.sample(&mut rng))
            })
            .collect();
        let seed = rng.gen();
        let problem = Benchmark::new(pid);
        let ctx = HvContext::for_problem(pid).unwrap();
        let mut prev: Option<f64> = None;
        for k in 1..=members.len() {
            let p = Portfolio::new(format!("run{r}"), members[..k].to_vec()).unwrap();
            let omega = match run_pap(&p, &problem, &ctx, budget, seed) {
                Ok(res) => {
                    checks += 1;
                    if (0..k).filter_map(|i| res.member_metric(i)).any(|m| res.metric() < m) {
                        below_member += 1;
                    }
                    res.metric()
                }
                // No member produced a set: Ω of the empty portfolio.
                Err(moeapap::Error::AllMembersFailed(_)) => 0.0,
                Err(e) => panic!("{e}"),
            };
            if let Some(before) = prev {
                if omega < before {
                    omega_drops += 1;
                    drops.push(format!("{pid} run {r} k={k}: {before:.6} -> {omega:.6}"));
                }
            }
            prev = Some(omega);
        }
    }
    for d in &drops {
        println!("  Ω decreased: {d}");
    }
    report(
        3,
        below_member == 0 && omega_drops == 0,
        format!(
            "{below_member} outputs below a member over {checks} runs; {omega_drops} Ω decreases when adding a member"
        ),
    );
}

#[test]
fn criterion_4_construction_monotonicity() {
    let start = Instant::now();
    let ids = [id("ZDT1"), id("ZDT2"), id("DTLZ2")];
    let mut bad = Vec::new();
    let mut insertions = 0;
    let mut removals = 0;
    for seed in [1, 2] {
        let training = TrainingSet::uniform(&ids, RunBudget::new(20, 30).unwrap(), &[11, 12]).unwrap();
        let eval = Evaluator::new(training).unwrap();
        let mut settings = ConstructSettings::new(4, 4, seed);
        settings.searches_per_iter = 2;
        let (_, rep) = construct(&ConfigSpace::toy(), &eval, settings).unwrap();
        for round in &rep.rounds {
            if let Some(after) = round.omega_inserted {
                insertions += 1;
                if !(after > round.omega_before) {
                    bad.push(format!(
                        "seed {seed} round {}: insertion {} -> {after}",
                        round.round, round.omega_before
                    ));
                }
            }
            for rem in &round.removals {
                removals += 1;
                if rem.omega_after < rem.omega_before {
                    bad.push(format!(
                        "seed {seed} round {}: removal {} -> {}",
                        round.round, rem.omega_before, rem.omega_after
                    ));
                }
            }
        }
    }
    let t = start.elapsed();
    report(
        4,
        bad.is_empty() && insertions > 0 && t < Duration::from_secs(300),
        format!(
            "{insertions} insertions, {removals} removals, violations {bad:?} in {:.1}s",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_member_analysis_ordering() {
    let manifest = load_manifest("train").unwrap();
    let problems: Vec<_> = manifest_problems(&manifest)
        .unwrap()
        .into_iter()
        .map(|(pid, _)| (pid, RunBudget::new(50, 15).unwrap()))
        .collect();
    let rows = member_analysis(&Portfolio::published(), &problems, 2, manifest.seed, 0).unwrap();
    let broken: Vec<&str> = rows
        .iter()
        .filter(|r| !(r.full >= r.no_restructure && r.no_restructure >= r.members[r.best_member]))
        .map(|r| r.problem.as_str())
        .collect();

    let ctx = HvContext::for_problem(id("ZDT1")).unwrap();
    let slice = |lo: f64, hi: f64| {
        SolutionSet::from_objectives(
            (0..50)
                .map(|i| lo + (hi - lo) * i as f64 / 49.0)
                .map(|f1| vec![f1, 1.0 - f1.sqrt()])
                .collect(),
        )
    };
    let (left, right) = (slice(0.0, 0.5), slice(0.5, 1.0));
    let combined = combine(&[Some(&left), Some(&right)], &ctx, 100).unwrap();
    let fixture = member_row("ZDT1", 2, std::slice::from_ref(&combined.candidates));
    let strict = fixture.full > fixture.no_restructure && combined.chosen.source == Source::Restructure;
    report(
        5,
        broken.is_empty() && rows.len() == problems.len() && strict,
        format!(
            "{} rows, ordering broken on {broken:?}; fixture full {:.4} vs no-restructure {:.4}",
            rows.len(),
            fixture.full,
            fixture.no_restructure
        ),
    );
}

fn mean_indicators(config: &AlgorithmConfig, pid: BenchmarkId, seeds: u64) -> (f64, f64) {
    let s = spec(pid).unwrap();
    let ctx = HvContext::for_problem(pid).unwrap();
    let problem = Benchmark::new(pid);
    let budget = RunBudget::new(100, 250).unwrap();
    let (mut g, mut h) = (0.0, 0.0);
    for seed in 0..seeds {
        let set = run(config, &problem, budget, seed).unwrap().set;
        g += igd(set.members(), &s.reference_front);
        h += ctx.hv(set.members()).unwrap();
    }
    (g / seeds as f64, h / seeds as f64)
}

#[test]
fn criterion_6_zdt1_igd_and_hv_ordering() {
    let start = Instant::now();
    let nsga2 = builtin_algorithm("nsga2").unwrap();
    let moead = builtin_algorithm("moead").unwrap();
    let (igd_nsga2, _) = mean_indicators(&nsga2, id("ZDT1"), 30);
    let (igd_moead, _) = mean_indicators(&moead, id("ZDT1"), 30);

    // A short NSGA-II run gives a third, clearly weaker, point of comparison.
    let short = |pid: BenchmarkId| {
        let s = spec(pid).unwrap();
        let ctx = HvContext::for_problem(pid).unwrap();
        let (mut g, mut h) = (0.0, 0.0);
        for seed in 0..10 {
            let set = run(&nsga2, &Benchmark::new(pid), RunBudget::new(100, 10).unwrap(), seed)
                .unwrap()
                .set;
            g += igd(set.members(), &s.reference_front);
            h += ctx.hv(set.members()).unwrap();
        }
        (g / 10.0, h / 10.0)
    };
    let mut discordant = Vec::new();
    for p in ["ZDT1", "ZDT2", "DTLZ2"] {
        let pid = id(p);
        let runs = [
            mean_indicators(&nsga2, pid, 10),
            mean_indicators(&moead, pid, 10),
            short(pid),
        ];
        for i in 0..runs.len() {
            for j in i + 1..runs.len() {
                let (gi, hi) = runs[i];
                let (gj, hj) = runs[j];
                if (gi < gj) != (hi > hj) {
                    discordant.push(format!("{p} {i} vs {j}: IGD {gi:.4e}/{gj:.4e} HV {hi:.6}/{hj:.6}"));
                }
            }
        }
    }
    let t = start.elapsed();
    report(
        6,
        igd_nsga2 <= 2e-2 && igd_moead <= 2e-2 && discordant.is_empty() && t < Duration::from_secs(600),
        format!(
            "mean IGD NSGA-II {igd_nsga2:.3e}, MOEA/D {igd_moead:.3e}; HV/IGD discordant pairs {discordant:?} in {:.1}s",
            t.as_secs_f64()
        ),
    );
}

fn permutation_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let ranks: Vec<f64> = pooled
        .iter()
        .map(|v| {
            let below = pooled.iter().filter(|w| *w < v).count() as f64;
            let equal = pooled.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let mean = a.len() as f64 * (n as f64 + 1.0) / 2.0;
    let observed: f64 = ranks[..a.len()].iter().sum::<f64>() - mean;
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        total += 1;
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (s - mean).abs() >= observed.abs() - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

#[test]
fn criterion_7_wilcoxon_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 3..=9 {
        for m in 3..=12 - n {
            for _ in 0..5 {
                let draw = |rng: &mut ChaCha8Rng, k: usize| -> Vec<f64> {
                    (0..k).map(|_| rng.gen_range(0..6) as f64).collect()
                };
                let (a, b) = (draw(&mut rng, n), draw(&mut rng, m));
                let got = wilcoxon_rank_sum(&a, &b).unwrap();
                worst = worst.max((got.p_value - permutation_p(&a, &b)).abs());
                cases += 1;
            }
        }
    }
    let p = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap().p_value;
    report(
        7,
        worst < 1e-12 && (p - 0.1).abs() < 1e-12,
        format!("{cases} cases, max deviation from permutation oracle {worst:.1e}; triples p = {p}"),
    );
}

#[test]
fn criterion_8_determinism_and_round_trip() {
    let cfg = ExperimentConfig {
        entries: vec![
            Entry::base(
                "nsga2",
                Portfolio::new("nsga2", vec![builtin_algorithm("nsga2").unwrap()]).unwrap(),
            ),
            Entry::base("published", Portfolio::published()),
        ],
        problems: vec![
            (id("ZDT1"), RunBudget::new(50, 10).unwrap()),
            (id("DTLZ2"), RunBudget::new(50, 10).unwrap()),
        ],
        repetitions: 3,
        indicators: vec![Indicator::Hv, Indicator::Igd, Indicator::Ihvr],
        seed: 8,
        workers: 0,
        record_wall: false,
    };
    let dir = tempfile::tempdir().unwrap();
    let csvs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("{i}.csv"));
            write_csv(&path, &run_experiment(&cfg).unwrap()).unwrap();
            std::fs::read(path).unwrap()
        })
        .collect();
    let published = Portfolio::published();
    let back = Portfolio::from_toml(&published.to_toml().unwrap()).unwrap();
    let text = published.to_toml().unwrap();
    let precise = text.contains("1.072") && text.contains("0.026");
    report(
        8,
        csvs[0] == csvs[1] && back == published && precise,
        format!(
            "CSV identical: {}; portfolio round trip: {}; F/CR preserved: {precise}",
            csvs[0] == csvs[1],
            back == published
        ),
    );
}
