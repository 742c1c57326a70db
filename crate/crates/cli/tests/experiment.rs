use std::process::Command;

use moeapap::algorithms::{AlgorithmConfig, RunBudget};
use moeapap::indicators::HvContext;
use moeapap::portfolio::{combine, Portfolio};
use moeapap::problems::{Benchmark, BenchmarkId};
use moeapap::SolutionSet;
use moeapap_cli::experiment::{
    compare, run_experiment, run_once, summarize, write_csv, Entry, ExperimentConfig, Indicator, Variant,
};
use moeapap_cli::members::{member_analysis, member_row};
use moeapap_cli::{load_manifest, resolve_portfolio, CliError};

fn zdt1() -> BenchmarkId {
    "ZDT1".parse().unwrap()
}

fn nsga2() -> Portfolio {
    Portfolio::new("nsga2", vec![AlgorithmConfig::nsga2_sbx(20.0, 20.0)]).unwrap()
}

fn config(entries: Vec<Entry>, reps: usize, workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        entries,
        problems: vec![
            (zdt1(), RunBudget::new(20, 10).unwrap()),
            ("DTLZ2".parse().unwrap(), RunBudget::new(20, 10).unwrap()),
        ],
        repetitions: reps,
        indicators: vec![Indicator::Hv, Indicator::Igd, Indicator::Ihvr],
        seed: 7,
        workers,
        record_wall: false,
    }
}

#[test]
fn single_run_gives_single_row_with_zero_variance() {
    let mut cfg = config(vec![Entry::base("nsga2", nsga2())], 1, 1);
    cfg.problems.truncate(1);
    cfg.indicators = vec![Indicator::Igd];
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].variance, 0.0);
    assert_eq!(summary[0].runs, 1);
}

#[test]
fn row_count_and_csv_are_reproducible() {
    let entries = || {
        vec![
            Entry::base("nsga2", nsga2()),
            Entry::base("moead", resolve_portfolio("moead").unwrap()),
        ]
    };
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&config(entries(), 3, 1)).unwrap();
    let b = run_experiment(&config(entries(), 3, 4)).unwrap();
    assert_eq!(a.len(), 2 * 2 * 3 * 3);
    write_csv(&dir.path().join("a.csv"), &a).unwrap();
    write_csv(&dir.path().join("b.csv"), &b).unwrap();
    let (ta, tb) = (
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap(),
    );
    assert_eq!(ta, tb);
    let header = String::from_utf8(ta).unwrap();
    assert!(header.starts_with("run_id,seed,algorithm,problem,variant,indicator,value,wall_ms\n"));
}

#[test]
fn algorithms_share_seeds_per_problem_and_repetition() {
    let rows = run_experiment(&config(
        vec![Entry::base("a", nsga2()), Entry::base("b", nsga2())],
        3,
        0,
    ))
    .unwrap();
    let (a, b): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.algorithm == "a");
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.seed, y.seed);
        assert_eq!(x.value, y.value);
    }
    let (cmp, tallies) = compare(&rows, "a").unwrap();
    assert!(cmp.iter().all(|c| c.p_value == 1.0));
    assert!(tallies.iter().all(|t| t.wdl.draw == 2));
}

#[test]
fn nsize_runs_enlarged_population_and_cuts_back() {
    let id = zdt1();
    let ctx = HvContext::for_problem(id).unwrap();
    let entry = Entry {
        name: "n".into(),
        portfolio: nsga2(),
        variant: Variant::Nsize,
        factor: 6,
    };
    let base = RunBudget::new(100, 60).unwrap();
    let (output, run) = run_once(&entry, &Benchmark::new(id), &ctx, base, 3).unwrap();
    let member = run.members[0].as_ref().unwrap();
    assert_eq!(member.pop_size, 600);
    assert_eq!(member.evaluations, 600 * 61);
    assert!(run.output.len() > 100, "enlarged front has {} points", run.output.len());
    assert_eq!(output.len(), 100);

    let ngen = Entry {
        variant: Variant::Ngen,
        ..entry
    };
    let (_, run) = run_once(&ngen, &Benchmark::new(id), &ctx, base, 3).unwrap();
    assert_eq!(run.members[0].as_ref().unwrap().evaluations, 100 * (6 * 60 + 1));
}

#[test]
fn invalid_inputs_fail_before_running() {
    let mut cfg = config(vec![Entry::base("x", nsga2())], 0, 1);
    assert!(matches!(run_experiment(&cfg), Err(CliError::Usage(_))));
    cfg.repetitions = 1;
    cfg.entries.push(Entry::base("x", nsga2()));
    assert!(matches!(run_experiment(&cfg), Err(CliError::Usage(_))));
    assert!(load_manifest("/nonexistent/manifest.toml").is_err());
    assert!("FOO".parse::<Variant>().is_err());
}

#[test]
fn default_manifests_load() {
    let train = load_manifest("train").unwrap();
    let test = load_manifest("test").unwrap();
    assert_eq!(train.problems.len(), 16);
    assert_eq!(test.problems.len(), 17);
    for m in [&train, &test] {
        let mut ids: Vec<_> = m.problems.iter().map(|p| p.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), m.problems.len());
    }
    let t = train.training_set(1, 1).unwrap();
    let uf9 = t.problems.iter().find(|p| p.id.to_string() == "UF9").unwrap();
    assert_eq!(uf9.budget, RunBudget::new(150, 600).unwrap());
    assert!(t.problems.iter().all(|p| p.seeds.len() == 3));
}

#[test]
fn member_columns_are_ordered() {
    let p = Portfolio::new(
        "two",
        vec![
            AlgorithmConfig::nsga2_sbx(20.0, 20.0),
            resolve_portfolio("moead").unwrap().members[0],
        ],
    )
    .unwrap();
    let problems = vec![
        (zdt1(), RunBudget::new(20, 10).unwrap()),
        ("ZDT3".parse().unwrap(), RunBudget::new(20, 10).unwrap()),
    ];
    for r in member_analysis(&p, &problems, 3, 1, 0).unwrap() {
        assert!(r.full >= r.no_restructure);
        assert!(r.no_restructure >= r.members[r.best_member]);
        assert!(r.members.iter().all(|m| *m <= r.members[r.best_member]));
    }
    for r in member_analysis(&nsga2(), &problems, 2, 1, 0).unwrap() {
        assert_eq!(r.members[0], r.no_restructure);
        assert_eq!(r.no_restructure, r.full);
    }
}

#[test]
fn complementary_fronts_favor_restructure() {
    let ctx = HvContext::for_problem(zdt1()).unwrap();
    let slice = |lo: f64, hi: f64| {
        SolutionSet::from_objectives(
            (0..40)
                .map(|i| lo + (hi - lo) * i as f64 / 39.0)
                .map(|f1| vec![f1, 1.0 - f1.sqrt()])
                .collect(),
        )
    };
    let (left, right) = (slice(0.0, 0.5), slice(0.5, 1.0));
    let runs: Vec<_> = (0..3)
        .map(|_| combine(&[Some(&left), Some(&right)], &ctx, 100).unwrap().candidates)
        .collect();
    let row = member_row("ZDT1", 2, &runs);
    assert!(row.full > row.no_restructure);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moeapap"))
}

#[test]
fn cli_reports_structured_errors() {
    let out = bin()
        .args(["evaluate", "--portfolio", "missing.toml", "--out", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "version = 1\nname = \"x\"\n").unwrap();
    let out = bin()
        .args([
            "evaluate",
            "--portfolio",
            bad.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .args(["evaluate", "--manifest", "/nonexistent.toml", "--out", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cli_evaluate_writes_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(&manifest, "version = 1\n[[problems]]\nid = \"ZDT2\"\n").unwrap();
    let run = |out: &str| {
        let status = bin()
            .args([
                "evaluate",
                "--portfolio",
                "nsga2",
                "--manifest",
                manifest.to_str().unwrap(),
            ])
            .args(["--repetitions", "3", "--generations", "5", "--pop-size", "12", "--out"])
            .arg(dir.path().join(out))
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(dir.path().join(out).join("runs.csv")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 3 * 3);
}
