use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moeapap::algorithms::RunBudget;
use moeapap::construction::{
    construct, save_portfolio, ConfigSpace, ConstructSettings, Evaluator, Manifest, TrainingSet,
};
use moeapap::par::{with_workers, Execution};
use moeapap::problems::front::{box_file_text, derive_upper_bounds, round_up_bound, sample_reference_front};
use moeapap::problems::{BenchmarkId, Suite};
use moeapap_cli::experiment::{
    compare, format_table, manifest_problems, run_experiment, summarize, write_csv, Entry, ExperimentConfig, Indicator,
    Variant,
};
use moeapap_cli::members::{format_member_table, member_analysis, write_member_csv};
use moeapap_cli::{load_manifest, resolve_portfolio, CliError};

#[derive(Parser)]
#[command(
    name = "moeapap",
    version,
    about = "Parallel portfolios of multi-objective evolutionary algorithms"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a portfolio from a training manifest.
    Construct(ConstructArgs),
    /// Run one portfolio or algorithm on a manifest.
    Evaluate(EvaluateArgs),
    /// Run a portfolio against baselines and tally wins, draws and losses.
    Compare(CompareArgs),
    /// Break a portfolio's results down by member.
    AnalyzeMembers(AnalyzeArgs),
    /// Export sampled reference fronts.
    Fronts(FrontsArgs),
    /// Estimate objective upper bounds for a suite and print a box file.
    DeriveBoxes(BoxArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// `train`, `test` or a manifest path [default: `train` for construct
    /// and analyze-members, `test` otherwise].
    #[arg(long)]
    manifest: Option<String>,
    /// Override every problem's population size.
    #[arg(long)]
    pop_size: Option<usize>,
    /// Override every problem's generation count.
    #[arg(long)]
    generations: Option<usize>,
    /// Master seed [default: the manifest's seed].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Common {
    /// Loads the manifest and resolves the master seed.
    fn manifest(&self, default: &str) -> Result<(Manifest, u64), CliError> {
        let manifest = load_manifest(self.manifest.as_deref().unwrap_or(default))?;
        let seed = self.seed.unwrap_or(manifest.seed);
        Ok((manifest, seed))
    }

    fn problems(&self, manifest: &Manifest) -> Result<Vec<(BenchmarkId, RunBudget)>, CliError> {
        manifest_problems(manifest)?
            .into_iter()
            .map(|(id, b)| {
                let budget = RunBudget::new(
                    self.pop_size.unwrap_or(b.pop_size),
                    self.generations.unwrap_or(b.max_generations),
                )?;
                Ok((id, budget))
            })
            .collect()
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: Common,
    /// `full` (three foundations) or `toy` (two small grids).
    #[arg(long, default_value = "full")]
    space: String,
    /// Maximum number of members.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Searches per round.
    #[arg(long, default_value_t = 10)]
    searches: usize,
    /// Candidates evaluated per search.
    #[arg(long)]
    budget: usize,
    /// Runs per training problem.
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// Cap on insertion rounds (default 3k).
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Construction report (CSV).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// `published`, `nsga2`, `moead`, `smpso`, `omopso` or a portfolio file.
    #[arg(long, default_value = "published")]
    portfolio: String,
    #[arg(long, default_value_t = 30)]
    repetitions: usize,
    /// Comma-separated subset of HV, IGD, IHVR.
    #[arg(long, default_value = "HV,IGD,IHVR", value_delimiter = ',')]
    indicators: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Record measured wall time in the CSV (makes output non-reproducible).
    #[arg(long)]
    record_wall: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// BASE, NGEN or NSIZE.
    #[arg(long, default_value = "BASE")]
    variant: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Baselines (same forms as --portfolio); repeatable.
    #[arg(long, required = true)]
    baseline: Vec<String>,
    /// Variant applied to the baselines.
    #[arg(long, default_value = "BASE")]
    variant: String,
    /// Multiplier for NGEN/NSIZE (default: number of portfolio members).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "published")]
    portfolio: String,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FrontsArgs {
    /// Problem id or `all`.
    #[arg(long, default_value = "all")]
    problem: String,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoxArgs {
    /// ZDT, DTLZ, WFG or UF.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn indicators(names: &[String]) -> Result<Vec<Indicator>, CliError> {
    names.iter().map(|s| s.trim().parse()).collect()
}

fn run_and_write(cfg: &ExperimentConfig, out: &Path, baseline: Option<&str>) -> Result<(), CliError> {
    create_dir(out)?;
    let rows = run_experiment(cfg)?;
    write_csv(&out.join("runs.csv"), &rows)?;
    let summary = summarize(&rows);
    write_csv(&out.join("summary.csv"), &summary)?;
    for ind in &cfg.indicators {
        println!("{}", format_table(&summary, &ind.to_string()));
    }
    if let Some(b) = baseline {
        let (comparisons, tallies) = compare(&rows, b)?;
        write_csv(&out.join("comparisons.csv"), &comparisons)?;
        println!("W-D-L of {b} (rank-sum test, p < 0.05):");
        for t in tallies {
            println!("  vs {:<24} {:<5} {}", t.opponent, t.indicator, t.wdl);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct(a) => {
            let space = match a.space.as_str() {
                "full" => ConfigSpace::full(),
                "toy" => ConfigSpace::toy(),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown space {other:?} (expected full or toy)"
                    )))
                }
            };
            let (mut manifest, seed) = a.common.manifest("train")?;
            manifest.runs = a.runs;
            manifest.seed = seed;
            let mut training = manifest.training_set(1, 1)?;
            for p in &mut training.problems {
                p.budget = RunBudget::new(
                    a.common.pop_size.unwrap_or(p.budget.pop_size),
                    a.common.generations.unwrap_or(p.budget.max_generations),
                )?;
            }
            let training = TrainingSet::new(training.problems)?;
            let eval = Evaluator::new(training)?.with_execution(Execution::Parallel);
            let mut settings = ConstructSettings::new(a.k, a.budget, seed);
            settings.searches_per_iter = a.searches;
            if let Some(r) = a.max_rounds {
                settings.max_rounds = r;
            }
            let (portfolio, report) = with_workers(a.common.workers, || construct(&space, &eval, settings))?;
            save_portfolio(&portfolio, &a.out)?;
            if let Some(path) = &a.report {
                write_csv(path, &report.rows())?;
            }
            println!(
                "{} members, final omega {:.6} ({:?})",
                portfolio.len(),
                report.final_omega(),
                report.termination
            );
            for m in &portfolio.members {
                println!("  {m}");
            }
        }
        Command::Evaluate(a) => {
            let portfolio = resolve_portfolio(&a.run.portfolio)?;
            let mut entry = Entry::base(portfolio.name.clone(), portfolio);
            entry.variant = a.variant.parse::<Variant>()?;
            entry.factor = a.n;
            let (manifest, seed) = a.run.common.manifest("test")?;
            let cfg = ExperimentConfig {
                entries: vec![entry],
                problems: a.run.common.problems(&manifest)?,
                repetitions: a.run.repetitions,
                indicators: indicators(&a.run.indicators)?,
                seed,
                workers: a.run.common.workers,
                record_wall: a.run.record_wall,
            };
            run_and_write(&cfg, &a.run.out, None)?;
        }
        Command::Compare(a) => {
            let portfolio = resolve_portfolio(&a.run.portfolio)?;
            let variant = a.variant.parse::<Variant>()?;
            let n = a.n.unwrap_or(portfolio.len());
            let main = Entry::base(portfolio.name.clone(), portfolio);
            let mut entries = vec![main];
            for b in &a.baseline {
                let p = resolve_portfolio(b)?;
                let name = if variant == Variant::Base {
                    p.name.clone()
                } else {
                    format!("{}-{variant}", p.name)
                };
                entries.push(Entry {
                    name,
                    portfolio: p,
                    variant,
                    factor: n,
                });
            }
            let baseline = entries[0].name.clone();
            let (manifest, seed) = a.run.common.manifest("test")?;
            let cfg = ExperimentConfig {
                entries,
                problems: a.run.common.problems(&manifest)?,
                repetitions: a.run.repetitions,
                indicators: indicators(&a.run.indicators)?,
                seed,
                workers: a.run.common.workers,
                record_wall: a.run.record_wall,
            };
            run_and_write(&cfg, &a.run.out, Some(&baseline))?;
        }
        Command::AnalyzeMembers(a) => {
            let portfolio = resolve_portfolio(&a.portfolio)?;
            let rows = {
                let (manifest, seed) = a.common.manifest("train")?;
                member_analysis(
                    &portfolio,
                    &a.common.problems(&manifest)?,
                    a.repetitions,
                    seed,
                    a.common.workers,
                )?
            };
            create_dir(&a.out)?;
            write_member_csv(&a.out.join("members.csv"), &rows)?;
            println!("{}", format_member_table(&rows));
        }
        Command::Fronts(a) => {
            let ids = if a.problem == "all" {
                BenchmarkId::all()
            } else {
                vec![a.problem.parse::<BenchmarkId>()?]
            };
            create_dir(&a.out)?;
            for id in ids {
                let front = sample_reference_front(id, a.points)?;
                let path = a.out.join(format!("{id}.txt"));
                std::fs::write(&path, front.to_text()).map_err(|e| CliError::io(&path, e))?;
                println!("{id}: {} points -> {}", front.points.len(), path.display());
            }
        }
        Command::DeriveBoxes(a) => {
            let suite = match a.suite.to_ascii_uppercase().as_str() {
                "ZDT" => Suite::Zdt,
                "DTLZ" => Suite::Dtlz,
                "WFG" => Suite::Wfg,
                "UF" => Suite::Uf,
                other => return Err(CliError::Usage(format!("unknown suite {other:?}"))),
            };
            let ids: Vec<BenchmarkId> = BenchmarkId::all().into_iter().filter(|id| id.suite == suite).collect();
            let rows: Vec<(BenchmarkId, Vec<f64>)> = with_workers(0, || {
                Execution::Parallel.map(&ids, |&id| {
                    let upper = derive_upper_bounds(id, a.samples, a.seed);
                    (id, upper.iter().map(|&v| round_up_bound(v, 0.0)).collect())
                })
            });
            println!("{}", box_file_text(suite, &rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
