//! `commons-sim` command line.
//!
//! A single (scenario, seed) run writes its CSV files straight into the
//! output directory. Several runs (`--scenario all` or `--seeds N > 1`) each
//! get `scenario<S>/seed<K>/`, and a cross-run `summary.csv` is written at
//! the top.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::output::{emit_csv, write_summary, SUMMARY_FILE};
use crate::plot::{emit_svg_plot, item_series, LineSeries};
use crate::scenario::{run_simulation, summarize, Scenario, SimulationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSelection {
    One(Scenario),
    All,
}

fn parse_selection(s: &str) -> Result<ScenarioSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ScenarioSelection::All);
    }
    s.parse::<u8>()
        .ok()
        .and_then(|id| Scenario::try_from(id).ok())
        .map(ScenarioSelection::One)
        .ok_or_else(|| format!("unknown scenario '{s}' (expected 1, 2, 3 or all)"))
}

#[derive(Debug, Parser)]
#[command(
    name = "commons-sim",
    version,
    about = "Agents solving one knapsack by genetic search against shared resources"
)]
pub struct Args {
    /// TOML run configuration; omitted fields take reference values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Scenario to run: 1, 2, 3 or all.
    #[arg(long, value_parser = parse_selection)]
    pub scenario: Option<ScenarioSelection>,
    /// Master seed (first seed when replicating).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of replicate seeds, counting up from --seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: u64,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Override the number of generations.
    #[arg(long)]
    pub generations: Option<u64>,
    /// Override the availability of every resource.
    #[arg(long)]
    pub availability: Option<f64>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => parse_config("")?,
    };
    if let Some(g) = args.generations {
        if g == 0 {
            return Err(CliError::Usage("--generations must be positive".into()));
        }
        config.scenario.generations = g;
    }
    if let Some(a) = args.availability {
        if !(a > 0.0) {
            return Err(CliError::Usage("--availability must be positive".into()));
        }
        config.scenario.resource_model.set_uniform_availability(a);
    }
    if let Some(seed) = args.seed {
        config.scenario.master_seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.emit_plots |= args.plots;
    Ok(config)
}

fn execute(args: &Args) -> Result<(), CliError> {
    let config = resolve(args)?;
    for w in config.warnings() {
        eprintln!("warning: instance: {w}");
    }
    let scenarios: Vec<Scenario> = match args.scenario {
        Some(ScenarioSelection::All) => Scenario::ALL.to_vec(),
        Some(ScenarioSelection::One(s)) => vec![s],
        None => vec![config.scenario.scenario],
    };
    let first_seed = config.scenario.master_seed;
    let seeds: Vec<u64> = (0..args.seeds)
        .map(|k| first_seed.checked_add(k))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::Usage("seed range overflows u64".into()))?;

    let jobs: Vec<(Scenario, u64)> = scenarios
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&k| (s, k)))
        .collect();
    let single = jobs.len() == 1;
    let out = &config.output_dir;

    let results: Vec<SimulationResult> = jobs
        .par_iter()
        .map(|&(scenario, seed)| {
            let mut sc = config.scenario.clone();
            sc.scenario = scenario;
            sc.master_seed = seed;
            run_simulation(&config.instance, &sc).map_err(runtime)
        })
        .collect::<Result<_, _>>()?;

    let threshold = config.scenario.resource_model.threshold();
    let mut summaries = Vec::with_capacity(results.len());
    for result in &results {
        let dir = if single {
            out.clone()
        } else {
            run_dir(out, result.scenario, result.master_seed)
        };
        emit_csv(result, &dir).map_err(|e| runtime(format!("writing {}: {e}", dir.display())))?;
        if config.emit_plots {
            let title = format!("Resource consumption (scenario {}, seed {})", result.scenario, result.master_seed);
            emit_svg_plot(&item_series(&result.series), Some(threshold), &title, &dir.join("consumption.svg"))
                .map_err(runtime)?;
        }
        let summary = summarize(result);
        println!(
            "scenario {} seed {}: first crossing {}, {} of {} agents at global optimum",
            result.scenario,
            result.master_seed,
            summary
                .first_crossing
                .map(|c| format!("at generation {} (item {})", c.generation, c.item + 1))
                .unwrap_or_else(|| "none".into()),
            summary.agents_at_global,
            result.per_agent.len()
        );
        summaries.push(summary);
    }

    if !single {
        write_summary(&out.join(SUMMARY_FILE), &summaries).map_err(runtime)?;
        if config.emit_plots && scenarios.len() > 1 {
            for &seed in &seeds {
                let lines: Vec<LineSeries> = results
                    .iter()
                    .filter(|r| r.master_seed == seed)
                    .map(|r| LineSeries::new(format!("scenario {}", r.scenario), r.highest_series()))
                    .collect();
                let path = out.join(format!("highest_seed{seed}.svg"));
                emit_svg_plot(&lines, Some(threshold), &format!("Highest resource consumed (seed {seed})"), &path)
                    .map_err(runtime)?;
            }
        }
    }
    Ok(())
}

pub fn run_dir(out: &Path, scenario: Scenario, seed: u64) -> PathBuf {
    out.join(format!("scenario{}", scenario.id())).join(format!("seed{seed}"))
}
