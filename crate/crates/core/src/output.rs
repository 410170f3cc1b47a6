//! Flat-file outputs of a run.
//!
//! | file              | columns                                                                 |
//! |-------------------|-------------------------------------------------------------------------|
//! | `consumption.csv` | `generation,item,cumulative`                                            |
//! | `agents.csv`      | `agent_id,policy,final_value,reached_global,generation_reached,starving`|
//! | `summary.csv`     | `scenario,seed,first_crossing_generation,crossing_item,agents_at_global,mean_generation_to_global` |
//! | `solutions.csv`   | `generation,agent_id,solution` (one row per change of held solution)    |
//!
//! Items and agents are numbered from 1. Integral numbers are written bare,
//! other numbers with at most nine decimals; absent values are empty fields.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::scenario::{summarize, SimulationResult, Summary};

pub const CONSUMPTION_FILE: &str = "consumption.csv";
pub const AGENTS_FILE: &str = "agents.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SOLUTIONS_FILE: &str = "solutions.csv";

const SUMMARY_HEADER: [&str; 6] = [
    "scenario",
    "seed",
    "first_crossing_generation",
    "crossing_item",
    "agents_at_global",
    "mean_generation_to_global",
];

pub fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
        return format!("{}", x as i64);
    }
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(csv_error)?;
    }
    w.flush()
}

pub fn summary_row(summary: &Summary) -> Vec<String> {
    let (generation, item) = match summary.first_crossing {
        Some(c) => (c.generation.to_string(), (c.item + 1).to_string()),
        None => (String::new(), String::new()),
    };
    vec![
        summary.scenario.id().to_string(),
        summary.master_seed.to_string(),
        generation,
        item,
        summary.agents_at_global.to_string(),
        summary.mean_generation_to_global.map(format_number).unwrap_or_default(),
    ]
}

/// Writes a summary table with one row per run.
pub fn write_summary(path: &Path, summaries: &[Summary]) -> io::Result<()> {
    write_rows(path, &SUMMARY_HEADER, summaries.iter().map(summary_row))
}

/// Writes the per-run CSV files into `dir` (created if missing) and returns their paths.
pub fn emit_csv(result: &SimulationResult, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;

    let consumption = dir.join(CONSUMPTION_FILE);
    write_rows(
        &consumption,
        &["generation", "item", "cumulative"],
        result.series.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .map(move |(i, c)| vec![(k + 1).to_string(), (i + 1).to_string(), format_number(*c)])
        }),
    )?;

    let agents = dir.join(AGENTS_FILE);
    write_rows(
        &agents,
        &[
            "agent_id",
            "policy",
            "final_value",
            "reached_global",
            "generation_reached",
            "starving",
        ],
        result.per_agent.iter().map(|a| {
            vec![
                a.agent_id.to_string(),
                a.policy.to_string(),
                format_number(a.final_value),
                a.reached_global.to_string(),
                a.generation_reached.map(|g| g.to_string()).unwrap_or_default(),
                a.starving.to_string(),
            ]
        }),
    )?;

    let summary = dir.join(SUMMARY_FILE);
    write_summary(&summary, &[summarize(result)])?;

    let solutions = dir.join(SOLUTIONS_FILE);
    let mut changes: Vec<(u64, usize, String)> = result
        .per_agent
        .iter()
        .zip(&result.trajectories)
        .flat_map(|(a, traj)| {
            traj.iter()
                .map(move |c| (c.generation, a.agent_id, c.solution.to_string()))
        })
        .collect();
    changes.sort();
    write_rows(
        &solutions,
        &["generation", "agent_id", "solution"],
        changes
            .into_iter()
            .map(|(g, j, s)| vec![g.to_string(), j.to_string(), s]),
    )?;

    Ok(vec![consumption, agents, summary, solutions])
}
