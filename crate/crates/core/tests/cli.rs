use std::fs;
use std::path::Path;

use knapsack_commons::cli::run_cli;
use knapsack_commons::exact::solve_dp;
use knapsack_commons::knapsack::{BitSolution, KnapsackInstance, REFERENCE_OPTIMUM};
use knapsack_commons::ledger::{ResourceLedger, ResourceModel};
use knapsack_commons::output::emit_csv;
use knapsack_commons::plot::{emit_svg_plot, LineSeries};
use knapsack_commons::scenario::{AgentOutcome, Scenario, SearchPolicy, SimulationResult, SolutionChange};

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["commons-sim"];
    full.extend_from_slice(args);
    run_cli(full)
}

/// The two-tick ledger example wrapped in a result: 25 agents holding the optimum.
fn two_tick_result() -> SimulationResult {
    let inst = KnapsackInstance::reference();
    let model = ResourceModel::weight_proportional(&inst, 30_000.0);
    let optimum: BitSolution = REFERENCE_OPTIMUM.parse().unwrap();
    let held = vec![optimum.clone(); 25];
    let mut ledger = ResourceLedger::new(10);
    let mut series = Vec::new();
    for k in 1..=2 {
        ledger.record_tick(&model, &held, k).unwrap();
        series.push(ledger.cumulative.clone());
    }
    let global = solve_dp(&inst).unwrap();
    let per_agent = (1..=25)
        .map(|agent_id| AgentOutcome {
            agent_id,
            policy: SearchPolicy::Persistent,
            final_solution: optimum.clone(),
            final_value: global.value,
            reached_global: true,
            generation_reached: Some(1),
            generations_run: 2,
            committed: false,
            starving: true,
        })
        .collect();
    SimulationResult {
        scenario: Scenario::AllPersistent,
        master_seed: 0,
        series,
        availability: model.availability.clone(),
        first_crossing: ledger.first_crossing(),
        ledger,
        per_agent,
        trajectories: vec![
            vec![SolutionChange {
                generation: 1,
                solution: optimum,
            }];
            25
        ],
        global_optimum: global,
    }
}

#[test]
fn consumption_rows_of_the_two_tick_example() {
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&two_tick_result(), dir.path()).unwrap();
    let consumption = read(&dir.path().join("consumption.csv"));
    let lines: Vec<&str> = consumption.lines().collect();
    assert_eq!(lines[0], "generation,item,cumulative");
    assert!(lines.contains(&"1,1,24900"));
    assert!(lines.contains(&"2,1,49800"));
    assert_eq!(lines.len(), 1 + 2 * 10);
    let summary = read(&dir.path().join("summary.csv"));
    assert_eq!(summary.lines().nth(1).unwrap(), "1,0,2,1,25,1");
}

#[test]
fn single_run_writes_deterministic_csvs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(&["--scenario", "1", "--seed", "7", "--generations", "300", "--out", out]), 0);
    }
    for name in ["consumption.csv", "agents.csv", "summary.csv", "solutions.csv"] {
        assert_eq!(read(&a.path().join(name)), read(&b.path().join(name)), "{name}");
    }
    let agents = read(&a.path().join("agents.csv"));
    assert_eq!(
        agents.lines().next().unwrap(),
        "agent_id,policy,final_value,reached_global,generation_reached,starving"
    );
    assert_eq!(agents.lines().count(), 1 + 25);
}

#[test]
fn no_crossing_leaves_summary_fields_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["--scenario", "2", "--seed", "1", "--generations", "50", "--availability", "1e12", "--out", out]),
        0
    );
    let summary = read(&dir.path().join("summary.csv"));
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "");
    assert_eq!(row[3], "");
}

#[test]
fn all_scenarios_times_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["--scenario", "all", "--seeds", "10", "--seed", "1", "--generations", "20", "--plots", "--out", out]),
        0
    );
    for s in 1..=3 {
        for seed in 1..=10 {
            let run_dir = dir.path().join(format!("scenario{s}/seed{seed}"));
            for name in ["consumption.csv", "agents.csv", "summary.csv", "consumption.svg"] {
                assert!(run_dir.join(name).is_file(), "{}", run_dir.join(name).display());
            }
        }
    }
    let summary = read(&dir.path().join("summary.csv"));
    assert_eq!(summary.lines().count(), 1 + 30);
    let highest = read(&dir.path().join("highest_seed1.svg"));
    assert_eq!(highest.matches("<polyline").count(), 3);
    assert_eq!(highest.matches("stroke-dasharray").count(), 1);
}

#[test]
fn default_scenario_one_plot_has_one_line_per_item() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["--scenario", "1", "--seed", "3", "--plots", "--out", out]), 0);
    let svg = read(&dir.path().join("consumption.svg"));
    assert_eq!(svg.matches("<polyline").count(), 10);
    assert_eq!(svg.matches("stroke-dasharray").count(), 1);
    assert!(svg.contains(">generation<"));
    assert!(svg.contains(">cumulative resource consumed<"));
}

#[test]
fn highest_only_view_across_three_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<LineSeries> = (1..=3)
        .map(|s| LineSeries::new(format!("scenario {s}"), (0..100).map(|k| (k * s) as f64).collect()))
        .collect();
    let path = emit_svg_plot(&lines, Some(150.0), "highest", &dir.path().join("fig.svg")).unwrap();
    let svg = read(&path);
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("stroke-dasharray").count(), 1);
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "output_dir = {:?}\n[scenario]\nscenario_id = 3\ngenerations = 40\nagent_count = 5\nmaster_seed = 9\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]), 0);
    let summary = read(&out.join("summary.csv"));
    assert!(summary.lines().nth(1).unwrap().starts_with("3,9,"));
    assert_eq!(read(&out.join("agents.csv")).lines().count(), 6);
    assert_eq!(read(&out.join("consumption.csv")).lines().count(), 1 + 40 * 10);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[instance]\nitem_count = 10\nweights = [1, 2, 3, 4, 5, 6, 7, 8, 9]\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]), 2);
    fs::write(&cfg, "[scenario\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]), 2);
    assert_eq!(run(&["--scenario", "9"]), 2);
    assert_eq!(run(&["--availability=-1"]), 2);
}

#[test]
fn reference_config_file_matches_defaults() {
    let text = read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml"));
    let cfg = knapsack_commons::parse_config(&text).unwrap();
    assert_eq!(cfg, knapsack_commons::RunConfig::default());
}
