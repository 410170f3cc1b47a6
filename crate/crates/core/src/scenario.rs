//! Multi-agent runs over a shared resource ledger.
//!
//! A run advances a global tick clock. On every tick each active agent runs
//! its GA (fast agents run several generations), then every agent's held
//! solution is charged to the ledger, searching or not.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::SimulationError;
use crate::exact::{solve_brute_force, solve_dp, OptimalResult};
use crate::ga::{AgentState, GaParams};
use crate::knapsack::{validate_instance, BitSolution, KnapsackInstance, VALUE_TOLERANCE};
use crate::ledger::{starving_agents, Crossing, ResourceLedger, ResourceModel};
use crate::rng::policy_stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scenario {
    /// Every agent keeps searching for the global optimum.
    AllPersistent,
    /// Most agents settle for a local optimum.
    Satisficing,
    /// Some agents search several generations per tick.
    FastMinority,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::AllPersistent, Scenario::Satisficing, Scenario::FastMinority];

    pub fn id(self) -> u8 {
        match self {
            Scenario::AllPersistent => 1,
            Scenario::Satisficing => 2,
            Scenario::FastMinority => 3,
        }
    }
}

impl TryFrom<u8> for Scenario {
    type Error = SimulationError;

    fn try_from(id: u8) -> Result<Self, Self::Error> {
        match id {
            1 => Ok(Scenario::AllPersistent),
            2 => Ok(Scenario::Satisficing),
            3 => Ok(Scenario::FastMinority),
            other => Err(SimulationError::UnknownScenario(other)),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchPolicy {
    Persistent,
    /// Stops searching once `commit_after_stall` generations pass without improvement.
    Satisficer { commit_after_stall: u64 },
    /// Runs `steps_per_tick` generations per tick.
    Fast { steps_per_tick: u32 },
}

impl SearchPolicy {
    fn steps_per_tick(self) -> u32 {
        match self {
            SearchPolicy::Fast { steps_per_tick } => steps_per_tick,
            _ => 1,
        }
    }
}

impl fmt::Display for SearchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchPolicy::Persistent => f.write_str("persistent"),
            SearchPolicy::Satisficer { commit_after_stall } => write!(f, "satisficer({commit_after_stall})"),
            SearchPolicy::Fast { steps_per_tick } => write!(f, "fast({steps_per_tick})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub agent_count: usize,
    pub generations: u64,
    pub ga_params: GaParams,
    pub resource_model: ResourceModel,
    pub satisficer_fraction: f64,
    pub commit_after_stall: u64,
    pub fast_fraction: f64,
    pub steps_per_tick: u32,
    pub master_seed: u64,
}

impl ScenarioConfig {
    /// Reference settings: 25 agents, 2000 generations, default GA and a
    /// weight-proportional resource model with the default availability.
    pub fn reference(instance: &KnapsackInstance, scenario: Scenario, master_seed: u64) -> Self {
        Self {
            scenario,
            agent_count: 25,
            generations: 2000,
            ga_params: GaParams::default(),
            resource_model: ResourceModel::weight_proportional(
                instance,
                crate::ledger::DEFAULT_AVAILABILITY,
            ),
            satisficer_fraction: 1.0,
            commit_after_stall: 25,
            fast_fraction: 0.3,
            steps_per_tick: 4,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |msg: String| Err(SimulationError::InvalidConfig(msg));
        if self.agent_count == 0 {
            return bad("agent_count must be positive".into());
        }
        if self.generations == 0 {
            return bad("generations must be positive".into());
        }
        for (name, p) in [
            ("satisficer_fraction", self.satisficer_fraction),
            ("fast_fraction", self.fast_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.commit_after_stall == 0 {
            return bad("commit_after_stall must be positive".into());
        }
        if self.steps_per_tick < 2 {
            return bad(format!("steps_per_tick must be at least 2, got {}", self.steps_per_tick));
        }
        self.ga_params.validate()?;
        self.resource_model
            .validate()
            .map_err(SimulationError::InvalidConfig)
    }
}

/// Assigns a policy to agents `1..=agent_count` from the policy stream.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Vec<(usize, SearchPolicy)>, SimulationError> {
    config.validate()?;
    let mut rng = policy_stream(config.master_seed);
    let ids = 1..=config.agent_count;
    let policies = match config.scenario {
        Scenario::AllPersistent => ids.map(|j| (j, SearchPolicy::Persistent)).collect(),
        Scenario::Satisficing => ids
            .map(|j| {
                let policy = if rng.gen_bool(config.satisficer_fraction) {
                    SearchPolicy::Satisficer {
                        commit_after_stall: config.commit_after_stall,
                    }
                } else {
                    SearchPolicy::Persistent
                };
                (j, policy)
            })
            .collect(),
        Scenario::FastMinority => ids
            .map(|j| {
                let policy = if rng.gen_bool(config.fast_fraction) {
                    SearchPolicy::Fast {
                        steps_per_tick: config.steps_per_tick,
                    }
                } else {
                    SearchPolicy::Persistent
                };
                (j, policy)
            })
            .collect(),
    };
    Ok(policies)
}

/// The tick at which an agent started holding `solution`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionChange {
    pub generation: u64,
    pub solution: BitSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentOutcome {
    pub agent_id: usize,
    pub policy: SearchPolicy,
    pub final_solution: BitSolution,
    pub final_value: f64,
    pub reached_global: bool,
    pub generation_reached: Option<u64>,
    pub generations_run: u64,
    pub committed: bool,
    pub starving: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub scenario: Scenario,
    pub master_seed: u64,
    /// `series[k - 1][i]`: cumulative draw on resource `i` after tick `k`.
    pub series: Vec<Vec<f64>>,
    pub ledger: ResourceLedger,
    pub availability: Vec<f64>,
    pub per_agent: Vec<AgentOutcome>,
    /// Per agent, every change of held solution (the first entry is tick 1).
    pub trajectories: Vec<Vec<SolutionChange>>,
    pub first_crossing: Option<Crossing>,
    pub global_optimum: OptimalResult,
}

impl SimulationResult {
    pub fn generations(&self) -> u64 {
        self.series.len() as u64
    }

    /// Highest cumulative draw over all resources after each tick.
    pub fn highest_series(&self) -> Vec<f64> {
        self.series
            .iter()
            .map(|row| row.iter().copied().fold(0.0, f64::max))
            .collect()
    }
}

fn global_optimum(instance: &KnapsackInstance) -> Result<OptimalResult, SimulationError> {
    if instance.has_integer_weights() {
        Ok(solve_dp(instance)?)
    } else {
        Ok(solve_brute_force(instance)?)
    }
}

pub fn run_simulation(
    instance: &KnapsackInstance,
    config: &ScenarioConfig,
) -> Result<SimulationResult, SimulationError> {
    let report = validate_instance(instance);
    if let Some(v) = report.violations.first() {
        return Err(SimulationError::InvalidConfig(v.to_string()));
    }
    if config.resource_model.item_count() != instance.item_count {
        return Err(SimulationError::InvalidConfig(format!(
            "resource model covers {} items, instance has {}",
            config.resource_model.item_count(),
            instance.item_count
        )));
    }
    let policies = build_scenario(config)?;
    let optimum = global_optimum(instance)?;
    let params = &config.ga_params;
    let model = &config.resource_model;

    let mut agents = policies
        .iter()
        .map(|&(agent_id, _)| {
            AgentState::new(agent_id, instance, params, config.master_seed)
                .map_err(|source| SimulationError::AgentInit { agent_id, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = agents.len();
    let mut ledger = ResourceLedger::new(instance.item_count);
    let mut series = Vec::with_capacity(config.generations as usize);
    let mut trajectories: Vec<Vec<SolutionChange>> = vec![Vec::new(); n];
    let mut reached: Vec<Option<u64>> = vec![None; n];
    let mut held = Vec::with_capacity(n);

    for tick in 1..=config.generations {
        for (agent, &(_, policy)) in agents.iter_mut().zip(&policies) {
            for _ in 0..policy.steps_per_tick() {
                agent.step(instance, params);
            }
            if let SearchPolicy::Satisficer { commit_after_stall } = policy {
                if agent.stalled_generations >= commit_after_stall {
                    agent.commit();
                }
            }
        }

        held.clear();
        held.extend(agents.iter().map(|a| a.best_so_far.clone()));
        ledger.record_tick(model, &held, tick)?;
        series.push(ledger.cumulative.clone());

        for (j, agent) in agents.iter().enumerate() {
            let log = &mut trajectories[j];
            if log.last().is_none_or(|c| c.solution != agent.best_so_far) {
                log.push(SolutionChange {
                    generation: tick,
                    solution: agent.best_so_far.clone(),
                });
            }
            if reached[j].is_none() && agent.best_value >= optimum.value - VALUE_TOLERANCE {
                reached[j] = Some(tick);
            }
        }
    }

    let starving = starving_agents(&held, &ledger.exhausted_items());
    let per_agent = agents
        .iter()
        .zip(&policies)
        .enumerate()
        .map(|(j, (agent, &(agent_id, policy)))| AgentOutcome {
            agent_id,
            policy,
            final_solution: agent.best_so_far.clone(),
            final_value: agent.best_value,
            reached_global: (agent.best_value - optimum.value).abs() <= VALUE_TOLERANCE,
            generation_reached: reached[j],
            generations_run: agent.generations_run,
            committed: agent.committed,
            starving: starving.contains(&j),
        })
        .collect();

    Ok(SimulationResult {
        scenario: config.scenario,
        master_seed: config.master_seed,
        series,
        first_crossing: ledger.first_crossing(),
        availability: model.availability.clone(),
        ledger,
        per_agent,
        trajectories,
        global_optimum: optimum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: Scenario,
    pub master_seed: u64,
    /// Resource with the largest final cumulative draw (lowest index on ties).
    pub highest_item: usize,
    pub highest_trajectory: Vec<f64>,
    pub first_crossing: Option<Crossing>,
    pub agents_at_global: usize,
    pub mean_generation_to_global: Option<f64>,
    pub starving_count: usize,
}

pub fn summarize(result: &SimulationResult) -> Summary {
    let last = result.series.last().cloned().unwrap_or_default();
    let highest_item = last
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
        .map_or(0, |(i, _)| i);
    let highest_trajectory = result
        .series
        .iter()
        .map(|row| row.get(highest_item).copied().unwrap_or(0.0))
        .collect();
    let reachers: Vec<u64> = result
        .per_agent
        .iter()
        .filter(|a| a.reached_global)
        .filter_map(|a| a.generation_reached)
        .collect();
    let mean_generation_to_global = if reachers.is_empty() {
        None
    } else {
        Some(reachers.iter().sum::<u64>() as f64 / reachers.len() as f64)
    };
    Summary {
        scenario: result.scenario,
        master_seed: result.master_seed,
        highest_item,
        highest_trajectory,
        first_crossing: result.first_crossing,
        agents_at_global: result.per_agent.iter().filter(|a| a.reached_global).count(),
        mean_generation_to_global,
        starving_count: result.per_agent.iter().filter(|a| a.starving).count(),
    }
}

/// First tick at which any resource in `series` goes strictly above `availability`.
pub fn crossing_generation(series: &[Vec<f64>], availability: f64) -> Option<u64> {
    series
        .iter()
        .position(|row| row.iter().any(|&c| c > availability))
        .map(|k| k as u64 + 1)
}

/// Median of `values` (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}

/// Picks one availability for all resources such that the all-persistent
/// scenario, run on each of `seeds`, crosses it around `target_generation`:
/// the result is the median over seeds of the highest cumulative draw after
/// that tick.
///
/// Availability only gates exhaustion bookkeeping, never agent behaviour, so a
/// single pass per seed is enough.
pub fn calibrate_availability(
    instance: &KnapsackInstance,
    template: &ScenarioConfig,
    seeds: &[u64],
    target_generation: u64,
) -> Result<f64, SimulationError> {
    if target_generation == 0 || target_generation > template.generations {
        return Err(SimulationError::InvalidConfig(format!(
            "target generation {target_generation} outside 1..={}",
            template.generations
        )));
    }
    let mut levels = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut config = template.clone();
        config.scenario = Scenario::AllPersistent;
        config.master_seed = seed;
        config.generations = target_generation;
        config.resource_model.set_uniform_availability(f64::MAX);
        let result = run_simulation(instance, &config)?;
        levels.push(*result.highest_series().last().expect("at least one tick"));
    }
    median(&levels).ok_or_else(|| SimulationError::InvalidConfig("no calibration seeds".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::REFERENCE_OPTIMUM;

    fn short(scenario: Scenario, seed: u64, generations: u64) -> (KnapsackInstance, ScenarioConfig) {
        let inst = KnapsackInstance::reference();
        let mut cfg = ScenarioConfig::reference(&inst, scenario, seed);
        cfg.generations = generations;
        (inst, cfg)
    }

    #[test]
    fn scenario_ids_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::try_from(s.id()).unwrap(), s);
        }
        assert_eq!(Scenario::try_from(9), Err(SimulationError::UnknownScenario(9)));
        assert_eq!(SimulationError::UnknownScenario(9).to_string(), "unknown scenario 9");
    }

    #[test]
    fn policies_per_scenario() {
        let (_, cfg) = short(Scenario::AllPersistent, 1, 10);
        let p = build_scenario(&cfg).unwrap();
        assert_eq!(p.len(), 25);
        assert!(p.iter().all(|(_, p)| *p == SearchPolicy::Persistent));
        assert_eq!(p.first().unwrap().0, 1);

        let (_, cfg) = short(Scenario::Satisficing, 1, 10);
        let p = build_scenario(&cfg).unwrap();
        assert!(p
            .iter()
            .all(|(_, p)| *p == SearchPolicy::Satisficer { commit_after_stall: 25 }));

        let (_, cfg) = short(Scenario::FastMinority, 42, 10);
        let p = build_scenario(&cfg).unwrap();
        let fast = p.iter().filter(|(_, p)| matches!(p, SearchPolicy::Fast { .. })).count();
        assert!((1..=24).contains(&fast), "{fast} fast agents");
        assert_eq!(build_scenario(&cfg).unwrap(), p);
    }

    #[test]
    fn steps_per_tick_below_two_is_rejected() {
        let (_, mut cfg) = short(Scenario::FastMinority, 1, 10);
        cfg.steps_per_tick = 1;
        assert!(matches!(build_scenario(&cfg), Err(SimulationError::InvalidConfig(_))));
    }

    #[test]
    fn short_run_is_monotone_and_deterministic() {
        let (inst, cfg) = short(Scenario::AllPersistent, 7, 150);
        let a = run_simulation(&inst, &cfg).unwrap();
        let b = run_simulation(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.series.len(), 150);
        for w in a.series.windows(2) {
            assert!(w[0].iter().zip(&w[1]).all(|(x, y)| x <= y));
        }
        assert_eq!(a.global_optimum.solution.to_string(), REFERENCE_OPTIMUM);
        for (agent, traj) in a.per_agent.iter().zip(&a.trajectories) {
            assert_eq!(traj[0].generation, 1);
            let values: Vec<f64> = traj.iter().map(|c| inst.evaluate(&c.solution).unwrap().total_value).collect();
            assert!(values.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(traj.last().unwrap().solution, agent.final_solution);
            assert_eq!(agent.generations_run, 150);
        }
    }

    #[test]
    fn fast_agents_advance_several_generations_per_tick() {
        let (inst, cfg) = short(Scenario::FastMinority, 42, 30);
        let result = run_simulation(&inst, &cfg).unwrap();
        for a in &result.per_agent {
            let expected = match a.policy {
                SearchPolicy::Fast { steps_per_tick } => 30 * steps_per_tick as u64,
                _ => 30,
            };
            assert_eq!(a.generations_run, expected);
        }
    }

    #[test]
    fn committed_satisficers_keep_their_solution() {
        let (inst, cfg) = short(Scenario::Satisficing, 3, 400);
        let result = run_simulation(&inst, &cfg).unwrap();
        for (a, traj) in result.per_agent.iter().zip(&result.trajectories) {
            assert!(a.committed);
            // Commit happens once the stall counter reaches 25; nothing changes after.
            let last_change = traj.last().unwrap().generation;
            assert!(a.generations_run <= last_change + 25);
        }
    }

    #[test]
    fn summary_of_quiet_run() {
        let (inst, mut cfg) = short(Scenario::AllPersistent, 2, 50);
        cfg.resource_model.set_uniform_availability(1e12);
        let result = run_simulation(&inst, &cfg).unwrap();
        let s = summarize(&result);
        assert_eq!(s.first_crossing, None);
        assert_eq!(s.starving_count, 0);
        assert_eq!(s.highest_trajectory.len(), 50);
    }

    #[test]
    fn summary_of_ledger_example() {
        let inst = KnapsackInstance::reference();
        let model = ResourceModel::weight_proportional(&inst, 30_000.0);
        let held = vec![REFERENCE_OPTIMUM.parse::<BitSolution>().unwrap(); 25];
        let mut ledger = ResourceLedger::new(10);
        let mut series = Vec::new();
        for k in 1..=2 {
            ledger.record_tick(&model, &held, k).unwrap();
            series.push(ledger.cumulative.clone());
        }
        let optimum = solve_dp(&inst).unwrap();
        let result = SimulationResult {
            scenario: Scenario::AllPersistent,
            master_seed: 0,
            series,
            availability: model.availability.clone(),
            first_crossing: ledger.first_crossing(),
            per_agent: Vec::new(),
            trajectories: Vec::new(),
            ledger,
            global_optimum: optimum,
        };
        let s = summarize(&result);
        assert_eq!(s.first_crossing, Some(Crossing { generation: 2, item: 0 }));
        assert_eq!(s.highest_item, 0);
        assert_eq!(s.highest_trajectory, vec![24_900.0, 49_800.0]);
    }

    #[test]
    fn crossing_generation_and_median() {
        let series = vec![vec![1.0, 5.0], vec![2.0, 10.0]];
        assert_eq!(crossing_generation(&series, 4.0), Some(1));
        assert_eq!(crossing_generation(&series, 5.0), Some(2));
        assert_eq!(crossing_generation(&series, 10.0), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
