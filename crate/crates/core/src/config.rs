//! TOML run configuration.
//!
//! Every field is optional; anything left out takes the reference value
//! (ten-item instance, 25 agents, 2000 generations). Unknown keys are
//! rejected. Example:
//!
//! ```toml
//! output_dir = "results"
//! emit_plots = true
//!
//! [instance]
//! weights = [996, 771, 543]
//! values = [54.0, 39.3, 14.8]
//! capacity = 1155.0
//!
//! [scenario]
//! scenario_id = 3
//! generations = 500
//! master_seed = 7
//!
//! [scenario.resource_model]
//! availability = 2.5e7
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::GaParams;
use crate::knapsack::{validate_instance, KnapsackInstance, Warning};
use crate::ledger::{ResourceModel, DEFAULT_AVAILABILITY};
use crate::scenario::{Scenario, ScenarioConfig};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("config cannot be serialized: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn schema(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub instance: KnapsackInstance,
    pub scenario: ScenarioConfig,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let instance = KnapsackInstance::reference();
        let scenario = ScenarioConfig::reference(&instance, Scenario::AllPersistent, DEFAULT_SEED);
        Self {
            instance,
            scenario,
            output_dir: PathBuf::from("results"),
            emit_plots: false,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    emit_plots: Option<bool>,
    #[serde(default)]
    instance: RawInstance,
    #[serde(default)]
    scenario: RawScenario,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(skip_serializing_if = "Option::is_none")]
    item_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario_id: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agent_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    satisficer_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    commit_after_stall: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fast_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps_per_tick: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    master_seed: Option<i64>,
    #[serde(default)]
    ga_params: RawGaParams,
    #[serde(default)]
    resource_model: RawResourceModel,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    population_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate_capacity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mutation_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offspring_per_generation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_init_retries: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResourceModel {
    #[serde(skip_serializing_if = "Option::is_none")]
    scale_factors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resource_amounts: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    availability: Option<Availability>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Availability {
    Uniform(f64),
    PerItem(Vec<f64>),
}

fn check_len(path: &str, list: &[f64], expected: usize) -> Result<(), ConfigError> {
    if list.len() == expected {
        Ok(())
    } else {
        Err(schema(
            path,
            format!("expected {expected} entries, found {}", list.len()),
        ))
    }
}

impl RawInstance {
    fn resolve(self) -> Result<KnapsackInstance, ConfigError> {
        let reference = KnapsackInstance::reference();
        let item_count = self
            .item_count
            .or(self.weights.as_ref().map(Vec::len))
            .or(self.values.as_ref().map(Vec::len))
            .unwrap_or(reference.item_count);
        let weights = match self.weights {
            Some(w) => w,
            None if item_count == reference.item_count => reference.weights,
            None => return Err(schema("instance.weights", "required when item_count differs from 10")),
        };
        check_len("instance.weights", &weights, item_count)?;
        let values = match self.values {
            Some(v) => v,
            None if item_count == reference.item_count => reference.values,
            None => return Err(schema("instance.values", "required when item_count differs from 10")),
        };
        check_len("instance.values", &values, item_count)?;
        let capacity = self
            .capacity
            .unwrap_or_else(|| 0.5 * weights.iter().sum::<f64>());
        let instance = KnapsackInstance {
            item_count,
            weights,
            values,
            capacity,
        };
        if let Some(v) = validate_instance(&instance).violations.first() {
            return Err(schema("instance", v.to_string()));
        }
        Ok(instance)
    }
}

impl RawScenario {
    fn resolve(self, instance: &KnapsackInstance) -> Result<ScenarioConfig, ConfigError> {
        let scenario = match self.scenario_id {
            None => Scenario::AllPersistent,
            Some(id) => Scenario::try_from(id).map_err(|e| schema("scenario.scenario_id", e.to_string()))?,
        };
        let master_seed = match self.master_seed {
            None => DEFAULT_SEED,
            Some(s) if s >= 0 => s as u64,
            Some(s) => return Err(schema("scenario.master_seed", format!("must be non-negative, got {s}"))),
        };
        let base = ScenarioConfig::reference(instance, scenario, master_seed);

        let g = self.ga_params;
        let ga_params = GaParams {
            population_size: g.population_size.unwrap_or(base.ga_params.population_size),
            candidate_capacity: g.candidate_capacity.unwrap_or(base.ga_params.candidate_capacity),
            mutation_rate: g.mutation_rate.unwrap_or(base.ga_params.mutation_rate),
            // Tracks population_size unless given explicitly.
            offspring_per_generation: g
                .offspring_per_generation
                .or(g.population_size)
                .unwrap_or(base.ga_params.offspring_per_generation),
            max_init_retries: g.max_init_retries.unwrap_or(base.ga_params.max_init_retries),
        };
        ga_params
            .validate()
            .map_err(|e| schema("scenario.ga_params", e.to_string()))?;

        let m = instance.item_count;
        let r = self.resource_model;
        let scale_factors = r.scale_factors.unwrap_or_else(|| vec![1.0; m]);
        check_len("scenario.resource_model.scale_factors", &scale_factors, m)?;
        let resource_amounts = r.resource_amounts.unwrap_or_else(|| instance.weights.clone());
        check_len("scenario.resource_model.resource_amounts", &resource_amounts, m)?;
        let availability = match r.availability {
            None => vec![DEFAULT_AVAILABILITY; m],
            Some(Availability::Uniform(a)) => vec![a; m],
            Some(Availability::PerItem(list)) => {
                check_len("scenario.resource_model.availability", &list, m)?;
                list
            }
        };
        let resource_model = ResourceModel {
            scale_factors,
            resource_amounts,
            availability,
        };
        resource_model
            .validate()
            .map_err(|e| schema("scenario.resource_model", e))?;

        let config = ScenarioConfig {
            scenario,
            agent_count: self.agent_count.unwrap_or(base.agent_count),
            generations: self.generations.unwrap_or(base.generations),
            ga_params,
            resource_model,
            satisficer_fraction: self.satisficer_fraction.unwrap_or(base.satisficer_fraction),
            commit_after_stall: self.commit_after_stall.unwrap_or(base.commit_after_stall),
            fast_fraction: self.fast_fraction.unwrap_or(base.fast_fraction),
            steps_per_tick: self.steps_per_tick.unwrap_or(base.steps_per_tick),
            master_seed,
        };
        config.validate().map_err(|e| schema("scenario", e.to_string()))?;
        Ok(config)
    }
}

impl RunConfig {
    /// Instance warnings worth surfacing to a user (vacuous constraint, nothing fits).
    pub fn warnings(&self) -> Vec<Warning> {
        validate_instance(&self.instance).warnings
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_config(&text)
    }

    /// Writes every field explicitly, so the output parses back to `self`.
    pub fn to_toml(&self) -> Result<String, ConfigError> {
        let s = &self.scenario;
        let model = &s.resource_model;
        let availability = match model.availability.first() {
            Some(&a) if model.availability.iter().all(|&x| x == a) => Availability::Uniform(a),
            _ => Availability::PerItem(model.availability.clone()),
        };
        let master_seed = i64::try_from(s.master_seed)
            .map_err(|_| schema("scenario.master_seed", "exceeds the TOML integer range"))?;
        let raw = RawConfig {
            output_dir: Some(self.output_dir.clone()),
            emit_plots: Some(self.emit_plots),
            instance: RawInstance {
                item_count: Some(self.instance.item_count),
                weights: Some(self.instance.weights.clone()),
                values: Some(self.instance.values.clone()),
                capacity: Some(self.instance.capacity),
            },
            scenario: RawScenario {
                scenario_id: Some(s.scenario.id()),
                agent_count: Some(s.agent_count),
                generations: Some(s.generations),
                satisficer_fraction: Some(s.satisficer_fraction),
                commit_after_stall: Some(s.commit_after_stall),
                fast_fraction: Some(s.fast_fraction),
                steps_per_tick: Some(s.steps_per_tick),
                master_seed: Some(master_seed),
                ga_params: RawGaParams {
                    population_size: Some(s.ga_params.population_size),
                    candidate_capacity: Some(s.ga_params.candidate_capacity),
                    mutation_rate: Some(s.ga_params.mutation_rate),
                    offspring_per_generation: Some(s.ga_params.offspring_per_generation),
                    max_init_retries: Some(s.ga_params.max_init_retries),
                },
                resource_model: RawResourceModel {
                    scale_factors: Some(model.scale_factors.clone()),
                    resource_amounts: Some(model.resource_amounts.clone()),
                    availability: Some(availability),
                },
            },
        };
        Ok(toml::to_string(&raw)?)
    }
}

pub fn parse_config(document: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(document)?;
    let defaults = RunConfig::default();
    let instance = raw.instance.resolve()?;
    let scenario = raw.scenario.resolve(&instance)?;
    Ok(RunConfig {
        instance,
        scenario,
        output_dir: raw.output_dir.unwrap_or(defaults.output_dir),
        emit_plots: raw.emit_plots.unwrap_or(defaults.emit_plots),
    })
}
