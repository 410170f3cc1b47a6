//! Agents solving one shared 0/1 knapsack by genetic search while a common
//! ledger charges their held solutions against finite resources.

pub mod cli;
pub mod config;
pub mod error;
pub mod exact;
pub mod ga;
pub mod knapsack;
pub mod ledger;
pub mod output;
pub mod plot;
pub mod rng;
pub mod scenario;

pub use config::{parse_config, RunConfig};
pub use error::{DimensionError, GaError, SimulationError, SolverError};
pub use exact::{solve_brute_force, solve_dp, OptimalResult};
pub use ga::{AgentState, GaParams};
pub use knapsack::{evaluate, validate_instance, BitSolution, Evaluation, KnapsackInstance};
pub use ledger::{Crossing, ResourceLedger, ResourceModel};
pub use scenario::{
    build_scenario, run_simulation, summarize, Scenario, ScenarioConfig, SearchPolicy, SimulationResult, Summary,
};
