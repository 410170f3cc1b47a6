//! One agent's trial-and-error search.
//!
//! Each generation the agent keeps the feasible part of its population as
//! candidates, breeds a fresh population from uniformly chosen candidate
//! pairs (first-half/second-half crossover followed by per-bit toggling), and
//! remembers the best feasible vector it has ever seen. There is no fitness
//! weighted selection and the best vector is never reinserted.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DimensionError, GaError};
use crate::knapsack::{BitSolution, KnapsackInstance};
use crate::rng::agent_stream;

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    pub candidate_capacity: usize,
    pub mutation_rate: f64,
    pub offspring_per_generation: usize,
    pub max_init_retries: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 45,
            candidate_capacity: 45,
            mutation_rate: 0.05,
            offspring_per_generation: 45,
            max_init_retries: 1000,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |msg: String| Err(GaError::InvalidParams(msg));
        if self.population_size < 2 {
            return bad(format!("population_size must be at least 2, got {}", self.population_size));
        }
        if self.candidate_capacity < 2 {
            return bad(format!(
                "candidate_capacity must be at least 2, got {}",
                self.candidate_capacity
            ));
        }
        if self.offspring_per_generation != self.population_size {
            return bad(format!(
                "offspring_per_generation ({}) must equal population_size ({})",
                self.offspring_per_generation, self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!("mutation_rate must lie in [0, 1], got {}", self.mutation_rate));
        }
        if self.max_init_retries == 0 {
            return bad("max_init_retries must be positive".into());
        }
        Ok(())
    }
}

pub fn random_population(item_count: usize, size: usize, rng: &mut impl Rng) -> Vec<BitSolution> {
    (0..size)
        .map(|_| BitSolution::new((0..item_count).map(|_| rng.gen::<bool>()).collect()))
        .collect()
}

/// Feasible members of `population` in their original order, at most `limit` of them.
pub fn filter_feasible(
    instance: &KnapsackInstance,
    population: &[BitSolution],
    limit: usize,
) -> Vec<BitSolution> {
    population
        .iter()
        .filter(|x| instance.fits(x))
        .take(limit)
        .cloned()
        .collect()
}

/// Draws whole populations until at least two members are feasible.
/// On exhaustion the last draw is returned in the error arm so a running
/// agent can carry on with it.
fn draw_viable(
    instance: &KnapsackInstance,
    params: &GaParams,
    rng: &mut impl Rng,
) -> Result<(Vec<BitSolution>, Vec<BitSolution>), Vec<BitSolution>> {
    let mut population = Vec::new();
    for _ in 0..params.max_init_retries {
        population = random_population(instance.item_count, params.population_size, rng);
        let candidates = filter_feasible(instance, &population, params.candidate_capacity);
        if candidates.len() >= 2 {
            return Ok((population, candidates));
        }
    }
    Err(population)
}

/// Random initial population together with its feasible candidates (at least two).
pub fn init_population(
    instance: &KnapsackInstance,
    params: &GaParams,
    rng: &mut impl Rng,
) -> Result<(Vec<BitSolution>, Vec<BitSolution>), GaError> {
    params.validate()?;
    draw_viable(instance, params, rng).map_err(|_| GaError::InitializationFailed {
        retries: params.max_init_retries,
    })
}

/// Child takes the first `ceil(M/2)` bits from `upper` and the rest from `lower`.
pub fn crossover(upper: &BitSolution, lower: &BitSolution) -> Result<BitSolution, DimensionError> {
    if upper.len() != lower.len() {
        return Err(DimensionError {
            what: "crossover parents",
            expected: upper.len(),
            found: lower.len(),
        });
    }
    let split = upper.len().div_ceil(2);
    let bits = upper.bits()[..split]
        .iter()
        .chain(&lower.bits()[split..])
        .copied()
        .collect();
    Ok(BitSolution::new(bits))
}

/// Toggles each bit independently with probability `rate`.
pub fn mutate(mut child: BitSolution, rate: f64, rng: &mut impl Rng) -> BitSolution {
    for i in 0..child.len() {
        if rng.gen_bool(rate) {
            child.toggle(i);
        }
    }
    child
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub agent_id: usize,
    pub population: Vec<BitSolution>,
    pub best_so_far: BitSolution,
    pub best_value: f64,
    pub generations_run: u64,
    pub stalled_generations: u64,
    pub committed: bool,
    rng: ChaCha8Rng,
}

impl AgentState {
    /// Initializes agent `agent_id` on its own stream of `master_seed`.
    pub fn new(
        agent_id: usize,
        instance: &KnapsackInstance,
        params: &GaParams,
        master_seed: u64,
    ) -> Result<Self, GaError> {
        Self::with_rng(agent_id, instance, params, agent_stream(master_seed, agent_id))
    }

    pub fn with_rng(
        agent_id: usize,
        instance: &KnapsackInstance,
        params: &GaParams,
        mut rng: ChaCha8Rng,
    ) -> Result<Self, GaError> {
        let (population, candidates) = init_population(instance, params, &mut rng)?;
        let (best_so_far, best_value) =
            best_of(instance, &candidates).expect("init yields at least two candidates");
        Ok(Self {
            agent_id,
            population,
            best_so_far,
            best_value,
            generations_run: 0,
            stalled_generations: 0,
            committed: false,
            rng,
        })
    }

    /// Builds a state around a given population. `best_so_far` must be feasible.
    pub fn from_parts(
        agent_id: usize,
        instance: &KnapsackInstance,
        population: Vec<BitSolution>,
        best_so_far: BitSolution,
        rng: ChaCha8Rng,
    ) -> Self {
        assert!(instance.fits(&best_so_far), "best_so_far must be feasible");
        let best_value = value_of(instance, &best_so_far);
        Self {
            agent_id,
            population,
            best_so_far,
            best_value,
            generations_run: 0,
            stalled_generations: 0,
            committed: false,
            rng,
        }
    }

    pub fn commit(&mut self) {
        self.committed = true;
    }

    /// Runs one generation. Committed agents are left untouched.
    pub fn step(&mut self, instance: &KnapsackInstance, params: &GaParams) {
        if self.committed {
            return;
        }
        let mut candidates = filter_feasible(instance, &self.population, params.candidate_capacity);
        if candidates.len() < 2 {
            match draw_viable(instance, params, &mut self.rng) {
                Ok((population, viable)) => {
                    self.population = population;
                    candidates = viable;
                }
                Err(last) => {
                    // No pair to breed from: keep the last random draw as next population.
                    let fallback = filter_feasible(instance, &last, params.candidate_capacity);
                    let improved = self.absorb(instance, &fallback);
                    self.population = last;
                    self.finish_generation(improved);
                    return;
                }
            }
        }

        let improved = self.absorb(instance, &candidates);

        let n = candidates.len();
        let mut next = Vec::with_capacity(params.offspring_per_generation);
        for _ in 0..params.offspring_per_generation {
            let a = self.rng.gen_range(0..n);
            let mut b = self.rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let child = crossover(&candidates[a], &candidates[b]).expect("population has uniform length");
            next.push(mutate(child, params.mutation_rate, &mut self.rng));
        }
        self.population = next;
        self.finish_generation(improved);
    }

    fn absorb(&mut self, instance: &KnapsackInstance, candidates: &[BitSolution]) -> bool {
        match best_of(instance, candidates) {
            Some((x, v)) if v > self.best_value => {
                self.best_so_far = x;
                self.best_value = v;
                true
            }
            _ => false,
        }
    }

    fn finish_generation(&mut self, improved: bool) {
        self.generations_run += 1;
        if improved {
            self.stalled_generations = 0;
        } else {
            self.stalled_generations += 1;
        }
    }
}

fn value_of(instance: &KnapsackInstance, x: &BitSolution) -> f64 {
    x.selected().map(|i| instance.values[i]).sum()
}

/// First maximum-value member of `candidates`.
fn best_of(instance: &KnapsackInstance, candidates: &[BitSolution]) -> Option<(BitSolution, f64)> {
    let mut best: Option<(&BitSolution, f64)> = None;
    for x in candidates {
        let v = value_of(instance, x);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((x, v));
        }
    }
    best.map(|(x, v)| (x.clone(), v))
}
