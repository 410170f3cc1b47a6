//! Deterministic random streams.
//!
//! Every consumer of randomness gets its own ChaCha8 stream under the run's
//! master seed: stream 0 assigns scenario policies and stream `j` drives
//! agent `j`. Agents therefore follow identical trajectories across
//! scenarios that share a master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POLICY_STREAM: u64 = 0;

pub fn stream(master_seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}

/// Stream for agent `agent_id` (ids start at 1).
pub fn agent_stream(master_seed: u64, agent_id: usize) -> ChaCha8Rng {
    debug_assert!(agent_id as u64 != POLICY_STREAM);
    stream(master_seed, agent_id as u64)
}

pub fn policy_stream(master_seed: u64) -> ChaCha8Rng {
    stream(master_seed, POLICY_STREAM)
}
