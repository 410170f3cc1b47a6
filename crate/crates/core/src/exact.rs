//! Exact optima: dynamic programming over integer capacities, and exhaustive
//! enumeration as an independent cross-check.
//!
//! Both solvers resolve equal-value optima the same way: highest value (within
//! [`VALUE_TOLERANCE`]), then lowest total weight, then the lexicographically
//! smallest bit vector (a `0` at position 0 sorts first).

use serde::Serialize;

use crate::error::SolverError;
use crate::knapsack::{BitSolution, KnapsackInstance, VALUE_TOLERANCE};

/// Largest item count accepted by [`solve_brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 25;

const DP_CELL_LIMIT: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalResult {
    pub solution: BitSolution,
    pub value: f64,
    pub weight: f64,
}

impl OptimalResult {
    fn empty(item_count: usize) -> Self {
        Self {
            solution: BitSolution::zeros(item_count),
            value: 0.0,
            weight: 0.0,
        }
    }
}

/// Largest integer strictly below `capacity`.
pub fn integer_capacity(capacity: f64) -> i64 {
    capacity.ceil() as i64 - 1
}

pub fn solve_dp(instance: &KnapsackInstance) -> Result<OptimalResult, SolverError> {
    let m = instance.item_count;
    if !instance.has_integer_weights() {
        return Err(SolverError::NonIntegerWeights);
    }
    let cap = integer_capacity(instance.capacity);
    if m == 0 || cap < 0 {
        return Ok(OptimalResult::empty(m));
    }
    let cap = cap as usize;
    let cells = (m as u128 + 1) * (cap as u128 + 1);
    if cells > DP_CELL_LIMIT {
        return Err(SolverError::TableTooLarge(cells));
    }
    let width = cap + 1;
    let weights: Vec<usize> = instance.weights.iter().map(|&w| w as usize).collect();

    // best[i][c]: max value from items i.. with total weight exactly c.
    let mut best = vec![f64::NEG_INFINITY; (m + 1) * width];
    best[m * width] = 0.0;
    for i in (0..m).rev() {
        let (head, tail) = best.split_at_mut((i + 1) * width);
        let row = &mut head[i * width..];
        let next = &tail[..width];
        row.copy_from_slice(next);
        let w = weights[i];
        let v = instance.values[i];
        for c in w..width {
            let take = next[c - w] + v;
            if take > row[c] {
                row[c] = take;
            }
        }
    }

    let top = &best[..width];
    let optimum = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let Some(target_weight) = top.iter().position(|&v| v >= optimum - VALUE_TOLERANCE) else {
        return Ok(OptimalResult::empty(m));
    };

    // Walk forward, leaving an item out whenever an equally good completion
    // without it exists.
    let mut solution = BitSolution::zeros(m);
    let mut remaining_weight = target_weight;
    let mut remaining_value = top[target_weight];
    for i in 0..m {
        let skip = best[(i + 1) * width + remaining_weight];
        if skip >= remaining_value - VALUE_TOLERANCE {
            continue;
        }
        solution.set(i, true);
        remaining_weight -= weights[i];
        remaining_value -= instance.values[i];
    }
    let eval = instance.evaluate(&solution)?;
    Ok(OptimalResult {
        solution,
        value: eval.total_value,
        weight: eval.total_weight,
    })
}

pub fn solve_brute_force(instance: &KnapsackInstance) -> Result<OptimalResult, SolverError> {
    let m = instance.item_count;
    if m > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooManyItems(m));
    }
    let mut feasible = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let solution = BitSolution::from_mask(mask, m);
        let eval = instance.evaluate(&solution)?;
        if eval.feasible {
            feasible.push((solution, eval.total_value, eval.total_weight));
        }
    }
    let optimum = feasible
        .iter()
        .map(|(_, v, _)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = feasible
        .into_iter()
        .filter(|(_, v, _)| *v >= optimum - VALUE_TOLERANCE)
        .min_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
    Ok(match best {
        Some((solution, value, weight)) => OptimalResult {
            solution,
            value,
            weight,
        },
        // Even the empty selection is infeasible (capacity <= 0).
        None => OptimalResult::empty(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::REFERENCE_OPTIMUM;

    #[test]
    fn reference_instance_dp() {
        let r = solve_dp(&KnapsackInstance::reference()).unwrap();
        assert_eq!(r.solution.to_string(), REFERENCE_OPTIMUM);
        assert!((r.value - 261.95623014).abs() < VALUE_TOLERANCE);
        assert_eq!(r.weight, 3369.0);
    }

    #[test]
    fn reference_instance_brute_force_matches_dp() {
        let inst = KnapsackInstance::reference();
        assert_eq!(solve_brute_force(&inst).unwrap(), solve_dp(&inst).unwrap());
    }

    #[test]
    fn three_items() {
        let inst = KnapsackInstance::new(vec![2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0], 5.5).unwrap();
        let r = solve_dp(&inst).unwrap();
        assert_eq!(r.solution.to_string(), "110");
        assert_eq!(r.value, 7.0);
        assert_eq!(solve_brute_force(&inst).unwrap(), r);
    }

    #[test]
    fn nothing_fits() {
        let inst = KnapsackInstance::new(vec![4.0, 7.0], vec![3.0, 9.0], 4.0).unwrap();
        for r in [solve_dp(&inst).unwrap(), solve_brute_force(&inst).unwrap()] {
            assert_eq!(r.solution, BitSolution::zeros(2));
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn strict_boundary_single_item() {
        let inst = KnapsackInstance::new(vec![5.0], vec![9.0], 5.0).unwrap();
        assert_eq!(solve_brute_force(&inst).unwrap().solution.to_string(), "0");
        assert_eq!(solve_dp(&inst).unwrap().solution.to_string(), "0");
    }

    #[test]
    fn everything_fits() {
        let inst = KnapsackInstance::new(vec![1.0, 1.0], vec![1.0, 1.0], 10.0).unwrap();
        let r = solve_brute_force(&inst).unwrap();
        assert_eq!(r.solution.to_string(), "11");
        assert_eq!(r.value, 2.0);
        assert_eq!(solve_dp(&inst).unwrap(), r);
    }

    #[test]
    fn tie_break_prefers_lighter_then_lexicographic() {
        // 100 and 011 both have value 5; the lighter wins.
        let inst = KnapsackInstance::new(vec![4.0, 1.0, 1.0], vec![5.0, 2.0, 3.0], 10.0).unwrap();
        let inst = KnapsackInstance { capacity: 4.5, ..inst };
        assert_eq!(solve_dp(&inst).unwrap().solution.to_string(), "011");
        assert_eq!(solve_brute_force(&inst).unwrap().solution.to_string(), "011");
        // 10 and 01 tie on value and weight; lexicographic order picks 01.
        let inst = KnapsackInstance::new(vec![2.0, 2.0], vec![1.0, 1.0], 3.0).unwrap();
        assert_eq!(solve_dp(&inst).unwrap().solution.to_string(), "01");
        assert_eq!(solve_brute_force(&inst).unwrap().solution.to_string(), "01");
    }

    #[test]
    fn zero_value_items_are_left_out() {
        let inst = KnapsackInstance::new(vec![1.0, 2.0], vec![0.0, 0.0], 10.0).unwrap();
        assert_eq!(solve_dp(&inst).unwrap().solution.to_string(), "00");
        assert_eq!(solve_brute_force(&inst).unwrap().solution.to_string(), "00");
    }

    #[test]
    fn empty_instance() {
        let inst = KnapsackInstance::new(vec![], vec![], 1.0).unwrap();
        assert_eq!(solve_dp(&inst).unwrap().solution.len(), 0);
        assert_eq!(solve_brute_force(&inst).unwrap().value, 0.0);
    }

    #[test]
    fn dp_refuses_fractional_weights() {
        let inst = KnapsackInstance::new(vec![1.5], vec![1.0], 3.0).unwrap();
        let err = solve_dp(&inst).unwrap_err();
        assert_eq!(err.to_string(), "dp requires integer weights; use brute force");
        assert_eq!(solve_brute_force(&inst).unwrap().solution.to_string(), "1");
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let inst = KnapsackInstance::new(vec![1.0; 26], vec![1.0; 26], 3.0).unwrap();
        assert_eq!(solve_brute_force(&inst), Err(SolverError::TooManyItems(26)));
    }

    #[test]
    fn integer_capacity_is_strictly_below() {
        assert_eq!(integer_capacity(3394.5), 3394);
        assert_eq!(integer_capacity(5.0), 4);
        assert_eq!(integer_capacity(5.5), 5);
        assert_eq!(integer_capacity(0.5), 0);
    }
}
