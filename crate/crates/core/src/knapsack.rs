//! Knapsack instances, bit-vector solutions and their evaluation.
//!
//! Feasibility is the strict constraint `Σ x_i w_i < W`: a selection whose
//! weight equals the capacity exactly does not fit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DimensionError;

/// Weights of the reference ten-item instance.
pub const REFERENCE_WEIGHTS: [f64; 10] = [
    996.0, 771.0, 543.0, 593.0, 621.0, 473.0, 595.0, 388.0, 935.0, 874.0,
];

/// Values of the reference ten-item instance.
pub const REFERENCE_VALUES: [f64; 10] = [
    54.04769411,
    39.33601431,
    14.83657681,
    43.52375770,
    66.31920392,
    26.17907976,
    27.14489409,
    58.72956010,
    25.50253249,
    49.04678721,
];

/// Known optimum of the reference instance.
pub const REFERENCE_OPTIMUM: &str = "1101100100";

/// Tolerance used whenever two objective values are compared for equality.
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub item_count: usize,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub capacity: f64,
}

impl KnapsackInstance {
    /// Builds an instance, rejecting mismatched weight/value lists.
    pub fn new(weights: Vec<f64>, values: Vec<f64>, capacity: f64) -> Result<Self, DimensionError> {
        if weights.len() != values.len() {
            return Err(DimensionError {
                what: "values",
                expected: weights.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            item_count: weights.len(),
            weights,
            values,
            capacity,
        })
    }

    /// The ten-item instance with capacity half the total weight (3394.5).
    pub fn reference() -> Self {
        let weights = REFERENCE_WEIGHTS.to_vec();
        let capacity = 0.5 * weights.iter().sum::<f64>();
        Self {
            item_count: weights.len(),
            weights,
            values: REFERENCE_VALUES.to_vec(),
            capacity,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when every weight is a whole number.
    pub fn has_integer_weights(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == 0.0)
    }

    pub fn evaluate(&self, solution: &BitSolution) -> Result<Evaluation, DimensionError> {
        evaluate(self, solution)
    }

    /// Shorthand for `evaluate(..).feasible` that panics on a length mismatch.
    pub(crate) fn fits(&self, solution: &BitSolution) -> bool {
        debug_assert_eq!(solution.len(), self.item_count);
        weight_of(self, solution) < self.capacity
    }
}

impl Default for KnapsackInstance {
    fn default() -> Self {
        Self::reference()
    }
}

/// A 0/1 selection vector; position `i` set means item `i` is in the sack.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSolution(Vec<bool>);

impl BitSolution {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = on;
    }

    pub fn toggle(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Indices of selected items.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn hamming(&self, other: &BitSolution) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Decodes the low `len` bits of `mask`, bit 0 mapping to position 0.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self((0..len).map(|i| mask >> i & 1 == 1).collect())
    }
}

impl From<Vec<bool>> for BitSolution {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl fmt::Display for BitSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitSolution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit character {0:?}; expected '0' or '1'")]
pub struct ParseBitsError(char);

impl FromStr for BitSolution {
    type Err = ParseBitsError;

    /// Accepts `"1101"` as well as comma separated `"1,1,0,1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitsError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub total_value: f64,
    pub total_weight: f64,
    pub feasible: bool,
}

fn weight_of(instance: &KnapsackInstance, solution: &BitSolution) -> f64 {
    solution.selected().map(|i| instance.weights[i]).sum()
}

/// Value, weight and strict feasibility of `solution` under `instance`.
pub fn evaluate(instance: &KnapsackInstance, solution: &BitSolution) -> Result<Evaluation, DimensionError> {
    if solution.len() != instance.item_count
        || instance.weights.len() != instance.item_count
        || instance.values.len() != instance.item_count
    {
        return Err(DimensionError {
            what: "solution",
            expected: instance.item_count,
            found: solution.len(),
        });
    }
    let total_weight = weight_of(instance, solution);
    let total_value = solution.selected().map(|i| instance.values[i]).sum();
    Ok(Evaluation {
        total_value,
        total_weight,
        feasible: total_weight < instance.capacity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    WeightsLength { expected: usize, found: usize },
    ValuesLength { expected: usize, found: usize },
    EmptyInstance,
    NonPositiveCapacity(f64),
    NegativeWeight { item: usize, weight: f64 },
    NegativeValue { item: usize, value: f64 },
    NonFinite { field: &'static str, item: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightsLength { expected, found } => {
                write!(f, "weights: expected {expected} entries, found {found}")
            }
            Violation::ValuesLength { expected, found } => {
                write!(f, "values: expected {expected} entries, found {found}")
            }
            Violation::EmptyInstance => f.write_str("item_count: must be positive"),
            Violation::NonPositiveCapacity(c) => write!(f, "capacity: must be positive, got {c}"),
            Violation::NegativeWeight { item, weight } => {
                write!(f, "weights[{item}]: must be non-negative, got {weight}")
            }
            Violation::NegativeValue { item, value } => {
                write!(f, "values[{item}]: must be non-negative, got {value}")
            }
            Violation::NonFinite { field, item } => write!(f, "{field}[{item}]: must be finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Capacity is at least the total weight, so every selection fits.
    ConstraintVacuous,
    /// No single item fits; only the empty selection is feasible.
    OnlyEmptyFeasible,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ConstraintVacuous => f.write_str("constraint vacuous"),
            Warning::OnlyEmptyFeasible => f.write_str("only the empty selection is feasible"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_instance(instance: &KnapsackInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = instance.item_count;
    if m == 0 {
        report.violations.push(Violation::EmptyInstance);
    }
    if instance.weights.len() != m {
        report.violations.push(Violation::WeightsLength {
            expected: m,
            found: instance.weights.len(),
        });
    }
    if instance.values.len() != m {
        report.violations.push(Violation::ValuesLength {
            expected: m,
            found: instance.values.len(),
        });
    }
    if !(instance.capacity > 0.0) || !instance.capacity.is_finite() {
        report
            .violations
            .push(Violation::NonPositiveCapacity(instance.capacity));
    }
    for (item, &weight) in instance.weights.iter().enumerate() {
        if !weight.is_finite() {
            report.violations.push(Violation::NonFinite { field: "weights", item });
        } else if weight < 0.0 {
            report.violations.push(Violation::NegativeWeight { item, weight });
        }
    }
    for (item, &value) in instance.values.iter().enumerate() {
        if !value.is_finite() {
            report.violations.push(Violation::NonFinite { field: "values", item });
        } else if value < 0.0 {
            report.violations.push(Violation::NegativeValue { item, value });
        }
    }
    if report.is_valid() {
        if instance.capacity >= instance.total_weight() {
            report.warnings.push(Warning::ConstraintVacuous);
        }
        if !instance.weights.iter().any(|&w| w < instance.capacity) {
            report.warnings.push(Warning::OnlyEmptyFeasible);
        }
    }
    report
}
