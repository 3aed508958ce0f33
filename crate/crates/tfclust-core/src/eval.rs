//! Partition agreement scoring.
//!
//! The adjusted Rand index is computed from the contingency table in exact
//! integer arithmetic carried in f64 (all binomial sums here stay far below
//! 2^53), so two implementations of the same formula agree bit for bit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Cross-tabulation of two labelings: `counts[i * cols + j]` is the number
/// of instances in true class i and predicted class j.
#[derive(Debug, Clone)]
pub struct Contingency {
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<usize>,
    pub row_sums: Vec<usize>,
    pub col_sums: Vec<usize>,
    pub n: usize,
}

impl Contingency {
    pub fn from_labels(truth: &[usize], predicted: &[usize]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::Shape(format!(
                "{} true labels vs {} predicted",
                truth.len(),
                predicted.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::Shape("empty labelings".into()));
        }
        let row_of = dense_index(truth);
        let col_of = dense_index(predicted);
        let (rows, cols) = (row_of.len(), col_of.len());
        let mut counts = alloc::vec![0usize; rows * cols];
        for (t, p) in truth.iter().zip(predicted) {
            counts[row_of[t] * cols + col_of[p]] += 1;
        }
        let row_sums: Vec<usize> = (0..rows)
            .map(|i| counts[i * cols..(i + 1) * cols].iter().sum())
            .collect();
        let col_sums: Vec<usize> = (0..cols)
            .map(|j| (0..rows).map(|i| counts[i * cols + j]).sum())
            .collect();
        Ok(Self { rows, cols, counts, row_sums, col_sums, n: truth.len() })
    }
}

fn dense_index(labels: &[usize]) -> BTreeMap<usize, usize> {
    let mut map = BTreeMap::new();
    for &l in labels {
        let next = map.len();
        map.entry(l).or_insert(next);
    }
    map
}

/// ARI value plus a flag for the zero-denominator corner (both partitions
/// trivial), where the index is defined by convention rather than formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AriScore {
    pub value: f64,
    pub degenerate: bool,
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Chance-corrected agreement between two labelings of the same instances.
/// 1 means identical partitions, values near 0 are chance level, negative
/// values are worse than chance. Invariant to relabeling on either side.
pub fn adjusted_rand_index(truth: &[usize], predicted: &[usize]) -> Result<AriScore> {
    let table = Contingency::from_labels(truth, predicted)?;
    let sum_cells: f64 = table.counts.iter().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = table.row_sums.iter().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = table.col_sums.iter().map(|&c| comb2(c)).sum();
    let total = comb2(table.n);
    if total == 0.0 {
        // A single instance: both partitions are necessarily identical.
        return Ok(AriScore { value: 1.0, degenerate: true });
    }
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        // Both partitions trivial (all-in-one or all-singletons): equal
        // pair relations mean identical partitions.
        let identical = sum_cells == sum_rows && sum_cells == sum_cols;
        return Ok(AriScore { value: if identical { 1.0 } else { 0.0 }, degenerate: true });
    }
    Ok(AriScore { value: (sum_cells - expected) / denom, degenerate: false })
}
