//! Permutation-based selection of the sparsity budget s.
//!
//! For each candidate s the clustering objective on the real data is
//! compared against its mean over datasets whose columns were permuted
//! independently, which destroys cluster structure while keeping every
//! marginal. The candidate with the largest surplus wins.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::seq::SliceRandom;

use crate::cluster::{sparse_kmeans, SparseConfig};
use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{FeatureMatrix, GroupPartition};

/// Everything gap_select evaluated, kept for audit: the surviving grid, the
/// observed and permuted objectives, and the decision.
#[derive(Debug, Clone)]
pub struct GapProfile {
    pub grid: Vec<f64>,
    pub observed: Vec<f64>,
    pub perm_mean: Vec<f64>,
    pub perm_std: Vec<f64>,
    pub gap: Vec<f64>,
    pub permutations: usize,
    pub chosen_index: usize,
    pub chosen_s: f64,
    /// Set when even the winning gap is within two permutation standard
    /// deviations of zero, i.e. the data look like the permutation null.
    pub no_structure: bool,
    /// Grid entries below the solver's feasibility floor, dropped upfront.
    pub skipped: Vec<f64>,
}

/// Default candidate grid: `count` log-spaced values spanning the feasible
/// range, from the solver floor up to √p where the budget goes slack.
pub fn default_grid(p: usize, count: usize) -> Vec<f64> {
    let lo = 1.0f64;
    let hi = (p as f64).sqrt().max(lo + 1e-6);
    if count <= 1 {
        return alloc::vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Run the clustering over the candidate grid and pick the s whose real-data
/// objective most exceeds its permutation-null mean (ties to the smaller s).
/// `cfg.s` is ignored; everything else in `cfg` applies to every run. The
/// permutation stream for each (candidate, replicate) cell is independent,
/// so evaluation order cannot affect the result.
pub fn gap_select(
    x: &FeatureMatrix,
    groups: Option<&GroupPartition>,
    grid: &[f64],
    permutations: usize,
    cfg: &SparseConfig,
) -> Result<GapProfile> {
    if permutations < 2 {
        return Err(Error::Param(alloc::format!(
            "gap selection needs at least 2 permutations, got {permutations}"
        )));
    }
    if grid.is_empty() {
        return Err(Error::Param("empty candidate grid".into()));
    }
    for pair in grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::Param("candidate grid must be strictly increasing".into()));
        }
    }
    if !grid.iter().all(|s| s.is_finite()) {
        return Err(Error::Param("candidate grid must be finite".into()));
    }
    // L1 budgets below 1 are infeasible (the unit L2 sphere forces L1 >= 1);
    // group budgets only need to be positive.
    let floor_ok = |s: f64| if groups.is_some() { s > 0.0 } else { s >= 1.0 };
    let (feasible, skipped): (Vec<f64>, Vec<f64>) =
        grid.iter().copied().partition(|&s| floor_ok(s));
    if feasible.is_empty() {
        return Err(Error::Param("every grid entry is below the feasibility floor".into()));
    }
    let mut observed = Vec::with_capacity(feasible.len());
    let mut perm_mean = Vec::with_capacity(feasible.len());
    let mut perm_std = Vec::with_capacity(feasible.len());
    for (si, &s) in feasible.iter().enumerate() {
        let run_cfg = SparseConfig { s, ..cfg.clone() };
        observed.push(sparse_kmeans(x, groups, &run_cfg)?.objective());
        let mut null_objectives = Vec::with_capacity(permutations);
        for bi in 0..permutations {
            let permuted = permute_columns(x, cfg.seed, si as u64, bi as u64);
            null_objectives.push(sparse_kmeans(&permuted, groups, &run_cfg)?.objective());
        }
        let mean: f64 = null_objectives.iter().sum::<f64>() / permutations as f64;
        let var: f64 = null_objectives
            .iter()
            .map(|o| (o - mean) * (o - mean))
            .sum::<f64>()
            / (permutations - 1) as f64;
        perm_mean.push(mean);
        perm_std.push(var.sqrt());
    }
    let gap: Vec<f64> = observed
        .iter()
        .zip(&perm_mean)
        .map(|(o, m)| o - m)
        .collect();
    let mut chosen_index = 0;
    for (i, &g) in gap.iter().enumerate() {
        if g > gap[chosen_index] {
            chosen_index = i;
        }
    }
    let no_structure = gap[chosen_index].abs() < 2.0 * perm_std[chosen_index];
    Ok(GapProfile {
        chosen_s: feasible[chosen_index],
        grid: feasible,
        observed,
        perm_mean,
        perm_std,
        gap,
        permutations,
        chosen_index,
        no_structure,
        skipped,
    })
}

/// Shuffle each feature column independently across instances.
fn permute_columns(x: &FeatureMatrix, seed: u64, si: u64, bi: u64) -> FeatureMatrix {
    let mut rng = rng::stream(seed, &[rng::PERMUTE, si, bi]);
    let (n, p) = (x.n, x.p);
    let mut values = x.values.clone();
    let mut column = alloc::vec![0.0; n];
    for j in 0..p {
        for i in 0..n {
            column[i] = values[i * p + j];
        }
        column.shuffle(&mut rng);
        for i in 0..n {
            values[i * p + j] = column[i];
        }
    }
    FeatureMatrix::new(n, p, values, String::from("permuted"), None)
        .expect("permutation preserves shape")
}
