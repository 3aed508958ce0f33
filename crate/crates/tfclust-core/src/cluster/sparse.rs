use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::cluster::kmeans::{best_of_restarts, ClusterAssignment};
use crate::cluster::weights::{bcss, solve_weights_group, solve_weights_l1, WeightVector};
use crate::error::{Error, Result};
use crate::signals::{FeatureMatrix, GroupPartition};

/// Tuning for the alternating weighted-clustering loop.
#[derive(Debug, Clone)]
pub struct SparseConfig {
    pub k: usize,
    /// Sparsity budget: L1 radius, or group-norm radius when groups are given.
    pub s: f64,
    /// Fresh k-means++ restarts per outer iteration (the incumbent is always
    /// polished as well from the second iteration on).
    pub restarts: usize,
    /// Cap on outer weight/assignment alternations.
    pub max_iters: usize,
    /// Stop when the relative L1 change of the weights falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl SparseConfig {
    pub fn new(k: usize, s: f64, seed: u64) -> Self {
        Self { k, s, restarts: 10, max_iters: 15, tol: 1e-4, seed }
    }
}

/// Outcome of [`sparse_kmeans`]: final assignment, feature weights, and the
/// per-iteration objective `w . B` (nondecreasing by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub assignment: ClusterAssignment,
    pub weights: WeightVector,
    pub s: f64,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub transform_tag: String,
}

impl ClusteringResult {
    /// Final objective value, the quantity the gap selection compares.
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one iteration")
    }
}

/// Weighted K-means with sparsity-constrained feature weights.
///
/// Starting from uniform weights, alternates (a) K-means on features scaled
/// by `sqrt(w)` and (b) the exact weight update for the resulting partition,
/// until the weights settle or `max_iters` is reached. With `groups` absent
/// the weight step solves the L1-budgeted problem; with `groups` present the
/// group-norm-budgeted one, so whole blocks enter or leave together.
pub fn sparse_kmeans(
    x: &FeatureMatrix,
    groups: Option<&GroupPartition>,
    cfg: &SparseConfig,
) -> Result<ClusteringResult> {
    if let Some(part) = groups {
        if part.p() != x.p {
            return Err(Error::Shape(format!(
                "partition covers {} features, matrix has {}",
                part.p(),
                x.p
            )));
        }
    }
    if cfg.max_iters == 0 {
        return Err(Error::Param("max_iters must be at least 1".into()));
    }
    let (n, p) = (x.n, x.p);
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::Param(format!("k = {} with {n} instances", cfg.k)));
    }
    let mut weights = WeightVector {
        values: alloc::vec![1.0 / (p as f64).sqrt(); p],
        degenerate: false,
    };
    let mut scaled = alloc::vec![0.0; n * p];
    let mut trace = Vec::new();
    let mut assignment: Option<ClusterAssignment> = None;
    let mut iterations = 0;
    let mut converged = false;
    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        // (a) K-means in the sqrt(w)-scaled space; warm-start centroids are
        // the incumbent's means in that space so the trace cannot drop.
        let root_w: Vec<f64> = weights.values.iter().map(|&w| w.max(0.0).sqrt()).collect();
        for i in 0..n {
            let row = x.row(i);
            for j in 0..p {
                scaled[i * p + j] = row[j] * root_w[j];
            }
        }
        let warm = assignment
            .as_ref()
            .map(|a| centroids_for(&scaled, n, p, cfg.k, &a.labels));
        let next = best_of_restarts(
            &scaled,
            n,
            p,
            cfg.k,
            cfg.restarts,
            cfg.seed,
            iter,
            warm.as_deref(),
        );
        // (b) Exact weight update for the new partition, on unscaled features.
        let b = bcss(x, &next.labels)?;
        let new_weights = match groups {
            Some(part) => solve_weights_group(&b, cfg.s, part)?,
            None => solve_weights_l1(&b, cfg.s)?,
        };
        let objective: f64 = new_weights
            .values
            .iter()
            .zip(&b)
            .map(|(w, b)| w * b)
            .sum();
        trace.push(objective);
        assignment = Some(next);
        let change: f64 = new_weights
            .values
            .iter()
            .zip(&weights.values)
            .map(|(a, b)| (a - b).abs())
            .sum();
        let base: f64 = weights.values.iter().map(|v| v.abs()).sum();
        weights = new_weights;
        if change / base.max(f64::MIN_POSITIVE) < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(ClusteringResult {
        assignment: assignment.expect("max_iters >= 1"),
        weights,
        s: cfg.s,
        objective_trace: trace,
        iterations,
        converged,
        transform_tag: x.transform_tag.clone(),
    })
}

fn centroids_for(x: &[f64], n: usize, p: usize, k: usize, labels: &[usize]) -> Vec<f64> {
    let mut centroids = alloc::vec![0.0; k * p];
    let mut counts = alloc::vec![0usize; k];
    for i in 0..n {
        counts[labels[i]] += 1;
        let start = labels[i] * p;
        for (j, &v) in x[i * p..(i + 1) * p].iter().enumerate() {
            centroids[start + j] += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            centroids[c * p..(c + 1) * p].iter_mut().for_each(|v| *v *= inv);
        }
    }
    centroids
}

/// Plain K-means restricted to the features whose weight exceeds
/// `threshold`, all with equal weight. Returns the assignment together with
/// the selected column indices.
pub fn refit_on_selected(
    x: &FeatureMatrix,
    weights: &[f64],
    threshold: f64,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<(ClusterAssignment, Vec<usize>)> {
    if weights.len() != x.p {
        return Err(Error::Shape(format!(
            "{} weights for {} features",
            weights.len(),
            x.p
        )));
    }
    let selected: Vec<usize> = (0..x.p).filter(|&j| weights[j] > threshold).collect();
    if selected.is_empty() {
        return Err(Error::Param(format!(
            "no feature weight exceeds threshold {threshold}"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..x.n)
        .map(|i| {
            let row = x.row(i);
            selected.iter().map(|&j| row[j]).collect()
        })
        .collect();
    let sub = FeatureMatrix::from_rows(
        &rows,
        format!("{}[selected {}]", x.transform_tag, selected.len()),
        None,
    )?;
    let assignment = super::kmeans(&sub, k, restarts, seed)?;
    Ok((assignment, selected))
}

/// One group per time index for flattened multivariate instances with `g`
/// rows of length `t`: group `i` holds `{i, i+t, ..., i+(g-1)t}`, the same
/// time point across all rows.
pub fn multivariate_groups(g: usize, t: usize) -> Result<GroupPartition> {
    if g == 0 || t == 0 {
        return Err(Error::Param("multivariate groups need g >= 1 and t >= 1".into()));
    }
    let groups: Vec<Vec<usize>> = (0..t)
        .map(|i| (0..g).map(|row| i + row * t).collect())
        .collect();
    let names: Vec<String> = (0..t).map(|i| format!("t={i}")).collect();
    GroupPartition::new(groups, Some(names))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_distr::{Distribution, StandardNormal};

    /// Two clusters separated only in the first two of ten features.
    fn informative_fixture(n_per: usize, seed: u64) -> (FeatureMatrix, Vec<usize>) {
        let mut rng = crate::rng::stream(seed, &[1000]);
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for c in 0..2 {
            for _ in 0..n_per {
                let mut row = vec![0.0; 10];
                for (j, v) in row.iter_mut().enumerate() {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    let shift = if j < 2 { 3.0 * c as f64 } else { 0.0 };
                    *v = shift + 0.5 * noise;
                }
                rows.push(row);
                truth.push(c);
            }
        }
        let x = FeatureMatrix::from_rows(&rows, String::from("raw"), None).unwrap();
        (x, truth)
    }

    #[test]
    fn weights_land_on_informative_features() {
        let (x, truth) = informative_fixture(15, 21);
        let cfg = SparseConfig::new(2, 1.4, 5);
        let res = sparse_kmeans(&x, None, &cfg).unwrap();
        // The informative pair should absorb almost all weight mass.
        let informative: f64 = res.weights.values[..2].iter().sum();
        let rest: f64 = res.weights.values[2..].iter().sum();
        assert!(informative > 0.9, "informative mass {informative}");
        assert!(rest < 0.3, "noise mass {rest}");
        // And the partition should match the truth up to relabeling.
        let same = truth
            .iter()
            .zip(&res.assignment.labels)
            .filter(|(t, l)| (**t == 0) == (**l == res.assignment.labels[0]))
            .count();
        assert_eq!(same, truth.len());
    }

    #[test]
    fn objective_trace_never_decreases() {
        let (x, _) = informative_fixture(10, 22);
        for s in [1.2, 2.0, 3.0] {
            let cfg = SparseConfig { s, ..SparseConfig::new(2, s, 9) };
            let res = sparse_kmeans(&x, None, &cfg).unwrap();
            for pair in res.objective_trace.windows(2) {
                assert!(
                    pair[1] >= pair[0] - 1e-8,
                    "trace dropped: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
        }
    }

    #[test]
    fn group_budget_selects_whole_groups() {
        let (x, _) = informative_fixture(15, 23);
        // Pair each informative feature with a noise feature; the other three
        // groups are pure noise. Group selection keeps blocks intact.
        let partition = GroupPartition::new(
            vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7], vec![8, 9]],
            None,
        )
        .unwrap();
        let cfg = SparseConfig::new(2, 2.0f64.sqrt() + 0.05, 31);
        let res = sparse_kmeans(&x, Some(&partition), &cfg).unwrap();
        let w = &res.weights.values;
        assert!(w[0] > 0.0 && w[1] > 0.0);
        assert!(w[4..].iter().all(|&v| v < 0.05), "noise groups got {w:?}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (x, _) = informative_fixture(8, 24);
        let cfg = SparseConfig::new(2, 1.6, 77);
        let a = sparse_kmeans(&x, None, &cfg).unwrap();
        let b = sparse_kmeans(&x, None, &cfg).unwrap();
        assert_eq!(a.assignment.labels, b.assignment.labels);
        assert_eq!(a.weights.values, b.weights.values);
        assert_eq!(a.objective_trace, b.objective_trace);
    }

    #[test]
    fn refit_uses_only_selected_columns() {
        let (x, truth) = informative_fixture(12, 25);
        let mut weights = vec![0.0; 10];
        weights[0] = 0.8;
        weights[1] = 0.6;
        let (assignment, selected) = refit_on_selected(&x, &weights, 0.0, 2, 5, 3).unwrap();
        assert_eq!(selected, vec![0, 1]);
        let same = truth
            .iter()
            .zip(&assignment.labels)
            .filter(|(t, l)| (**t == 0) == (**l == assignment.labels[0]))
            .count();
        assert_eq!(same, truth.len());
        assert!(refit_on_selected(&x, &vec![0.0; 10], 0.0, 2, 5, 3).is_err());
    }

    #[test]
    fn multivariate_groups_interleave() {
        let part = multivariate_groups(3, 4).unwrap();
        assert_eq!(part.groups.len(), 4);
        assert_eq!(part.groups[1], vec![1, 5, 9]);
        assert_eq!(part.p(), 12);
        assert_eq!(part.names.as_ref().unwrap()[2], "t=2");
    }

    #[test]
    fn rng_streams_isolate_restarts() {
        // Different seeds explore different restarts but the data decides the
        // final partition; only determinism is asserted here.
        let (x, _) = informative_fixture(10, 26);
        let r1 = sparse_kmeans(&x, None, &SparseConfig::new(2, 1.5, 1)).unwrap();
        let r2 = sparse_kmeans(&x, None, &SparseConfig::new(2, 1.5, 2)).unwrap();
        let agree = r1
            .assignment
            .labels
            .iter()
            .zip(&r2.assignment.labels)
            .filter(|(a, b)| (**a == r1.assignment.labels[0]) == (**b == r2.assignment.labels[0]))
            .count();
        assert_eq!(agree, x.n);
    }
}
