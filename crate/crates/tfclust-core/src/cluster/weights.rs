use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::signals::{FeatureMatrix, GroupPartition};

/// Tolerance on hitting the norm budget exactly in the dual bisections.
const BUDGET_TOL: f64 = 1e-8;
/// Slack allowed on feasibility checks of returned weights.
const FEAS_TOL: f64 = 1e-9;

/// Nonnegative feature weights from one of the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub values: Vec<f64>,
    /// The dispersion vector had no positive entry; weights fell back to
    /// uniform and carry no information.
    pub degenerate: bool,
}

/// Per-feature between-cluster dispersion for a fixed assignment.
///
/// For feature j this is the total pairwise squared-difference dispersion
/// minus the within-cluster part, computed in the equivalent centroid form
/// `2 * sum_k n_k (mean_kj - mean_j)^2`. Values are nonnegative up to
/// roundoff; the solvers clamp tiny negatives.
pub fn bcss(x: &FeatureMatrix, labels: &[usize]) -> Result<Vec<f64>> {
    if labels.len() != x.n {
        return Err(Error::Shape(format!(
            "{} labels for {} instances",
            labels.len(),
            x.n
        )));
    }
    let k = labels.iter().copied().max().unwrap_or(0) + 1;
    let (n, p) = (x.n, x.p);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    let mut total_mean = vec![0.0; p];
    let mut cluster_mean = vec![0.0; k * p];
    for i in 0..n {
        let row = x.row(i);
        let start = labels[i] * p;
        for j in 0..p {
            total_mean[j] += row[j];
            cluster_mean[start + j] += row[j];
        }
    }
    let inv_n = 1.0 / n as f64;
    total_mean.iter_mut().for_each(|m| *m *= inv_n);
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let inv = 1.0 / counts[c] as f64;
        cluster_mean[c * p..(c + 1) * p].iter_mut().for_each(|m| *m *= inv);
    }
    let mut b = vec![0.0; p];
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let nk = counts[c] as f64;
        for j in 0..p {
            let d = cluster_mean[c * p + j] - total_mean[j];
            b[j] += 2.0 * nk * d * d;
        }
    }
    Ok(b)
}

/// Structured norm `sum_g sqrt(|g|) * ||w_(g)||_2`.
pub fn group_norm(w: &[f64], partition: &GroupPartition) -> Result<f64> {
    if partition.p() != w.len() {
        return Err(Error::Shape(format!(
            "partition covers {} features, weights have {}",
            partition.p(),
            w.len()
        )));
    }
    let mut total = 0.0;
    for group in &partition.groups {
        let sq: f64 = group.iter().map(|&j| w[j] * w[j]).sum();
        total += (group.len() as f64).sqrt() * sq.sqrt();
    }
    Ok(total)
}

fn clamp_nonnegative(b: &[f64]) -> Vec<f64> {
    b.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
}

fn uniform_degenerate(p: usize) -> WeightVector {
    let v = 1.0 / (p as f64).sqrt();
    WeightVector { values: vec![v; p], degenerate: true }
}

fn l1(w: &[f64]) -> f64 {
    w.iter().map(|v| v.abs()).sum()
}

fn l2(w: &[f64]) -> f64 {
    w.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Maximizes `w . b` over the unit L2 ball intersected with the L1 ball of
/// radius `s` and the nonnegative orthant.
///
/// Negative entries of `b` are clamped to zero first. The solution is
/// soft-thresholded `b` renormalized, with the threshold found by bisection
/// on the L1 norm; exact ties at the maximum that make the budget
/// unreachable get an explicit optimal split. Requires `s >= 1`, the floor
/// of the L1 norm on the unit sphere.
pub fn solve_weights_l1(b: &[f64], s: f64) -> Result<WeightVector> {
    if b.is_empty() {
        return Err(Error::Shape("empty dispersion vector".into()));
    }
    if !(s >= 1.0) {
        return Err(Error::Param(format!(
            "sparsity budget s = {s} is below the L1 feasibility floor 1"
        )));
    }
    let bp = clamp_nonnegative(b);
    let max = bp.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(uniform_degenerate(b.len()));
    }
    let weights_at = |delta: f64| -> Vec<f64> {
        let mut w: Vec<f64> = bp.iter().map(|&v| (v - delta).max(0.0)).collect();
        let norm = l2(&w);
        if norm > 0.0 {
            w.iter_mut().for_each(|v| *v /= norm);
        }
        w
    };
    let mut w = weights_at(0.0);
    if l1(&w) <= s + FEAS_TOL {
        return Ok(WeightVector { values: w, degenerate: false });
    }
    let (mut lo, mut hi) = (0.0, max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        w = weights_at(mid);
        let norm = l1(&w);
        if norm > s {
            lo = mid;
        } else {
            // Return only from the feasible side so the budget is never
            // overshot, not even by the bisection tolerance.
            hi = mid;
            if s - norm <= BUDGET_TOL {
                return Ok(WeightVector { values: w, degenerate: false });
            }
        }
    }
    w = weights_at(hi);
    let reached = l1(&w);
    if reached > 0.0 && reached <= s + FEAS_TOL && s - reached <= BUDGET_TOL {
        return Ok(WeightVector { values: w, degenerate: false });
    }
    // Bisection stalled: several coordinates tie at the maximum and s lies
    // below sqrt(#ties), which thresholding cannot represent. Put x on the
    // first tied coordinate and y on the rest so that the L1 norm is exactly
    // s on the unit sphere; any such split attains the optimum b_max * s.
    let tied: Vec<usize> = bp
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max * (1.0 - 1e-12))
        .map(|(j, _)| j)
        .collect();
    let m = tied.len() as f64;
    let q = m - 1.0;
    let x = (s + (q * (m - s * s)).max(0.0).sqrt()) / m;
    let y = if q > 0.0 { (s - x) / q } else { 0.0 };
    let mut values = vec![0.0; b.len()];
    values[tied[0]] = x;
    for &j in &tied[1..] {
        values[j] = y;
    }
    Ok(WeightVector { values, degenerate: false })
}

/// Maximizes `w . b` over the unit L2 ball intersected with the group-norm
/// ball `||w||_G <= s` and the nonnegative orthant, where the group norm is
/// [`group_norm`] for `partition`.
///
/// Within each group the optimal direction follows the clamped dispersion;
/// group magnitudes are groupwise soft-thresholded with the threshold found
/// by bisection on the group norm. When `s` is below the reachable range
/// (including below the floor `sqrt(min |g|)`), the optimum concentrates on
/// the best-scoring group scaled so the budget binds; that case is returned
/// in closed form. Singleton groups reduce this to [`solve_weights_l1`].
pub fn solve_weights_group(
    b: &[f64],
    s: f64,
    partition: &GroupPartition,
) -> Result<WeightVector> {
    if partition.p() != b.len() {
        return Err(Error::Shape(format!(
            "partition covers {} features, dispersion vector has {}",
            partition.p(),
            b.len()
        )));
    }
    if !(s > 0.0) {
        return Err(Error::Param(format!("sparsity budget s = {s} must be positive")));
    }
    let p = b.len();
    let bp = clamp_nonnegative(b);
    let n_groups = partition.groups.len();
    let mut beta = vec![0.0; n_groups];
    let mut root_size = vec![0.0; n_groups];
    for (gi, group) in partition.groups.iter().enumerate() {
        beta[gi] = group.iter().map(|&j| bp[j] * bp[j]).sum::<f64>().sqrt();
        root_size[gi] = (group.len() as f64).sqrt();
    }
    if beta.iter().all(|&v| v <= 0.0) {
        return Ok(uniform_degenerate(p));
    }
    // Score beta_g / sqrt(|g|) decides which group survives the largest
    // threshold; also the objective rate per unit of group-norm budget.
    let (mut best_g, mut best_score) = (0, f64::NEG_INFINITY);
    for gi in 0..n_groups {
        let score = beta[gi] / root_size[gi];
        if score > best_score {
            best_score = score;
            best_g = gi;
        }
    }
    let weights_at = |mu: f64| -> Vec<f64> {
        let mut w = vec![0.0; p];
        for (gi, group) in partition.groups.iter().enumerate() {
            if beta[gi] <= 0.0 {
                continue;
            }
            let c = (beta[gi] - mu * root_size[gi]).max(0.0);
            if c > 0.0 {
                let scale = c / beta[gi];
                for &j in group {
                    w[j] = scale * bp[j];
                }
            }
        }
        let norm = l2(&w);
        if norm > 0.0 {
            w.iter_mut().for_each(|v| *v /= norm);
        }
        w
    };
    let mut w = weights_at(0.0);
    if group_norm(&w, partition)? <= s + FEAS_TOL {
        return Ok(WeightVector { values: w, degenerate: false });
    }
    let (mut lo, mut hi) = (0.0, best_score);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        w = weights_at(mid);
        let norm = group_norm(&w, partition)?;
        if norm > s {
            lo = mid;
        } else {
            // Feasible side only, as in the L1 solver.
            hi = mid;
            if s - norm <= BUDGET_TOL {
                return Ok(WeightVector { values: w, degenerate: false });
            }
        }
    }
    w = weights_at(hi);
    let reached = group_norm(&w, partition)?;
    if reached > 0.0 && reached <= s + FEAS_TOL && s - reached <= BUDGET_TOL {
        return Ok(WeightVector { values: w, degenerate: false });
    }
    // Budget below the reachable range: all of it goes to the best-scoring
    // group, scaled so the group norm equals s (L2 norm then sits inside the
    // ball). Attains the bound s * max_g score.
    let mut values = vec![0.0; p];
    let scale = s / (root_size[best_g] * beta[best_g]);
    for &j in &partition.groups[best_g] {
        values[j] = scale * bp[j];
    }
    Ok(WeightVector { values, degenerate: false })
}
