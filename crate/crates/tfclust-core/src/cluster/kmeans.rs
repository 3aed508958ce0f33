use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::signals::FeatureMatrix;

const MAX_LLOYD_ITERS: usize = 300;

/// A hard partition of instances with its centroids and objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    /// k x p, row-major, in the feature space the clustering ran in.
    pub centroids: Vec<f64>,
    pub k: usize,
    /// Total within-cluster sum of squared distances.
    pub wcss: f64,
}

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by WCSS.
///
/// Each restart draws from its own ChaCha12 stream derived from `seed`, so
/// results are reproducible and independent of evaluation order. Nearest-
/// centroid ties break toward the lowest cluster index; a restart beats the
/// incumbent only with strictly smaller WCSS, so earlier restarts win ties.
pub fn kmeans(x: &FeatureMatrix, k: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    validate(x.n, k)?;
    Ok(best_of_restarts(&x.values, x.n, x.p, k, restarts, seed, 0, None))
}

fn validate(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Shape("empty input".into()));
    }
    if k == 0 || k > n {
        return Err(Error::Param(format!("k = {k} with {n} instances")));
    }
    Ok(())
}

/// Shared engine for plain and weighted runs. `outer_iter` namespaces the
/// restart RNG streams when called repeatedly from the sparse loop;
/// `warm` adds one Lloyd run polishing the given centroids, which can only
/// improve on the assignment they came from.
pub(crate) fn best_of_restarts(
    x: &[f64],
    n: usize,
    p: usize,
    k: usize,
    restarts: usize,
    seed: u64,
    outer_iter: usize,
    warm: Option<&[f64]>,
) -> ClusterAssignment {
    let mut best: Option<ClusterAssignment> = None;
    if let Some(centroids) = warm {
        let run = lloyd(x, n, p, k, centroids.to_vec());
        best = Some(run);
    }
    for r in 0..restarts.max(if warm.is_some() { 0 } else { 1 }) {
        let mut stream = rng::stream(seed, &[rng::RESTART, outer_iter as u64, r as u64]);
        let init = kmeanspp_init(x, n, p, k, &mut stream);
        let run = lloyd(x, n, p, k, init);
        let improves = best.as_ref().map_or(true, |b| run.wcss < b.wcss);
        if improves {
            best = Some(run);
        }
    }
    best.expect("at least one run")
}

/// k-means++ seeding: first center uniform, then D^2 sampling.
fn kmeanspp_init(x: &[f64], n: usize, p: usize, k: usize, stream: &mut impl Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k * p);
    let first = stream.gen_range(0..n);
    centroids.extend_from_slice(&x[first * p..(first + 1) * p]);
    let mut d2: Vec<f64> = (0..n)
        .map(|i| dist_sq(&x[i * p..(i + 1) * p], &centroids[..p], f64::INFINITY))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = stream.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass at already-chosen points (duplicates); any
            // index works, empty-cluster repair cleans up later.
            stream.gen_range(0..n)
        };
        let start = c * p;
        centroids.extend_from_slice(&x[idx * p..(idx + 1) * p]);
        for i in 0..n {
            let d = dist_sq(&x[i * p..(i + 1) * p], &centroids[start..start + p], d2[i]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

/// Squared distance with early abandonment once `cap` is exceeded; exceeding
/// partial sums can only grow, so comparisons against `cap` are exact.
fn dist_sq(a: &[f64], b: &[f64], cap: f64) -> f64 {
    let mut acc = 0.0;
    for (chunk_a, chunk_b) in a.chunks(16).zip(b.chunks(16)) {
        for (va, vb) in chunk_a.iter().zip(chunk_b) {
            let d = va - vb;
            acc += d * d;
        }
        if acc > cap {
            return acc;
        }
    }
    acc
}

fn lloyd(x: &[f64], n: usize, p: usize, k: usize, mut centroids: Vec<f64>) -> ClusterAssignment {
    debug_assert_eq!(centroids.len(), k * p);
    let mut labels = vec![usize::MAX; n];
    let mut counts = vec![0usize; k];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        counts.iter_mut().for_each(|c| *c = 0);
        for i in 0..n {
            let xi = &x[i * p..(i + 1) * p];
            let mut best_c = 0;
            let mut best_d = dist_sq(xi, &centroids[..p], f64::INFINITY);
            for c in 1..k {
                let d = dist_sq(xi, &centroids[c * p..(c + 1) * p], best_d);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
            counts[best_c] += 1;
        }
        // Empty clusters are reseeded at the point farthest from its current
        // centroid, taken from clusters that can spare a member.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far_i = usize::MAX;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[labels[i]] < 2 {
                    continue;
                }
                let d = dist_sq(
                    &x[i * p..(i + 1) * p],
                    &centroids[labels[i] * p..(labels[i] + 1) * p],
                    f64::INFINITY,
                );
                if d > far_d {
                    far_d = d;
                    far_i = i;
                }
            }
            counts[labels[far_i]] -= 1;
            labels[far_i] = c;
            counts[c] = 1;
            centroids[c * p..(c + 1) * p].copy_from_slice(&x[far_i * p..(far_i + 1) * p]);
            changed = true;
        }
        if !changed {
            break;
        }
        centroids.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let start = labels[i] * p;
            for (j, &v) in x[i * p..(i + 1) * p].iter().enumerate() {
                centroids[start + j] += v;
            }
        }
        for c in 0..k {
            let inv = 1.0 / counts[c] as f64;
            centroids[c * p..(c + 1) * p].iter_mut().for_each(|v| *v *= inv);
        }
    }
    let mut wcss = 0.0;
    for i in 0..n {
        wcss += dist_sq(
            &x[i * p..(i + 1) * p],
            &centroids[labels[i] * p..(labels[i] + 1) * p],
            f64::INFINITY,
        );
    }
    ClusterAssignment { labels, centroids, k, wcss }
}
