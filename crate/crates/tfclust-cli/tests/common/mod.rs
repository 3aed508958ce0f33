#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha12Rng;

pub fn stream(seed: u64, ids: &[u64]) -> ChaCha12Rng {
    tfclust_core::rng::stream(seed, ids)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let v: f64 = StandardNormal.sample(rng);
    v
}

// ---------------------------------------------------------------------------
// Weight-solver oracle: projected gradient ascent on w^T b over the
// intersection of the unit L2 ball, the budget ball, and the nonnegative
// orthant, with Dykstra's algorithm supplying the intersection projection.
// Independent of the production solvers, which parameterize the optimum and
// bisect a Lagrange multiplier instead.
// ---------------------------------------------------------------------------

pub enum Budget<'a> {
    L1(f64),
    Group(&'a [Vec<usize>], f64),
}

fn project_l2(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 1.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / norm).collect()
}

fn budget_norm(v: &[f64], budget: &Budget) -> f64 {
    match budget {
        Budget::L1(_) => v.iter().map(|x| x.abs()).sum(),
        Budget::Group(groups, _) => groups
            .iter()
            .map(|g| {
                (g.len() as f64).sqrt()
                    * g.iter().map(|&j| v[j] * v[j]).sum::<f64>().sqrt()
            })
            .sum(),
    }
}

fn budget_radius(budget: &Budget) -> f64 {
    match budget {
        Budget::L1(s) | Budget::Group(_, s) => *s,
    }
}

/// Exact projection onto {w >= 0, budget norm <= s}. Clamping to the
/// positive part first is exact on this orthant: the shrinkage never makes
/// a zeroed coordinate profitable again, by the KKT conditions.
fn project_capped_orthant(v: &[f64], budget: &Budget) -> Vec<f64> {
    let u: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if budget_norm(&u, budget) <= budget_radius(budget) {
        return u;
    }
    match budget {
        Budget::L1(s) => {
            let mut mags: Vec<f64> = u.iter().copied().filter(|x| *x > 0.0).collect();
            mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut cumsum = 0.0;
            let mut theta = 0.0;
            for (j, &m) in mags.iter().enumerate() {
                cumsum += m;
                let candidate = (cumsum - s) / (j + 1) as f64;
                if m > candidate {
                    theta = candidate;
                } else {
                    break;
                }
            }
            u.iter().map(|&x| (x - theta).max(0.0)).collect()
        }
        Budget::Group(groups, s) => {
            let beta: Vec<f64> = groups
                .iter()
                .map(|g| g.iter().map(|&j| u[j] * u[j]).sum::<f64>().sqrt())
                .collect();
            let a: Vec<f64> = groups.iter().map(|g| (g.len() as f64).sqrt()).collect();
            let reach = |theta: f64| -> f64 {
                beta.iter().zip(&a).map(|(&b, &ag)| ag * (b - theta * ag).max(0.0)).sum()
            };
            let mut lo = 0.0;
            let mut hi =
                beta.iter().zip(&a).map(|(&b, &ag)| b / ag).fold(0.0_f64, f64::max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if reach(mid) > *s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let theta = 0.5 * (lo + hi);
            let mut w = vec![0.0; u.len()];
            for (g, (&b, &ag)) in groups.iter().zip(beta.iter().zip(&a)) {
                if b == 0.0 {
                    continue;
                }
                let shrink = (b - theta * ag).max(0.0) / b;
                for &j in g {
                    w[j] = u[j] * shrink;
                }
            }
            w
        }
    }
}

/// Dykstra's alternating projections onto the intersection of the unit L2
/// ball and the capped orthant, run until a full cycle stops moving the
/// iterate.
fn project_feasible(v: &[f64], budget: &Budget) -> Vec<f64> {
    let p = v.len();
    let mut x = v.to_vec();
    let mut inc = [vec![0.0; p], vec![0.0; p]];
    for _ in 0..3000 {
        let before = x.clone();
        for (set, correction) in inc.iter_mut().enumerate() {
            let shifted: Vec<f64> =
                x.iter().zip(correction.iter()).map(|(xi, ci)| xi + ci).collect();
            let projected = if set == 0 {
                project_l2(&shifted)
            } else {
                project_capped_orthant(&shifted, budget)
            };
            for j in 0..p {
                correction[j] = shifted[j] - projected[j];
            }
            x = projected;
        }
        let moved =
            x.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0_f64, f64::max);
        if moved < 1e-15 {
            break;
        }
    }
    x
}

/// Clamps and scales a candidate onto the feasible set. Every constraint is
/// positively homogeneous, so scaling down never leaves the set; scoring
/// only certified points keeps the oracle honest even when the projection
/// loop has not fully converged.
fn certify(w: &[f64], budget: &Budget) -> Vec<f64> {
    let mut w: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let l2 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bn = budget_norm(&w, budget);
    let s = budget_radius(budget);
    let mut t = 1.0_f64;
    if l2 > 1.0 {
        t = t.min(1.0 / l2);
    }
    if bn > s {
        t = t.min(s / bn);
    }
    if t < 1.0 {
        for x in &mut w {
            *x *= t;
        }
    }
    w
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes w^T b over the feasible set by accelerated projected gradient,
/// then polishes with small monotone plain steps. The objective is linear,
/// so any step size is admissible and the accelerated gap decays
/// quadratically in the iteration count. Only certified feasible points are
/// scored, so the returned objective is a true lower bound on the maximum.
pub fn pg_oracle(b: &[f64], budget: &Budget) -> (Vec<f64>, f64) {
    let scale = b.iter().fold(1e-12_f64, |m, v| m.max(v.abs()));
    let step = 2.0 / scale;
    let start: Vec<f64> = b.iter().map(|x| x.max(0.0)).collect();
    let mut w = certify(&start, budget);
    let mut w_prev = w.clone();
    let mut momentum = 1.0_f64;
    let mut best_w = w.clone();
    let mut best = dot(&best_w, b);
    for _ in 0..6000 {
        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let shrink = (momentum - 1.0) / next_momentum;
        let lookahead: Vec<f64> =
            w.iter().zip(&w_prev).map(|(cur, old)| cur + shrink * (cur - old)).collect();
        let proposal: Vec<f64> =
            lookahead.iter().zip(b).map(|(yi, bi)| yi + step * bi).collect();
        let next = project_feasible(&proposal, budget);
        w_prev = w;
        w = next;
        momentum = next_momentum;
        let certified = certify(&w, budget);
        let obj = dot(&certified, b);
        if obj > best {
            best = obj;
            best_w = certified;
        }
    }
    let polish_step = 0.05 / scale;
    let mut w = best_w.clone();
    for _ in 0..2000 {
        let proposal: Vec<f64> = w.iter().zip(b).map(|(wi, bi)| wi + polish_step * bi).collect();
        w = project_feasible(&proposal, budget);
        let certified = certify(&w, budget);
        let obj = dot(&certified, b);
        if obj > best {
            best = obj;
            best_w = certified;
        }
    }
    (best_w, best)
}

/// Compensated sum of squares, so the energy comparison measures the
/// transform rather than summation roundoff.
pub fn sum_sq_compensated(v: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in v {
        let term = x * x;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    sum + comp
}

// ---------------------------------------------------------------------------
// Dispersion oracle: the literal double-sum form, all ordered pairs.
// ---------------------------------------------------------------------------

pub fn bcss_double_sum(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<f64> {
    let n = rows.len();
    let p = rows[0].len();
    let mut out = vec![0.0; p];
    for j in 0..p {
        let mut total = 0.0;
        for i in 0..n {
            for i2 in 0..n {
                let d = rows[i][j] - rows[i2][j];
                total += d * d;
            }
        }
        total /= n as f64;
        let mut within = 0.0;
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mut cluster = 0.0;
            for &i in &members {
                for &i2 in &members {
                    let d = rows[i][j] - rows[i2][j];
                    cluster += d * d;
                }
            }
            within += cluster / members.len() as f64;
        }
        out[j] = total - within;
    }
    out
}

// ---------------------------------------------------------------------------
// ARI oracle: brute-force pair counting, no contingency table.
// ---------------------------------------------------------------------------

pub fn ari_pair_counting(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut together_both = 0u64;
    let mut together_a_only = 0u64;
    let mut together_b_only = 0u64;
    let mut apart_both = 0u64;
    for i in 0..n {
        for i2 in (i + 1)..n {
            match (a[i] == a[i2], b[i] == b[i2]) {
                (true, true) => together_both += 1,
                (true, false) => together_a_only += 1,
                (false, true) => together_b_only += 1,
                (false, false) => apart_both += 1,
            }
        }
    }
    let (n11, n10, n01, n00) = (
        together_both as f64,
        together_a_only as f64,
        together_b_only as f64,
        apart_both as f64,
    );
    let denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
    if denom == 0.0 {
        // Both partitions are trivial; they agree on every pair or on none.
        return if n10 == 0.0 && n01 == 0.0 { 1.0 } else { 0.0 };
    }
    2.0 * (n11 * n00 - n10 * n01) / denom
}

// ---------------------------------------------------------------------------
// Synthetic stature curves: two groups with different adult heights and
// pubertal timing, measured at 30 ages. Stands in for user-supplied data in
// the end-to-end pipeline checks.
// ---------------------------------------------------------------------------

pub fn growth_like_curves(n_per_group: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let t = 30;
    let mut rows = Vec::with_capacity(2 * n_per_group);
    let mut labels = Vec::with_capacity(2 * n_per_group);
    for group in 0..2usize {
        let (adult, spurt_age, spurt_gain) =
            if group == 0 { (165.0, 11.0, 7.0) } else { (177.0, 13.0, 10.0) };
        for i in 0..n_per_group {
            let mut rng = stream(seed, &[group as u64, i as u64]);
            let adult_i = adult + 4.0 * normal(&mut rng);
            let spurt_age_i = spurt_age + 0.7 * normal(&mut rng);
            let spurt_gain_i = spurt_gain + 1.5 * normal(&mut rng);
            let base = 74.0 + 3.0 * normal(&mut rng);
            let mut row = Vec::with_capacity(t);
            for k in 0..t {
                let age = 1.0 + 17.0 * k as f64 / (t - 1) as f64;
                let trunk = base + (adult_i - base - spurt_gain_i) * (age / 18.0).powf(0.72);
                let spurt = spurt_gain_i / (1.0 + (-(age - spurt_age_i) / 0.8).exp());
                row.push(trunk + spurt + 0.5 * normal(&mut rng));
            }
            rows.push(row);
            labels.push(group);
        }
    }
    (rows, labels)
}

pub fn write_csv_with_header(path: &std::path::Path, rows: &[Vec<f64>]) {
    let t = rows[0].len();
    let header: Vec<String> = (1..=t).map(|k| format!("age_{k}")).collect();
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}
