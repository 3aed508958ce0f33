//! Synthetic benchmark generators.
//!
//! Clusters are built around the classic Donoho-Johnstone test curves,
//! sampled on a uniform grid over (0,1], rescaled to sample SD 1 on the
//! unpadded grid and multiplied by 7 (the usual SNR-7 convention), then
//! zero-padded and corrupted with i.i.d. Gaussian noise. Every instance
//! draws from its own RNG stream, so generation is reproducible and
//! order-independent.

use alloc::vec::Vec;

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{Dataset, MultivariateSignal};

const KNOTS: [f64; 11] = [0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BLOCK_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMP_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMP_WIDTHS: [f64; 11] =
    [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005];

/// Target amplitude: every curve is scaled to this sample SD over the base
/// grid, so all shapes share one difficulty scale. The value keeps the
/// benchmark noise levels (sigma near 2) firmly in the low-SNR regime where
/// per-coordinate distances are unreliable and sparse feature weighting
/// actually matters; with a much larger amplitude every method ties at
/// ARI 1 and the benchmarks say nothing.
const AMPLITUDE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Flat,
    Heavisine,
    Blocks,
    Bumps,
    Doppler,
    PiecewisePoly,
}

impl CurveKind {
    pub const ALL: [CurveKind; 6] = [
        CurveKind::Flat,
        CurveKind::Heavisine,
        CurveKind::Blocks,
        CurveKind::Bumps,
        CurveKind::Doppler,
        CurveKind::PiecewisePoly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Flat => "flat",
            CurveKind::Heavisine => "heavisine",
            CurveKind::Blocks => "blocks",
            CurveKind::Bumps => "bumps",
            CurveKind::Doppler => "doppler",
            CurveKind::PiecewisePoly => "piecewise-poly",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Param(alloc::format!("unknown curve kind {name:?}")))
    }
}

fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn raw_curve(kind: CurveKind, t: f64) -> f64 {
    match kind {
        CurveKind::Flat => 0.0,
        CurveKind::Heavisine => 4.0 * (4.0 * PI * t).sin() - sgn(t - 0.3) - sgn(0.72 - t),
        CurveKind::Blocks => KNOTS
            .iter()
            .zip(&BLOCK_HEIGHTS)
            .map(|(&tj, &h)| h * 0.5 * (1.0 + sgn(t - tj)))
            .sum(),
        CurveKind::Bumps => KNOTS
            .iter()
            .zip(BUMP_HEIGHTS.iter().zip(&BUMP_WIDTHS))
            .map(|(&tj, (&h, &w))| h * (1.0 + ((t - tj) / w).abs()).powi(-4))
            .sum(),
        CurveKind::Doppler => (t * (1.0 - t)).max(0.0).sqrt() * (2.0 * PI * 1.05 / (t + 0.05)).sin(),
        CurveKind::PiecewisePoly => {
            // Continuous except for a single jump at t = 1/2.
            if t < 0.5 {
                4.0 * t * t * (3.0 - 4.0 * t)
            } else if t < 0.75 {
                (4.0 / 3.0) * t * (4.0 * t * t - 10.0 * t + 7.0) - 1.5
            } else {
                (16.0 / 3.0) * t * (t - 1.0) * (t - 1.0)
            }
        }
    }
}

/// One test curve on the grid t = (i+1)/length, rescaled so the sample SD
/// over these points is [`AMPLITUDE`]. The flat curve stays identically zero.
pub fn donoho_curve(kind: CurveKind, length: usize) -> Result<Vec<f64>> {
    if length < 8 {
        return Err(Error::Param(alloc::format!(
            "curve length {length} is too short to resolve the test functions"
        )));
    }
    let mut values: Vec<f64> = (0..length)
        .map(|i| raw_curve(kind, (i + 1) as f64 / length as f64))
        .collect();
    let mean = values.iter().sum::<f64>() / length as f64;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / length as f64).sqrt();
    if sd > 0.0 {
        let scale = AMPLITUDE / sd;
        values.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(values)
}

/// A cluster center recipe: which curve, at what base resolution, padded to
/// the working length with zeros on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub base_len: usize,
    pub pad_left: usize,
    pub pad_right: usize,
}

impl CurveSpec {
    pub fn new(kind: CurveKind, base_len: usize, pad_left: usize, pad_right: usize) -> Result<Self> {
        let total = base_len + pad_left + pad_right;
        if total == 0 || !total.is_power_of_two() {
            return Err(Error::Param(alloc::format!(
                "padded curve length {total} is not a power of two"
            )));
        }
        Ok(Self { kind, base_len, pad_left, pad_right })
    }

    pub fn len(&self) -> usize {
        self.base_len + self.pad_left + self.pad_right
    }

    pub fn center(&self) -> Result<Vec<f64>> {
        let core = donoho_curve(self.kind, self.base_len)?;
        Ok(crate::dwt::pad_signal(&core, self.pad_left, self.pad_right))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_per_cluster: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n_per_cluster: usize, sigma: f64, seed: u64) -> Result<Self> {
        if n_per_cluster == 0 {
            return Err(Error::Param("need at least one instance per cluster".into()));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Param(alloc::format!("noise SD must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { n_per_cluster, sigma, seed })
    }
}

/// Figure-1-style order of the six univariate cluster centers.
pub const UNIVARIATE_KINDS: [CurveKind; 6] = [
    CurveKind::Flat,
    CurveKind::Heavisine,
    CurveKind::Blocks,
    CurveKind::Bumps,
    CurveKind::Doppler,
    CurveKind::PiecewisePoly,
];

/// The six univariate centers: base length 256, padded by 128 zeros on each
/// side to length 512.
pub fn univariate_centers() -> Vec<Vec<f64>> {
    UNIVARIATE_KINDS
        .iter()
        .map(|&k| {
            CurveSpec::new(k, 256, 128, 128)
                .and_then(|s| s.center())
                .expect("fixed univariate table is valid")
        })
        .collect()
}

/// Six clusters of noisy curves, length 512, labels attached in cluster
/// order. Noise is added to the padded center, pad regions included.
pub fn make_univariate_benchmark(config: &SimConfig) -> Result<Dataset> {
    let centers = univariate_centers();
    assemble(config, 1, 512, &centers)
}

/// Row assignment for the five multivariate centers: cluster k takes three
/// cyclically adjacent kinds from this rotation, so every cluster differs
/// from every other in at least two of its three rows.
const MULTIVARIATE_ROTATION: [CurveKind; 6] = [
    CurveKind::Heavisine,
    CurveKind::Blocks,
    CurveKind::Bumps,
    CurveKind::Doppler,
    CurveKind::PiecewisePoly,
    CurveKind::Flat,
];

/// The five 3-row multivariate centers, each row base length 128 padded by
/// 64 zeros on each side to length 256.
pub fn multivariate_centers() -> Vec<MultivariateSignal> {
    (0..5)
        .map(|k| {
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|r| {
                    let kind = MULTIVARIATE_ROTATION[(k + r) % MULTIVARIATE_ROTATION.len()];
                    CurveSpec::new(kind, 128, 64, 64)
                        .and_then(|s| s.center())
                        .expect("fixed multivariate table is valid")
                })
                .collect();
            MultivariateSignal::new(rows).expect("rows share length 256")
        })
        .collect()
}

/// Five clusters of noisy 3x256 instances, stored flattened row-major.
pub fn make_multivariate_benchmark(config: &SimConfig) -> Result<Dataset> {
    let centers: Vec<Vec<f64>> = multivariate_centers()
        .iter()
        .map(crate::signals::flatten_multivariate)
        .collect();
    assemble(config, 3, 256, &centers)
}

fn assemble(config: &SimConfig, g: usize, t: usize, centers: &[Vec<f64>]) -> Result<Dataset> {
    if config.n_per_cluster == 0 {
        return Err(Error::Param("need at least one instance per cluster".into()));
    }
    if !(config.sigma >= 0.0) || !config.sigma.is_finite() {
        return Err(Error::Param(alloc::format!(
            "noise SD must be finite and >= 0, got {}",
            config.sigma
        )));
    }
    let mut instances = Vec::with_capacity(centers.len() * config.n_per_cluster);
    let mut labels = Vec::with_capacity(instances.capacity());
    for (cluster, center) in centers.iter().enumerate() {
        for rep in 0..config.n_per_cluster {
            let index = (cluster * config.n_per_cluster + rep) as u64;
            let mut rng = rng::stream(config.seed, &[rng::NOISE, index]);
            let noisy: Vec<f64> = center
                .iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v + config.sigma * z
                })
                .collect();
            instances.push(noisy);
            labels.push(cluster);
        }
    }
    Dataset::new(g, t, instances, Some(labels))
}
