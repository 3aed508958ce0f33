use serde_json::{Map, Value};
use tfclust_core::cluster::{sparse_kmeans, ClusteringResult, SparseConfig};
use tfclust_core::dwt::{dwt_forward, pad_signal, wavelet_scale_groups, WaveletFilter, WaveletKind};
use tfclust_core::scattering::{build_filter_bank, scatter, scattering_groups, ScatteringConfig};
use tfclust_core::select::{default_grid, gap_select, GapProfile};
use tfclust_core::signals::{FeatureMatrix, GroupPartition};

use crate::Failure;

pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p *= 2;
    }
    p.max(2)
}

pub fn wavelet_from_name(name: &str) -> Result<WaveletKind, Failure> {
    match name {
        "haar" => Ok(WaveletKind::Haar),
        "sym8" => Ok(WaveletKind::Sym8),
        other => Err(Failure::validation(format!("unknown wavelet \"{other}\""))),
    }
}

/// DWT feature rows for univariate instances, zero-padding to the next power
/// of two when needed. Returns the matrix and the coefficient length.
pub fn dwt_features(
    instances: &[Vec<f64>],
    t: usize,
    kind: WaveletKind,
) -> Result<(FeatureMatrix, usize), Failure> {
    let padded = next_pow2(t);
    let filter = WaveletFilter::new(kind);
    let mut rows = Vec::with_capacity(instances.len());
    for x in instances {
        let x = if padded == t { x.clone() } else { pad_signal(x, 0, padded - t) };
        rows.push(dwt_forward(&x, &filter)?.values);
    }
    let groups = wavelet_scale_groups(padded)?;
    let tag = format!("dwt({})", kind.name());
    Ok((FeatureMatrix::from_rows(&rows, tag, Some(groups))?, padded))
}

pub struct ScatteringOutput {
    pub matrix: FeatureMatrix,
    pub padded_len: usize,
    pub path_labels: Vec<String>,
    pub samples_per_path: usize,
}

/// Scattering feature rows for univariate instances; the filter bank lives
/// on the next power-of-two length and `scatter` zero-pads each signal up to
/// it. Groups are one per scattering path.
pub fn scattering_features(
    instances: &[Vec<f64>],
    t: usize,
    config: &ScatteringConfig,
) -> Result<ScatteringOutput, Failure> {
    let padded = next_pow2(t);
    let bank = build_filter_bank(padded, config)?;
    let mut rows = Vec::with_capacity(instances.len());
    let mut first = None;
    for x in instances {
        let features = scatter(x, &bank, config)?;
        rows.push(features.values.clone());
        if first.is_none() {
            first = Some(features);
        }
    }
    let first = first.ok_or_else(|| Failure::validation("empty dataset".to_string()))?;
    let groups = scattering_groups(&first)?;
    let tag = format!(
        "scattering(layers={},dilations=[{}],t_scat={})",
        config.dilations.len(),
        config
            .dilations
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(","),
        config.t_scat
    );
    Ok(ScatteringOutput {
        matrix: FeatureMatrix::from_rows(&rows, tag, Some(groups))?,
        padded_len: padded,
        path_labels: first.paths.iter().map(|p| p.label()).collect(),
        samples_per_path: first.samples_per_path,
    })
}

/// One sparse or group-sparse run with `s` either fixed or gap-selected.
pub struct SparseRun {
    pub result: ClusteringResult,
    pub profile: Option<GapProfile>,
}

pub fn run_sparse(
    x: &FeatureMatrix,
    groups: Option<&GroupPartition>,
    k: usize,
    s: Option<f64>,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    permutations: usize,
    s_grid_size: usize,
    seed: u64,
) -> Result<SparseRun, Failure> {
    let base = SparseConfig { restarts, max_iters, tol, ..SparseConfig::new(k, 0.0, seed) };
    match s {
        Some(fixed) => {
            let cfg = SparseConfig { s: fixed, ..base };
            Ok(SparseRun { result: sparse_kmeans(x, groups, &cfg)?, profile: None })
        }
        None => {
            let grid = default_grid(x.p, s_grid_size);
            let profile = gap_select(x, groups, &grid, permutations, &base)?;
            let cfg = SparseConfig { s: profile.chosen_s, ..base };
            let result = sparse_kmeans(x, groups, &cfg)?;
            Ok(SparseRun { result, profile: Some(profile) })
        }
    }
}

/// Largest objective decrease between consecutive outer iterations; 0 for
/// an empty or single-entry trace.
pub fn max_trace_decrease(trace: &[f64]) -> f64 {
    trace
        .windows(2)
        .map(|pair| pair[0] - pair[1])
        .fold(0.0, f64::max)
}

pub fn echo(entries: &[(&str, Value)]) -> Value {
    let mut map = Map::new();
    for (key, value) in entries {
        map.insert((*key).to_string(), value.clone());
    }
    Value::Object(map)
}
