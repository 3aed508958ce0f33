//! Wavelet scattering features.
//!
//! A cascade of complex bandpass convolutions and moduli, each branch
//! terminated by a lowpass average and subsampled on the half-overlapping
//! grid t = k*t_scat/2. The filters are Gaussian bumps in frequency
//! (DC-corrected Morlets) placed geometrically from just below Nyquist down
//! to the averaging cutoff 2*pi/t_scat, and every layer is rescaled so that
//! |phi_hat|^2 + sum_j |psi_hat_j|^2 <= 1 on the whole frequency grid. That
//! bound makes each cascade stage non-expansive, which is what keeps
//! scattering distances stable under translation and noise.
//!
//! The lowpass phi is three cascaded circular moving averages rather than a
//! single box: one box of width t_scat has too sharp an edge for the output
//! samples to move smoothly under shifts, and the triple smooths exactly
//! that without giving up unit DC gain.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{fft_in_place, ifft_in_place};
use crate::signals::GroupPartition;

/// Highest filter center frequency, a little below Nyquist so the top
/// filter's bump is not truncated by the band edge.
const XI_MAX: f64 = 3.0 * PI / 4.0;

/// Stages of circular moving average composing the lowpass phi.
const PHI_STAGES: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringConfig {
    /// Dilation factor per layer; the length is the network depth M.
    pub dilations: Vec<f64>,
    /// Averaging scale: output sample spacing is t_scat/2.
    pub t_scat: usize,
    /// Moving-average length of each of the three phi stages.
    pub phi_len: usize,
}

impl ScatteringConfig {
    pub fn new(dilations: Vec<f64>, t_scat: usize) -> Result<Self> {
        let cfg = Self { dilations, t_scat, phi_len: 2 * t_scat };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn layers(&self) -> usize {
        self.dilations.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_scat < 2 || self.t_scat % 2 != 0 {
            return Err(Error::Param(format!(
                "t_scat must be even and at least 2, got {}",
                self.t_scat
            )));
        }
        if self.phi_len == 0 {
            return Err(Error::Param("phi_len must be at least 1".into()));
        }
        for &a in &self.dilations {
            if !a.is_finite() || a <= 1.0 {
                return Err(Error::Param(format!("dilation factors must exceed 1, got {a}")));
            }
        }
        Ok(())
    }
}

impl Default for ScatteringConfig {
    /// The generic two-layer setup: dilations (sqrt(2), 2), t_scat = 32.
    fn default() -> Self {
        Self { dilations: alloc::vec![core::f64::consts::SQRT_2, 2.0], t_scat: 32, phi_len: 64 }
    }
}

/// One bandpass filter: real nonnegative spectrum on the full bin grid.
#[derive(Debug, Clone)]
pub struct MorletFilter {
    pub center: f64,
    pub spectrum: Vec<f64>,
}

/// Filters for a fixed signal length: the shared lowpass spectrum and one
/// bandpass family per layer, already Littlewood-Paley normalized.
#[derive(Debug, Clone)]
pub struct MorletFilterBank {
    pub len: usize,
    pub t_scat: usize,
    pub phi_spectrum: Vec<Complex64>,
    pub layers: Vec<Vec<MorletFilter>>,
}

fn morlet_hat(omega: f64, xi: f64, sigma: f64) -> f64 {
    let two_s2 = 2.0 * sigma * sigma;
    let main = (-(omega - xi) * (omega - xi) / two_s2).exp();
    let corr = (-xi * xi / two_s2).exp() * (-omega * omega / two_s2).exp();
    main - corr
}

fn phi_spectrum(n: usize, stage_len: usize) -> Result<Vec<Complex64>> {
    // One roughly centered boxcar stage, built in time so circular wrap is
    // exact even when the stage is longer than the signal.
    let mut kernel = alloc::vec![Complex64::new(0.0, 0.0); n];
    let half = (stage_len / 2) as i64;
    let weight = 1.0 / stage_len as f64;
    for d in 0..stage_len as i64 {
        let idx = (d - half).rem_euclid(n as i64) as usize;
        kernel[idx] += Complex64::new(weight, 0.0);
    }
    fft_in_place(&mut kernel)?;
    Ok(kernel.iter().map(|b| b.powu(PHI_STAGES)).collect())
}

/// Build the filters for signals of length `t` (a power of two). Fails when
/// a layer ends up with no filters, i.e. the averaging cutoff leaves no room
/// below Nyquist.
pub fn build_filter_bank(t: usize, config: &ScatteringConfig) -> Result<MorletFilterBank> {
    config.validate()?;
    if !t.is_power_of_two() {
        return Err(Error::NonPowerOfTwo { len: t });
    }
    let phi = phi_spectrum(t, config.phi_len)?;
    let cutoff = 2.0 * PI / config.t_scat as f64;
    let mut layers = Vec::with_capacity(config.layers());
    for &a in &config.dilations {
        let mut filters = Vec::new();
        let mut xi = XI_MAX;
        while xi > cutoff {
            let sigma = xi * (1.0 - 1.0 / a) / 2.0;
            let spectrum: Vec<f64> = (0..t)
                .map(|m| morlet_hat(2.0 * PI * m as f64 / t as f64, xi, sigma))
                .collect();
            filters.push(MorletFilter { center: xi, spectrum });
            xi /= a;
        }
        if filters.is_empty() {
            return Err(Error::Param(format!(
                "no band between the cutoff {cutoff:.4} and {XI_MAX:.4}; lower t_scat or the dilation {a}"
            )));
        }
        // Littlewood-Paley rescaling: shrink the layer so the total energy
        // response never exceeds 1 at any bin; this is what makes every
        // cascade stage non-expansive.
        let mut scale_sq = f64::INFINITY;
        for m in 0..t {
            let band: f64 = filters.iter().map(|f| f.spectrum[m] * f.spectrum[m]).sum();
            if band > 0.0 {
                let room = 1.0 - phi[m].norm_sqr();
                scale_sq = scale_sq.min((room / band).max(0.0));
            }
        }
        let scale = scale_sq.sqrt();
        for f in &mut filters {
            f.spectrum.iter_mut().for_each(|v| *v *= scale);
        }
        layers.push(filters);
    }
    Ok(MorletFilterBank { len: t, t_scat: config.t_scat, phi_spectrum: phi, layers })
}

/// Scale-index sequence (j_1, ..., j_l) naming one scattering function; the
/// empty sequence is the plain lowpass (layer-0) block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScatteringPath {
    pub scales: Vec<usize>,
}

impl ScatteringPath {
    pub fn layer(&self) -> usize {
        self.scales.len()
    }

    pub fn label(&self) -> String {
        if self.scales.is_empty() {
            return String::from("[]");
        }
        let mut out = String::from("[");
        for (i, j) in self.scales.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{j}"));
        }
        out.push(']');
        out
    }
}

/// All retained scattering functions of one signal, concatenated path by
/// path; every path contributes `samples_per_path` consecutive values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringFeatures {
    pub values: Vec<f64>,
    pub paths: Vec<ScatteringPath>,
    pub samples_per_path: usize,
    /// Length signals were padded to before filtering.
    pub padded_len: usize,
}

impl ScatteringFeatures {
    pub fn p(&self) -> usize {
        self.values.len()
    }
}

fn sample_grid(n: usize, t_scat: usize) -> Vec<usize> {
    let count = (2 * n + t_scat - 1) / t_scat + 1;
    (0..count).map(|k| (k * t_scat / 2).min(n - 1)).collect()
}

/// Run the cascade on one signal. The input is zero-padded on the right up
/// to the bank length; anything longer than the bank is a shape error.
pub fn scatter(
    x: &[f64],
    bank: &MorletFilterBank,
    config: &ScatteringConfig,
) -> Result<ScatteringFeatures> {
    if config.layers() != bank.layers.len() || config.t_scat != bank.t_scat {
        return Err(Error::Param("config does not match the filter bank".into()));
    }
    if x.is_empty() || x.len() > bank.len {
        return Err(Error::Shape(format!(
            "signal length {} does not fit bank length {}",
            x.len(),
            bank.len
        )));
    }
    let n = bank.len;
    let grid = sample_grid(n, bank.t_scat);
    let depth = bank.layers.len();
    let mut padded = alloc::vec![0.0; n];
    padded[..x.len()].copy_from_slice(x);

    struct Node {
        path: ScatteringPath,
        center: f64,
        signal: Vec<f64>,
    }
    let mut frontier = alloc::vec![Node {
        path: ScatteringPath { scales: Vec::new() },
        center: f64::INFINITY,
        signal: padded,
    }];
    let mut values = Vec::new();
    let mut paths = Vec::new();
    for layer in 0..=depth {
        let mut next = Vec::new();
        for node in &frontier {
            let mut spectrum: Vec<Complex64> =
                node.signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft_in_place(&mut spectrum)?;
            let mut low: Vec<Complex64> = spectrum
                .iter()
                .zip(&bank.phi_spectrum)
                .map(|(s, p)| s * p)
                .collect();
            ifft_in_place(&mut low)?;
            values.extend(grid.iter().map(|&t| low[t].re));
            paths.push(node.path.clone());
            if layer == depth {
                continue;
            }
            for (j, filter) in bank.layers[layer].iter().enumerate() {
                if filter.center >= node.center {
                    continue;
                }
                let mut band: Vec<Complex64> = spectrum
                    .iter()
                    .zip(&filter.spectrum)
                    .map(|(s, f)| s * f)
                    .collect();
                ifft_in_place(&mut band)?;
                let mut scales = node.path.scales.clone();
                scales.push(j);
                next.push(Node {
                    path: ScatteringPath { scales },
                    center: filter.center,
                    signal: band.iter().map(|z| z.norm()).collect(),
                });
            }
        }
        frontier = next;
    }
    Ok(ScatteringFeatures { values, paths, samples_per_path: grid.len(), padded_len: n })
}

/// One feature group per scattering path, in emission order.
pub fn scattering_groups(features: &ScatteringFeatures) -> Result<GroupPartition> {
    let m = features.samples_per_path;
    let groups: Vec<Vec<usize>> = (0..features.paths.len())
        .map(|p| (p * m..(p + 1) * m).collect())
        .collect();
    let names: Vec<String> = features.paths.iter().map(|p| p.label()).collect();
    GroupPartition::new(groups, Some(names))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyAxis {
    Linear,
    Log,
}

/// Resample a spectrum-like vector onto a uniform log-frequency grid over
/// [f_lo, f_hi], so that frequency scaling becomes index translation and the
/// scattering cascade can absorb it. `axis` says how the input samples are
/// spaced; interpolation is linear either way.
pub fn log_frequency_input(
    x: &[f64],
    f_lo: f64,
    f_hi: f64,
    axis: FrequencyAxis,
    target_len: usize,
) -> Result<Vec<f64>> {
    if !(f_lo > 0.0) || !(f_hi > f_lo) || !f_hi.is_finite() {
        return Err(Error::Param(format!(
            "need 0 < f_lo < f_hi, got [{f_lo}, {f_hi}]"
        )));
    }
    if x.len() < 2 || target_len < 2 {
        return Err(Error::Shape("resampling needs at least 2 points on both grids".into()));
    }
    let last = (x.len() - 1) as f64;
    let ratio = f_hi / f_lo;
    let out = (0..target_len)
        .map(|k| {
            let frac = k as f64 / (target_len - 1) as f64;
            let pos = match axis {
                FrequencyAxis::Log => frac * last,
                FrequencyAxis::Linear => {
                    let f = f_lo * ratio.powf(frac);
                    (f - f_lo) / (f_hi - f_lo) * last
                }
            };
            let pos = pos.clamp(0.0, last);
            let i0 = pos.floor() as usize;
            let i1 = (i0 + 1).min(x.len() - 1);
            let t = pos - i0 as f64;
            x[i0] * (1.0 - t) + x[i1] * t
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    #[test]
    fn octave_bank_filter_count_matches_log_formula() {
        let config = ScatteringConfig::new(vec![2.0], 32).unwrap();
        let bank = build_filter_bank(256, &config).unwrap();
        // Independent count: largest j with XI_MAX * a^-j > 2 pi / t_scat.
        let expected = ((XI_MAX / (2.0 * PI / 32.0)).ln() / 2.0f64.ln()).floor() as usize + 1;
        assert_eq!(bank.layers[0].len(), expected);
        assert_eq!(expected, 4);
        for pair in bank.layers[0].windows(2) {
            assert!(pair[1].center < pair[0].center);
        }
        let half_octave = ScatteringConfig::new(vec![core::f64::consts::SQRT_2], 32).unwrap();
        let bank2 = build_filter_bank(256, &half_octave).unwrap();
        let expected2 =
            ((XI_MAX / (2.0 * PI / 32.0)).ln() / core::f64::consts::SQRT_2.ln()).floor() as usize + 1;
        assert_eq!(bank2.layers[0].len(), expected2);
        assert_eq!(expected2, 8);
    }

    #[test]
    fn filters_have_no_dc_response() {
        let bank = build_filter_bank(256, &ScatteringConfig::default()).unwrap();
        for layer in &bank.layers {
            for f in layer {
                assert!(f.spectrum[0].abs() < 1e-12);
                assert!(f.spectrum.iter().all(|&v| v >= 0.0));
            }
        }
        assert!((bank.phi_spectrum[0].re - 1.0).abs() < 1e-12);
        assert!(bank.phi_spectrum[0].im.abs() < 1e-12);
    }

    #[test]
    fn littlewood_paley_bound_holds_everywhere() {
        for t in [64usize, 256, 512] {
            let bank = build_filter_bank(t, &ScatteringConfig::default()).unwrap();
            for layer in &bank.layers {
                for m in 0..t {
                    let total: f64 = bank.phi_spectrum[m].norm_sqr()
                        + layer.iter().map(|f| f.spectrum[m] * f.spectrum[m]).sum::<f64>();
                    assert!(total <= 1.0 + 1e-9, "bin {m}: {total}");
                }
            }
        }
    }

    #[test]
    fn degenerate_configs_are_rejected()  {
        assert!(ScatteringConfig::new(vec![1.0], 32).is_err());
        assert!(ScatteringConfig::new(vec![2.0], 3).is_err());
        // t_scat = 2 puts the cutoff at Nyquist, above every center.
        let tight = ScatteringConfig::new(vec![2.0], 2).unwrap();
        assert!(matches!(build_filter_bank(256, &tight), Err(Error::Param(_))));
        assert!(matches!(
            build_filter_bank(100, &ScatteringConfig::default()),
            Err(Error::NonPowerOfTwo { len: 100 })
        ));
    }

    #[test]
    fn zero_and_constant_signals() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        let zero = scatter(&vec![0.0; 256], &bank, &config).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        let constant = scatter(&vec![3.25; 256], &bank, &config).unwrap();
        let m = constant.samples_per_path;
        for (i, v) in constant.values.iter().enumerate() {
            if i < m {
                assert!((v - 3.25).abs() < 1e-10, "layer-0 sample {i}: {v}");
            } else {
                assert!(v.abs() < 1e-6, "deep coefficient {i}: {v}");
            }
        }
    }

    #[test]
    fn path_set_matches_independent_enumeration() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        let features = scatter(&vec![1.0; 256], &bank, &config).unwrap();
        // Centers: layer 1 at XI_MAX * 2^(-j/2), layer 2 at XI_MAX * 2^(-j).
        // A pair (j1, j2) survives iff 2^(-j2) < 2^(-j1/2), i.e. j2 > j1/2.
        let l1 = bank.layers[0].len();
        let l2 = bank.layers[1].len();
        let mut expected = 1 + l1;
        for j1 in 0..l1 {
            expected += (0..l2).filter(|&j2| 2.0f64.powi(-(j2 as i32)) < 2.0f64.powf(-(j1 as f64) / 2.0)).count();
        }
        assert_eq!(features.paths.len(), expected);
        assert_eq!(expected, 21);
        assert_eq!(features.samples_per_path, 2 * 256 / 32 + 1);
        assert_eq!(features.values.len(), expected * 17);
        for path in &features.paths {
            if path.scales.len() == 2 {
                let c1 = bank.layers[0][path.scales[0]].center;
                let c2 = bank.layers[1][path.scales[1]].center;
                assert!(c2 < c1, "path {} not frequency-decreasing", path.label());
            }
        }
    }

    #[test]
    fn groups_tile_features_one_per_path() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        let features = scatter(&vec![1.0; 256], &bank, &config).unwrap();
        let part = scattering_groups(&features).unwrap();
        assert_eq!(part.groups.len(), features.paths.len());
        assert_eq!(part.p(), features.p());
        assert!(part.groups.iter().all(|g| g.len() == features.samples_per_path));
        assert_eq!(part.names.as_ref().unwrap()[0], "[]");
        assert_eq!(part.names.as_ref().unwrap()[1], "[0]");
        // M = 0 degenerates to the single lowpass block.
        let shallow = ScatteringConfig { dilations: vec![], ..ScatteringConfig::default() };
        let bank0 = build_filter_bank(256, &shallow).unwrap();
        let f0 = scatter(&vec![1.0; 256], &bank0, &shallow).unwrap();
        assert_eq!(scattering_groups(&f0).unwrap().groups.len(), 1);
    }

    fn gaussian_bump(n: usize, center: f64, width: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                // Circular distance so shifted bumps match exactly.
                let d = (i as f64 - center).abs();
                let d = d.min(n as f64 - d);
                amp * (-d * d / (2.0 * width * width)).exp()
            })
            .collect()
    }

    #[test]
    fn non_expansive_on_random_signals() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        let mut rng = crate::rng::stream(5, &[700]);
        for _ in 0..10 {
            let x: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sx = scatter(&x, &bank, &config).unwrap();
            let sy = scatter(&y, &bank, &config).unwrap();
            assert!(norm(&sx.values) <= norm(&x) * (1.0 + 1e-9));
            let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            assert!(dist(&sx.values, &sy.values) <= norm(&diff) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn translation_moves_scattering_much_less_than_the_signal() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        for (width, tau) in [(3.0, 8usize), (5.0, 8), (8.0, 8), (4.0, 5)] {
            let x = gaussian_bump(256, 100.0, width, 2.0);
            let shifted = gaussian_bump(256, 100.0 + tau as f64, width, 2.0);
            let sx = scatter(&x, &bank, &config).unwrap();
            let sy = scatter(&shifted, &bank, &config).unwrap();
            let rel_scat = dist(&sx.values, &sy.values) / norm(&sx.values);
            let rel_raw = dist(&x, &shifted) / norm(&x);
            assert!(rel_scat < 0.2, "width {width} tau {tau}: rel {rel_scat}");
            assert!(
                rel_scat * 3.0 <= rel_raw,
                "width {width} tau {tau}: scattering {rel_scat} vs raw {rel_raw}"
            );
        }
    }

    #[test]
    fn scatter_is_deterministic_and_checks_shapes() {
        let config = ScatteringConfig::default();
        let bank = build_filter_bank(256, &config).unwrap();
        let x: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        let a = scatter(&x, &bank, &config).unwrap();
        let b = scatter(&x, &bank, &config).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.padded_len, 256);
        assert!(scatter(&vec![0.0; 300], &bank, &config).is_err());
        let other = ScatteringConfig::new(vec![2.0], 32).unwrap();
        assert!(scatter(&x, &bank, &other).is_err());
    }

    #[test]
    fn log_resampling_identity_and_monotonicity() {
        let x: Vec<f64> = (0..64).map(|i| (i as f64).powi(2)).collect();
        let same = log_frequency_input(&x, 10.0, 1000.0, FrequencyAxis::Log, 64).unwrap();
        for (a, b) in x.iter().zip(&same) {
            assert!((a - b).abs() < 1e-12);
        }
        let resampled = log_frequency_input(&x, 10.0, 1000.0, FrequencyAxis::Linear, 32).unwrap();
        for pair in resampled.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        assert!(log_frequency_input(&x, 0.0, 10.0, FrequencyAxis::Log, 32).is_err());
        assert!(log_frequency_input(&x, 5.0, 2.0, FrequencyAxis::Log, 32).is_err());
        assert!(log_frequency_input(&x[..1], 1.0, 2.0, FrequencyAxis::Log, 32).is_err());
    }

    #[test]
    fn frequency_doubling_becomes_index_shift() {
        // F(f) = f sampled linearly over one octave range times 256; on the
        // 257-point log grid one index step is 2^(1/32), so doubling every
        // frequency must shift the resampled curve by exactly 32 indices.
        // F linear makes the interpolation exact, isolating the shift.
        let len = 257;
        let f_lo = 3.0;
        let f_hi = 3.0 * 256.0;
        let x: Vec<f64> = (0..len)
            .map(|i| f_lo + (f_hi - f_lo) * i as f64 / (len - 1) as f64)
            .collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = log_frequency_input(&x, f_lo, f_hi, FrequencyAxis::Linear, len).unwrap();
        let b = log_frequency_input(&x2, 2.0 * f_lo, 2.0 * f_hi, FrequencyAxis::Linear, len).unwrap();
        for k in 0..len - 32 {
            assert!((b[k] - a[k + 32]).abs() < 1e-9, "index {k}: {} vs {}", b[k], a[k + 32]);
        }
    }
}
