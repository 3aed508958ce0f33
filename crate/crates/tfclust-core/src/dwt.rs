//! Orthogonal discrete wavelet transform with periodic boundary handling.
//!
//! The transform is the Mallat pyramid with circular convolution at every
//! level, so the analysis map is exactly orthogonal: energy is preserved to
//! roundoff and the inverse is the transpose. Signals must have dyadic length
//! T = 2^J; callers pad first (see [`pad_signal`]).
//!
//! Coefficients are stored coarsest-first in one flat vector of length T:
//! `[c0, d(scale 0), d(scale 1), ..., d(scale J-1)]` where scale j holds 2^j
//! entries, so scale j occupies indices `2^j .. 2^(j+1)`. Denoising
//! soft-thresholds every detail coefficient and leaves c0 alone.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::signals::GroupPartition;

/// Orthonormal lowpass taps for the Haar wavelet.
const HAAR_LO: [f64; 2] = [core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2];

/// Orthonormal lowpass decomposition taps for the 16-tap least-asymmetric
/// Daubechies wavelet with 8 vanishing moments (sym8). Standard published
/// constants; `WaveletFilter::new` re-checks orthonormality on construction.
const SYM8_LO: [f64; 16] = [
    -0.003_382_415_951_006_125_6,
    -0.000_542_132_331_791_148_12,
    0.031_695_087_811_492_981,
    0.007_607_487_324_917_605_4,
    -0.143_294_238_350_809_71,
    -0.061_273_359_067_658_524,
    0.481_359_651_258_372_21,
    0.777_185_751_700_523_51,
    0.364_441_894_835_331_4,
    -0.051_945_838_107_709_037,
    -0.027_219_029_917_056_003,
    0.049_137_179_673_607_506,
    0.003_808_752_013_890_615_1,
    -0.014_952_258_337_048_231,
    -0.000_302_920_514_721_366_8,
    0.001_889_950_332_759_460_9,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletKind {
    Haar,
    Sym8,
}

impl WaveletKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveletKind::Haar => "haar",
            WaveletKind::Sym8 => "sym8",
        }
    }
}

/// Orthonormal analysis filter pair. The highpass is the quadrature mirror
/// of the lowpass, `hi[k] = (-1)^k lo[L-1-k]`, so the pair is orthogonal by
/// construction.
#[derive(Debug, Clone)]
pub struct WaveletFilter {
    pub kind: WaveletKind,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl WaveletFilter {
    pub fn new(kind: WaveletKind) -> Self {
        let lo: Vec<f64> = match kind {
            WaveletKind::Haar => HAAR_LO.to_vec(),
            WaveletKind::Sym8 => SYM8_LO.to_vec(),
        };
        let l = lo.len();
        let hi: Vec<f64> = (0..l).map(|k| lo[l - 1 - k] * sign_alt(k)).collect();
        let filter = Self { kind, lo, hi };
        filter.assert_orthonormal();
        filter
    }

    /// Tap sanity run once per construction: unit energy and double-shift
    /// orthogonality within 1e-12.
    fn assert_orthonormal(&self) {
        let energy: f64 = self.lo.iter().map(|h| h * h).sum();
        assert!(
            (energy - 1.0).abs() < 1e-12,
            "lowpass taps have energy {energy}, expected 1"
        );
        for m in 1..self.lo.len() / 2 {
            let r: f64 = (0..self.lo.len() - 2 * m)
                .map(|k| self.lo[k] * self.lo[k + 2 * m])
                .sum();
            assert!(r.abs() < 1e-12, "double-shift autocorrelation {r} at lag {}", 2 * m);
        }
    }
}

fn sign_alt(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Full-depth periodic DWT of a dyadic-length signal.
///
/// `values[0]` is the approximation c0 (for a constant signal c it equals
/// `c * sqrt(T)`); `values[2^j .. 2^(j+1)]` is detail scale j, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtCoefficients {
    pub values: Vec<f64>,
    pub levels: usize,
}

impl DwtCoefficients {
    pub fn c0(&self) -> f64 {
        self.values[0]
    }

    /// Detail coefficients of scale `j`, length 2^j.
    pub fn detail(&self, j: usize) -> &[f64] {
        let start = 1usize << j;
        &self.values[start..start + (1usize << j)]
    }
}

fn require_power_of_two(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NonPowerOfTwo { len });
    }
    Ok(len.trailing_zeros())
}

/// Analysis transform: one circular-convolution pyramid pass per level down
/// to a single approximation coefficient.
pub fn dwt_forward(x: &[f64], filter: &WaveletFilter) -> Result<DwtCoefficients> {
    let levels = require_power_of_two(x.len())? as usize;
    let mut approx = x.to_vec();
    // Details come out finest-first; placed into the flat vector by scale.
    let mut values = vec![0.0; x.len()];
    let mut scale = levels;
    while approx.len() > 1 {
        let half = approx.len() / 2;
        scale -= 1;
        let mut next = vec![0.0; half];
        for k in 0..half {
            let mut a = 0.0;
            let mut d = 0.0;
            for (i, (&lo, &hi)) in filter.lo.iter().zip(&filter.hi).enumerate() {
                let v = approx[(2 * k + i) % approx.len()];
                a += lo * v;
                d += hi * v;
            }
            next[k] = a;
            values[(1 << scale) + k] = d;
        }
        approx = next;
    }
    values[0] = approx[0];
    Ok(DwtCoefficients { values, levels })
}

/// Synthesis transform, the transpose of [`dwt_forward`]. Round-trips to
/// within 1e-10 in maximum absolute error.
pub fn dwt_inverse(coeffs: &DwtCoefficients, filter: &WaveletFilter) -> Vec<f64> {
    let mut approx = vec![coeffs.c0()];
    for j in 0..coeffs.levels {
        let detail = coeffs.detail(j);
        let out_len = 2 * approx.len();
        let mut next = vec![0.0; out_len];
        for k in 0..approx.len() {
            for (i, (&lo, &hi)) in filter.lo.iter().zip(&filter.hi).enumerate() {
                next[(2 * k + i) % out_len] += lo * approx[k] + hi * detail[k];
            }
        }
        approx = next;
    }
    approx
}

/// Soft-thresholding of a scalar: `sgn(v) * max(|v| - lambda, 0)`.
pub fn soft(v: f64, lambda: f64) -> f64 {
    let shrunk = v.abs() - lambda;
    if shrunk <= 0.0 {
        0.0
    } else {
        shrunk * v.signum()
    }
}

/// Applies soft-thresholding to every detail coefficient; the approximation
/// c0 carries the signal's mean and is exempt.
pub fn soft_threshold(coeffs: &DwtCoefficients, lambda: f64) -> Result<DwtCoefficients> {
    if !(lambda >= 0.0) {
        return Err(Error::Param(alloc::format!(
            "threshold must be nonnegative, got {lambda}"
        )));
    }
    let mut values = coeffs.values.clone();
    for v in values.iter_mut().skip(1) {
        *v = soft(*v, lambda);
    }
    Ok(DwtCoefficients { values, levels: coeffs.levels })
}

/// Wavelet shrinkage: transform, soft-threshold the details, transform back.
pub fn denoise(x: &[f64], filter: &WaveletFilter, lambda: f64) -> Result<Vec<f64>> {
    let coeffs = dwt_forward(x, filter)?;
    Ok(dwt_inverse(&soft_threshold(&coeffs, lambda)?, filter))
}

/// Zero-pads a signal on both ends.
pub fn pad_signal(x: &[f64], left: usize, right: usize) -> Vec<f64> {
    let mut out = vec![0.0; left + x.len() + right];
    out[left..left + x.len()].copy_from_slice(x);
    out
}

/// One feature group per wavelet scale for coefficient vectors of length `t`:
/// `{c0}, {scale 0}, {scale 1}, ...` with sizes 1, 1, 2, 4, ...
pub fn wavelet_scale_groups(t: usize) -> Result<GroupPartition> {
    let levels = require_power_of_two(t)? as usize;
    let mut groups = Vec::with_capacity(levels + 1);
    let mut names = Vec::with_capacity(levels + 1);
    groups.push(vec![0]);
    names.push(alloc::string::String::from("approx"));
    for j in 0..levels {
        let start = 1usize << j;
        groups.push((start..2 * start).collect());
        names.push(alloc::format!("scale {j}"));
    }
    GroupPartition::new(groups, Some(names))
}
