//! Iterative radix-2 FFT for the scattering transform's circular
//! convolutions.
//!
//! Every signal in this crate has dyadic length, so the general-radix case
//! never arises. Butterflies run in a fixed order with twiddles computed
//! fresh per call, which keeps results bit-identical across runs and worker
//! counts.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

fn twiddles(n: usize) -> Vec<Complex64> {
    let step = -2.0 * core::f64::consts::PI / n as f64;
    (0..n / 2)
        .map(|j| {
            let a = step * j as f64;
            Complex64::new(a.cos(), a.sin())
        })
        .collect()
}

/// In-place forward DFT, dyadic length required.
pub fn fft_in_place(buf: &mut [Complex64]) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NonPowerOfTwo { len: n });
    }
    if n == 1 {
        return Ok(());
    }
    let shift = n.leading_zeros() + 1;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if j > i {
            buf.swap(i, j);
        }
    }
    let tw = twiddles(n);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = tw[k * step];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
    Ok(())
}

/// In-place inverse DFT with 1/n scaling; `ifft(fft(x)) == x` to roundoff.
pub fn ifft_in_place(buf: &mut [Complex64]) -> Result<()> {
    for v in buf.iter_mut() {
        *v = v.conj();
    }
    fft_in_place(buf)?;
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v = v.conj() * scale;
    }
    Ok(())
}
