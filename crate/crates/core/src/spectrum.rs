//! FFT helpers shared by the spectral oracles and width measurements.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::interp::parabolic_vertex;

pub(crate) fn fft(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Normalised inverse transform.
pub(crate) fn ifft(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
}

/// Signed bin index `k` of a length-`len` transform (`-len/2 ..= len/2`).
pub(crate) fn signed_bin(k: usize, len: usize) -> i64 {
    if k <= len / 2 {
        k as i64
    } else {
        k as i64 - len as i64
    }
}

/// Angular frequency of bin `k` for sample spacing `dt`.
pub(crate) fn bin_omega(k: usize, len: usize, dt: f64) -> f64 {
    2.0 * PI * signed_bin(k, len) as f64 / (len as f64 * dt)
}

/// Derivative of a periodic, band-limited sequence by multiplying its
/// spectrum with `i w`. The Nyquist bin is dropped.
pub(crate) fn spectral_derivative(x: &[Complex64], dt: f64) -> Vec<Complex64> {
    let len = x.len();
    let mut buf = x.to_vec();
    fft(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        if len % 2 == 0 && k == len / 2 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z *= Complex64::new(0.0, bin_omega(k, len, dt));
        }
    }
    ifft(&mut buf);
    buf
}

/// `|sum_k x_k e^{-i w k h}|`, the magnitude of the discrete-time Fourier
/// transform at an arbitrary frequency.
fn dtft_magnitude(x: &[f64], spacing: f64, omega: f64) -> f64 {
    let step = Complex64::from_polar(1.0, -omega * spacing);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &v in x {
        acc += phasor * v;
        phasor *= step;
    }
    acc.norm()
}

/// Half-width at e^-1 of `|X(w)|` around its maximum, for real samples at
/// the given spacing. The result is in radians per unit of `spacing`.
///
/// The spectrum is located on a zero-padded FFT grid and the crossings are
/// then refined by bisection on the exact DTFT.
pub fn spectral_half_width(x: &[f64], spacing: f64) -> Result<f64> {
    let first = x.iter().position(|v| *v != 0.0).ok_or(Error::FlatSpectrum)?;
    let last = x.iter().rposition(|v| *v != 0.0).unwrap_or(first);
    let x = &x[first..=last];
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::FlatSpectrum);
    }

    let len = (8 * x.len()).next_power_of_two().max(4096);
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    fft(&mut buf);
    let half = len / 2;
    // real input: the positive half (plus DC) carries the whole magnitude profile
    let mag: Vec<f64> = buf[..=half].iter().map(|z| z.norm()).collect();
    let (kmax, &mmax) = mag
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if mmax == 0.0 {
        return Err(Error::FlatSpectrum);
    }
    let dw = 2.0 * PI / (len as f64 * spacing);
    let f = |w: f64| dtft_magnitude(x, spacing, w);

    let (w_peak, peak) = if kmax == 0 || kmax == half {
        (kmax as f64 * dw, mmax)
    } else {
        let off = parabolic_vertex(mag[kmax - 1], mmax, mag[kmax + 1]);
        let w = (kmax as f64 + off) * dw;
        let v = f(w);
        if v >= mmax { (w, v) } else { (kmax as f64 * dw, mmax) }
    };
    let level = peak / E;

    let refine = |mut lo: f64, mut hi: f64, rising: bool| {
        // falling edge: f(lo) >= level > f(hi); rising edge: the reverse
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let above = f(mid) >= level;
            if above == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let right = (kmax + 1..=half)
        .find(|&k| mag[k] < level)
        .map(|k| refine(((k - 1) as f64 * dw).max(w_peak), k as f64 * dw, false))
        .ok_or(Error::FlatSpectrum)?;
    let left = if kmax == 0 {
        // symmetric about DC for real signals
        -right
    } else {
        (0..kmax)
            .rev()
            .find(|&k| mag[k] < level)
            .map(|k| refine(k as f64 * dw, ((k + 1) as f64 * dw).min(w_peak), true))
            .unwrap_or(-right)
    };
    Ok(0.5 * (right - left))
}
