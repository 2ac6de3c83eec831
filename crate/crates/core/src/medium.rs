//! Linear dispersive medium: group velocity and the envelope polarization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{fft, signed_bin, spectral_derivative};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Relative bound on the estimated envelope-derivative error.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;

/// Susceptibility linearised about the carrier: `chi(w) ~ chi0 + chi1 (w - w0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub chi0: f64,
    /// `d chi / d w` at the carrier (s).
    pub chi1: f64,
    /// Carrier angular frequency (rad/s).
    pub omega0: f64,
    /// Vacuum light speed (m/s).
    pub c: f64,
}

impl MediumParams {
    pub fn new(chi0: f64, chi1: f64, omega0: f64, c: f64) -> Result<Self> {
        if ![chi0, chi1, omega0, c].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMedium("parameters must be finite".into()));
        }
        if 1.0 + chi0 <= 0.0 {
            return Err(Error::InvalidMedium(format!("1 + chi0 = {} must be positive", 1.0 + chi0)));
        }
        if omega0 <= 0.0 || c <= 0.0 {
            return Err(Error::InvalidMedium("carrier frequency and c must be positive".into()));
        }
        Ok(Self { chi0, chi1, omega0, c })
    }

    /// Transparency-window medium with `n ~ 1` and slope `chi1 = alpha / w`.
    pub fn transparency_window(window: f64, omega0: f64, alpha: f64) -> Result<Self> {
        if !(window > 0.0) {
            return Err(Error::InvalidMedium("window width must be positive".into()));
        }
        Self::new(0.0, alpha / window, omega0, SPEED_OF_LIGHT)
    }

    pub fn refractive_index(&self) -> f64 {
        (1.0 + self.chi0).sqrt()
    }

    pub fn wavenumber(&self) -> f64 {
        self.refractive_index() * self.omega0 / self.c
    }
}

/// `v_g = c / (n + w0 chi1 / 2n)`.
pub fn group_velocity(m: &MediumParams) -> Result<f64> {
    let n = m.refractive_index();
    let denom = n + m.omega0 * m.chi1 / (2.0 * n);
    if !(denom > 0.0) {
        return Err(Error::InvalidMedium(format!(
            "group-velocity denominator n + w0 chi1 / 2n = {denom} is not positive"
        )));
    }
    Ok(m.c / denom)
}

/// Order-of-magnitude group velocity inside a transparency window of
/// width `window`: `2 w c / w0`.
pub fn eit_velocity_estimate(window: f64, omega0: f64, c: f64) -> f64 {
    2.0 * window * c / omega0
}

/// Polarization envelope `eps0 (chi0 E - i chi1 dE/dt)` for a uniformly
/// sampled complex envelope.
///
/// Power-of-two lengths are treated as one period of a band-limited signal
/// and differentiated spectrally; other lengths use fourth-order central
/// differences with one-sided closures at the ends.
pub fn polarization_envelope(
    envelope: &[Complex64],
    dt: f64,
    m: &MediumParams,
) -> Result<Vec<Complex64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    if envelope.len() < 5 {
        return Err(Error::GridTooCoarse { estimate: f64::INFINITY, tolerance: DERIVATIVE_TOLERANCE });
    }
    let derivative = if m.chi1 == 0.0 {
        vec![Complex64::new(0.0, 0.0); envelope.len()]
    } else if envelope.len().is_power_of_two() {
        let estimate = spectral_tail_fraction(envelope);
        if estimate > DERIVATIVE_TOLERANCE {
            return Err(Error::GridTooCoarse { estimate, tolerance: DERIVATIVE_TOLERANCE });
        }
        spectral_derivative(envelope, dt)
    } else {
        let d = central_difference(envelope, 1, dt);
        let estimate = richardson_estimate(envelope, &d, dt);
        if estimate > DERIVATIVE_TOLERANCE {
            return Err(Error::GridTooCoarse { estimate, tolerance: DERIVATIVE_TOLERANCE });
        }
        d
    };
    let i = Complex64::new(0.0, 1.0);
    Ok(envelope
        .iter()
        .zip(&derivative)
        .map(|(e, de)| VACUUM_PERMITTIVITY * (m.chi0 * e - i * m.chi1 * de))
        .collect())
}

/// Share of derivative energy in the upper half of the band.
fn spectral_tail_fraction(x: &[Complex64]) -> f64 {
    let len = x.len();
    let mut buf = x.to_vec();
    fft(&mut buf);
    let (mut tail, mut total) = (0.0, 0.0);
    for (k, z) in buf.iter().enumerate() {
        let b = signed_bin(k, len);
        let e = (b as f64 * z.norm()).powi(2);
        total += e;
        if b.unsigned_abs() as usize > len / 4 {
            tail += e;
        }
    }
    if total == 0.0 { 0.0 } else { (tail / total).sqrt() }
}

/// Fourth-order first derivative using samples `stride` apart.
fn central_difference(x: &[Complex64], stride: usize, dt: f64) -> Vec<Complex64> {
    let n = x.len();
    let h = stride as f64 * dt;
    let at = |k: isize| x[k as usize];
    (0..n as isize)
        .map(|k| {
            let s = stride as isize;
            let last = n as isize - 1;
            if k - 2 * s >= 0 && k + 2 * s <= last {
                (at(k - 2 * s) - 8.0 * at(k - s) + 8.0 * at(k + s) - at(k + 2 * s)) / (12.0 * h)
            } else if k + 4 * s <= last {
                (-25.0 * at(k) + 48.0 * at(k + s) - 36.0 * at(k + 2 * s) + 16.0 * at(k + 3 * s)
                    - 3.0 * at(k + 4 * s))
                    / (12.0 * h)
            } else if k - 4 * s >= 0 {
                (25.0 * at(k) - 48.0 * at(k - s) + 36.0 * at(k - 2 * s) - 16.0 * at(k - 3 * s)
                    + 3.0 * at(k - 4 * s))
                    / (12.0 * h)
            } else {
                Complex64::new(f64::NAN, f64::NAN)
            }
        })
        .collect()
}

/// Error estimate for the fourth-order derivative from its doubled-step
/// counterpart, `|D(h) - D(2h)| / 15`, relative to `max |D(h)|`.
fn richardson_estimate(x: &[Complex64], d: &[Complex64], dt: f64) -> f64 {
    let coarse = central_difference(x, 2, dt);
    let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let err = d
        .iter()
        .zip(&coarse)
        .filter(|(_, c)| c.re.is_finite())
        .map(|(a, b)| (a - b).norm() / 15.0)
        .fold(0.0, f64::max);
    if coarse.iter().any(|c| !c.re.is_finite()) && x.len() < 9 {
        return f64::INFINITY;
    }
    err / scale
}
