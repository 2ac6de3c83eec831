//! Independent reference solutions used to check the chain integrator and
//! the envelope polarization.
//!
//! * Characteristic solutions of `dE/dt + v dE/dx = 0` for stage- or
//!   time-dependent velocity, and a general backward trace for arbitrary
//!   schedules.
//! * Frequency-domain propagation `V_N = H^N V_0` for a constant delay.
//! * The polarization of a modulated real field computed by multiplying its
//!   spectrum with `chi(|w|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::VACUUM_PERMITTIVITY;
use crate::pulse::SampledWaveform;
use crate::schedule::DelaySchedule;
use crate::signal::{ChainRecord, StageSignal};
use crate::spectrum::{bin_omega, fft, ifft, signed_bin};
use crate::transfer::transfer_function;

/// Velocity profile driving a characteristic solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityProfile {
    /// `nu[m]` (stages/s) for the stage from `m` to `m + 1`.
    Spatial(Vec<f64>),
    /// `(start time, nu)` periods; the first period also covers earlier times.
    Temporal(Vec<(f64, f64)>),
}

/// Analytic transport solution. For a spatial profile `profile` is the
/// boundary signal `phi(t)` at stage 0; for a temporal profile it is the
/// initial spatial profile `psi(n)` at `t = 0` (sample spacing in stages).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSolution {
    pub profile: SampledWaveform,
    pub velocity: VelocityProfile,
}

impl CharacteristicSolution {
    pub fn eval(&self, n: f64, t: f64) -> f64 {
        match &self.velocity {
            VelocityProfile::Spatial(nu) => characteristic_x(&self.profile, nu, n, t),
            VelocityProfile::Temporal(periods) => characteristic_t(&self.profile, periods, n, t),
        }
    }
}

/// `phi(t - sum_{m < n} 1/nu[m])`; fractional `n` takes the matching share of
/// the last stage.
pub fn characteristic_x(boundary: &SampledWaveform, velocity: &[f64], n: f64, t: f64) -> f64 {
    let whole = (n.floor().max(0.0) as usize).min(velocity.len());
    let mut delay: f64 = velocity[..whole].iter().map(|v| 1.0 / v).sum();
    let frac = n - whole as f64;
    if frac > 0.0 && whole < velocity.len() {
        delay += frac / velocity[whole];
    }
    boundary.eval(t - delay)
}

/// `psi(n - integral_0^t nu(t') dt')`.
pub fn characteristic_t(initial: &SampledWaveform, periods: &[(f64, f64)], n: f64, t: f64) -> f64 {
    initial.eval(n - travelled(periods, t))
}

/// `integral_0^t nu(t') dt'` for piecewise-constant periods.
pub fn travelled(periods: &[(f64, f64)], t: f64) -> f64 {
    if t <= 0.0 {
        return periods.first().map_or(0.0, |p| p.1 * t);
    }
    let mut dist = 0.0;
    for (i, &(start, nu)) in periods.iter().enumerate() {
        let lo = if i == 0 { 0.0 } else { start.max(0.0) };
        let hi = periods.get(i + 1).map_or(t, |p| p.0.min(t));
        if hi > lo {
            dist += nu * (hi - lo);
        }
    }
    dist
}

/// Time at which the characteristic through `(n, t)` left stage 0, traced
/// backwards through an arbitrary schedule.
pub fn departure_time(schedule: &DelaySchedule, n: f64, t: f64) -> f64 {
    let bps = schedule.breakpoints();
    let mut x = n.min(schedule.stages() as f64);
    let mut t = t;
    while x > 1e-12 {
        let m = (x.ceil() as usize).max(1) - 1;
        let seg = schedule.segment_before(t);
        let delay = bps[seg].delays[m];
        let need = (x - m as f64) * delay;
        let floor = if seg == 0 { f64::NEG_INFINITY } else { bps[seg].time };
        if t - need >= floor {
            t -= need;
            x = m as f64;
        } else {
            x -= (t - floor) / delay;
            t = floor;
        }
    }
    t
}

/// Ideal transport of the boundary signal through `schedule`, evaluated on
/// the same grid: `v_n(t) = phi(departure_time(n, t))`.
pub fn characteristic_record(boundary: &StageSignal, schedule: &DelaySchedule) -> Result<ChainRecord> {
    let phi = SampledWaveform::new(boundary.start, boundary.dt, boundary.samples.clone())?;
    let mut signals = Vec::with_capacity(schedule.stages() + 1);
    signals.push(boundary.clone());
    for n in 1..=schedule.stages() {
        let samples = (0..boundary.len())
            .map(|k| phi.eval(departure_time(schedule, n as f64, boundary.time(k))))
            .collect();
        signals.push(StageSignal::new(n, boundary.start, boundary.dt, samples)?);
    }
    Ok(ChainRecord { signals, schedule: schedule.clone(), dt: boundary.dt })
}

/// How DFT bin frequencies are mapped before evaluating `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMap {
    /// `H(w)` at the bin frequency itself (continuous-time chain).
    Analog,
    /// `H(w')` with `w' = (2/dt) tan(w dt / 2)`: the response of the chain
    /// discretised with the bilinear (trapezoidal) map on the signal's grid.
    Bilinear,
}

/// `H^N` applied to the input spectrum, with the discrete-time map.
pub fn spectral_propagate(input: &StageSignal, delay: f64, stages: usize) -> Result<StageSignal> {
    spectral_propagate_with(input, delay, stages, FrequencyMap::Bilinear)
}

/// Same as [`spectral_propagate`] for a schedule, which must be a single
/// delay for every stage at all times.
pub fn spectral_propagate_schedule(input: &StageSignal, schedule: &DelaySchedule) -> Result<StageSignal> {
    let delay = schedule.uniform_delay().ok_or(Error::NotTimeInvariant)?;
    spectral_propagate(input, delay, schedule.stages())
}

pub fn spectral_propagate_with(
    input: &StageSignal,
    delay: f64,
    stages: usize,
    map: FrequencyMap,
) -> Result<StageSignal> {
    if !(delay > 0.0 && delay.is_finite()) {
        return Err(Error::InvalidSchedule(format!("delay {delay} must be positive")));
    }
    let dt = input.dt;
    let len = input.len();
    if stages == 0 {
        return Ok(StageSignal { stage: input.stage, ..input.clone() });
    }
    // room for the accumulated delay and the slowly decaying tail of H^N
    let pad = (6.0 * stages as f64 * delay / dt).ceil() as usize + 1024;
    let total = (len + pad).next_power_of_two();
    let mut buf: Vec<Complex64> = input.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(total, Complex64::new(0.0, 0.0));
    fft(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let h = if map == FrequencyMap::Bilinear && total % 2 == 0 && k == total / 2 {
            // tan(pi/2): the warped frequency is infinite and H -> -1
            Complex64::new(-1.0, 0.0)
        } else {
            let w = bin_omega(k, total, dt);
            let w = match map {
                FrequencyMap::Analog => w,
                FrequencyMap::Bilinear => 2.0 / dt * (0.5 * w * dt).tan(),
            };
            transfer_function(w, delay)
        };
        *z *= h.powu(stages as u32);
    }
    ifft(&mut buf);
    let samples = buf[..len].iter().map(|z| z.re).collect();
    StageSignal::new(input.stage + stages, input.start, dt, samples)
}

/// Relative spectral content that counts as "present" for the band-limit check.
const BAND_FLOOR: f64 = 1e-10;

/// Polarization envelope from the full modulated field.
///
/// The envelope (one period of a band-limited signal) is interpolated onto a
/// grid fine enough to carry `E(t) = env(t) e^{i w0 t} + c.c.`; the field
/// spectrum is multiplied by `eps0 chi(|w|)` with
/// `chi(w) = chi0 + chi1 (|w| - w0)`, transformed back, and the positive
/// sideband is demodulated and decimated onto the original grid.
pub fn polarization_spectral_oracle(
    envelope: &[Complex64],
    dt: f64,
    chi0: f64,
    chi1: f64,
    omega0: f64,
) -> Result<Vec<Complex64>> {
    let len = envelope.len();
    if len < 2 || !(dt > 0.0) {
        return Err(Error::GridMismatch("envelope needs at least two samples and dt > 0".into()));
    }
    let spacing = 2.0 * std::f64::consts::PI / (len as f64 * dt);
    let carrier_bin = (omega0 / spacing).round();
    if carrier_bin < 1.0 || ((carrier_bin * spacing - omega0) / omega0).abs() > 1e-9 {
        return Err(Error::CarrierOffGrid { carrier: omega0, spacing });
    }
    let k0 = carrier_bin as usize;

    let mut spec = envelope.to_vec();
    fft(&mut spec);
    let peak = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut max_bin = 0usize;
    for (k, z) in spec.iter().enumerate() {
        if z.norm() > BAND_FLOOR * peak {
            let b = signed_bin(k, len);
            max_bin = max_bin.max(b.unsigned_abs() as usize);
            // the Nyquist bin cannot be assigned a sign
            if len % 2 == 0 && k == len / 2 {
                return Err(Error::NotBandLimited { frequency: max_bin as f64 * spacing, carrier: omega0 });
            }
        }
    }
    if max_bin >= k0 {
        return Err(Error::NotBandLimited { frequency: max_bin as f64 * spacing, carrier: omega0 });
    }

    // fine grid whose Nyquist lies above the upper sideband
    let mut up = 1usize;
    while (up * len) / 2 <= k0 + max_bin + 1 {
        up *= 2;
    }
    let fine = up * len;
    let mut fine_spec = vec![Complex64::new(0.0, 0.0); fine];
    for (k, z) in spec.iter().enumerate() {
        let b = signed_bin(k, len);
        let idx = if b >= 0 { b as usize } else { (fine as i64 + b) as usize };
        fine_spec[idx] = *z * up as f64;
    }
    let mut env_fine = fine_spec;
    ifft(&mut env_fine);

    let fine_dt = dt / up as f64;
    let mut field: Vec<Complex64> = env_fine
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let carrier = Complex64::from_polar(1.0, omega0 * j as f64 * fine_dt);
            let a = e * carrier;
            Complex64::new(2.0 * a.re, 0.0)
        })
        .collect();
    fft(&mut field);
    for (k, z) in field.iter_mut().enumerate() {
        let w = bin_omega(k, fine, fine_dt).abs();
        *z *= VACUUM_PERMITTIVITY * (chi0 + chi1 * (w - omega0));
    }
    // positive sideband only, shifted down by the carrier
    let mut sideband = vec![Complex64::new(0.0, 0.0); fine];
    for (k, z) in field.iter().enumerate() {
        let b = signed_bin(k, fine);
        if b > 0 && (b as usize) < fine / 2 {
            let shifted = b - k0 as i64;
            let idx = if shifted >= 0 { shifted as usize } else { (fine as i64 + shifted) as usize };
            sideband[idx] = *z;
        }
    }
    ifft(&mut sideband);
    Ok((0..len).map(|m| sideband[m * up]).collect())
}
