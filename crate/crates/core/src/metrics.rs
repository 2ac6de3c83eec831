//! Measurements on simulated pulses: speed, widths, spectrum condition and
//! distortion against a reference.
//!
//! All widths are taken between the e^-1 points of the amplitude, matching
//! the Gaussian convention `exp(-4 t^2 / w^2)`. Crossings are located by
//! linear interpolation; peaks by a parabola through three samples.

use std::f64::consts::E;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{catmull_rom, crossing, parabolic_vertex};
use crate::signal::{ChainRecord, StageSignal};
use crate::spectrum::spectral_half_width;

/// Stage peaks below this fraction of the input peak are not tracked.
pub const NOISE_FLOOR: f64 = 1e-3;

/// Distortion is evaluated where the reference exceeds this fraction of its
/// peak amplitude.
pub const DISTORTION_WINDOW_LEVEL: f64 = 0.135_335_283_236_612_7; // e^-2

/// Spectrum-condition verdict thresholds on `rho = dw / nu`.
pub const RHO_SATISFIED_BELOW: f64 = 0.5;
pub const RHO_VIOLATED_FROM: f64 = 1.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(stage, peak time in s)` for every stage with a usable peak.
    pub points: Vec<(usize, f64)>,
    /// Stages without a peak above the noise floor.
    pub flagged: Vec<usize>,
}

impl Trajectory {
    pub fn peak_time(&self, stage: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == stage).map(|p| p.1)
    }
}

/// Sub-sample time of the global maximum, if it exceeds `floor`.
pub fn peak_time(signal: &StageSignal, floor: f64) -> Option<f64> {
    let s = &signal.samples;
    let (k, &v) = s.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(v > floor) {
        return None;
    }
    let off = if k > 0 && k + 1 < s.len() { parabolic_vertex(s[k - 1], v, s[k + 1]) } else { 0.0 };
    Some(signal.time(k) + off * signal.dt)
}

pub fn peak_trajectory(record: &ChainRecord) -> Trajectory {
    let floor = NOISE_FLOOR * record.signal(0).peak_abs();
    let mut traj = Trajectory::default();
    for sig in &record.signals {
        match peak_time(sig, floor).filter(|_| floor > 0.0) {
            Some(t) => traj.points.push((sig.stage, t)),
            None => traj.flagged.push(sig.stage),
        }
    }
    traj
}

/// Least-squares slope of peak time against stage over `stages`, returned
/// as a velocity in stages per second.
pub fn fit_velocity(traj: &Trajectory, stages: RangeInclusive<usize>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = traj
        .points
        .iter()
        .filter(|p| stages.contains(&p.0))
        .map(|&(n, t)| (n as f64, t))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    (sxy > 0.0).then(|| sxx / sxy)
}

/// Distance between the e^-1 points on either side of the maximum of
/// `samples`, in units of `spacing`. `Err` carries which side failed.
fn e1_width(samples: &[f64], spacing: f64) -> std::result::Result<(usize, f64, f64), &'static str> {
    let (k, &peak) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or("empty signal")?;
    if !(peak > 0.0) {
        return Err("no positive peak");
    }
    let level = peak / E;
    let left = (0..k)
        .rev()
        .find(|&j| samples[j] < level)
        .map(|j| crossing(j as f64, samples[j], (j + 1) as f64, samples[j + 1], level))
        .ok_or("leading edge")?;
    let right = (k + 1..samples.len())
        .find(|&j| samples[j] < level)
        .map(|j| crossing((j - 1) as f64, samples[j - 1], j as f64, samples[j], level))
        .ok_or("trailing edge")?;
    Ok((k, left * spacing, right * spacing))
}

/// Full width between the e^-1 points of the stage signal (s).
pub fn temporal_width(signal: &StageSignal) -> Result<f64> {
    e1_width(&signal.samples, signal.dt)
        .map(|(_, l, r)| r - l)
        .map_err(|side| Error::NoCrossing(format!("stage {}: {side}", signal.stage)))
}

/// Width in stages of the spatial profile `v_n(t)` between its e^-1 points.
pub fn spatial_length(record: &ChainRecord, t: f64) -> Result<f64> {
    let profile = record.profile_at(t);
    match e1_width(&profile, 1.0) {
        Ok((k, l, r)) if k > 0 && k < record.stages() => Ok(r - l),
        Ok(_) | Err("leading edge") | Err("trailing edge") => Err(Error::PulseAtChainEnd { t }),
        Err(e) => Err(Error::NoCrossing(format!("profile at t = {t} s: {e}"))),
    }
}

/// Sub-stage position of the maximum of the spatial profile at `t`.
pub fn spatial_peak(record: &ChainRecord, t: f64) -> Option<f64> {
    let p = record.profile_at(t);
    let (k, &v) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(v > 0.0) {
        return None;
    }
    let off = if k > 0 && k + 1 < p.len() { parabolic_vertex(p[k - 1], v, p[k + 1]) } else { 0.0 };
    Some(k as f64 + off)
}

/// Half-width at e^-1 of `|V(w)|` (rad/s).
pub fn spectral_width(signal: &StageSignal) -> Result<f64> {
    spectral_half_width(&signal.samples, signal.dt)
}

/// Largest end value, relative to the peak, of a spatial profile whose
/// spectrum is still measured.
pub const PROFILE_EDGE_LEVEL: f64 = 1e-2;

/// Spectral half-width of the spatial profile at `t` in rad per stage.
///
/// A component at angular frequency `w` moving at `nu` stages/s has spatial
/// frequency `w / nu`, so this equals the instantaneous `dw / nu` of the
/// pulse inside the chain even while `nu` changes in time.
pub fn spatial_spectral_ratio(record: &ChainRecord, t: f64) -> Result<f64> {
    let profile = record.profile_at(t);
    let peak = profile.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ends = profile[0].abs().max(profile[profile.len() - 1].abs());
    if ends > PROFILE_EDGE_LEVEL * peak {
        return Err(Error::PulseAtChainEnd { t });
    }
    spectral_half_width(&profile, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Marginal,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCondition {
    pub ratio: f64,
    pub verdict: Verdict,
}

/// `rho = dw / nu = dw T`, graded against the per-stage bandwidth.
pub fn spectrum_condition(spectral_width: f64, velocity: f64) -> SpectrumCondition {
    let ratio = spectral_width / velocity;
    let verdict = if ratio < RHO_SATISFIED_BELOW {
        Verdict::Satisfied
    } else if ratio < RHO_VIOLATED_FROM {
        Verdict::Marginal
    } else {
        Verdict::Violated
    };
    SpectrumCondition { ratio, verdict }
}

/// RMS of `signal - reference` over the reference's core (where it exceeds
/// [`DISTORTION_WINDOW_LEVEL`] of its peak), divided by the reference peak.
pub fn nrmse(signal: &[f64], reference: &[f64]) -> Result<f64> {
    if signal.len() != reference.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples against {} reference samples",
            signal.len(),
            reference.len()
        )));
    }
    let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        let any = signal.iter().any(|v| *v != 0.0);
        return Ok(if any { f64::INFINITY } else { 0.0 });
    }
    let level = DISTORTION_WINDOW_LEVEL * peak;
    let lo = reference.iter().position(|v| v.abs() >= level).expect("peak exists");
    let hi = reference.iter().rposition(|v| v.abs() >= level).expect("peak exists");
    let sum: f64 = (lo..=hi).map(|k| (signal[k] - reference[k]).powi(2)).sum();
    Ok((sum / (hi - lo + 1) as f64).sqrt() / peak)
}

/// Per-stage [`nrmse`] of `record` against `reference`.
pub fn distortion(record: &ChainRecord, reference: &ChainRecord) -> Result<Vec<f64>> {
    if !record.same_grid(reference) {
        return Err(Error::GridMismatch("records do not share stages and time grid".into()));
    }
    record
        .signals
        .iter()
        .zip(&reference.signals)
        .map(|(a, b)| nrmse(&a.samples, &b.samples))
        .collect()
}

/// [`nrmse`] after shifting `reference` in time so that both peaks coincide.
/// Returns the error and the applied shift (s).
pub fn aligned_nrmse(signal: &StageSignal, reference: &StageSignal) -> Result<(f64, f64)> {
    if signal.dt != reference.dt {
        return Err(Error::GridMismatch("different sample spacing".into()));
    }
    let ta = peak_time(signal, 0.0).ok_or_else(|| Error::NoCrossing("signal has no peak".into()))?;
    let tb = peak_time(reference, 0.0).ok_or_else(|| Error::NoCrossing("reference has no peak".into()))?;
    let shift = ta - tb;
    let shifted: Vec<f64> = (0..signal.len())
        .map(|k| catmull_rom(&reference.samples, reference.start, reference.dt, signal.time(k) - shift))
        .collect();
    Ok((nrmse(&signal.samples, &shifted)?, shift))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialSlice {
    pub time_s: f64,
    pub length_stages: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    pub delay_s: f64,
    pub velocity_per_s: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseMetrics {
    pub velocity_stages_per_s: Option<f64>,
    pub peak_times_s: Vec<Option<f64>>,
    pub temporal_width_s: Vec<Option<f64>>,
    pub spatial_length_stages: Vec<SpatialSlice>,
    pub spectral_width_rad_per_s: Option<f64>,
    pub distortion_nrmse: Vec<f64>,
    /// `dw / nu` of the input for every delay used by the schedule.
    pub spectrum_ratio: Vec<SpectrumCheck>,
}

/// Gathers the standard measurements. `reference` (same grid) enables the
/// distortion column; `slices` lists the times for spatial lengths.
pub fn measure(record: &ChainRecord, reference: Option<&ChainRecord>, slices: &[f64]) -> Result<PulseMetrics> {
    let traj = peak_trajectory(record);
    let spectral = spectral_width(record.signal(0)).ok();
    let spectrum_ratio = match spectral {
        Some(w) => record
            .schedule
            .distinct_delays()
            .into_iter()
            .map(|d| {
                let c = spectrum_condition(w, 1.0 / d);
                SpectrumCheck { delay_s: d, velocity_per_s: 1.0 / d, ratio: c.ratio, verdict: c.verdict }
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(PulseMetrics {
        velocity_stages_per_s: fit_velocity(&traj, 0..=record.stages()),
        peak_times_s: (0..=record.stages()).map(|n| traj.peak_time(n)).collect(),
        temporal_width_s: record.signals.iter().map(|s| temporal_width(s).ok()).collect(),
        spatial_length_stages: slices
            .iter()
            .map(|&t| SpatialSlice { time_s: t, length_stages: spatial_length(record, t).ok() })
            .collect(),
        spectral_width_rad_per_s: spectral,
        distortion_nrmse: match reference {
            Some(r) => distortion(record, r)?,
            None => Vec::new(),
        },
        spectrum_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::DelaySchedule;

    fn gaussian_signal(stage: usize, center: f64, width: f64, dt: f64, len: usize) -> StageSignal {
        let s = (0..len)
            .map(|k| {
                let x = (k as f64 * dt - center) / width;
                (-4.0 * x * x).exp()
            })
            .collect();
        StageSignal::new(stage, 0.0, dt, s).unwrap()
    }

    fn shifted_record(stages: usize, nu: f64, width: f64) -> ChainRecord {
        let dt = 1e-3;
        let len = 12001;
        let signals = (0..=stages).map(|n| gaussian_signal(n, 2.5 + n as f64 / nu, width, dt, len)).collect();
        ChainRecord { signals, schedule: DelaySchedule::uniform(stages, 1.0 / nu).unwrap(), dt }
    }

    #[test]
    fn widths_of_gaussians() {
        let s = gaussian_signal(0, 2.5, 1.0, 1e-3, 5001);
        assert!((temporal_width(&s).unwrap() - 1.0).abs() < 1e-6);
        let s = gaussian_signal(0, 5.0, 2.0, 1e-3, 10001);
        assert!((temporal_width(&s).unwrap() - 2.0).abs() < 1e-6);
        assert!((spectral_width(&s).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn missing_crossing_is_an_error() {
        let s = gaussian_signal(3, 0.0, 1.0, 1e-3, 2000);
        assert!(matches!(temporal_width(&s), Err(Error::NoCrossing(_))));
    }

    #[test]
    fn trajectory_of_uniform_shift() {
        let rec = shifted_record(40, 13.0, 1.0);
        let traj = peak_trajectory(&rec);
        assert!(traj.flagged.is_empty());
        let v = fit_velocity(&traj, 0..=40).unwrap();
        assert!((v - 13.0).abs() < 1e-3, "{v}");
        let len = spatial_length(&rec, 4.0).unwrap();
        assert!((len - 13.0).abs() < 0.05, "{len}");
        assert!(matches!(spatial_length(&rec, 0.5), Err(Error::PulseAtChainEnd { .. })));
        let rho = spatial_spectral_ratio(&rec, 4.0).unwrap();
        assert!((rho - 4.0 / 13.0).abs() < 0.01, "{rho}");
        assert!(matches!(spatial_spectral_ratio(&rec, 0.5), Err(Error::PulseAtChainEnd { .. })));
    }

    #[test]
    fn zero_record_flags_every_stage() {
        let dt = 1e-3;
        let signals = (0..=3).map(|n| StageSignal::new(n, 0.0, dt, vec![0.0; 100]).unwrap()).collect();
        let rec = ChainRecord { signals, schedule: DelaySchedule::uniform(3, 0.1).unwrap(), dt };
        let traj = peak_trajectory(&rec);
        assert!(traj.points.is_empty());
        assert_eq!(traj.flagged, vec![0, 1, 2, 3]);
    }

    #[test]
    fn spectrum_condition_grades() {
        let c = spectrum_condition(4.0, 1.0 / 0.078);
        assert!((c.ratio - 0.312).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Satisfied);
        let c = spectrum_condition(4.0, 1.0 / 0.15);
        assert!((c.ratio - 0.60).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Marginal);
        let c = spectrum_condition(4.0, 1.0 / 1.6);
        assert!((c.ratio - 6.4).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Violated);
        assert_eq!(spectrum_condition(1.0, 1.0).verdict, Verdict::Violated);
        assert_eq!(spectrum_condition(0.5, 1.0).verdict, Verdict::Marginal);
    }

    #[test]
    fn distortion_of_self_is_zero_and_grids_must_match() {
        let rec = shifted_record(5, 13.0, 1.0);
        assert!(distortion(&rec, &rec).unwrap().iter().all(|&e| e == 0.0));
        let other = shifted_record(4, 13.0, 1.0);
        assert!(matches!(distortion(&rec, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn alignment_removes_pure_delay() {
        let a = gaussian_signal(0, 3.0, 1.0, 1e-3, 8001);
        let b = gaussian_signal(0, 5.3217, 1.0, 1e-3, 8001);
        let (e, shift) = aligned_nrmse(&b, &a).unwrap();
        assert!((shift - 2.3217).abs() < 1e-6);
        assert!(e < 1e-6, "{e}");
    }
}
