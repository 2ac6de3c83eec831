//! Input waveforms fed to stage 0 of the chain.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{catmull_rom, crossing};

/// A waveform given as uniformly spaced samples, interpolated with cubic
/// Catmull-Rom segments and zero outside its span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveform {
    start: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl SampledWaveform {
    pub fn new(start: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidPulse(format!("sample spacing {dt} must be positive")));
        }
        if !start.is_finite() {
            return Err(Error::InvalidPulse("sample start time must be finite".into()));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPulse("need at least two samples".into()));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPulse(format!("sample {k} is not finite")));
        }
        Ok(Self { start, dt, samples })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + (self.samples.len() - 1) as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn eval(&self, t: f64) -> f64 {
        catmull_rom(&self.samples, self.start, self.dt, t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Gaussian,
    Sampled(SampledWaveform),
}

/// Parametric input pulse.
///
/// For `Gaussian` the waveform is `amplitude * exp(-4 (t - center)^2 / width^2)`
/// inside `window` and exactly zero outside, so `width` is the full width
/// between the e^-1 points. For `Sampled` the same fields describe the
/// supplied samples (peak value, peak time, e^-1 width).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub window: (f64, f64),
    pub kind: PulseKind,
}

impl PulseSpec {
    pub fn gaussian(amplitude: f64, center: f64, width: f64, window: (f64, f64)) -> Result<Self> {
        let (lo, hi) = window;
        if ![amplitude, center, width, lo, hi].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPulse("parameters must be finite".into()));
        }
        if width <= 0.0 {
            return Err(Error::InvalidPulse(format!("width {width} s must be positive")));
        }
        if !(lo < center && center < hi) {
            return Err(Error::InvalidPulse(format!(
                "center {center} s must lie strictly inside the window [{lo}, {hi}] s"
            )));
        }
        Ok(Self { amplitude, center, width, window, kind: PulseKind::Gaussian })
    }

    /// The 1 V Gaussian centred at 2.5 s with 1 s width, cut to [0, 5] s.
    pub fn standard() -> Self {
        Self::gaussian(1.0, 2.5, 1.0, (0.0, 5.0)).expect("standard pulse is valid")
    }

    /// Wraps user-supplied samples; descriptive fields are measured from them.
    pub fn sampled(waveform: SampledWaveform) -> Result<Self> {
        let s = waveform.samples();
        let (peak_idx, &peak) = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if peak <= 0.0 {
            return Err(Error::InvalidPulse("sampled pulse has no positive peak".into()));
        }
        let center = waveform.start() + peak_idx as f64 * waveform.dt();
        let window = (waveform.start(), waveform.end());
        if !(window.0 < center && center < window.1) {
            return Err(Error::InvalidPulse("sampled pulse peaks at the edge of its window".into()));
        }
        let level = peak / E;
        let left = (0..peak_idx).rev().find(|&k| s[k] < level).map(|k| {
            crossing(k as f64, s[k], (k + 1) as f64, s[k + 1], level)
        });
        let right = (peak_idx + 1..s.len()).find(|&k| s[k] < level).map(|k| {
            crossing((k - 1) as f64, s[k - 1], k as f64, s[k], level)
        });
        let width = match (left, right) {
            (Some(l), Some(r)) => (r - l) * waveform.dt(),
            _ => window.1 - window.0,
        };
        Ok(Self { amplitude: peak, center, width, window, kind: PulseKind::Sampled(waveform) })
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.kind, PulseKind::Gaussian)
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            PulseKind::Gaussian => gaussian_input(self, t),
            PulseKind::Sampled(w) => {
                if t < self.window.0 || t > self.window.1 {
                    0.0
                } else {
                    w.eval(t)
                }
            }
        }
    }

    /// Samples the waveform at `start + k * dt` for `k in 0..len`.
    pub fn sample(&self, start: f64, dt: f64, len: usize) -> Vec<f64> {
        (0..len).map(|k| self.value(start + k as f64 * dt)).collect()
    }
}

/// Closed-form truncated Gaussian described by `spec`'s amplitude, center,
/// width and window (the `kind` is not consulted).
pub fn gaussian_input(spec: &PulseSpec, t: f64) -> f64 {
    let (lo, hi) = spec.window;
    if t < lo || t > hi {
        return 0.0;
    }
    let x = (t - spec.center) / spec.width;
    spec.amplitude * (-4.0 * x * x).exp()
}
