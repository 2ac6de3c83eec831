use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::DelaySchedule;

/// Output voltage of one stage on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSignal {
    pub stage: usize,
    pub start: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl StageSignal {
    pub fn new(stage: usize, start: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch(format!("stage {stage} holds non-finite samples")));
        }
        Ok(Self { stage, start, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.dt
    }

    pub fn peak_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_grid(&self, other: &StageSignal) -> bool {
        self.len() == other.len() && self.dt == other.dt && self.start == other.start
    }
}

/// Every stage output of one simulation run, `signals[0]` being the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub signals: Vec<StageSignal>,
    pub schedule: DelaySchedule,
    pub dt: f64,
}

impl ChainRecord {
    /// Number of delay stages (one less than the number of signals).
    pub fn stages(&self) -> usize {
        self.signals.len() - 1
    }

    pub fn signal(&self, n: usize) -> &StageSignal {
        &self.signals[n]
    }

    pub fn len(&self) -> usize {
        self.signals[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals[0].is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.signals[0].time(k)
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Grid index nearest to `t`, clamped to the record.
    pub fn index_of(&self, t: f64) -> usize {
        let k = ((t - self.signals[0].start) / self.dt).round();
        (k.max(0.0) as usize).min(self.len() - 1)
    }

    /// Spatial profile `v_n(t)` for `n = 0..=N`, linearly interpolated in time.
    pub fn profile_at(&self, t: f64) -> Vec<f64> {
        let pos = ((t - self.signals[0].start) / self.dt).clamp(0.0, (self.len() - 1) as f64);
        let k = (pos.floor() as usize).min(self.len().saturating_sub(2));
        let s = pos - k as f64;
        self.signals
            .iter()
            .map(|sig| {
                if sig.len() < 2 {
                    sig.samples[0]
                } else {
                    sig.samples[k] * (1.0 - s) + sig.samples[k + 1] * s
                }
            })
            .collect()
    }

    pub fn same_grid(&self, other: &ChainRecord) -> bool {
        self.signals.len() == other.signals.len()
            && self.signals.iter().zip(&other.signals).all(|(a, b)| a.same_grid(b))
    }
}
