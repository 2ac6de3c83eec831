//! Time-domain integration of the cascaded all-pass stages.
//!
//! Each stage obeys `d/dt[(v_n + v_{n+1}) / 2] + (v_{n+1} - v_n) / T = 0`.
//! With the state `u = v_n + v_{n+1}` this is `du/dt = (2/T)(2 v_n - u)`,
//! advanced by the trapezoidal rule. For constant `T` the step is exactly
//! the bilinear transform of `H(s) = (1 - sT/2) / (1 + sT/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseSpec;
use crate::schedule::DelaySchedule;
use crate::signal::{ChainRecord, StageSignal};

/// Default step for the reference scenarios (s).
pub const DEFAULT_DT: f64 = 1e-3;

/// `dt` may not exceed the smallest stage delay divided by this.
pub const STEPS_PER_MIN_DELAY: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationMethod {
    #[default]
    Trapezoidal,
}

/// What happens to the stage state when a delay switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatePolicy {
    /// `u_n` (the capacitor-like state) is continuous; only `2/T` jumps.
    #[default]
    CapacitorStateContinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub method: IntegrationMethod,
    pub state_policy: StatePolicy,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: DEFAULT_DT, method: IntegrationMethod::Trapezoidal, state_policy: StatePolicy::default() }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        Ok(Self { dt, ..Self::default() })
    }

    pub fn check(&self, schedule: &DelaySchedule) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidStep(self.dt));
        }
        let max = schedule.min_delay() / STEPS_PER_MIN_DELAY;
        if self.dt > max * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt: self.dt, max });
        }
        Ok(())
    }
}

/// Internal state `u_n = v_n + v_{n+1}` of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageState {
    pub u: f64,
}

/// Advances one stage by one trapezoidal step and returns the new state with
/// the stage output at the end of the step.
#[inline]
pub fn step_stage(state: StageState, v_in_now: f64, v_in_next: f64, delay: f64, dt: f64) -> (StageState, f64) {
    let a = dt / delay;
    let u = (state.u * (1.0 - a) + 2.0 * a * (v_in_now + v_in_next)) / (1.0 + a);
    (StageState { u }, u - v_in_next)
}

/// Latest time at which any part of the pulse support can still be inside
/// the chain: the trailing edge of the window followed to the last stage.
pub fn required_horizon(pulse: &PulseSpec, schedule: &DelaySchedule) -> f64 {
    schedule.arrival_time(0, pulse.window.1, schedule.stages())
}

/// Simulates the chain from rest on the grid `t_k = k dt`, `0 <= t_k <= horizon`.
pub fn simulate_chain(
    pulse: &PulseSpec,
    schedule: &DelaySchedule,
    cfg: &IntegratorConfig,
    horizon: f64,
) -> Result<ChainRecord> {
    cfg.check(schedule)?;
    let required = required_horizon(pulse, schedule);
    if !(horizon >= required) {
        return Err(Error::HorizonTooShort { horizon, required });
    }
    let dt = cfg.dt;
    let len = (horizon / dt + 1e-9).floor() as usize + 1;
    let input = pulse.sample(0.0, dt, len);
    propagate(input, schedule, dt)
}

/// Runs the cascade on an already sampled input starting at `t = 0`.
pub fn simulate_samples(input: Vec<f64>, schedule: &DelaySchedule, cfg: &IntegratorConfig) -> Result<ChainRecord> {
    cfg.check(schedule)?;
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidPulse("input samples must be finite".into()));
    }
    propagate(input, schedule, cfg.dt)
}

fn propagate(input: Vec<f64>, schedule: &DelaySchedule, dt: f64) -> Result<ChainRecord> {
    let len = input.len();
    // Delay in force over step k -> k+1, taken at the step midpoint.
    let segments: Vec<usize> = (0..len.saturating_sub(1))
        .map(|k| schedule.segment_at((k as f64 + 0.5) * dt))
        .collect();
    let bps = schedule.breakpoints();

    let mut signals = Vec::with_capacity(schedule.stages() + 1);
    signals.push(StageSignal::new(0, 0.0, dt, input)?);
    // The cascade is feed-forward, so stage n+1 can be integrated over the
    // whole horizon once stage n is known; this matches a per-step sweep.
    for m in 0..schedule.stages() {
        let upstream = &signals[m].samples;
        let mut out = Vec::with_capacity(len);
        let mut state = StageState::default();
        // at rest: u = 0, so the output starts at -v_in (H(inf) = -1)
        out.push(-upstream[0]);
        for k in 0..len.saturating_sub(1) {
            let delay = bps[segments[k]].delays[m];
            let (next, v) = step_stage(state, upstream[k], upstream[k + 1], delay, dt);
            state = next;
            out.push(v);
        }
        signals.push(StageSignal::new(m + 1, 0.0, dt, out)?);
    }
    Ok(ChainRecord { signals, schedule: schedule.clone(), dt })
}
