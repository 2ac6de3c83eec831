//! Per-stage, piecewise-constant-in-time delay schedules.
//!
//! Stage `m` connects `v_m` to `v_{m+1}`; its delay `T_m(t)` sets the local
//! velocity `1 / T_m` in stages per second.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Delay of one all-pass stage built from a resistor and capacitor, `T = 2RC`.
pub fn delay_from_rc(resistance: f64, capacitance: f64) -> f64 {
    2.0 * resistance * capacitance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// Time (s) from which `delays` apply.
    pub time: f64,
    /// Delay (s) of each stage.
    pub delays: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySchedule {
    stages: usize,
    breakpoints: Vec<Breakpoint>,
}

impl DelaySchedule {
    pub fn new(stages: usize, breakpoints: Vec<Breakpoint>) -> Result<Self> {
        if stages == 0 {
            return Err(Error::InvalidSchedule("stage count must be positive".into()));
        }
        let first = breakpoints
            .first()
            .ok_or_else(|| Error::InvalidSchedule("at least one breakpoint is required".into()))?;
        if first.time != 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "first breakpoint must be at t = 0, found {}",
                first.time
            )));
        }
        for (i, bp) in breakpoints.iter().enumerate() {
            if !bp.time.is_finite() {
                return Err(Error::InvalidSchedule(format!("breakpoint {i} time is not finite")));
            }
            if i > 0 && bp.time <= breakpoints[i - 1].time {
                return Err(Error::InvalidSchedule(format!(
                    "breakpoint times must increase strictly (breakpoint {i} at {})",
                    bp.time
                )));
            }
            if bp.delays.len() != stages {
                return Err(Error::InvalidSchedule(format!(
                    "breakpoint {i} lists {} delays for {stages} stages",
                    bp.delays.len()
                )));
            }
            if let Some(m) = bp.delays.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
                return Err(Error::InvalidSchedule(format!(
                    "breakpoint {i}, stage {m}: delay {} must be positive and finite",
                    bp.delays[m]
                )));
            }
        }
        Ok(Self { stages, breakpoints })
    }

    pub fn uniform(stages: usize, delay: f64) -> Result<Self> {
        Self::new(stages, vec![Breakpoint { time: 0.0, delays: vec![delay; stages] }])
    }

    /// Time-independent schedule from stage ranges that must tile `0..stages`.
    pub fn spatial(stages: usize, regions: &[(Range<usize>, f64)]) -> Result<Self> {
        Self::new(stages, vec![Breakpoint { time: 0.0, delays: tile(stages, regions)? }])
    }

    /// Stage-independent schedule from `(start time, delay)` periods.
    pub fn temporal(stages: usize, periods: &[(f64, f64)]) -> Result<Self> {
        let bps = periods
            .iter()
            .map(|&(time, delay)| Breakpoint { time, delays: vec![delay; stages] })
            .collect();
        Self::new(stages, bps)
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    /// Index of the breakpoint in force at `t` (times before 0 use the first).
    pub fn segment_at(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|bp| bp.time <= t).saturating_sub(1)
    }

    /// Index of the breakpoint in force just before `t`.
    pub(crate) fn segment_before(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|bp| bp.time < t).saturating_sub(1)
    }

    pub fn delay(&self, stage: usize, t: f64) -> f64 {
        self.breakpoints[self.segment_at(t)].delays[stage]
    }

    pub fn velocity(&self, stage: usize, t: f64) -> f64 {
        1.0 / self.delay(stage, t)
    }

    fn all_delays(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.iter().flat_map(|bp| bp.delays.iter().copied())
    }

    pub fn min_delay(&self) -> f64 {
        self.all_delays().fold(f64::INFINITY, f64::min)
    }

    pub fn max_delay(&self) -> f64 {
        self.all_delays().fold(0.0, f64::max)
    }

    /// The single delay shared by every stage at all times, if any.
    pub fn uniform_delay(&self) -> Option<f64> {
        let d = self.breakpoints[0].delays[0];
        self.all_delays().all(|x| x == d).then_some(d)
    }

    /// Distinct delay values in order of first appearance.
    pub fn distinct_delays(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for d in self.all_delays() {
            if !out.contains(&d) {
                out.push(d);
            }
        }
        out
    }

    /// Time at which the characteristic leaving `from_stage` at `t_start`
    /// reaches `to_stage`, moving at the local velocity of each stage.
    pub fn arrival_time(&self, from_stage: usize, t_start: f64, to_stage: usize) -> f64 {
        let mut x = from_stage as f64;
        let mut t = t_start;
        let target = to_stage.min(self.stages) as f64;
        while x < target {
            let m = x.floor() as usize;
            let seg = self.segment_at(t);
            let delay = self.breakpoints[seg].delays[m];
            let need = (m as f64 + 1.0 - x) * delay;
            match self.breakpoints.get(seg + 1) {
                Some(next) if t + need > next.time => {
                    x += (next.time - t) / delay;
                    t = next.time;
                }
                _ => {
                    t += need;
                    x = m as f64 + 1.0;
                }
            }
        }
        t
    }
}

fn tile(stages: usize, regions: &[(Range<usize>, f64)]) -> Result<Vec<f64>> {
    let mut delays = vec![f64::NAN; stages];
    for (range, delay) in regions {
        if range.end > stages || range.start >= range.end {
            return Err(Error::InvalidSchedule(format!(
                "region {}..{} is empty or outside 0..{stages}",
                range.start, range.end
            )));
        }
        for slot in &mut delays[range.clone()] {
            if !slot.is_nan() {
                return Err(Error::InvalidSchedule(format!(
                    "region {}..{} overlaps another region",
                    range.start, range.end
                )));
            }
            *slot = *delay;
        }
    }
    if let Some(m) = delays.iter().position(|d| d.is_nan()) {
        return Err(Error::InvalidSchedule(format!("stage {m} is not covered by any region")));
    }
    Ok(delays)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig2(x: f64) -> f64 {
        let e = x.abs().log10().floor() as i32 - 1;
        let scale = 10f64.powi(e);
        (x / scale).round() * scale
    }

    #[test]
    fn rc_delays_match_table_settings() {
        let c = 82e-9;
        assert!((sig2(delay_from_rc(476e3, c)) - 0.078).abs() < 1e-12);
        assert!((sig2(delay_from_rc(909e3, c)) - 0.15).abs() < 1e-12);
        assert!((sig2(delay_from_rc(10e6, c)) - 1.6).abs() < 1e-12);
        assert!((sig2(1.0 / delay_from_rc(476e3, c)) - 13.0).abs() < 1e-9);
        assert!((sig2(1.0 / delay_from_rc(909e3, c)) - 6.7).abs() < 1e-9);
    }

    #[test]
    fn lookup_is_piecewise_constant() {
        let s = DelaySchedule::temporal(3, &[(0.0, 0.078), (4.0, 1.6), (7.0, 0.078)]).unwrap();
        assert_eq!(s.delay(0, -1.0), 0.078);
        assert_eq!(s.delay(2, 3.999), 0.078);
        assert_eq!(s.delay(1, 4.0), 1.6);
        assert_eq!(s.delay(1, 6.999), 1.6);
        assert_eq!(s.delay(1, 7.0), 0.078);
        assert_eq!(s.segment_before(4.0), 0);
        assert!((s.velocity(0, 5.0) - 0.625).abs() < 1e-15);
        assert_eq!(s.min_delay(), 0.078);
        assert_eq!(s.max_delay(), 1.6);
        assert_eq!(s.uniform_delay(), None);
        assert_eq!(s.distinct_delays(), vec![0.078, 1.6]);
    }

    #[test]
    fn validation() {
        assert!(DelaySchedule::uniform(0, 1.0).is_err());
        assert!(DelaySchedule::uniform(3, 0.0).is_err());
        assert!(DelaySchedule::uniform(3, f64::INFINITY).is_err());
        assert!(DelaySchedule::temporal(3, &[(1.0, 0.1)]).is_err());
        assert!(DelaySchedule::temporal(3, &[(0.0, 0.1), (0.0, 0.2)]).is_err());
        assert!(DelaySchedule::spatial(4, &[(0..2, 0.1)]).is_err());
        assert!(DelaySchedule::spatial(4, &[(0..3, 0.1), (2..4, 0.2)]).is_err());
        assert!(DelaySchedule::spatial(4, &[(0..2, 0.1), (2..5, 0.2)]).is_err());
        let s = DelaySchedule::spatial(4, &[(0..2, 0.1), (2..4, 0.2)]).unwrap();
        assert_eq!(s.breakpoints()[0].delays, vec![0.1, 0.1, 0.2, 0.2]);
    }

    #[test]
    fn arrival_follows_regions_and_periods() {
        let s = DelaySchedule::spatial(40, &[(0..25, 0.078), (25..40, 0.15)]).unwrap();
        let t = s.arrival_time(0, 5.0, 40);
        assert!((t - (5.0 + 25.0 * 0.078 + 15.0 * 0.15)).abs() < 1e-12);

        let s = DelaySchedule::temporal(40, &[(0.0, 0.078), (4.0, 1.6), (7.0, 0.078)]).unwrap();
        // 1.875 stages during the slow period, the rest at 0.078 s/stage
        let t = s.arrival_time(0, 4.0, 40);
        assert!((t - (7.0 + (40.0 - 1.875) * 0.078)).abs() < 1e-12);
    }
}
