//! Reference experiments: constant speed, pulse-length compression, collapse
//! under a violated spectrum condition, and slowing/freezing in time.

use serde::{Deserialize, Serialize};

use crate::chain::{simulate_chain, IntegratorConfig};
use crate::error::{Error, Result};
use crate::metrics::{self, PulseMetrics, Verdict};
use crate::oracle::characteristic_record;
use crate::pulse::PulseSpec;
use crate::schedule::DelaySchedule;
use crate::signal::ChainRecord;

/// Stage delays of the three switch settings (s): 13, 6.7 and 0.62 stages/s.
pub const FAST_DELAY: f64 = 0.078;
pub const MEDIUM_DELAY: f64 = 0.15;
pub const SLOW_DELAY: f64 = 1.6;
pub const CIRCUIT_DELAYS: [f64; 3] = [FAST_DELAY, MEDIUM_DELAY, SLOW_DELAY];

pub const CHAIN_STAGES: usize = 40;
/// First stage of the second region in the spatial presets.
pub const REGION_BOUNDARY: usize = 25;
/// Switching times of the temporal presets (s).
pub const SLOWDOWN_TIME: f64 = 4.0;
pub const RELEASE_TIME: f64 = 7.0;

pub const PRESETS: [&str; 5] = ["fig3", "fig4", "fig5", "fig6a", "fig6b"];

/// A measurable claim about a run, with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expectation {
    /// Fitted peak velocity over the inclusive stage range.
    Velocity { first_stage: usize, last_stage: usize, value: f64, rel_tol: f64 },
    /// e^-1 temporal width at every stage of the range.
    TemporalWidth { first_stage: usize, last_stage: usize, value: f64, rel_tol: f64 },
    SpatialLength { time: f64, value: f64, rel_tol: f64 },
    /// `length(t_second) / length(t_first)`.
    SpatialLengthRatio { t_first: f64, t_second: f64, value: f64, rel_tol: f64 },
    /// Spatial length at every time within `rel_tol` of the first.
    SpatialLengthConserved { times: Vec<f64>, rel_tol: f64 },
    /// Distortion against the characteristic solution at every stage of the range.
    MaxDistortion { first_stage: usize, last_stage: usize, max: f64 },
    MinDistortion { stage: usize, min: f64 },
    /// Spectrum condition of the input pulse against the delay of `stage` at `time`.
    SpectrumVerdict { stage: usize, time: f64, verdict: Verdict },
    /// Movement of the spatial peak between two times, in stages.
    MaxPeakAdvance { t_start: f64, t_end: f64, max_stages: f64 },
    /// Instantaneous `dw / nu` (spatial spectral width) at each time.
    RatioConserved { times: Vec<f64>, value: f64, rel_tol: f64 },
    /// `dw T` of one stage's output, with `T` taken at its peak time.
    StageRatio { stage: usize, value: f64, rel_tol: f64 },
    /// Stage output matches the same stage of another preset after alignment.
    ReleaseMatches { reference: String, stage: usize, max: f64 },
}

impl Expectation {
    /// The `kind` tag used in config files.
    pub fn kind(&self) -> &'static str {
        match self {
            Expectation::Velocity { .. } => "velocity",
            Expectation::TemporalWidth { .. } => "temporal_width",
            Expectation::SpatialLength { .. } => "spatial_length",
            Expectation::SpatialLengthRatio { .. } => "spatial_length_ratio",
            Expectation::SpatialLengthConserved { .. } => "spatial_length_conserved",
            Expectation::MaxDistortion { .. } => "max_distortion",
            Expectation::MinDistortion { .. } => "min_distortion",
            Expectation::SpectrumVerdict { .. } => "spectrum_verdict",
            Expectation::MaxPeakAdvance { .. } => "max_peak_advance",
            Expectation::RatioConserved { .. } => "ratio_conserved",
            Expectation::StageRatio { .. } => "stage_ratio",
            Expectation::ReleaseMatches { .. } => "release_matches",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub pulse: PulseSpec,
    pub schedule: DelaySchedule,
    pub horizon: f64,
    /// Times at which spatial lengths are reported.
    pub slices: Vec<f64>,
    pub expected: Vec<Expectation>,
}

pub fn preset(name: &str) -> Result<Scenario> {
    let n = CHAIN_STAGES;
    let b = REGION_BOUNDARY;
    let pulse = PulseSpec::standard();
    let s = match name {
        "fig3" => Scenario {
            name: name.into(),
            pulse,
            schedule: DelaySchedule::uniform(n, FAST_DELAY)?,
            horizon: 12.0,
            slices: vec![4.0],
            expected: vec![
                Expectation::Velocity { first_stage: 0, last_stage: n, value: 13.0, rel_tol: 0.05 },
                Expectation::TemporalWidth { first_stage: 0, last_stage: n, value: 1.0, rel_tol: 0.05 },
                Expectation::SpatialLength { time: 4.0, value: 13.0, rel_tol: 0.1 },
                Expectation::MaxDistortion { first_stage: n, last_stage: n, max: 0.05 },
                Expectation::SpectrumVerdict { stage: 0, time: 0.0, verdict: Verdict::Satisfied },
            ],
        },
        "fig4" => Scenario {
            name: name.into(),
            pulse,
            schedule: DelaySchedule::spatial(n, &[(0..b, FAST_DELAY), (b..n, MEDIUM_DELAY)])?,
            horizon: 12.0,
            // pulse centred on stage 12 (region I) and on stage 32 (region II)
            slices: vec![3.44, 5.5],
            expected: vec![
                Expectation::Velocity { first_stage: 0, last_stage: b - 1, value: 13.0, rel_tol: 0.05 },
                Expectation::Velocity { first_stage: b, last_stage: n, value: 6.7, rel_tol: 0.05 },
                Expectation::TemporalWidth { first_stage: 0, last_stage: n, value: 1.0, rel_tol: 0.05 },
                Expectation::SpatialLengthRatio { t_first: 3.44, t_second: 5.5, value: 6.7 / 13.0, rel_tol: 0.1 },
                Expectation::MaxDistortion { first_stage: b - 1, last_stage: b - 1, max: 0.1 },
                Expectation::MaxDistortion { first_stage: n, last_stage: n, max: 0.1 },
                Expectation::SpectrumVerdict { stage: b, time: 0.0, verdict: Verdict::Marginal },
            ],
        },
        "fig5" => Scenario {
            name: name.into(),
            pulse,
            schedule: DelaySchedule::spatial(n, &[(0..b, FAST_DELAY), (b..n, SLOW_DELAY)])?,
            horizon: 40.0,
            slices: vec![3.44],
            expected: vec![
                Expectation::SpectrumVerdict { stage: 0, time: 0.0, verdict: Verdict::Satisfied },
                Expectation::SpectrumVerdict { stage: b, time: 0.0, verdict: Verdict::Violated },
                Expectation::MaxDistortion { first_stage: 1, last_stage: b - 1, max: 0.05 },
                Expectation::MinDistortion { stage: n, min: 0.5 },
            ],
        },
        "fig6a" => Scenario {
            name: name.into(),
            pulse,
            schedule: DelaySchedule::temporal(
                n,
                &[(0.0, FAST_DELAY), (SLOWDOWN_TIME, MEDIUM_DELAY), (RELEASE_TIME, MEDIUM_DELAY)],
            )?,
            horizon: 15.0,
            slices: vec![3.9, 4.5, 5.0],
            expected: vec![
                Expectation::SpatialLengthConserved { times: vec![3.9, 4.5, 5.0], rel_tol: 0.05 },
                Expectation::TemporalWidth { first_stage: 5, last_stage: 5, value: 1.0, rel_tol: 0.05 },
                Expectation::TemporalWidth {
                    first_stage: 35,
                    last_stage: 35,
                    value: MEDIUM_DELAY / FAST_DELAY,
                    rel_tol: 0.05,
                },
                Expectation::StageRatio { stage: 5, value: 0.31, rel_tol: 0.1 },
                Expectation::StageRatio { stage: 35, value: 0.31, rel_tol: 0.1 },
                Expectation::RatioConserved { times: vec![3.9, 4.1, 4.5], value: 0.31, rel_tol: 0.1 },
            ],
        },
        "fig6b" => Scenario {
            name: name.into(),
            pulse,
            schedule: DelaySchedule::temporal(
                n,
                &[(0.0, FAST_DELAY), (SLOWDOWN_TIME, SLOW_DELAY), (RELEASE_TIME, FAST_DELAY)],
            )?,
            horizon: 15.0,
            slices: vec![3.9, 5.5, 6.9, 7.3],
            expected: vec![
                Expectation::MaxPeakAdvance { t_start: SLOWDOWN_TIME, t_end: RELEASE_TIME, max_stages: 2.0 },
                Expectation::SpatialLengthConserved { times: vec![3.9, 5.5, 6.9, 7.3], rel_tol: 0.05 },
                Expectation::RatioConserved { times: vec![3.9, 4.1, 5.5, 6.9, 7.1], value: 0.31, rel_tol: 0.1 },
                Expectation::ReleaseMatches { reference: "fig3".into(), stage: n, max: 0.05 },
            ],
        },
        _ => {
            return Err(Error::UnknownScenario { name: name.into(), known: PRESETS.join(", ") });
        }
    };
    Ok(s)
}

/// Result of checking one expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub expectation: Expectation,
    pub measured: Vec<f64>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub record: ChainRecord,
    /// Characteristic (ideal transport) solution on the same grid.
    pub ideal: ChainRecord,
    pub metrics: PulseMetrics,
    pub outcomes: Vec<Outcome>,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

pub fn simulate_scenario(s: &Scenario, cfg: &IntegratorConfig) -> Result<ChainRecord> {
    simulate_chain(&s.pulse, &s.schedule, cfg, s.horizon)
}

pub fn run_scenario(s: &Scenario, cfg: &IntegratorConfig) -> Result<ScenarioRun> {
    let record = simulate_scenario(s, cfg)?;
    let ideal = characteristic_record(record.signal(0), &s.schedule)?;
    let metrics = metrics::measure(&record, Some(&ideal), &s.slices)?;
    let outcomes = s
        .expected
        .iter()
        .map(|e| evaluate(e, &record, &metrics, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioRun { record, ideal, metrics, outcomes })
}

fn within(measured: f64, value: f64, rel_tol: f64) -> bool {
    ((measured - value) / value).abs() <= rel_tol
}

fn evaluate(e: &Expectation, record: &ChainRecord, m: &PulseMetrics, cfg: &IntegratorConfig) -> Result<Outcome> {
    let stage_range = |a: usize, b: usize| a..=b.min(record.stages());
    let (measured, passed, detail): (Vec<f64>, bool, String) = match e {
        Expectation::Velocity { first_stage, last_stage, value, rel_tol } => {
            let traj = metrics::peak_trajectory(record);
            match metrics::fit_velocity(&traj, stage_range(*first_stage, *last_stage)) {
                Some(v) => (vec![v], within(v, *value, *rel_tol), format!("{v:.4} stages/s")),
                None => (vec![], false, "no peak trajectory".into()),
            }
        }
        Expectation::TemporalWidth { first_stage, last_stage, value, rel_tol } => {
            let widths: Vec<Option<f64>> =
                stage_range(*first_stage, *last_stage).map(|n| m.temporal_width_s[n]).collect();
            let ok = widths.iter().all(|w| w.is_some_and(|w| within(w, *value, *rel_tol)));
            let vals: Vec<f64> = widths.iter().map(|w| w.unwrap_or(f64::NAN)).collect();
            let (lo, hi) = min_max(&vals);
            (vals, ok, format!("widths in [{lo:.4}, {hi:.4}] s"))
        }
        Expectation::SpatialLength { time, value, rel_tol } => {
            let l = metrics::spatial_length(record, *time)?;
            (vec![l], within(l, *value, *rel_tol), format!("{l:.3} stages at t = {time} s"))
        }
        Expectation::SpatialLengthRatio { t_first, t_second, value, rel_tol } => {
            let a = metrics::spatial_length(record, *t_first)?;
            let b = metrics::spatial_length(record, *t_second)?;
            let r = b / a;
            (vec![a, b, r], within(r, *value, *rel_tol), format!("{b:.3} / {a:.3} = {r:.4}"))
        }
        Expectation::SpatialLengthConserved { times, rel_tol } => {
            let lens = times.iter().map(|&t| metrics::spatial_length(record, t)).collect::<Result<Vec<_>>>()?;
            let ok = lens.iter().all(|&l| within(l, lens[0], *rel_tol));
            let (lo, hi) = min_max(&lens);
            (lens, ok, format!("lengths in [{lo:.3}, {hi:.3}] stages"))
        }
        Expectation::MaxDistortion { first_stage, last_stage, max } => {
            let d: Vec<f64> = stage_range(*first_stage, *last_stage).map(|n| m.distortion_nrmse[n]).collect();
            let worst = d.iter().copied().fold(0.0, f64::max);
            (d, worst < *max, format!("max NRMSE {worst:.4}"))
        }
        Expectation::MinDistortion { stage, min } => {
            let d = m.distortion_nrmse[(*stage).min(record.stages())];
            (vec![d], d > *min, format!("NRMSE {d:.4}"))
        }
        Expectation::SpectrumVerdict { stage, time, verdict } => {
            let w = metrics::spectral_width(record.signal(0))?;
            let c = metrics::spectrum_condition(w, record.schedule.velocity(*stage, *time));
            (vec![c.ratio], c.verdict == *verdict, format!("rho = {:.4} ({:?})", c.ratio, c.verdict))
        }
        Expectation::MaxPeakAdvance { t_start, t_end, max_stages } => {
            let a = metrics::spatial_peak(record, *t_start);
            let b = metrics::spatial_peak(record, *t_end);
            match (a, b) {
                (Some(a), Some(b)) => {
                    let d = b - a;
                    (vec![a, b, d], d.abs() < *max_stages, format!("peak {a:.3} -> {b:.3} ({d:.3} stages)"))
                }
                _ => (vec![], false, "no spatial peak".into()),
            }
        }
        Expectation::RatioConserved { times, value, rel_tol } => {
            let r = times
                .iter()
                .map(|&t| metrics::spatial_spectral_ratio(record, t))
                .collect::<Result<Vec<_>>>()?;
            let ok = r.iter().all(|&x| within(x, *value, *rel_tol));
            let (lo, hi) = min_max(&r);
            (r, ok, format!("rho in [{lo:.4}, {hi:.4}]"))
        }
        Expectation::StageRatio { stage, value, rel_tol } => {
            let sig = record.signal((*stage).min(record.stages()));
            let w = metrics::spectral_width(sig)?;
            let t_peak = metrics::peak_time(sig, 0.0).unwrap_or(0.0);
            let delay = record.schedule.delay(stage.saturating_sub(1).min(record.stages() - 1), t_peak);
            let r = w * delay;
            (vec![w, r], within(r, *value, *rel_tol), format!("dw = {w:.4} rad/s, rho = {r:.4}"))
        }
        Expectation::ReleaseMatches { reference, stage, max } => {
            let other = simulate_scenario(&preset(reference)?, cfg)?;
            let n = (*stage).min(record.stages());
            let (e, shift) = metrics::aligned_nrmse(record.signal(n), other.signal(n))?;
            (vec![e, shift], e < *max, format!("NRMSE {e:.4} after {shift:.4} s shift"))
        }
    };
    Ok(Outcome { expectation: e.clone(), measured, passed, detail })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_lists_known() {
        match preset("fig7") {
            Err(Error::UnknownScenario { known, .. }) => assert!(known.contains("fig6b")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn presets_use_only_circuit_delays() {
        for name in PRESETS {
            let s = preset(name).unwrap();
            assert_eq!(s.schedule.stages(), CHAIN_STAGES);
            for d in s.schedule.distinct_delays() {
                assert!(CIRCUIT_DELAYS.contains(&d), "{name}: {d}");
            }
        }
    }

    #[test]
    fn kind_matches_serde_tag() {
        for name in PRESETS {
            for e in preset(name).unwrap().expected {
                let v = serde_json::to_value(&e).unwrap();
                assert_eq!(v["kind"], e.kind());
            }
        }
    }

    #[test]
    fn preset_shapes() {
        let s = preset("fig3").unwrap();
        assert_eq!(s.schedule.uniform_delay(), Some(FAST_DELAY));
        let s = preset("fig6b").unwrap();
        let times: Vec<f64> = s.schedule.breakpoints().iter().map(|b| b.time).collect();
        assert_eq!(times, vec![0.0, 4.0, 7.0]);
        let s = preset("fig4").unwrap();
        assert_eq!(s.schedule.delay(24, 0.0), FAST_DELAY);
        assert_eq!(s.schedule.delay(25, 0.0), MEDIUM_DELAY);
        assert!(s.expected.iter().any(|e| matches!(e,
            Expectation::SpatialLengthRatio { value, .. } if (*value - 6.7 / 13.0).abs() < 1e-15)));
        for name in PRESETS {
            let s = preset(name).unwrap();
            assert!(s.horizon >= crate::chain::required_horizon(&s.pulse, &s.schedule));
        }
    }
}
