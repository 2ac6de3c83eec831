//! Run configuration: a TOML document naming a preset or defining a pulse,
//! a delay schedule and a horizon inline.
//!
//! ```toml
//! scenario = "fig3"
//!
//! [integrator]
//! dt = "1 ms"
//!
//! [output]
//! dir = "out/fig3"
//! emit = ["waveforms", "metrics"]
//! decimate = 10
//! ```
//!
//! or, inline:
//!
//! ```toml
//! name = "freeze"
//! horizon = "15 s"
//!
//! [pulse]
//! center = 2.5
//! width = 1.0
//! window = [0.0, 5.0]
//!
//! [schedule]
//! stages = 40
//!
//! [[schedule.breakpoint]]
//! t = 0.0
//! delay = "78 ms"
//!
//! [[schedule.breakpoint]]
//! t = 4.0
//! regions = [{ stages = [0, 39], r = 10e6, c = 82e-9 }]
//! ```
//!
//! Durations are seconds, or strings with an `s`, `ms` or `us` suffix.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::chain::{IntegrationMethod, IntegratorConfig, StatePolicy};
use crate::error::{Error, Result};
use crate::pulse::{PulseKind, PulseSpec, SampledWaveform};
use crate::scenarios::{self, Expectation, Scenario};
use crate::schedule::{delay_from_rc, Breakpoint, DelaySchedule};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Preset(String),
    Inline(Scenario),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub waveforms: bool,
    pub metrics: bool,
    pub spectra: bool,
    pub oracle: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self { waveforms: true, metrics: true, spectra: false, oracle: false }
    }
}

impl Emit {
    pub const NAMES: [&'static str; 4] = ["waveforms", "metrics", "spectra", "oracle"];

    pub fn none() -> Self {
        Self { waveforms: false, metrics: false, spectra: false, oracle: false }
    }

    /// Parses a list such as `["waveforms", "oracle"]`.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> std::result::Result<Self, String> {
        let mut e = Self::none();
        for n in names {
            match n.as_ref().trim() {
                "waveforms" => e.waveforms = true,
                "metrics" => e.metrics = true,
                "spectra" => e.spectra = true,
                "oracle" => e.oracle = true,
                other => {
                    return Err(format!("unknown emit flag `{other}`; expected one of {}", Self::NAMES.join(", ")))
                }
            }
        }
        Ok(e)
    }

    pub fn names(&self) -> Vec<String> {
        let on = [self.waveforms, self.metrics, self.spectra, self.oracle];
        Self::NAMES.iter().zip(on).filter(|(_, b)| *b).map(|(n, _)| n.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// `None` defers to the environment or the front end's default.
    pub dir: Option<PathBuf>,
    pub emit: Emit,
    /// Keep every `decimate`-th waveform row.
    pub decimate: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, emit: Emit::default(), decimate: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ScenarioSource,
    pub integrator: IntegratorConfig,
    pub output: OutputConfig,
    /// Replaces the scenario's own expectations when present.
    pub expect: Option<Vec<Expectation>>,
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        scenarios::preset(name)?;
        Ok(Self {
            source: ScenarioSource::Preset(name.into()),
            integrator: IntegratorConfig::default(),
            output: OutputConfig::default(),
            expect: None,
        })
    }

    /// The scenario to run, with any configured expectations applied.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.source {
            ScenarioSource::Preset(name) => scenarios::preset(name)?,
            ScenarioSource::Inline(s) => s.clone(),
        };
        if let Some(e) = &self.expect {
            s.expected = e.clone();
        }
        Ok(s)
    }
}

// ---------------------------------------------------------------------------
// raw document

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    fn seconds(&self, at: &str) -> Result<f64> {
        match self {
            Quantity::Number(x) => Ok(*x),
            Quantity::Text(s) => parse_duration(s).ok_or_else(|| cfg_err(at, format!("cannot read `{s}` as a duration"))),
        }
    }
}

fn parse_duration(s: &str) -> Option<f64> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_alphabetic() || c == 'µ').unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.trim().parse().ok()?;
    let scale = match unit.trim() {
        "" | "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" => 1e-6,
        _ => return None,
    };
    Some(value * scale)
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slices: Option<Vec<Quantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integrator: Option<RawIntegrator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pulse: Option<RawPulse>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<RawSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expect: Option<Vec<Expectation>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<IntegrationMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state_policy: Option<StatePolicy>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    emit: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimate: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Shape {
    #[default]
    Gaussian,
    Sampled,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<Shape>,
    /// Volts; defaults to 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<Vec<Quantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(skip_serializing_if = "Option::is_none")]
    stages: Option<i64>,
    #[serde(default, rename = "breakpoint")]
    breakpoints: Vec<RawBreakpoint>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBreakpoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Quantity>,
    /// Same delay on every stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    delay: Option<Quantity>,
    /// Same velocity (stages/s) on every stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    velocity: Option<f64>,
    /// One delay per stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    delays: Option<Vec<Quantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regions: Option<Vec<RawRegion>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    /// Inclusive `[first, last]` stage indices.
    stages: [i64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    delay: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    velocity: Option<f64>,
    /// Ohms and farads; the delay is `2 r c`.
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
}

fn cfg_err(location: &str, message: impl Into<String>) -> Error {
    Error::Config { location: location.into(), message: message.into() }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn positive(value: f64, at: &str, what: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(cfg_err(at, format!("{what} must be positive and finite, got {value}")))
    }
}

fn require<T>(v: Option<T>, at: &str) -> Result<T> {
    v.ok_or_else(|| cfg_err(at, "missing required key"))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                format!("line {l}, column {c}")
            }
            None => "document".into(),
        };
        cfg_err(&location, e.message().trim_end().to_string())
    })?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let inline = raw.pulse.is_some() || raw.schedule.is_some() || raw.horizon.is_some();
    let source = match (&raw.scenario, inline) {
        (Some(_), true) => {
            return Err(cfg_err("scenario", "give either a preset name or an inline pulse/schedule/horizon, not both"))
        }
        (None, false) => return Err(cfg_err("scenario", "missing: name a preset or define pulse, schedule and horizon")),
        (Some(name), false) => {
            if raw.name.is_some() || raw.slices.is_some() {
                return Err(cfg_err("name", "`name` and `slices` only apply to inline scenarios"));
            }
            scenarios::preset(name).map_err(|e| cfg_err("scenario", e.to_string()))?;
            ScenarioSource::Preset(name.clone())
        }
        (None, true) => ScenarioSource::Inline(resolve_inline(&raw)?),
    };

    let mut integrator = IntegratorConfig::default();
    if let Some(ri) = &raw.integrator {
        if let Some(dt) = &ri.dt {
            integrator.dt = positive(dt.seconds("integrator.dt")?, "integrator.dt", "time step")?;
        }
        integrator.method = ri.method.unwrap_or_default();
        integrator.state_policy = ri.state_policy.unwrap_or_default();
    }

    let mut output = OutputConfig::default();
    if let Some(ro) = &raw.output {
        output.dir = ro.dir.clone();
        if let Some(names) = &ro.emit {
            output.emit = Emit::from_names(names).map_err(|m| cfg_err("output.emit", m))?;
        }
        if let Some(d) = ro.decimate {
            if d < 1 {
                return Err(cfg_err("output.decimate", format!("must be at least 1, got {d}")));
            }
            output.decimate = d as usize;
        }
    }

    let (source, expect) = match source {
        ScenarioSource::Inline(mut s) => {
            s.expected = raw.expect.unwrap_or_default();
            (ScenarioSource::Inline(s), None)
        }
        preset => (preset, raw.expect),
    };
    let cfg = RunConfig { source, integrator, output, expect };
    let s = cfg.scenario()?;
    cfg.integrator.check(&s.schedule).map_err(|e| cfg_err("integrator.dt", e.to_string()))?;
    Ok(cfg)
}

fn resolve_inline(raw: &RawConfig) -> Result<Scenario> {
    let horizon = positive(require(raw.horizon.as_ref(), "horizon")?.seconds("horizon")?, "horizon", "horizon")?;
    let pulse = resolve_pulse(require(raw.pulse.as_ref(), "pulse")?)?;
    let schedule = resolve_schedule(require(raw.schedule.as_ref(), "schedule")?)?;
    let slices = match &raw.slices {
        Some(v) => v.iter().enumerate().map(|(i, q)| q.seconds(&format!("slices[{i}]"))).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(Scenario {
        name: raw.name.clone().unwrap_or_else(|| "custom".into()),
        pulse,
        schedule,
        horizon,
        slices,
        expected: Vec::new(),
    })
}

fn resolve_pulse(p: &RawPulse) -> Result<PulseSpec> {
    let shape = p.shape.unwrap_or_default();
    let stray = |keys: &[(&str, bool)]| -> Result<()> {
        match keys.iter().find(|(_, set)| *set) {
            Some((k, _)) => Err(cfg_err(&format!("pulse.{k}"), format!("not used by a {shape:?} pulse"))),
            None => Ok(()),
        }
    };
    match shape {
        Shape::Gaussian => {
            stray(&[("start", p.start.is_some()), ("dt", p.dt.is_some()), ("values", p.values.is_some())])?;
            let amplitude = p.amplitude.unwrap_or(1.0);
            let center = require(p.center.as_ref(), "pulse.center")?.seconds("pulse.center")?;
            let width = require(p.width.as_ref(), "pulse.width")?.seconds("pulse.width")?;
            let window = require(p.window.as_ref(), "pulse.window")?;
            if window.len() != 2 {
                return Err(cfg_err("pulse.window", "expected [start, end]"));
            }
            let lo = window[0].seconds("pulse.window[0]")?;
            let hi = window[1].seconds("pulse.window[1]")?;
            positive(width, "pulse.width", "width")?;
            PulseSpec::gaussian(amplitude, center, width, (lo, hi)).map_err(|e| cfg_err("pulse", e.to_string()))
        }
        Shape::Sampled => {
            stray(&[
                ("amplitude", p.amplitude.is_some()),
                ("center", p.center.is_some()),
                ("width", p.width.is_some()),
                ("window", p.window.is_some()),
            ])?;
            let start = require(p.start.as_ref(), "pulse.start")?.seconds("pulse.start")?;
            let dt = positive(require(p.dt.as_ref(), "pulse.dt")?.seconds("pulse.dt")?, "pulse.dt", "sample spacing")?;
            let values = require(p.values.clone(), "pulse.values")?;
            let w = SampledWaveform::new(start, dt, values).map_err(|e| cfg_err("pulse.values", e.to_string()))?;
            PulseSpec::sampled(w).map_err(|e| cfg_err("pulse.values", e.to_string()))
        }
    }
}

fn resolve_schedule(s: &RawSchedule) -> Result<DelaySchedule> {
    let stages = require(s.stages, "schedule.stages")?;
    if stages < 1 {
        return Err(cfg_err("schedule.stages", format!("must be at least 1, got {stages}")));
    }
    let stages = stages as usize;
    if s.breakpoints.is_empty() {
        return Err(cfg_err("schedule.breakpoint", "at least one breakpoint is required"));
    }
    let mut bps = Vec::with_capacity(s.breakpoints.len());
    for (i, b) in s.breakpoints.iter().enumerate() {
        let at = format!("schedule.breakpoint[{i}]");
        let time = require(b.t.as_ref(), &format!("{at}.t"))?.seconds(&format!("{at}.t"))?;
        let given = [b.delay.is_some(), b.velocity.is_some(), b.delays.is_some(), b.regions.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(cfg_err(&at, "give exactly one of `delay`, `velocity`, `delays`, `regions`"));
        }
        let delays = if let Some(d) = &b.delay {
            let d = positive(d.seconds(&format!("{at}.delay"))?, &format!("{at}.delay"), "delay")?;
            vec![d; stages]
        } else if let Some(v) = b.velocity {
            vec![1.0 / positive(v, &format!("{at}.velocity"), "velocity")?; stages]
        } else if let Some(list) = &b.delays {
            if list.len() != stages {
                return Err(cfg_err(&format!("{at}.delays"), format!("{} delays for {stages} stages", list.len())));
            }
            list.iter()
                .enumerate()
                .map(|(m, q)| {
                    let here = format!("{at}.delays[{m}]");
                    positive(q.seconds(&here)?, &here, "delay")
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            resolve_regions(b.regions.as_deref().unwrap_or_default(), stages, &at)?
        };
        bps.push(Breakpoint { time, delays });
    }
    DelaySchedule::new(stages, bps).map_err(|e| cfg_err("schedule", e.to_string()))
}

fn resolve_regions(regions: &[RawRegion], stages: usize, at: &str) -> Result<Vec<f64>> {
    let mut delays = vec![f64::NAN; stages];
    for (j, r) in regions.iter().enumerate() {
        let here = format!("{at}.regions[{j}]");
        let [first, last] = r.stages;
        if first < 0 || last < first || last as usize >= stages {
            return Err(cfg_err(&format!("{here}.stages"), format!("[{first}, {last}] is not a range within 0..{stages}")));
        }
        let d = match (&r.delay, r.velocity, r.r, r.c) {
            (Some(d), None, None, None) => positive(d.seconds(&format!("{here}.delay"))?, &format!("{here}.delay"), "delay")?,
            (None, Some(v), None, None) => 1.0 / positive(v, &format!("{here}.velocity"), "velocity")?,
            (None, None, Some(res), Some(cap)) => {
                positive(res, &format!("{here}.r"), "resistance")?;
                positive(cap, &format!("{here}.c"), "capacitance")?;
                delay_from_rc(res, cap)
            }
            _ => return Err(cfg_err(&here, "give exactly one of `delay`, `velocity`, or both `r` and `c`")),
        };
        for m in first as usize..=last as usize {
            if !delays[m].is_nan() {
                return Err(cfg_err(&format!("{here}.stages"), format!("stage {m} is covered twice")));
            }
            delays[m] = d;
        }
    }
    if let Some(m) = delays.iter().position(|d| d.is_nan()) {
        return Err(cfg_err(&format!("{at}.regions"), format!("stage {m} has no delay")));
    }
    Ok(delays)
}

/// Canonical TOML for `cfg`: inline schedules are written as runs of equal
/// delay, durations in seconds.
pub fn to_toml_string(cfg: &RunConfig) -> Result<String> {
    let mut raw = RawConfig::default();
    match &cfg.source {
        ScenarioSource::Preset(name) => raw.scenario = Some(name.clone()),
        ScenarioSource::Inline(s) => {
            raw.name = Some(s.name.clone());
            raw.horizon = Some(Quantity::Number(s.horizon));
            if !s.slices.is_empty() {
                raw.slices = Some(s.slices.iter().map(|&t| Quantity::Number(t)).collect());
            }
            raw.pulse = Some(pulse_to_raw(&s.pulse));
            raw.schedule = Some(schedule_to_raw(&s.schedule));
            if !s.expected.is_empty() {
                raw.expect = Some(s.expected.clone());
            }
        }
    }
    if cfg.integrator != IntegratorConfig::default() {
        raw.integrator = Some(RawIntegrator {
            dt: Some(Quantity::Number(cfg.integrator.dt)),
            method: Some(cfg.integrator.method),
            state_policy: Some(cfg.integrator.state_policy),
        });
    }
    if cfg.output != OutputConfig::default() {
        raw.output = Some(RawOutput {
            dir: cfg.output.dir.clone(),
            emit: Some(cfg.output.emit.names()),
            decimate: Some(cfg.output.decimate as i64),
        });
    }
    if let Some(e) = &cfg.expect {
        raw.expect = Some(e.clone());
    }
    toml::to_string(&raw).map_err(|e| cfg_err("document", e.to_string()))
}

fn pulse_to_raw(p: &PulseSpec) -> RawPulse {
    match &p.kind {
        PulseKind::Gaussian => RawPulse {
            amplitude: Some(p.amplitude),
            center: Some(Quantity::Number(p.center)),
            width: Some(Quantity::Number(p.width)),
            window: Some(vec![Quantity::Number(p.window.0), Quantity::Number(p.window.1)]),
            ..RawPulse::default()
        },
        PulseKind::Sampled(w) => RawPulse {
            shape: Some(Shape::Sampled),
            start: Some(Quantity::Number(w.start())),
            dt: Some(Quantity::Number(w.dt())),
            values: Some(w.samples().to_vec()),
            ..RawPulse::default()
        },
    }
}

fn schedule_to_raw(s: &DelaySchedule) -> RawSchedule {
    let breakpoints = s
        .breakpoints()
        .iter()
        .map(|bp| {
            let mut b = RawBreakpoint { t: Some(Quantity::Number(bp.time)), ..RawBreakpoint::default() };
            let mut regions: Vec<RawRegion> = Vec::new();
            for (m, &d) in bp.delays.iter().enumerate() {
                match regions.last_mut() {
                    Some(r) if matches!(r.delay, Some(Quantity::Number(x)) if x == d) => r.stages[1] = m as i64,
                    _ => regions.push(RawRegion {
                        stages: [m as i64, m as i64],
                        delay: Some(Quantity::Number(d)),
                        ..RawRegion::default()
                    }),
                }
            }
            if regions.len() == 1 {
                b.delay = regions.pop().and_then(|r| r.delay);
            } else {
                b.regions = Some(regions);
            }
            b
        })
        .collect();
    RawSchedule { stages: Some(s.stages() as i64), breakpoints }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Verdict;

    fn location(r: Result<RunConfig>) -> String {
        match r {
            Err(Error::Config { location, .. }) => location,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn preset_with_defaults() {
        let cfg = parse_config("scenario = \"fig3\"\n").unwrap();
        assert_eq!(cfg, RunConfig::preset("fig3").unwrap());
        assert_eq!(cfg.integrator.dt, 1e-3);
        assert_eq!(cfg.scenario().unwrap(), scenarios::preset("fig3").unwrap());
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("4 s"), Some(4.0));
        assert_eq!(parse_duration("78ms"), Some(0.078));
        assert_eq!(parse_duration("250 us"), Some(250e-6));
        assert_eq!(parse_duration("2.5"), Some(2.5));
        assert_eq!(parse_duration("3 min"), None);
        assert_eq!(parse_duration("ms"), None);
    }

    #[test]
    fn zero_dt_names_the_field() {
        let loc = location(parse_config("scenario = \"fig3\"\n[integrator]\ndt = 0.0\n"));
        assert_eq!(loc, "integrator.dt");
        let loc = location(parse_config("scenario = \"fig3\"\n[integrator]\ndt = \"-1 ms\"\n"));
        assert_eq!(loc, "integrator.dt");
    }

    #[test]
    fn coarse_dt_is_rejected() {
        let loc = location(parse_config("scenario = \"fig3\"\n[integrator]\ndt = 0.01\n"));
        assert_eq!(loc, "integrator.dt");
    }

    #[test]
    fn unknown_keys_carry_a_line() {
        let loc = location(parse_config("scenario = \"fig3\"\n\n[output]\nemitt = []\n"));
        assert!(loc.starts_with("line 4"), "{loc}");
        let loc = location(parse_config("scenario = \"fig3\"\nbogus = 1\n"));
        assert!(loc.starts_with("line 2"), "{loc}");
    }

    #[test]
    fn exactly_one_source() {
        assert_eq!(location(parse_config("")), "scenario");
        let both = "scenario = \"fig3\"\nhorizon = 12.0\n";
        assert_eq!(location(parse_config(both)), "scenario");
        assert_eq!(location(parse_config("scenario = \"fig9\"\n")), "scenario");
    }

    #[test]
    fn missing_and_invalid_inline_keys() {
        let base = "horizon = 12.0\n[pulse]\ncenter = 2.5\nwidth = 1.0\nwindow = [0.0, 5.0]\n";
        assert_eq!(location(parse_config(base)), "schedule");
        let sched = "[schedule]\nstages = 4\n[[schedule.breakpoint]]\nt = 0.0\ndelay = 0.0\n";
        assert_eq!(location(parse_config(&format!("{base}{sched}"))), "schedule.breakpoint[0].delay");
        let sched = "[schedule]\nstages = 4\n[[schedule.breakpoint]]\nt = 0.0\ndelays = [0.1, 0.1, -0.1, 0.1]\n";
        assert_eq!(location(parse_config(&format!("{base}{sched}"))), "schedule.breakpoint[0].delays[2]");
        let sched = "[schedule]\nstages = 4\n[[schedule.breakpoint]]\nt = 0.0\nregions = [{ stages = [0, 1], delay = 0.1 }]\n";
        assert_eq!(location(parse_config(&format!("{base}{sched}"))), "schedule.breakpoint[0].regions");
        let sched = "[schedule]\nstages = 4\n[[schedule.breakpoint]]\nt = 0.0\n";
        assert_eq!(location(parse_config(&format!("{base}{sched}"))), "schedule.breakpoint[0]");
        let no_width = "horizon = 12.0\n[pulse]\ncenter = 2.5\nwindow = [0.0, 5.0]\n";
        assert_eq!(location(parse_config(no_width)), "pulse.width");
    }

    #[test]
    fn inline_freeze_matches_preset() {
        let slow = vec!["0.15"; 40].join(", ");
        let fast = vec!["0.078"; 40].join(", ");
        let text = format!(
            "name = \"fig6a\"\nhorizon = \"15 s\"\nslices = [3.9, 4.5, 5.0]\n\
             [pulse]\namplitude = 1.0\ncenter = 2.5\nwidth = 1.0\nwindow = [0.0, 5.0]\n\
             [schedule]\nstages = 40\n\
             [[schedule.breakpoint]]\nt = 0.0\ndelays = [{fast}]\n\
             [[schedule.breakpoint]]\nt = \"4 s\"\ndelays = [{slow}]\n\
             [[schedule.breakpoint]]\nt = 7.0\ndelays = [{slow}]\n"
        );
        let mut s = parse_config(&text).unwrap().scenario().unwrap();
        let preset = scenarios::preset("fig6a").unwrap();
        assert_eq!(s.schedule, preset.schedule);
        assert_eq!(s.pulse, preset.pulse);
        assert!(s.expected.is_empty());
        s.expected = preset.expected.clone();
        assert_eq!(s, preset);
    }

    #[test]
    fn regions_and_rc() {
        let text = "horizon = 12.0\n[pulse]\ncenter = 2.5\nwidth = 1.0\nwindow = [0.0, 5.0]\n\
                    [schedule]\nstages = 40\n[[schedule.breakpoint]]\nt = 0\n\
                    regions = [{ stages = [0, 24], delay = \"78 ms\" }, { stages = [25, 39], r = 909e3, c = 82e-9 }]\n";
        let s = parse_config(text).unwrap().scenario().unwrap();
        assert_eq!(s.schedule.delay(0, 0.0), 0.078);
        assert!((s.schedule.delay(30, 0.0) - 0.149076).abs() < 1e-12);
    }

    #[test]
    fn expectations_and_output() {
        let text = "scenario = \"fig5\"\n[output]\ndir = \"o\"\nemit = [\"spectra\"]\ndecimate = 5\n\
                    [[expect]]\nkind = \"min_distortion\"\nstage = 40\nmin = 0.5\n\
                    [[expect]]\nkind = \"spectrum_verdict\"\nstage = 30\ntime = 0.0\nverdict = \"violated\"\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.output.decimate, 5);
        assert_eq!(cfg.output.emit, Emit { spectra: true, ..Emit::none() });
        let s = cfg.scenario().unwrap();
        assert_eq!(s.expected.len(), 2);
        assert_eq!(s.expected[1], Expectation::SpectrumVerdict { stage: 30, time: 0.0, verdict: Verdict::Violated });
        let bad = "scenario = \"fig5\"\n[[expect]]\nkind = \"min_distortion\"\nstage = 40\nmin = 0.5\nextra = 1\n";
        assert!(location(parse_config(bad)).starts_with("line"));
        assert_eq!(location(parse_config("scenario = \"fig5\"\n[output]\nemit = [\"plots\"]\n")), "output.emit");
    }

    #[test]
    fn presets_round_trip_through_inline_form() {
        for name in scenarios::PRESETS {
            let s = scenarios::preset(name).unwrap();
            let cfg = RunConfig {
                source: ScenarioSource::Inline(s),
                integrator: IntegratorConfig::default(),
                output: OutputConfig { dir: Some("out".into()), emit: Emit::none(), decimate: 3 },
                expect: None,
            };
            let text = to_toml_string(&cfg).unwrap();
            assert_eq!(parse_config(&text).unwrap(), cfg, "{name}:\n{text}");
        }
    }
}
