//! Executes a [`RunConfig`] and writes the requested artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::metrics::{spectral_width, spectrum_condition, PulseMetrics, SpectrumCheck};
use crate::oracle::spectral_propagate_schedule;
use crate::scenarios::{run_scenario, Outcome, Scenario, ScenarioRun, CIRCUIT_DELAYS};
use crate::waveform::{write_deltas, write_spectra, write_waveforms};

pub const WAVEFORMS_FILE: &str = "waveforms.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const SPECTRA_FILE: &str = "spectra.csv";
pub const ORACLE_FILE: &str = "oracle_deltas.csv";

/// Agreement with the independent solutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    /// Largest `|v_n - ideal_n|` per stage against the characteristic solution (V).
    pub characteristic_max_abs_error_v: Vec<f64>,
    /// `max |v_N - spectral| / max |v_0|` at the last stage; only for
    /// a constant, uniform delay.
    pub spectral_max_rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub stages: usize,
    pub dt_s: f64,
    pub horizon_s: f64,
    pub samples: usize,
    pub metrics: PulseMetrics,
    /// Spectrum condition of this input at each circuit delay setting.
    pub circuit_spectrum_ratio: Vec<SpectrumCheck>,
    pub oracle: OracleSummary,
    pub expectations: Vec<Outcome>,
    pub passed: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub run: ScenarioRun,
    pub report: MetricsReport,
    pub files: Vec<PathBuf>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn failures(&self) -> impl Iterator<Item = &Outcome> {
        self.report.expectations.iter().filter(|o| !o.passed)
    }
}

/// Simulates `cfg` and writes the emitted artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutput> {
    let scenario = cfg.scenario()?;
    let run = run_scenario(&scenario, &cfg.integrator)?;
    let report = report(&scenario, &run, cfg.integrator.dt)?;

    let emit = cfg.output.emit;
    let mut files = Vec::new();
    if emit.waveforms || emit.metrics || emit.spectra || emit.oracle {
        fs::create_dir_all(out_dir)?;
    }
    let mut open = |name: &str| -> Result<BufWriter<File>> {
        let p = out_dir.join(name);
        let f = File::create(&p)?;
        files.push(p);
        Ok(BufWriter::new(f))
    };
    if emit.waveforms {
        write_waveforms(&run.record, cfg.output.decimate, open(WAVEFORMS_FILE)?)?;
    }
    if emit.spectra {
        write_spectra(&run.record, open(SPECTRA_FILE)?)?;
    }
    if emit.oracle {
        write_deltas(&run.record, &run.ideal, cfg.output.decimate, open(ORACLE_FILE)?)?;
    }
    if emit.metrics {
        let mut w = open(METRICS_FILE)?;
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(RunOutput { scenario, run, report, files })
}

fn report(s: &Scenario, run: &ScenarioRun, dt: f64) -> Result<MetricsReport> {
    let rec = &run.record;
    let circuit_spectrum_ratio = match spectral_width(rec.signal(0)) {
        Ok(w) => CIRCUIT_DELAYS
            .iter()
            .map(|&d| {
                let c = spectrum_condition(w, 1.0 / d);
                SpectrumCheck { delay_s: d, velocity_per_s: 1.0 / d, ratio: c.ratio, verdict: c.verdict }
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    let characteristic_max_abs_error_v = rec
        .signals
        .iter()
        .zip(&run.ideal.signals)
        .map(|(a, b)| a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .collect();
    let spectral_max_rel_error = match spectral_propagate_schedule(rec.signal(0), &rec.schedule) {
        Ok(spec) => {
            let last = rec.signal(rec.stages());
            let scale = rec.signal(0).peak_abs();
            let err = last.samples.iter().zip(&spec.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Some(err / scale)
        }
        Err(_) => None,
    };
    Ok(MetricsReport {
        scenario: s.name.clone(),
        stages: rec.stages(),
        dt_s: dt,
        horizon_s: s.horizon,
        samples: rec.len(),
        metrics: run.metrics.clone(),
        circuit_spectrum_ratio,
        oracle: OracleSummary { characteristic_max_abs_error_v, spectral_max_rel_error },
        passed: run.passed(),
        expectations: run.outcomes.clone(),
    })
}
