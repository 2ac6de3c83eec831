//! CSV encoding of chain records and decoding of sampled input waveforms.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::SampledWaveform;
use crate::signal::ChainRecord;
use crate::spectrum::{bin_omega, fft};

/// Highest angular frequency written by [`write_spectra`] (rad/s).
pub const SPECTRUM_MAX_OMEGA: f64 = 20.0;

fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Time in the first column, then `v_0 .. v_N`. Every `decimate`-th row is
/// kept (1 keeps all).
pub fn write_waveforms<W: Write>(record: &ChainRecord, decimate: usize, out: W) -> Result<()> {
    let step = decimate.max(1);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_s".to_string()];
    header.extend((0..=record.stages()).map(|n| format!("v{n}_V")));
    w.write_record(&header).map_err(csv_err)?;
    let mut row = Vec::with_capacity(header.len());
    for k in (0..record.len()).step_by(step) {
        row.clear();
        row.push(sci(record.time(k)));
        row.extend(record.signals.iter().map(|s| sci(s.samples[k])));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Magnitude spectra `|V_n(w)|` (V s) of every stage on a zero-padded grid,
/// `0 <= w <= SPECTRUM_MAX_OMEGA`.
pub fn write_spectra<W: Write>(record: &ChainRecord, out: W) -> Result<()> {
    let len = (4 * record.len()).max(4096).next_power_of_two();
    let dt = record.dt;
    let bins = (0..=len / 2).take_while(|&k| bin_omega(k, len, dt) <= SPECTRUM_MAX_OMEGA).count();
    let spectra: Vec<Vec<f64>> = record
        .signals
        .iter()
        .map(|s| {
            let mut buf = vec![Complex64::new(0.0, 0.0); len];
            for (b, &v) in buf.iter_mut().zip(&s.samples) {
                b.re = v;
            }
            fft(&mut buf);
            buf[..bins].iter().map(|z| z.norm() * dt).collect()
        })
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["omega_rad_per_s".to_string()];
    header.extend((0..=record.stages()).map(|n| format!("abs_v{n}_V_s")));
    w.write_record(&header).map_err(csv_err)?;
    for k in 0..bins {
        let mut row = vec![sci(bin_omega(k, len, dt))];
        row.extend(spectra.iter().map(|s| sci(s[k])));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `record - reference` per stage, in the waveform layout.
pub fn write_deltas<W: Write>(record: &ChainRecord, reference: &ChainRecord, decimate: usize, out: W) -> Result<()> {
    if !record.same_grid(reference) {
        return Err(Error::GridMismatch("oracle record is on a different grid".into()));
    }
    let step = decimate.max(1);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_s".to_string()];
    header.extend((0..=record.stages()).map(|n| format!("dv{n}_V")));
    w.write_record(&header).map_err(csv_err)?;
    for k in (0..record.len()).step_by(step) {
        let mut row = vec![sci(record.time(k))];
        row.extend(
            record.signals.iter().zip(&reference.signals).map(|(a, b)| sci(a.samples[k] - b.samples[k])),
        );
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a two-column `t,v` waveform. An optional header row is skipped,
/// `#` starts a comment line, and the times must form a uniform ascending
/// grid.
pub fn parse_waveform_csv(text: &str) -> Result<SampledWaveform> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Waveform {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Waveform { line, message: format!("expected 2 columns, found {}", rec.len()) });
        }
        let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        let (t, v) = match parsed {
            (Ok(t), Ok(v)) => (t, v),
            _ if times.is_empty() && lines.is_empty() && rec[0].parse::<f64>().is_err() => {
                // header row
                lines.push(line);
                continue;
            }
            _ => return Err(Error::Waveform { line, message: format!("not a number pair: {:?}", rec.as_slice()) }),
        };
        if !t.is_finite() || !v.is_finite() {
            return Err(Error::Waveform { line, message: "non-finite value".into() });
        }
        times.push(t);
        values.push(v);
        lines.push(line);
    }
    if times.len() < 2 {
        return Err(Error::Waveform { line: lines.last().copied().unwrap_or(0), message: "need at least two samples".into() });
    }
    let offset = lines.len() - times.len();
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Waveform { line: lines[offset + 1], message: "times must be ascending".into() });
    }
    for (k, &t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * dt)).abs() > 1e-3 * dt {
            return Err(Error::Waveform { line: lines[offset + k], message: format!("time {t} is off the uniform grid (spacing {dt})") });
        }
    }
    SampledWaveform::new(times[0], dt, values).map_err(|e| Error::Waveform { line: lines[offset], message: e.to_string() })
}
