use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use slowlight::config::{self, Emit, RunConfig, ScenarioSource};
use slowlight::run::run;
use slowlight::scenarios::PRESETS;
use slowlight::waveform::parse_waveform_csv;
use slowlight::PulseSpec;

/// Exit status when every step succeeded but a checked expectation failed.
const EXIT_CHECK_FAILED: u8 = 3;

/// Simulate a pulse through a chain of first-order all-pass delay stages.
#[derive(Debug, Parser)]
#[command(name = "slowlight", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,

    /// Built-in preset: fig3, fig4, fig5, fig6a or fig6b.
    #[arg(long)]
    scenario: Option<String>,

    /// Output directory (overrides the config).
    #[arg(long, env = "SLOWLIGHT_OUT_DIR")]
    out: Option<PathBuf>,

    /// Integration step in seconds.
    #[arg(long)]
    dt: Option<f64>,

    /// Comma-separated artifacts: waveforms, metrics, spectra, oracle.
    #[arg(long, value_delimiter = ',')]
    emit: Option<Vec<String>>,

    /// Keep every n-th waveform row.
    #[arg(long)]
    decimate: Option<usize>,

    /// Two-column `t,v` CSV replacing the scenario's input pulse.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Exit non-zero if any expectation fails.
    #[arg(long)]
    check: bool,

    /// Print the configuration that would run, as TOML, and exit.
    #[arg(long)]
    print_config: bool,

    /// List the presets and exit.
    #[arg(long)]
    list: bool,
}

fn build_config(args: &Args) -> anyhow::Result<RunConfig> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            config::parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => bail!("give --config <path> or --scenario <name>"),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    if let Some(dt) = args.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            bail!("--dt must be positive and finite, got {dt}");
        }
        cfg.integrator.dt = dt;
    }
    if let Some(names) = &args.emit {
        cfg.output.emit = Emit::from_names(names).map_err(anyhow::Error::msg)?;
    }
    if let Some(d) = args.decimate {
        if d == 0 {
            bail!("--decimate must be at least 1");
        }
        cfg.output.decimate = d;
    }
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let wave = parse_waveform_csv(&text).with_context(|| format!("in {}", path.display()))?;
        let mut s = cfg.scenario()?;
        s.pulse = PulseSpec::sampled(wave)?;
        s.name = format!("{}+input", s.name);
        cfg.source = ScenarioSource::Inline(s);
        cfg.expect = None;
    }
    Ok(cfg)
}

fn main() -> anyhow::Result<ExitCode> {
    let args = Args::parse();
    if args.list {
        for name in PRESETS {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let cfg = build_config(&args)?;
    if args.print_config {
        print!("{}", config::to_toml_string(&cfg)?);
        return Ok(ExitCode::SUCCESS);
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let out = run(&cfg, &out_dir).context("run failed")?;
    for o in &out.report.expectations {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", o.expectation.kind(), o.detail);
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    if args.check && !out.passed() {
        let n = out.failures().count();
        eprintln!("{n} expectation(s) failed for {}", out.scenario.name);
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}
