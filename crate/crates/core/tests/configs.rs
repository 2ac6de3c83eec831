use std::path::Path;

use proptest::prelude::*;
use slowlight::config::{parse_config, to_toml_string, Emit, OutputConfig, RunConfig, ScenarioSource};
use slowlight::scenarios::{preset, Scenario, PRESETS};
use slowlight::*;

#[test]
fn shipped_configs_match_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in PRESETS {
        let text = std::fs::read_to_string(dir.join(format!("{name}.toml"))).unwrap();
        let cfg = parse_config(&text).unwrap();
        assert!(matches!(cfg.source, ScenarioSource::Inline(_)), "{name}");
        assert_eq!(cfg.scenario().unwrap(), preset(name).unwrap(), "{name}");
        assert_eq!(cfg.integrator, IntegratorConfig::default());
    }
}

fn scenario() -> impl Strategy<Value = Scenario> {
    let delays = prop::sample::select(vec![0.078, 0.15, 1.6, 0.1, 0.25]);
    (
        1usize..45,
        prop::collection::vec((0.1f64..20.0, prop::collection::vec((1usize..10, delays.clone()), 1..4)), 0..3),
        prop::collection::vec((1usize..10, delays), 1..4),
        (0.1f64..3.0, 0.5f64..4.0, 0.3f64..2.0),
        prop::collection::vec(0.0f64..30.0, 0..3),
        "[a-z][a-z0-9_]{0,8}",
    )
        .prop_map(|(stages, later, first, (amp, center, width), slices, name)| {
            let expand = |runs: &[(usize, f64)]| {
                let mut d: Vec<f64> = runs.iter().flat_map(|&(n, t)| std::iter::repeat_n(t, n)).collect();
                let last = *d.last().unwrap();
                d.resize(stages, last);
                d
            };
            let mut bps = vec![Breakpoint { time: 0.0, delays: expand(&first) }];
            let mut later = later;
            later.sort_by(|a, b| a.0.total_cmp(&b.0));
            later.dedup_by(|a, b| a.0 == b.0);
            bps.extend(later.iter().map(|(t, runs)| Breakpoint { time: *t, delays: expand(runs) }));
            Scenario {
                name,
                pulse: PulseSpec::gaussian(amp, center, width, (0.0, center * 2.0)).unwrap(),
                schedule: DelaySchedule::new(stages, bps).unwrap(),
                horizon: 100.0,
                slices,
                expected: Vec::new(),
            }
        })
}

fn emit() -> impl Strategy<Value = Emit> {
    (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>())
        .prop_map(|(waveforms, metrics, spectra, oracle)| Emit { waveforms, metrics, spectra, oracle })
}

proptest! {
    #[test]
    fn inline_configs_round_trip(s in scenario(), emit in emit(), decimate in 1usize..50, dt in 1e-4f64..1e-3) {
        let cfg = RunConfig {
            source: ScenarioSource::Inline(s),
            integrator: IntegratorConfig::new(dt).unwrap(),
            output: OutputConfig { dir: Some("runs/a".into()), emit, decimate },
            expect: None,
        };
        let text = to_toml_string(&cfg).unwrap();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(to_toml_string(&back).unwrap(), text);
    }

    #[test]
    fn preset_configs_round_trip(i in 0usize..5, dt in prop::option::of(2e-4f64..1e-3)) {
        let mut cfg = RunConfig::preset(PRESETS[i]).unwrap();
        if let Some(dt) = dt {
            cfg.integrator.dt = dt;
        }
        cfg.expect = Some(preset("fig5").unwrap().expected);
        let back = parse_config(&to_toml_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse_config(&text);
    }
}

#[test]
fn handwritten_text_normalizes() {
    let text = "\
[output]
decimate = 4

[schedule]
stages = 3

[[schedule.breakpoint]]
t = \"0 ms\"
velocity = 12.5

[[schedule.breakpoint]]
t = \"2500 ms\"
regions = [{ stages = [0, 0], r = 476e3, c = 82e-9 }, { stages = [1, 2], delay = \"150 ms\" }]

[pulse]
center = \"2.5 s\"
width = 1
window = [0, 5]

horizon = 20
";
    // keys after a table header belong to it
    assert!(parse_config(text).is_err());
    let text = format!("horizon = 20\n{}", text.replace("horizon = 20\n", ""));
    let cfg = parse_config(&text).unwrap();
    let canonical = to_toml_string(&cfg).unwrap();
    assert_eq!(parse_config(&canonical).unwrap(), cfg);
    let s = cfg.scenario().unwrap();
    assert_eq!(s.schedule.delay(0, 0.0), 0.08);
    assert_eq!(s.schedule.delay(0, 3.0), delay_from_rc(476e3, 82e-9));
    assert_eq!(s.schedule.delay(2, 3.0), 0.15);
}
