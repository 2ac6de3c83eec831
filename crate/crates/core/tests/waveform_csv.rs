use proptest::prelude::*;
use slowlight::waveform::{parse_waveform_csv, write_waveforms};
use slowlight::*;

proptest! {
    #[test]
    fn two_column_round_trip(
        start in -10.0f64..10.0,
        dt in 1e-4f64..1.0,
        values in prop::collection::vec(-1e3f64..1e3, 2..300),
        header in any::<bool>(),
    ) {
        let mut text = String::new();
        if header {
            text.push_str("t_s,v_V\n");
        }
        for (k, v) in values.iter().enumerate() {
            text.push_str(&format!("{:.8e},{:.8e}\n", start + k as f64 * dt, v));
        }
        let w = parse_waveform_csv(&text).unwrap();
        prop_assert_eq!(w.samples().len(), values.len());
        prop_assert!((w.dt() - dt).abs() <= 1e-6 * dt + 1e-7 * start.abs() / values.len() as f64);
        for (a, b) in w.samples().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-8 * b.abs() + 1e-300);
        }
    }

    #[test]
    fn decoder_never_panics(text in "[ -~\n\r\t]{0,300}") {
        let _ = parse_waveform_csv(&text);
    }
}

#[test]
fn stage_column_feeds_back_as_input() {
    let pulse = PulseSpec::standard();
    let sched = DelaySchedule::uniform(4, 0.078).unwrap();
    let rec = simulate_chain(&pulse, &sched, &IntegratorConfig::default(), 6.0).unwrap();
    let mut buf = Vec::new();
    write_waveforms(&rec, 1, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    // keep the time column and v2
    let two: String = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            format!("{},{}\n", f[0], f[3])
        })
        .collect();
    let w = parse_waveform_csv(&two).unwrap();
    assert_eq!(w.samples().len(), rec.len());
    for (a, b) in w.samples().iter().zip(&rec.signal(2).samples) {
        assert!((a - b).abs() <= 5e-9 * b.abs().max(1e-12));
    }
}
