mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use svc_post::audio_io::{read_wav, write_wav};
use svc_post::post::{compute_diff, postprocess_pipeline, supplement_high, PostError};
use svc_post::{AudioBuffer, Encoding, PostProcessConfig, WavFormat};

const RATE: u32 = 48_000;

fn mean_abs_oracle(x: &[f64]) -> f64 {
    let mut total = 0.0;
    for v in x {
        total += if *v < 0.0 { -*v } else { *v };
    }
    total / x.len() as f64
}

fn voice_like(seed: u64, len: usize) -> Vec<f64> {
    // Harmonic stack plus broadband noise so both crossover bands carry energy.
    let mut x = vec![0.0; len];
    for (h, amp) in [(1.0, 0.3), (2.0, 0.15), (3.0, 0.1), (7.0, 0.05)] {
        x = add(&x, &sine(220.0 * h, amp, RATE, len));
    }
    add(&x, &noise(seed, len, 0.05))
}

#[test]
fn diff_matches_two_pass_oracle() {
    let mut r = rng(42);
    for i in 0..100 {
        let len = r.gen_range(1..2000);
        let s = noise(1000 + i, len, r.gen_range(0.01..1.0));
        let c = noise(5000 + i, len, r.gen_range(0.01..1.0));
        let expected = mean_abs_oracle(&s) / mean_abs_oracle(&c);
        let got = compute_diff(&mono(s, RATE), &mono(c, RATE))
            .unwrap()
            .value();
        assert!(
            (got - expected).abs() <= 1e-12 * expected.max(1.0),
            "{got} vs {expected}"
        );
    }
}

#[test]
fn identical_inputs_reproduce_source() {
    let s = mono(voice_like(1, 6000), RATE);
    let out = supplement_high(&s, &s, &PostProcessConfig::default()).unwrap();
    assert_eq!(out.len(), s.len());
    assert_eq!(out.sample_rate_hz(), RATE);
    assert!(rms_diff(interior(out.samples(), 255), interior(s.samples(), 255)) < 1e-6);
}

#[test]
fn half_gain_converted_reproduces_source() {
    let s = mono(voice_like(2, 6000), RATE);
    let out = supplement_high(&s, &s.scaled(0.5), &PostProcessConfig::default()).unwrap();
    assert!(rms_diff(out.samples(), s.samples()) < 1e-6);
}

#[test]
fn high_tone_comes_from_source_and_low_band_from_converted() {
    // 4800-point analysis at 48 kHz puts 1, 2 and 14 kHz on exact bins.
    let len = 8000;
    let source = add(
        &sine(1000.0, 0.5, RATE, len),
        &sine(14_000.0, 0.1, RATE, len),
    );
    let converted = add(
        &sine_phase(1000.0, 0.3, 0.7, RATE, len),
        &sine(2000.0, 0.12, RATE, len),
    );
    let s = mono(source, RATE);
    let c = mono(converted.clone(), RATE);
    let diff = compute_diff(&s, &c).unwrap().value();
    let out = supplement_high(&s, &c, &PostProcessConfig::default()).unwrap();

    let seg = |x: &[f64]| x[1500..1500 + 4800].to_vec();
    let mags = hann_dft_magnitudes(&seg(out.samples()));
    let db_err = |got: f64, want: f64| (20.0 * (got / want).log10()).abs();
    assert!(db_err(tone_amplitude(&mags, 1400), 0.1) < 0.5);
    assert!(db_err(tone_amplitude(&mags, 100), 0.3 * diff) < 0.5);
    assert!(db_err(tone_amplitude(&mags, 200), 0.12 * diff) < 0.5);
}

#[test]
fn converted_high_band_does_not_reach_output_high_band() {
    let len = 9600;
    let s = mono(voice_like(5, len), RATE);
    let base = add(&sine(440.0, 0.3, RATE, len), &sine(3300.0, 0.1, RATE, len));
    let intruder = sine(15_000.0, 0.2, RATE, len);
    let c1 = mono(base.clone(), RATE);
    let c2 = mono(add(&base, &intruder), RATE);
    let cfg = PostProcessConfig::default();
    let o1 = supplement_high(&s, &c1, &cfg).unwrap();
    let o2 = supplement_high(&s, &c2, &cfg).unwrap();

    let delta: Vec<f64> = o2
        .samples()
        .iter()
        .zip(o1.samples())
        .map(|(a, b)| a - b)
        .collect();
    let n = 4800;
    let d = hann_dft_magnitudes(&delta[2400..2400 + n]);
    let o = hann_dft_magnitudes(&o1.samples()[2400..2400 + n]);
    let i = hann_dft_magnitudes(&intruder[2400..2400 + n]);
    let delta_high = band_energy(&d, RATE, 12_000.0, 24_001.0);
    let out_high = band_energy(&o, RATE, 12_000.0, 24_001.0);
    let intruder_high = band_energy(&i, RATE, 12_000.0, 24_001.0);
    assert!(
        db(delta_high / out_high) <= -60.0,
        "{}",
        db(delta_high / out_high)
    );
    assert!(db(delta_high / intruder_high) <= -60.0);
}

#[test]
fn silent_converted_and_rate_errors() {
    let s = mono(voice_like(3, 1000), RATE);
    let silent = mono(vec![0.0; 1000], RATE);
    assert!(matches!(
        supplement_high(&s, &silent, &PostProcessConfig::default()),
        Err(PostError::SilentConverted)
    ));
    let slow = mono(vec![0.1; 1000], 24_000);
    assert!(supplement_high(&slow, &slow, &PostProcessConfig::default()).is_err());
}

#[test]
fn matched_pairs_are_fixed_points() {
    let cfg = PostProcessConfig::default();
    let s = mono(voice_like(9, 5000), RATE);
    let out = supplement_high(&s, &s.scaled(0.37), &cfg).unwrap();
    let again = supplement_high(&s, &out, &cfg).unwrap();
    assert!(rms_diff(again.samples(), out.samples()) < 1e-4);
}

#[test]
fn pipeline_identity_at_target_rate() {
    let dir = tempfile::tempdir().unwrap();
    let s = mono(voice_like(4, 4800), RATE);
    let fmt = WavFormat::for_buffer(Encoding::Float32, &s);
    let (src, conv, out) = (
        dir.path().join("s.wav"),
        dir.path().join("c.wav"),
        dir.path().join("o.wav"),
    );
    write_wav(&src, &s, fmt).unwrap();
    write_wav(&conv, &s, fmt).unwrap();
    let report = postprocess_pipeline(&src, &conv, &out, &PostProcessConfig::default()).unwrap();
    assert!((report.diff - 1.0).abs() < 1e-12);
    assert_eq!(report.upsample_factor, 1);
    let (o, _) = read_wav(&out).unwrap();
    let (s_read, _) = read_wav(&src).unwrap();
    assert!(rms_diff(o.samples(), s_read.samples()) < 1e-6);
}

#[test]
fn pipeline_upsamples_converted_to_source_rate() {
    let dir = tempfile::tempdir().unwrap();
    let s = mono(voice_like(6, 9600), RATE);
    let c = mono(sine(220.0, 0.4, 24_000, 4800), 24_000);
    let (src, conv, out) = (
        dir.path().join("s.wav"),
        dir.path().join("c.wav"),
        dir.path().join("o.wav"),
    );
    write_wav(&src, &s, WavFormat::for_buffer(Encoding::Pcm24, &s)).unwrap();
    write_wav(&conv, &c, WavFormat::for_buffer(Encoding::Pcm16, &c)).unwrap();
    let report = postprocess_pipeline(&src, &conv, &out, &PostProcessConfig::default()).unwrap();
    let (o, fmt) = read_wav(&out).unwrap();
    assert_eq!(fmt.encoding, Encoding::Pcm24);
    assert_eq!(o.sample_rate_hz(), RATE);
    assert_eq!(o.len(), s.len());
    assert_eq!(report.output_len, 9600);
    assert_eq!(report.converted_len, 4800);
    assert_eq!(report.upsample_factor, 2);
}

#[test]
fn pipeline_writes_nothing_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let s = mono(voice_like(6, 960), RATE);
    let c = mono(vec![0.0; 480], 24_000);
    let (src, conv, out) = (
        dir.path().join("s.wav"),
        dir.path().join("c.wav"),
        dir.path().join("o.wav"),
    );
    write_wav(&src, &s, WavFormat::for_buffer(Encoding::Float32, &s)).unwrap();
    write_wav(&conv, &c, WavFormat::for_buffer(Encoding::Float32, &c)).unwrap();
    let err = postprocess_pipeline(&src, &conv, &out, &PostProcessConfig::default()).unwrap_err();
    assert!(matches!(err, PostError::SilentConverted));
    assert!(!out.exists());
}

#[test]
fn stereo_inputs_are_mixed_down() {
    let left = voice_like(7, 1920);
    let right = voice_like(8, 1920);
    let s = AudioBuffer::new(vec![left, right], RATE).unwrap();
    let (out, report) =
        svc_post::post::postprocess_buffers(&s, &s, &PostProcessConfig::default()).unwrap();
    assert!(out.is_mono());
    assert!((report.diff - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn converted_gain_cancels(seed in any::<u64>(), k in 0.05f64..20.0) {
        let cfg = PostProcessConfig::default();
        let s = mono(voice_like(seed, 2400), RATE);
        let c = mono(add(&sine(300.0, 0.2, RATE, 2400), &noise(seed ^ 0xff, 2400, 0.1)), RATE);
        let a = supplement_high(&s, &c, &cfg).unwrap();
        let b = supplement_high(&s, &c.scaled(k), &cfg).unwrap();
        prop_assert!(rms_diff(a.samples(), b.samples()) < 1e-6);
    }

    #[test]
    fn source_gain_scales_output(seed in any::<u64>(), k in 0.05f64..20.0) {
        let cfg = PostProcessConfig::default();
        let s = mono(voice_like(seed, 2400), RATE);
        let c = mono(noise(seed ^ 0xabc, 2400, 0.3), RATE);
        let a = supplement_high(&s, &c, &cfg).unwrap().scaled(k);
        let b = supplement_high(&s.scaled(k), &c, &cfg).unwrap();
        prop_assert!(rms_diff(a.samples(), b.samples()) < 1e-6);
    }

    #[test]
    fn diff_scales_inversely_with_converted_gain(seed in any::<u64>(), k in 0.01f64..100.0) {
        let s = mono(noise(seed, 300, 1.0), RATE);
        let c = mono(noise(seed.wrapping_mul(3), 300, 1.0), RATE);
        let d1 = compute_diff(&s, &c).unwrap().value();
        let d2 = compute_diff(&s, &c.scaled(k)).unwrap().value();
        prop_assert!((d2 - d1 / k).abs() <= 1e-12 * (d1 / k).max(1.0));
    }
}
