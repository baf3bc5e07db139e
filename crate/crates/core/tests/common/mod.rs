#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svc_post::AudioBuffer;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noise(seed: u64, len: usize, amp: f64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.gen_range(-amp..amp)).collect()
}

pub fn sine(freq: f64, amp: f64, rate: u32, len: usize) -> Vec<f64> {
    sine_phase(freq, amp, 0.0, rate, len)
}

pub fn sine_phase(freq: f64, amp: f64, phase: f64, rate: u32, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64 + phase).sin())
        .collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn mono(x: Vec<f64>, rate: u32) -> AudioBuffer {
    AudioBuffer::mono(x, rate).unwrap()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

/// Frequency of DFT bin `k` for an `n`-point analysis at `rate`.
pub fn bin_hz(k: usize, n: usize, rate: u32) -> f64 {
    k as f64 * rate as f64 / n as f64
}

/// Direct O(N^2) DFT magnitudes of the Hann-windowed input, bins 0..=N/2.
/// Kept independent of the crate's FFT path.
pub fn hann_dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let windowed: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| v * (0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()))
        .collect();
    let cos: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let sin: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * i as f64 / n as f64).sin())
        .collect();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &v) in windowed.iter().enumerate() {
                let idx = (k * i) % n;
                re += v * cos[idx];
                im -= v * sin[idx];
            }
            re.hypot(im)
        })
        .collect()
}

/// Amplitude of a bin-centered sinusoid from Hann-windowed DFT magnitudes.
pub fn tone_amplitude(mags: &[f64], k: usize) -> f64 {
    let n = (mags.len() - 1) * 2;
    // Hann coherent gain is 1/2.
    2.0 * mags[k] / (n as f64 / 2.0)
}

pub fn band_energy(mags: &[f64], rate: u32, lo_hz: f64, hi_hz: f64) -> f64 {
    let n = (mags.len() - 1) * 2;
    mags.iter()
        .enumerate()
        .filter(|(k, _)| {
            let f = bin_hz(*k, n, rate);
            f >= lo_hz && f < hi_hz
        })
        .map(|(_, m)| m * m)
        .sum()
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Base-two third-octave bands `(lo, hi)` whose edges lie within `[lo_hz, hi_hz]`.
pub fn third_octave_bands(lo_hz: f64, hi_hz: f64) -> Vec<(f64, f64)> {
    (-20..=20)
        .map(|n| 1000.0 * 2f64.powf(n as f64 / 3.0))
        .map(|fc| (fc * 2f64.powf(-1.0 / 6.0), fc * 2f64.powf(1.0 / 6.0)))
        .filter(|&(lo, hi)| lo >= lo_hz && hi <= hi_hz)
        .collect()
}

/// Interior segment that excludes `margin` samples at both ends.
pub fn interior(x: &[f64], margin: usize) -> &[f64] {
    &x[margin..x.len() - margin]
}
