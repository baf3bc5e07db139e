//! Linear-phase FIR crossover and integer-factor resampling.
//!
//! Lowpass kernels are Blackman-windowed sinc designs normalized to unit DC
//! gain. The highpass is the spectral inversion of a lowpass (unit impulse at
//! the center tap minus the lowpass), so the pair sums to a pure delay and,
//! after the delay-compensated trim in [`apply_filter`], to the identity.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::audio_io::{AudioBuffer, AudioError};

/// Default kernel length at 48 kHz.
pub const DEFAULT_NUM_TAPS: usize = 511;

/// Anti-imaging taps per unit of upsampling factor.
const UPSAMPLE_TAPS_PER_FACTOR: usize = 256;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("cutoff {cutoff_hz} Hz must lie strictly between 0 and Nyquist ({nyquist_hz} Hz)")]
    CutoffOutOfRange { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("tap count {0} must be odd and at least 11")]
    BadTapCount(usize),
    #[error("expected a lowpass kernel")]
    NotLowpass,
    #[error("kernel designed for {kernel_hz} Hz, buffer is {buffer_hz} Hz")]
    RateMismatch { kernel_hz: u32, buffer_hz: u32 },
    #[error("filtering requires a mono buffer, got {0} channels")]
    NotMono(usize),
    #[error("resampling factor must be at least 1")]
    ZeroFactor,
    #[error(transparent)]
    Audio(#[from] AudioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

/// Symmetric odd-length FIR kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel {
    taps: Vec<f64>,
    kind: FilterKind,
    cutoff_hz: f64,
    design_rate_hz: u32,
}

impl FilterKernel {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn design_rate_hz(&self) -> u32 {
        self.design_rate_hz
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn group_delay_samples(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// Magnitude of the kernel's frequency response at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / self.design_rate_hz as f64;
        let (re, im) = self
            .taps
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (n, &h)| {
                let phase = w * n as f64;
                (re + h * phase.cos(), im - h * phase.sin())
            });
        re.hypot(im)
    }

    pub fn magnitude_db_at(&self, freq_hz: f64) -> f64 {
        20.0 * self.magnitude_at(freq_hz).max(1e-300).log10()
    }

    /// One coefficient per line, shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.taps.len() * 24);
        for t in &self.taps {
            let _ = writeln!(out, "{t:e}");
        }
        out
    }
}

fn blackman(n: usize, len: usize) -> f64 {
    let x = 2.0 * PI * n as f64 / (len - 1) as f64;
    0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Blackman-windowed sinc lowpass with unit DC gain.
pub fn design_lowpass(
    cutoff_hz: f64,
    sample_rate_hz: u32,
    num_taps: usize,
) -> Result<FilterKernel, DspError> {
    let nyquist_hz = sample_rate_hz as f64 / 2.0;
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist_hz) {
        return Err(DspError::CutoffOutOfRange {
            cutoff_hz,
            nyquist_hz,
        });
    }
    if num_taps < 11 || num_taps.is_multiple_of(2) {
        return Err(DspError::BadTapCount(num_taps));
    }

    let fc = cutoff_hz / sample_rate_hz as f64;
    let center = (num_taps / 2) as isize;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|n| {
            let k = (n as isize - center) as f64;
            2.0 * fc * sinc(2.0 * fc * k) * blackman(n, num_taps)
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    // Exact symmetry regardless of rounding in the window/sinc products.
    for i in 0..num_taps / 2 {
        let avg = 0.5 * (taps[i] + taps[num_taps - 1 - i]);
        taps[i] = avg;
        taps[num_taps - 1 - i] = avg;
    }

    Ok(FilterKernel {
        taps,
        kind: FilterKind::Lowpass,
        cutoff_hz,
        design_rate_hz: sample_rate_hz,
    })
}

/// Spectral-inversion highpass partner of a lowpass kernel.
pub fn complement(lowpass: &FilterKernel) -> Result<FilterKernel, DspError> {
    if lowpass.kind != FilterKind::Lowpass {
        return Err(DspError::NotLowpass);
    }
    let center = lowpass.group_delay_samples();
    let taps = lowpass
        .taps
        .iter()
        .enumerate()
        .map(|(i, &h)| if i == center { 1.0 - h } else { -h })
        .collect();
    Ok(FilterKernel {
        taps,
        kind: FilterKind::Highpass,
        cutoff_hz: lowpass.cutoff_hz,
        design_rate_hz: lowpass.design_rate_hz,
    })
}

/// Zero-padded direct convolution, trimmed by the group delay so that the
/// output has the input's length and timing.
pub fn convolve_aligned(taps: &[f64], x: &[f64]) -> Vec<f64> {
    let delay = (taps.len() - 1) / 2;
    let n = x.len() as isize;
    (0..x.len())
        .map(|i| {
            // y[i] = sum_k h[k] * x[i + delay - k]
            let base = (i + delay) as isize;
            let k_lo = (base - (n - 1)).max(0) as usize;
            let k_hi = (base as usize).min(taps.len() - 1);
            if k_lo > k_hi {
                return 0.0;
            }
            taps[k_lo..=k_hi]
                .iter()
                .enumerate()
                .map(|(j, &h)| h * x[(base as usize) - (k_lo + j)])
                .sum()
        })
        .collect()
}

pub fn apply_filter(kernel: &FilterKernel, x: &AudioBuffer) -> Result<AudioBuffer, DspError> {
    if !x.is_mono() {
        return Err(DspError::NotMono(x.channel_count()));
    }
    if kernel.design_rate_hz != x.sample_rate_hz() {
        return Err(DspError::RateMismatch {
            kernel_hz: kernel.design_rate_hz,
            buffer_hz: x.sample_rate_hz(),
        });
    }
    let y = convolve_aligned(&kernel.taps, x.samples());
    Ok(AudioBuffer::mono(y, x.sample_rate_hz())?)
}

/// Anti-imaging kernel used by [`upsample`] for a given factor.
pub fn interpolation_kernel(input_rate_hz: u32, factor: usize) -> Result<FilterKernel, DspError> {
    design_lowpass(
        input_rate_hz as f64 / 2.0,
        input_rate_hz * factor as u32,
        UPSAMPLE_TAPS_PER_FACTOR * factor + 1,
    )
}

/// Zero-stuffs by `factor` and removes the images with a lowpass at the
/// original Nyquist, scaled by `factor` to restore passband gain.
pub fn upsample(x: &AudioBuffer, factor: usize) -> Result<AudioBuffer, DspError> {
    if factor == 0 {
        return Err(DspError::ZeroFactor);
    }
    if !x.is_mono() {
        return Err(DspError::NotMono(x.channel_count()));
    }
    if factor == 1 {
        return Ok(x.clone());
    }
    let kernel = interpolation_kernel(x.sample_rate_hz(), factor)?;
    let scaled: Vec<f64> = kernel.taps.iter().map(|h| h * factor as f64).collect();
    let mut stuffed = vec![0.0; x.len() * factor];
    for (i, &v) in x.samples().iter().enumerate() {
        stuffed[i * factor] = v;
    }
    let y = convolve_aligned(&scaled, &stuffed);
    Ok(AudioBuffer::mono(y, x.sample_rate_hz() * factor as u32)?)
}
