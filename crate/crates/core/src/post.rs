//! High-frequency supplementation.
//!
//! The converted voice supplies the band below the crossover, gain-matched to
//! the source by the ratio of full-band mean absolute amplitudes; the source
//! supplies everything above the crossover:
//!
//! ```text
//! diff = mean(|source|) / mean(|converted|)
//! out  = highpass(source) + lowpass(converted) * diff
//! ```

use std::fmt;
use std::path::Path;

use log::warn;
use thiserror::Error;

use crate::audio_io::{self, AudioBuffer, AudioError, WavFormat};
use crate::dsp::{self, DspError, DEFAULT_NUM_TAPS};

#[derive(Debug, Error)]
pub enum PostError {
    #[error(
        "converted audio is silent: mean(|converted|) is zero, so the gain ratio \
         mean(|source|)/mean(|converted|) is undefined"
    )]
    SilentConverted,
    #[error("source audio is silent: gain ratio would be zero")]
    SilentSource,
    #[error("length mismatch: source {source_len} samples, converted {converted_len} samples (tolerance {tolerance})")]
    LengthMismatch {
        source_len: usize,
        converted_len: usize,
        tolerance: usize,
    },
    #[error("sample rate mismatch: source {source_hz} Hz, converted {converted_hz} Hz")]
    RateMismatch { source_hz: u32, converted_hz: u32 },
    #[error("source rate {source_hz} Hz differs from target rate {target_hz} Hz; the source is never resampled")]
    SourceRate { source_hz: u32, target_hz: u32 },
    #[error(
        "target rate {target_hz} Hz is not an integer multiple of converted rate {converted_hz} Hz"
    )]
    NonIntegerRatio { converted_hz: u32, target_hz: u32 },
    #[error("expected mono input, got {0} channels")]
    NotMono(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Audio(#[from] AudioError),
}

impl PostError {
    pub fn is_io(&self) -> bool {
        match self {
            PostError::Audio(e) => e.is_io(),
            PostError::Dsp(DspError::Audio(e)) => e.is_io(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostProcessConfig {
    pub crossover_hz: f64,
    pub target_rate_hz: u32,
    pub num_taps: usize,
    pub length_tolerance_samples: usize,
}

impl Default for PostProcessConfig {
    fn default() -> Self {
        Self {
            crossover_hz: 10_000.0,
            target_rate_hz: 48_000,
            num_taps: DEFAULT_NUM_TAPS,
            length_tolerance_samples: 0,
        }
    }
}

impl PostProcessConfig {
    pub fn validate(&self) -> Result<(), PostError> {
        let nyquist = self.target_rate_hz as f64 / 2.0;
        if !(self.crossover_hz > 0.0 && self.crossover_hz < nyquist) {
            return Err(PostError::Config(format!(
                "crossover {} Hz must lie in (0, {nyquist}) Hz",
                self.crossover_hz
            )));
        }
        if self.num_taps < 11 || self.num_taps.is_multiple_of(2) {
            return Err(PostError::Config(format!(
                "tap count {} must be odd and at least 11",
                self.num_taps
            )));
        }
        Ok(())
    }
}

/// Gain ratio between source and converted mean absolute amplitude.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DiffRatio(f64);

impl DiffRatio {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn mean_abs(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
}

fn check_pair(source: &AudioBuffer, converted: &AudioBuffer) -> Result<(), PostError> {
    for b in [source, converted] {
        if !b.is_mono() {
            return Err(PostError::NotMono(b.channel_count()));
        }
    }
    if source.sample_rate_hz() != converted.sample_rate_hz() {
        return Err(PostError::RateMismatch {
            source_hz: source.sample_rate_hz(),
            converted_hz: converted.sample_rate_hz(),
        });
    }
    if source.len() != converted.len() {
        return Err(PostError::LengthMismatch {
            source_len: source.len(),
            converted_len: converted.len(),
            tolerance: 0,
        });
    }
    Ok(())
}

pub fn compute_diff(source: &AudioBuffer, converted: &AudioBuffer) -> Result<DiffRatio, PostError> {
    check_pair(source, converted)?;
    let denom = mean_abs(converted.samples());
    if denom == 0.0 {
        return Err(PostError::SilentConverted);
    }
    let numer = mean_abs(source.samples());
    if numer == 0.0 {
        return Err(PostError::SilentSource);
    }
    let ratio = numer / denom;
    if !ratio.is_finite() {
        return Err(PostError::SilentConverted);
    }
    Ok(DiffRatio(ratio))
}

/// Crossover pair shared by [`supplement_high`] and the pipeline.
#[derive(Debug, Clone)]
pub struct Crossover {
    pub lowpass: dsp::FilterKernel,
    pub highpass: dsp::FilterKernel,
}

impl Crossover {
    pub fn design(config: &PostProcessConfig) -> Result<Self, PostError> {
        config.validate()?;
        let lowpass =
            dsp::design_lowpass(config.crossover_hz, config.target_rate_hz, config.num_taps)?;
        let highpass = dsp::complement(&lowpass)?;
        Ok(Self { lowpass, highpass })
    }
}

pub fn supplement_high(
    source: &AudioBuffer,
    converted: &AudioBuffer,
    config: &PostProcessConfig,
) -> Result<AudioBuffer, PostError> {
    let crossover = Crossover::design(config)?;
    supplement_high_with(source, converted, &crossover).map(|(out, _)| out)
}

/// Same as [`supplement_high`] with a pre-designed crossover; also returns
/// the gain ratio that was applied.
pub fn supplement_high_with(
    source: &AudioBuffer,
    converted: &AudioBuffer,
    crossover: &Crossover,
) -> Result<(AudioBuffer, DiffRatio), PostError> {
    let rate = crossover.lowpass.design_rate_hz();
    if source.sample_rate_hz() != rate {
        return Err(PostError::SourceRate {
            source_hz: source.sample_rate_hz(),
            target_hz: rate,
        });
    }
    let diff = compute_diff(source, converted)?;
    let high = dsp::apply_filter(&crossover.highpass, source)?;
    let low = dsp::apply_filter(&crossover.lowpass, converted)?;
    let out = high
        .samples()
        .iter()
        .zip(low.samples())
        .map(|(h, l)| h + l * diff.value())
        .collect();
    Ok((AudioBuffer::mono(out, rate)?, diff))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostProcessReport {
    pub diff: f64,
    pub peak: f64,
    pub trimmed_samples: usize,
    pub crossover_hz: f64,
    pub source_len: usize,
    pub converted_len: usize,
    pub output_len: usize,
    pub upsample_factor: usize,
}

impl fmt::Display for PostProcessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diff={:.6} peak={:.6} trimmed_samples={} crossover_hz={} source_len={} converted_len={} output_len={} upsample_factor={}",
            self.diff,
            self.peak,
            self.trimmed_samples,
            self.crossover_hz,
            self.source_len,
            self.converted_len,
            self.output_len,
            self.upsample_factor
        )
    }
}

/// Buffer-level pipeline: mono mixdown, integer upsampling of the converted
/// signal to the target rate, tail alignment, then supplementation.
pub fn postprocess_buffers(
    source: &AudioBuffer,
    converted: &AudioBuffer,
    config: &PostProcessConfig,
) -> Result<(AudioBuffer, PostProcessReport), PostError> {
    config.validate()?;
    let source = audio_io::to_mono(source);
    let converted = audio_io::to_mono(converted);

    if source.sample_rate_hz() != config.target_rate_hz {
        return Err(PostError::SourceRate {
            source_hz: source.sample_rate_hz(),
            target_hz: config.target_rate_hz,
        });
    }
    let converted_hz = converted.sample_rate_hz();
    if !config.target_rate_hz.is_multiple_of(converted_hz) {
        return Err(PostError::NonIntegerRatio {
            converted_hz,
            target_hz: config.target_rate_hz,
        });
    }
    let factor = (config.target_rate_hz / converted_hz) as usize;
    let converted_len = converted.len();
    let converted = dsp::upsample(&converted, factor)?;

    let (s_len, c_len) = (source.len(), converted.len());
    let gap = s_len.abs_diff(c_len);
    if gap > config.length_tolerance_samples {
        return Err(PostError::LengthMismatch {
            source_len: s_len,
            converted_len: c_len,
            tolerance: config.length_tolerance_samples,
        });
    }
    let (source, converted) = if gap > 0 {
        warn!("trimming {gap} tail samples to align source ({s_len}) and converted ({c_len})");
        let len = s_len.min(c_len);
        (source.truncated(len), converted.truncated(len))
    } else {
        (source, converted)
    };

    let crossover = Crossover::design(config)?;
    let (out, diff) = supplement_high_with(&source, &converted, &crossover)?;
    let report = PostProcessReport {
        diff: diff.value(),
        peak: out.peak(),
        trimmed_samples: gap,
        crossover_hz: config.crossover_hz,
        source_len: s_len,
        converted_len,
        output_len: out.len(),
        upsample_factor: factor,
    };
    Ok((out, report))
}

/// File-level pipeline. The output keeps the source file's sample encoding;
/// nothing is written unless processing succeeds.
pub fn postprocess_pipeline(
    source_path: impl AsRef<Path>,
    converted_path: impl AsRef<Path>,
    output_path: impl AsRef<Path>,
    config: &PostProcessConfig,
) -> Result<PostProcessReport, PostError> {
    let (source, source_format) = audio_io::read_wav(source_path)?;
    let (converted, _) = audio_io::read_wav(converted_path)?;
    let (out, report) = postprocess_buffers(&source, &converted, config)?;
    audio_io::write_wav(
        output_path,
        &out,
        WavFormat::for_buffer(source_format.encoding, &out),
    )?;
    Ok(report)
}
