use std::f64::consts::PI;
use std::fmt::Write as _;

use ndarray::{Array2, Axis};
use rustfft::{num_complex::Complex, FftPlanner};

use super::AnalysisError;
use crate::audio_io::AudioBuffer;

/// STFT and mel filterbank parameters. `fmax_hz: None` means Nyquist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrogramConfig {
    pub n_fft: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub fmin_hz: f64,
    pub fmax_hz: Option<f64>,
    pub log_floor: f64,
}

impl Default for SpectrogramConfig {
    fn default() -> Self {
        Self {
            n_fft: 1024,
            hop: 256,
            n_mels: 80,
            fmin_hz: 0.0,
            fmax_hz: None,
            log_floor: 1e-5,
        }
    }
}

impl SpectrogramConfig {
    pub fn fmax_for(&self, sample_rate_hz: u32) -> f64 {
        self.fmax_hz.unwrap_or(sample_rate_hz as f64 / 2.0)
    }

    /// Checks the config against a sample rate and pins `fmax_hz`.
    pub fn resolve(&self, sample_rate_hz: u32) -> Result<Self, AnalysisError> {
        let bad = |m: String| Err(AnalysisError::Config(m));
        if self.n_fft < 2 || !self.n_fft.is_power_of_two() {
            return bad(format!("n_fft {} must be a power of two", self.n_fft));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return bad(format!("hop {} must be in 1..={}", self.hop, self.n_fft));
        }
        if self.n_mels == 0 {
            return bad("n_mels must be positive".into());
        }
        let nyquist = sample_rate_hz as f64 / 2.0;
        let fmax = self.fmax_for(sample_rate_hz);
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax && fmax <= nyquist) {
            return bad(format!(
                "need 0 <= fmin ({}) < fmax ({fmax}) <= {nyquist}",
                self.fmin_hz
            ));
        }
        if self.log_floor.is_nan() || self.log_floor <= 0.0 {
            return bad(format!("log_floor {} must be positive", self.log_floor));
        }
        Ok(Self {
            fmax_hz: Some(fmax),
            ..*self
        })
    }

    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.n_fft {
            0
        } else {
            1 + (len - self.n_fft) / self.hop
        }
    }
}

/// Periodic Hann window.
pub(crate) fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Non-centered Hann-windowed STFT; returns frames x (n_fft/2 + 1) magnitudes.
pub fn stft_magnitude(
    x: &AudioBuffer,
    config: &SpectrogramConfig,
) -> Result<Array2<f64>, AnalysisError> {
    if !x.is_mono() {
        return Err(AnalysisError::NotMono(x.channel_count()));
    }
    let config = config.resolve(x.sample_rate_hz())?;
    let n_fft = config.n_fft;
    if x.len() < n_fft {
        return Err(AnalysisError::TooShort {
            len: x.len(),
            n_fft,
        });
    }
    let frames = config.frame_count(x.len());
    let bins = n_fft / 2 + 1;
    let window = hann(n_fft);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::default(); n_fft];
    let mut out = Array2::zeros((frames, bins));
    let samples = x.samples();

    for (frame, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let start = frame * config.hop;
        for (slot, (s, w)) in buf
            .iter_mut()
            .zip(samples[start..start + n_fft].iter().zip(&window))
        {
            *slot = Complex::new(s * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (dst, c) in row.iter_mut().zip(&buf[..bins]) {
            *dst = c.norm();
        }
    }
    Ok(out)
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular HTK-scale filterbank, n_mels x (n_fft/2 + 1), unnormalized
/// (peak weight 1 at each band center).
pub fn mel_filterbank(
    config: &SpectrogramConfig,
    sample_rate_hz: u32,
) -> Result<Array2<f64>, AnalysisError> {
    let config = config.resolve(sample_rate_hz)?;
    let bins = config.n_fft / 2 + 1;
    let lo = hz_to_mel(config.fmin_hz);
    let hi = hz_to_mel(config.fmax_for(sample_rate_hz));
    let edges: Vec<f64> = (0..config.n_mels + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (config.n_mels + 1) as f64))
        .collect();
    let bin_hz = sample_rate_hz as f64 / config.n_fft as f64;

    let mut fb = Array2::zeros((config.n_mels, bins));
    for (m, mut row) in fb.axis_iter_mut(Axis(0)).enumerate() {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            let up = (f - left) / (center - left);
            let down = (right - f) / (right - center);
            *w = up.min(down).max(0.0);
        }
    }
    Ok(fb)
}

/// Band center frequencies of [`mel_filterbank`].
pub fn mel_centers(config: &SpectrogramConfig, sample_rate_hz: u32) -> Vec<f64> {
    let lo = hz_to_mel(config.fmin_hz);
    let hi = hz_to_mel(config.fmax_for(sample_rate_hz));
    (1..=config.n_mels)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (config.n_mels + 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    /// frames x n_mels natural-log magnitudes.
    pub values: Array2<f64>,
    pub config: SpectrogramConfig,
    pub source_rate_hz: u32,
}

impl MelSpectrogram {
    pub fn frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn bands(&self) -> usize {
        self.values.ncols()
    }

    /// Plain-text export: one header line with the config, then one
    /// comma-separated row per frame.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "# mel n_fft={} hop={} n_mels={} fmin_hz={} fmax_hz={} log_floor={:e} window=hann sample_rate_hz={} frames={}\n",
            c.n_fft,
            c.hop,
            c.n_mels,
            c.fmin_hz,
            c.fmax_for(self.source_rate_hz),
            c.log_floor,
            self.source_rate_hz,
            self.frames()
        );
        for row in self.values.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AnalysisError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(AnalysisError::Parse {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header = header.strip_prefix("# mel").ok_or(AnalysisError::Parse {
            line: 1,
            reason: "missing '# mel' header".into(),
        })?;
        let mut config = SpectrogramConfig::default();
        let mut rate = None;
        let mut frames = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or(AnalysisError::Parse {
                line: 1,
                reason: format!("bad header field '{field}'"),
            })?;
            let num = |v: &str| -> Result<f64, AnalysisError> {
                v.parse().map_err(|_| AnalysisError::Parse {
                    line: 1,
                    reason: format!("bad value for {key}: '{v}'"),
                })
            };
            match key {
                "n_fft" => config.n_fft = num(value)? as usize,
                "hop" => config.hop = num(value)? as usize,
                "n_mels" => config.n_mels = num(value)? as usize,
                "fmin_hz" => config.fmin_hz = num(value)?,
                "fmax_hz" => config.fmax_hz = Some(num(value)?),
                "log_floor" => config.log_floor = num(value)?,
                "sample_rate_hz" => rate = Some(num(value)? as u32),
                "frames" => frames = Some(num(value)? as usize),
                "window" if value == "hann" => {}
                _ => {
                    return Err(AnalysisError::Parse {
                        line: 1,
                        reason: format!("unknown header field '{field}'"),
                    })
                }
            }
        }
        let rate = rate.ok_or(AnalysisError::Parse {
            line: 1,
            reason: "missing sample_rate_hz".into(),
        })?;
        let config = config.resolve(rate)?;

        let mut data = Vec::new();
        let mut n_rows = 0;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| AnalysisError::Parse {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            if row.len() != config.n_mels {
                return Err(AnalysisError::Parse {
                    line: i + 1,
                    reason: format!("{} values, expected {}", row.len(), config.n_mels),
                });
            }
            data.extend(row);
            n_rows += 1;
        }
        if let Some(f) = frames {
            if f != n_rows {
                return Err(AnalysisError::Parse {
                    line: 1,
                    reason: format!("header declares {f} frames, found {n_rows}"),
                });
            }
        }
        let values =
            Array2::from_shape_vec((n_rows, config.n_mels), data).expect("row lengths checked");
        Ok(Self {
            values,
            config,
            source_rate_hz: rate,
        })
    }
}

pub fn mel_spectrogram(
    x: &AudioBuffer,
    config: &SpectrogramConfig,
) -> Result<MelSpectrogram, AnalysisError> {
    let resolved = config.resolve(x.sample_rate_hz())?;
    let mags = stft_magnitude(x, &resolved)?;
    let fb = mel_filterbank(&resolved, x.sample_rate_hz())?;
    let floor = resolved.log_floor;
    let values = mags.dot(&fb.t()).mapv(|v| v.max(floor).ln());
    Ok(MelSpectrogram {
        values,
        config: resolved,
        source_rate_hz: x.sample_rate_hz(),
    })
}

/// Mean absolute difference over all cells.
pub fn mel_l1(a: &MelSpectrogram, b: &MelSpectrogram) -> Result<f64, AnalysisError> {
    if a.config != b.config || a.source_rate_hz != b.source_rate_hz {
        return Err(AnalysisError::ConfigMismatch);
    }
    if a.values.dim() != b.values.dim() {
        return Err(AnalysisError::ShapeMismatch {
            a_frames: a.frames(),
            a_bands: a.bands(),
            b_frames: b.frames(),
            b_bands: b.bands(),
        });
    }
    if a.values.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(total / a.values.len() as f64)
}
