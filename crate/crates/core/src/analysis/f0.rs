use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, AnalysisError};
use crate::audio_io::AudioBuffer;

/// Per-frame fundamental frequency. Unvoiced frames carry `0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    f0_hz: Vec<f64>,
    voiced: Vec<bool>,
    hop_seconds: f64,
    start_seconds: f64,
}

impl F0Contour {
    pub fn new(
        f0_hz: Vec<f64>,
        voiced: Vec<bool>,
        hop_seconds: f64,
        start_seconds: f64,
    ) -> Result<Self, AnalysisError> {
        if f0_hz.len() != voiced.len() {
            return Err(AnalysisError::Contour(format!(
                "{} f0 values but {} voicing flags",
                f0_hz.len(),
                voiced.len()
            )));
        }
        if !(hop_seconds >= 0.0 && hop_seconds.is_finite()) || !start_seconds.is_finite() {
            return Err(AnalysisError::Contour(
                "hop must be finite and non-negative".into(),
            ));
        }
        for (i, (&f, &v)) in f0_hz.iter().zip(&voiced).enumerate() {
            let ok = if v {
                f > 0.0 && f.is_finite()
            } else {
                f == 0.0
            };
            if !ok {
                return Err(AnalysisError::Contour(format!(
                    "frame {i}: f0 {f} inconsistent with voiced={v}"
                )));
            }
        }
        Ok(Self {
            f0_hz,
            voiced,
            hop_seconds,
            start_seconds,
        })
    }

    /// Builds a contour where every positive value is voiced.
    pub fn from_hz(
        f0_hz: Vec<f64>,
        hop_seconds: f64,
        start_seconds: f64,
    ) -> Result<Self, AnalysisError> {
        let voiced = f0_hz.iter().map(|&f| f > 0.0).collect();
        Self::new(f0_hz, voiced, hop_seconds, start_seconds)
    }

    pub fn f0_hz(&self) -> &[f64] {
        &self.f0_hz
    }

    pub fn voiced(&self) -> &[bool] {
        &self.voiced
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop_seconds
    }

    pub fn start_seconds(&self) -> f64 {
        self.start_seconds
    }

    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn time_of(&self, frame: usize) -> f64 {
        self.start_seconds + frame as f64 * self.hop_seconds
    }

    pub fn voiced_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.f0_hz
            .iter()
            .zip(&self.voiced)
            .filter(|(_, &v)| v)
            .map(|(&f, _)| f)
    }
}

/// Transposes voiced frames by `keys` equal-tempered semitones.
pub fn shift_f0(contour: &F0Contour, keys: i32) -> F0Contour {
    let factor = 2f64.powf(keys as f64 / 12.0);
    let f0_hz = contour
        .f0_hz
        .iter()
        .zip(&contour.voiced)
        .map(|(&f, &v)| if v { f * factor } else { f })
        .collect();
    F0Contour {
        f0_hz,
        ..contour.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0EstimatorConfig {
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub frame_len: usize,
    pub hop: usize,
    /// Minimum normalized autocorrelation for a frame to count as voiced.
    pub voicing_threshold: f64,
}

impl Default for F0EstimatorConfig {
    fn default() -> Self {
        Self {
            fmin_hz: 50.0,
            fmax_hz: 1100.0,
            frame_len: 2048,
            hop: 256,
            voicing_threshold: 0.5,
        }
    }
}

// Local maxima within this fraction of the best peak compete; the shortest
// lag wins, which suppresses period-doubling picks.
const OCTAVE_TOLERANCE: f64 = 0.9;

/// Normalized-autocorrelation pitch tracker with parabolic lag refinement.
/// Only the first channel is analysed.
pub fn estimate_f0(x: &AudioBuffer, config: &F0EstimatorConfig) -> F0Contour {
    let rate = x.sample_rate_hz() as f64;
    let hop = config.hop.max(1);
    let frame_len = config.frame_len.max(4);
    let hop_seconds = hop as f64 / rate;
    let start_seconds = frame_len as f64 / (2.0 * rate);
    let samples = x.samples();

    let lag_min = ((rate / config.fmax_hz).floor() as usize).max(2);
    let lag_max = ((rate / config.fmin_hz).ceil() as usize).min(frame_len / 2);
    let frames = if samples.len() < frame_len {
        0
    } else {
        1 + (samples.len() - frame_len) / hop
    };

    let mut f0 = vec![0.0; frames];
    let mut voiced = vec![false; frames];
    if lag_min + 1 >= lag_max || config.fmin_hz.is_nan() || config.fmin_hz <= 0.0 {
        return F0Contour::new(f0, voiced, hop_seconds, start_seconds).expect("all unvoiced");
    }

    // Correlation window shared by every lag so values are comparable.
    let window = frame_len - (lag_max + 1);
    let mut nccf = vec![0.0; lag_max + 2];
    for frame in 0..frames {
        let seg = &samples[frame * hop..frame * hop + frame_len];
        let e0: f64 = seg[..window].iter().map(|v| v * v).sum();
        if e0 <= f64::MIN_POSITIVE {
            continue;
        }
        let mut e_lag: f64 = seg[lag_min - 1..lag_min - 1 + window]
            .iter()
            .map(|v| v * v)
            .sum();
        for lag in lag_min - 1..=lag_max + 1 {
            if lag > lag_min - 1 {
                let leaving = seg[lag - 1];
                let entering = seg[lag - 1 + window];
                e_lag += entering * entering - leaving * leaving;
            }
            let cross: f64 = seg[..window]
                .iter()
                .zip(&seg[lag..lag + window])
                .map(|(a, b)| a * b)
                .sum();
            let denom = (e0 * e_lag.max(0.0)).sqrt();
            nccf[lag] = if denom > 0.0 { cross / denom } else { 0.0 };
        }

        let peaks: Vec<usize> = (lag_min..=lag_max)
            .filter(|&l| nccf[l] > nccf[l - 1] && nccf[l] >= nccf[l + 1])
            .collect();
        let Some(best) = peaks.iter().map(|&l| nccf[l]).reduce(f64::max) else {
            continue;
        };
        let lag = peaks
            .into_iter()
            .find(|&l| nccf[l] >= OCTAVE_TOLERANCE * best)
            .expect("best peak qualifies");
        if nccf[lag] < config.voicing_threshold {
            continue;
        }
        let (a, b, c) = (nccf[lag - 1], nccf[lag], nccf[lag + 1]);
        let curvature = a - 2.0 * b + c;
        let offset = if curvature < 0.0 {
            (0.5 * (a - c) / curvature).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        f0[frame] = rate / (lag as f64 + offset);
        voiced[frame] = true;
    }
    F0Contour::new(f0, voiced, hop_seconds, start_seconds).expect("estimator output is consistent")
}

/// Parses "time_seconds f0_hz" lines; `#` comments and blank lines are
/// ignored. The hop is the mean spacing of the time column.
pub fn parse_contour(text: &str) -> Result<F0Contour, AnalysisError> {
    let mut times = Vec::new();
    let mut f0 = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |field: Option<&str>, what: &str| -> Result<f64, AnalysisError> {
            field
                .ok_or_else(|| AnalysisError::Parse {
                    line: i + 1,
                    reason: format!("missing {what}"),
                })?
                .parse::<f64>()
                .map_err(|e| AnalysisError::Parse {
                    line: i + 1,
                    reason: format!("bad {what}: {e}"),
                })
        };
        let mut fields = line.split_whitespace();
        let t = parse(fields.next(), "time")?;
        let f = parse(fields.next(), "f0")?;
        if fields.next().is_some() {
            return Err(AnalysisError::Parse {
                line: i + 1,
                reason: "expected two columns".into(),
            });
        }
        if !(f >= 0.0 && f.is_finite()) {
            return Err(AnalysisError::Parse {
                line: i + 1,
                reason: format!("f0 {f} must be finite and non-negative"),
            });
        }
        if times.last().is_some_and(|&prev| t <= prev) {
            return Err(AnalysisError::Parse {
                line: i + 1,
                reason: "time column must be strictly increasing".into(),
            });
        }
        times.push(t);
        f0.push(f);
    }
    let start = times.first().copied().unwrap_or(0.0);
    let hop = match times.len() {
        0 | 1 => 0.0,
        n => (times[n - 1] - times[0]) / (n - 1) as f64,
    };
    F0Contour::from_hz(f0, hop, start)
}

pub fn read_contour(path: impl AsRef<Path>) -> Result<F0Contour, AnalysisError> {
    parse_contour(&read_text(path.as_ref())?)
}

pub fn format_contour(contour: &F0Contour) -> String {
    let mut out = String::with_capacity(contour.len() * 24);
    for (i, &f) in contour.f0_hz.iter().enumerate() {
        let _ = writeln!(out, "{:.6} {f}", contour.time_of(i));
    }
    out
}

pub fn write_contour(path: impl AsRef<Path>, contour: &F0Contour) -> Result<(), AnalysisError> {
    let path = path.as_ref();
    std::fs::write(path, format_contour(contour)).map_err(|source| AnalysisError::Io {
        path: path.display().to_string(),
        source,
    })
}
