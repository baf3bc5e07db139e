//! Browser bindings for the crossover designer, the high-band supplement and
//! semitone key shifting. Everything runs on synthetic signals generated in
//! the page, so no audio files are needed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svc_post::analysis::{self, F0Contour, SpectrogramConfig};
use svc_post::dsp;
use svc_post::post::{postprocess_buffers, PostProcessConfig};
use svc_post::AudioBuffer;
use wasm_bindgen::prelude::*;

const RATE: u32 = 48_000;
const CONVERTED_RATE: u32 = 24_000;
const DEMO_SECONDS: f64 = 0.5;

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Magnitude responses of the complementary crossover pair.
#[wasm_bindgen]
pub struct CrossoverResponse {
    freqs_hz: Vec<f64>,
    lowpass_db: Vec<f64>,
    highpass_db: Vec<f64>,
    sum_db: Vec<f64>,
}

#[wasm_bindgen]
impl CrossoverResponse {
    #[wasm_bindgen(getter)]
    pub fn freqs_hz(&self) -> Vec<f64> {
        self.freqs_hz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn lowpass_db(&self) -> Vec<f64> {
        self.lowpass_db.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn highpass_db(&self) -> Vec<f64> {
        self.highpass_db.clone()
    }
    /// Response of lowpass + highpass, flat at 0 dB for a complementary pair.
    #[wasm_bindgen(getter)]
    pub fn sum_db(&self) -> Vec<f64> {
        self.sum_db.clone()
    }
}

fn db(x: f64) -> f64 {
    20.0 * x.max(1e-12).log10()
}

fn magnitude(taps: &[f64], freq_hz: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / RATE as f64;
    let (re, im) = taps
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (n, &h)| {
            (re + h * (w * n as f64).cos(), im - h * (w * n as f64).sin())
        });
    re.hypot(im)
}

/// Designs the pair at 48 kHz and samples its response at `points` frequencies from 0 to Nyquist.
#[wasm_bindgen]
pub fn crossover_response(
    crossover_hz: f64,
    taps: usize,
    points: usize,
) -> Result<CrossoverResponse, JsError> {
    response(crossover_hz, taps, points).map_err(js)
}

fn response(crossover_hz: f64, taps: usize, points: usize) -> Result<CrossoverResponse, String> {
    let lp = dsp::design_lowpass(crossover_hz, RATE, taps).map_err(msg)?;
    let hp = dsp::complement(&lp).map_err(msg)?;
    let sum: Vec<f64> = lp
        .taps()
        .iter()
        .zip(hp.taps())
        .map(|(a, b)| a + b)
        .collect();
    let points = points.max(2);
    let freqs_hz: Vec<f64> = (0..points)
        .map(|i| i as f64 * (RATE / 2) as f64 / (points - 1) as f64)
        .collect();
    Ok(CrossoverResponse {
        lowpass_db: freqs_hz.iter().map(|&f| db(lp.magnitude_at(f))).collect(),
        highpass_db: freqs_hz.iter().map(|&f| db(hp.magnitude_at(f))).collect(),
        sum_db: freqs_hz.iter().map(|&f| db(magnitude(&sum, f))).collect(),
        freqs_hz,
    })
}

/// Average log-magnitude spectra of the demo signals, all on the same bin grid.
#[wasm_bindgen]
pub struct SupplementDemo {
    freqs_hz: Vec<f64>,
    source_db: Vec<f64>,
    converted_db: Vec<f64>,
    output_db: Vec<f64>,
    diff: f64,
}

#[wasm_bindgen]
impl SupplementDemo {
    #[wasm_bindgen(getter)]
    pub fn freqs_hz(&self) -> Vec<f64> {
        self.freqs_hz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn source_db(&self) -> Vec<f64> {
        self.source_db.clone()
    }
    /// Converted voice after upsampling to 48 kHz, before gain correction.
    #[wasm_bindgen(getter)]
    pub fn converted_db(&self) -> Vec<f64> {
        self.converted_db.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn output_db(&self) -> Vec<f64> {
        self.output_db.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn diff(&self) -> f64 {
        self.diff
    }
}

fn harmonics(f0: f64, rate: u32, len: usize, rng: &mut ChaCha8Rng, noise: f64) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64 / rate as f64;
            let voiced: f64 = (1..=40)
                .map(|h| {
                    let f = f0 * h as f64;
                    if f < rate as f64 / 2.0 {
                        (2.0 * std::f64::consts::PI * f * t).sin() / h as f64
                    } else {
                        0.0
                    }
                })
                .sum();
            0.2 * voiced + rng.gen_range(-noise..noise)
        })
        .collect()
}

fn mean_spectrum_db(x: &AudioBuffer) -> Result<Vec<f64>, String> {
    let cfg = SpectrogramConfig {
        n_fft: 1024,
        hop: 512,
        ..Default::default()
    };
    let mags = analysis::stft_magnitude(x, &cfg).map_err(msg)?;
    let frames = mags.nrows().max(1) as f64;
    Ok(mags
        .columns()
        .into_iter()
        .map(|col| {
            10.0 * (col.iter().map(|m| m * m).sum::<f64>() / frames)
                .max(1e-20)
                .log10()
        })
        .collect())
}

/// Runs the supplement on a synthetic pair: a breathy 48 kHz "source" and a
/// band-limited 24 kHz "converted" voice scaled by `converted_gain`.
#[wasm_bindgen]
pub fn supplement_demo(
    seed: u32,
    f0_hz: f64,
    crossover_hz: f64,
    converted_gain: f64,
) -> Result<SupplementDemo, JsError> {
    supplement(seed, f0_hz, crossover_hz, converted_gain).map_err(js)
}

fn supplement(
    seed: u32,
    f0_hz: f64,
    crossover_hz: f64,
    converted_gain: f64,
) -> Result<SupplementDemo, String> {
    if converted_gain.is_nan() || converted_gain <= 0.0 {
        return Err("converted gain must be positive".into());
    }
    if f0_hz.is_nan() || f0_hz <= 0.0 {
        return Err("f0 must be positive".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let len = (RATE as f64 * DEMO_SECONDS) as usize;
    let source =
        AudioBuffer::mono(harmonics(f0_hz, RATE, len, &mut rng, 0.08), RATE).map_err(msg)?;
    let raw = harmonics(f0_hz, CONVERTED_RATE, len / 2, &mut rng, 0.02);
    let converted = AudioBuffer::mono(raw, CONVERTED_RATE)
        .map_err(msg)?
        .scaled(converted_gain);
    let config = PostProcessConfig {
        crossover_hz,
        ..Default::default()
    };
    let (output, report) = postprocess_buffers(&source, &converted, &config).map_err(msg)?;
    let upsampled = dsp::upsample(&converted, 2).map_err(msg)?;
    let source_db = mean_spectrum_db(&source)?;
    Ok(SupplementDemo {
        freqs_hz: (0..source_db.len())
            .map(|k| k as f64 * RATE as f64 / 1024.0)
            .collect(),
        converted_db: mean_spectrum_db(&upsampled)?,
        output_db: mean_spectrum_db(&output)?,
        source_db,
        diff: report.diff,
    })
}

/// Transposes an F0 contour (Hz, 0 = unvoiced) by `keys` semitones.
#[wasm_bindgen]
pub fn shift_contour(f0_hz: Vec<f64>, keys: i32) -> Result<Vec<f64>, JsError> {
    shift(f0_hz, keys).map_err(js)
}

fn shift(f0_hz: Vec<f64>, keys: i32) -> Result<Vec<f64>, String> {
    let contour = F0Contour::from_hz(f0_hz, 0.01, 0.0).map_err(msg)?;
    Ok(analysis::shift_f0(&contour, keys).f0_hz().to_vec())
}
