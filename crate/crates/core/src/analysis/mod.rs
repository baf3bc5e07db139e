//! Spectral, pitch and speaker-embedding analysis.

mod embedding;
mod f0;
mod mel;

use thiserror::Error;

use crate::audio_io::AudioError;

pub use embedding::{
    cosine_similarity, parse_embeddings, read_embeddings, EmbeddingVector, NamedEmbedding,
};
pub use f0::{
    estimate_f0, format_contour, parse_contour, read_contour, shift_f0, write_contour, F0Contour,
    F0EstimatorConfig,
};
pub use mel::{
    hz_to_mel, mel_centers, mel_filterbank, mel_l1, mel_spectrogram, mel_to_hz, stft_magnitude,
    MelSpectrogram, SpectrogramConfig,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("buffer has {len} samples, shorter than one {n_fft}-sample window")]
    TooShort { len: usize, n_fft: usize },
    #[error("expected mono input, got {0} channels")]
    NotMono(usize),
    #[error("invalid spectrogram config: {0}")]
    Config(String),
    #[error("shape mismatch: {a_frames}x{a_bands} vs {b_frames}x{b_bands}")]
    ShapeMismatch {
        a_frames: usize,
        a_bands: usize,
        b_frames: usize,
        b_bands: usize,
    },
    #[error("spectrogram configs differ")]
    ConfigMismatch,
    #[error("invalid contour: {0}")]
    Contour(String),
    #[error("embedding length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("embedding has zero norm")]
    ZeroNorm,
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Audio(#[from] AudioError),
}

impl AnalysisError {
    pub fn is_io(&self) -> bool {
        match self {
            AnalysisError::Io { .. } => true,
            AnalysisError::Audio(e) => e.is_io(),
            _ => false,
        }
    }
}

pub(crate) fn read_text(path: &std::path::Path) -> Result<String, AnalysisError> {
    std::fs::read_to_string(path).map_err(|source| AnalysisError::Io {
        path: path.display().to_string(),
        source,
    })
}
