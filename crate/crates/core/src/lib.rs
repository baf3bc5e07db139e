//! Post-processing and evaluation toolkit for singing voice conversion.
//!
//! - [`audio_io`]: WAV reading/writing and mono mixdown
//! - [`dsp`]: linear-phase FIR crossover and integer upsampling
//! - [`post`]: high-band supplementation of converted audio from the source
//! - [`analysis`]: STFT, log-mel spectrograms, F0 contours, embeddings
//! - [`evaluation`]: MOS statistics, report tables, test-set manifests
//! - [`cli`]: the `svc-post` command-line front end

pub mod analysis;
pub mod audio_io;
pub mod cli;
pub mod dsp;
pub mod evaluation;
pub mod post;

pub use audio_io::{AudioBuffer, Encoding, WavFormat};
pub use dsp::FilterKernel;
pub use post::{DiffRatio, PostProcessConfig};
