//! RIFF/WAVE reading and writing, plus channel normalization.
//!
//! Everything downstream works on `f64` mono buffers. Integer PCM is decoded
//! by dividing by `2^(bits-1)`, so `-1.0` is reachable and `+1.0` is not.

use std::fs;
use std::path::Path;

use thiserror::Error;

const WAVE_FORMAT_PCM: u16 = 1;
const WAVE_FORMAT_IEEE_FLOAT: u16 = 3;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("file too short: {len} bytes, need at least {needed} (offset {offset})")]
    Truncated {
        len: usize,
        needed: usize,
        offset: usize,
    },
    #[error("not a RIFF/WAVE container (offset {offset}): {reason}")]
    NotWave { offset: usize, reason: &'static str },
    #[error("malformed chunk '{id}' at offset {offset}: {reason}")]
    MalformedChunk {
        id: String,
        offset: usize,
        reason: String,
    },
    #[error("unsupported encoding at offset {offset}: format tag {format_tag:#06x}, {bits} bits")]
    UnsupportedEncoding {
        offset: usize,
        format_tag: u16,
        bits: u16,
    },
    #[error("missing '{0}' chunk")]
    MissingChunk(&'static str),
    #[error("channel count mismatch: buffer has {buffer}, format declares {format}")]
    ChannelMismatch { buffer: usize, format: usize },
    #[error("non-finite amplitude at channel {channel}, sample {index}")]
    NonFinite { channel: usize, index: usize },
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),
}

impl AudioError {
    pub fn is_io(&self) -> bool {
        matches!(self, AudioError::Io { .. })
    }
}

/// Sampled waveform, stored planar (one `Vec` per channel).
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    channels: Vec<Vec<f64>>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate_hz: u32) -> Result<Self, AudioError> {
        if channels.is_empty() {
            return Err(AudioError::InvalidBuffer(
                "at least one channel required".into(),
            ));
        }
        if sample_rate_hz == 0 {
            return Err(AudioError::InvalidBuffer(
                "sample rate must be positive".into(),
            ));
        }
        let len = channels[0].len();
        if let Some(bad) = channels.iter().position(|c| c.len() != len) {
            return Err(AudioError::InvalidBuffer(format!(
                "channel {bad} has {} samples, channel 0 has {len}",
                channels[bad].len()
            )));
        }
        Ok(Self {
            channels,
            sample_rate_hz,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self, AudioError> {
        Self::new(vec![samples], sample_rate_hz)
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// Number of frames (samples per channel).
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_mono(&self) -> bool {
        self.channels.len() == 1
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    /// First channel; the whole signal for mono buffers.
    pub fn samples(&self) -> &[f64] {
        &self.channels[0]
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    pub fn duration_seconds(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz as f64
    }

    /// Largest absolute amplitude over all channels.
    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|v| v * gain).collect())
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Keeps the first `len` frames of every channel.
    pub fn truncated(&self, len: usize) -> Self {
        Self {
            channels: self
                .channels
                .iter()
                .map(|c| c[..len.min(c.len())].to_vec())
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Pcm16,
    Pcm24,
    Float32,
}

impl Encoding {
    pub fn bytes_per_sample(self) -> usize {
        match self {
            Encoding::Pcm16 => 2,
            Encoding::Pcm24 => 3,
            Encoding::Float32 => 4,
        }
    }

    pub fn bits(self) -> u16 {
        (self.bytes_per_sample() * 8) as u16
    }

    fn format_tag(self) -> u16 {
        match self {
            Encoding::Pcm16 | Encoding::Pcm24 => WAVE_FORMAT_PCM,
            Encoding::Float32 => WAVE_FORMAT_IEEE_FLOAT,
        }
    }

    /// One quantization step in decoded units, zero for float.
    pub fn quantization_step(self) -> f64 {
        match self {
            Encoding::Pcm16 => 1.0 / 32768.0,
            Encoding::Pcm24 => 1.0 / 8_388_608.0,
            Encoding::Float32 => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub encoding: Encoding,
    pub channels: u16,
    pub sample_rate_hz: u32,
}

impl WavFormat {
    pub fn new(encoding: Encoding, channels: u16, sample_rate_hz: u32) -> Self {
        Self {
            encoding,
            channels,
            sample_rate_hz,
        }
    }

    /// Same encoding, retargeted to the given buffer's layout.
    pub fn for_buffer(encoding: Encoding, buffer: &AudioBuffer) -> Self {
        Self::new(
            encoding,
            buffer.channel_count() as u16,
            buffer.sample_rate_hz(),
        )
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<(AudioBuffer, WavFormat), AudioError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| AudioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_wav(&bytes)
}

pub fn write_wav(
    path: impl AsRef<Path>,
    buffer: &AudioBuffer,
    format: WavFormat,
) -> Result<(), AudioError> {
    let path = path.as_ref();
    let bytes = encode_wav(buffer, format)?;
    fs::write(path, bytes).map_err(|source| AudioError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_u16(bytes: &[u8], offset: usize) -> Result<u16, AudioError> {
    bytes
        .get(offset..offset + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or(AudioError::Truncated {
            len: bytes.len(),
            needed: offset + 2,
            offset,
        })
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, AudioError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(AudioError::Truncated {
            len: bytes.len(),
            needed: offset + 4,
            offset,
        })
}

struct FmtChunk {
    format: WavFormat,
    block_align: usize,
}

fn parse_fmt(bytes: &[u8], body: usize, size: usize) -> Result<FmtChunk, AudioError> {
    if size < 16 {
        return Err(AudioError::MalformedChunk {
            id: "fmt ".into(),
            offset: body - 8,
            reason: format!("size {size} smaller than 16"),
        });
    }
    let mut format_tag = read_u16(bytes, body)?;
    let channels = read_u16(bytes, body + 2)?;
    let sample_rate_hz = read_u32(bytes, body + 4)?;
    let block_align = read_u16(bytes, body + 12)? as usize;
    let bits = read_u16(bytes, body + 14)?;

    if format_tag == WAVE_FORMAT_EXTENSIBLE {
        if size < 40 {
            return Err(AudioError::MalformedChunk {
                id: "fmt ".into(),
                offset: body - 8,
                reason: "extensible format without sub-format GUID".into(),
            });
        }
        // The first two bytes of the sub-format GUID carry the actual tag.
        format_tag = read_u16(bytes, body + 24)?;
    }

    let encoding = match (format_tag, bits) {
        (WAVE_FORMAT_PCM, 16) => Encoding::Pcm16,
        (WAVE_FORMAT_PCM, 24) => Encoding::Pcm24,
        (WAVE_FORMAT_IEEE_FLOAT, 32) => Encoding::Float32,
        _ => {
            return Err(AudioError::UnsupportedEncoding {
                offset: body,
                format_tag,
                bits,
            })
        }
    };
    if channels == 0 || sample_rate_hz == 0 {
        return Err(AudioError::MalformedChunk {
            id: "fmt ".into(),
            offset: body - 8,
            reason: format!("channels={channels} sample_rate={sample_rate_hz}"),
        });
    }
    let expected_align = channels as usize * encoding.bytes_per_sample();
    if block_align != expected_align {
        return Err(AudioError::MalformedChunk {
            id: "fmt ".into(),
            offset: body + 12,
            reason: format!("block align {block_align}, expected {expected_align}"),
        });
    }
    Ok(FmtChunk {
        format: WavFormat::new(encoding, channels, sample_rate_hz),
        block_align,
    })
}

/// Decodes an in-memory RIFF/WAVE image.
pub fn decode_wav(bytes: &[u8]) -> Result<(AudioBuffer, WavFormat), AudioError> {
    if bytes.len() < 12 {
        return Err(AudioError::Truncated {
            len: bytes.len(),
            needed: 12,
            offset: 0,
        });
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(AudioError::NotWave {
            offset: 0,
            reason: "missing RIFF tag",
        });
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(AudioError::NotWave {
            offset: 8,
            reason: "missing WAVE tag",
        });
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut offset = 12;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = read_u32(bytes, offset + 4)? as usize;
        let body = offset + 8;
        let end = body.checked_add(size).filter(|&e| e <= bytes.len());
        match id {
            b"fmt " => {
                if end.is_none() {
                    return Err(AudioError::MalformedChunk {
                        id: "fmt ".into(),
                        offset,
                        reason: format!("declared size {size} runs past end of file"),
                    });
                }
                fmt = Some(parse_fmt(bytes, body, size)?);
            }
            b"data" => {
                let fmt = fmt.ok_or(AudioError::MissingChunk("fmt "))?;
                let end = end.ok_or_else(|| AudioError::MalformedChunk {
                    id: "data".into(),
                    offset,
                    reason: format!(
                        "declared size {size} exceeds {} remaining bytes",
                        bytes.len() - body
                    ),
                })?;
                if !size.is_multiple_of(fmt.block_align) {
                    return Err(AudioError::MalformedChunk {
                        id: "data".into(),
                        offset,
                        reason: format!(
                            "size {size} is not a multiple of block align {}",
                            fmt.block_align
                        ),
                    });
                }
                let buffer = decode_samples(&bytes[body..end], fmt.format)?;
                return Ok((buffer, fmt.format));
            }
            _ => {
                if end.is_none() {
                    return Err(AudioError::MalformedChunk {
                        id: String::from_utf8_lossy(id).into_owned(),
                        offset,
                        reason: format!("declared size {size} runs past end of file"),
                    });
                }
            }
        }
        // Chunks are padded to an even byte count.
        offset = body + size + (size & 1);
    }
    Err(AudioError::MissingChunk("data"))
}

fn decode_samples(data: &[u8], format: WavFormat) -> Result<AudioBuffer, AudioError> {
    let n_channels = format.channels as usize;
    let width = format.encoding.bytes_per_sample();
    let frames = data.len() / (width * n_channels);
    let mut channels = vec![Vec::with_capacity(frames); n_channels];
    for (i, sample) in data.chunks_exact(width).enumerate() {
        let value = match format.encoding {
            Encoding::Pcm16 => i16::from_le_bytes([sample[0], sample[1]]) as f64 / 32768.0,
            Encoding::Pcm24 => {
                // Sign-extend via the top byte of an i32.
                let raw = i32::from_le_bytes([0, sample[0], sample[1], sample[2]]) >> 8;
                raw as f64 / 8_388_608.0
            }
            Encoding::Float32 => {
                f32::from_le_bytes([sample[0], sample[1], sample[2], sample[3]]) as f64
            }
        };
        channels[i % n_channels].push(value);
    }
    AudioBuffer::new(channels, format.sample_rate_hz)
}

fn quantize(value: f64, bits: u32) -> i32 {
    let full = (1_i64 << (bits - 1)) as f64;
    (value * full).round().clamp(-full, full - 1.0) as i32
}

/// Encodes a buffer as a RIFF/WAVE image. Amplitudes are clamped to the
/// representable range of the target encoding.
pub fn encode_wav(buffer: &AudioBuffer, format: WavFormat) -> Result<Vec<u8>, AudioError> {
    if buffer.channel_count() != format.channels as usize {
        return Err(AudioError::ChannelMismatch {
            buffer: buffer.channel_count(),
            format: format.channels as usize,
        });
    }
    for (channel, samples) in buffer.channels().iter().enumerate() {
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(AudioError::NonFinite { channel, index });
        }
    }

    let width = format.encoding.bytes_per_sample();
    let block_align = width * format.channels as usize;
    let data_len = buffer.len() * block_align;
    let pad = data_len & 1;
    let riff_len = 4 + (8 + 16) + (8 + data_len + pad);

    let mut out = Vec::with_capacity(8 + riff_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(riff_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16_u32.to_le_bytes());
    out.extend_from_slice(&format.encoding.format_tag().to_le_bytes());
    out.extend_from_slice(&format.channels.to_le_bytes());
    out.extend_from_slice(&format.sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&((format.sample_rate_hz as usize * block_align) as u32).to_le_bytes());
    out.extend_from_slice(&(block_align as u16).to_le_bytes());
    out.extend_from_slice(&format.encoding.bits().to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());

    for frame in 0..buffer.len() {
        for channel in buffer.channels() {
            let v = channel[frame].clamp(-1.0, 1.0);
            match format.encoding {
                Encoding::Pcm16 => {
                    out.extend_from_slice(&(quantize(v, 16) as i16).to_le_bytes());
                }
                Encoding::Pcm24 => {
                    let bytes = quantize(v, 24).to_le_bytes();
                    out.extend_from_slice(&bytes[..3]);
                }
                Encoding::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            }
        }
    }
    if pad == 1 {
        out.push(0);
    }
    Ok(out)
}

/// Mixes all channels down to one by per-sample arithmetic mean.
pub fn to_mono(buffer: &AudioBuffer) -> AudioBuffer {
    if buffer.is_mono() {
        return buffer.clone();
    }
    let n = buffer.channel_count() as f64;
    let mixed = (0..buffer.len())
        .map(|i| buffer.channels().iter().map(|c| c[i]).sum::<f64>() / n)
        .collect();
    AudioBuffer {
        channels: vec![mixed],
        sample_rate_hz: buffer.sample_rate_hz,
    }
}
