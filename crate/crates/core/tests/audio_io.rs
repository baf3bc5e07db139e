mod common;

use proptest::prelude::*;
use rand::Rng;
use svc_post::audio_io::{decode_wav, encode_wav, read_wav, to_mono, write_wav};
use svc_post::{AudioBuffer, Encoding, WavFormat};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

#[test]
fn pcm24_fixture_from_independent_script() {
    let (buf, fmt) = read_wav(format!("{FIXTURES}/pcm24_half.wav")).unwrap();
    assert_eq!(fmt, WavFormat::new(Encoding::Pcm24, 1, 48_000));
    // 0x400000 / 2^23
    assert_eq!(buf.samples(), &[0.5]);
}

#[test]
fn float32_file_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::rng(7);
    let left: Vec<f64> = (0..999)
        .map(|_| r.gen_range(-1.0f32..=1.0) as f64)
        .collect();
    let right: Vec<f64> = (0..999)
        .map(|_| r.gen_range(-1.0f32..=1.0) as f64)
        .collect();
    let buf = AudioBuffer::new(vec![left, right], 44_100).unwrap();
    let fmt = WavFormat::for_buffer(Encoding::Float32, &buf);
    let a = dir.path().join("a.wav");
    let b = dir.path().join("b.wav");
    write_wav(&a, &buf, fmt).unwrap();
    let (first, fmt1) = read_wav(&a).unwrap();
    assert_eq!(first, buf);
    write_wav(&b, &first, fmt1).unwrap();
    assert_eq!(read_wav(&b).unwrap().0, first);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn three_channel_mixdown_matches_loop() {
    let chans: Vec<Vec<f64>> = (0..3).map(|c| common::noise(100 + c, 257, 1.0)).collect();
    let buf = AudioBuffer::new(chans.clone(), 24_000).unwrap();
    let mono = to_mono(&buf);
    assert_eq!(mono.channel_count(), 1);
    for i in 0..257 {
        let mut acc = 0.0;
        for ch in &chans {
            acc += ch[i];
        }
        assert!((mono.samples()[i] - acc / 3.0).abs() < 1e-15);
    }
    assert_eq!(to_mono(&mono), mono);
}

#[test]
fn missing_file_is_io_error() {
    let err = read_wav("/nonexistent/really/not.wav").unwrap_err();
    assert!(err.is_io());
}

fn encodings() -> impl Strategy<Value = Encoding> {
    prop_oneof![
        Just(Encoding::Pcm16),
        Just(Encoding::Pcm24),
        Just(Encoding::Float32)
    ]
}

proptest! {
    #[test]
    fn requantization_stays_within_one_step(
        samples in prop::collection::vec(-1.2f64..1.2, 0..200),
        enc in encodings(),
    ) {
        let buf = AudioBuffer::mono(samples, 16_000).unwrap();
        let fmt = WavFormat::for_buffer(enc, &buf);
        let (decoded, _) = decode_wav(&encode_wav(&buf, fmt).unwrap()).unwrap();
        prop_assert!(decoded.samples().iter().all(|v| (-1.0..=1.0).contains(v)));
        let (again, _) = decode_wav(&encode_wav(&decoded, fmt).unwrap()).unwrap();
        for (a, b) in decoded.samples().iter().zip(again.samples()) {
            if enc == Encoding::Float32 {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            } else {
                prop_assert!((a - b).abs() <= enc.quantization_step());
            }
        }
    }

    #[test]
    fn pcm_decoding_never_leaves_unit_range(raw in prop::collection::vec(any::<u8>(), 0..300)) {
        for (enc, bits) in [(Encoding::Pcm16, 16u16), (Encoding::Pcm24, 24)] {
            let width = bits as usize / 8;
            let data = &raw[..raw.len() / width * width];
            let mut bytes = b"RIFF\0\0\0\0WAVEfmt ".to_vec();
            bytes.extend_from_slice(&16u32.to_le_bytes());
            bytes.extend_from_slice(&1u16.to_le_bytes());
            bytes.extend_from_slice(&1u16.to_le_bytes());
            bytes.extend_from_slice(&8000u32.to_le_bytes());
            bytes.extend_from_slice(&(8000 * width as u32).to_le_bytes());
            bytes.extend_from_slice(&(width as u16).to_le_bytes());
            bytes.extend_from_slice(&bits.to_le_bytes());
            bytes.extend_from_slice(b"data");
            bytes.extend_from_slice(&(data.len() as u32).to_le_bytes());
            bytes.extend_from_slice(data);
            let (buf, fmt) = decode_wav(&bytes).unwrap();
            prop_assert_eq!(fmt.encoding, enc);
            prop_assert!(buf.samples().iter().all(|v| (-1.0..1.0).contains(v)));
        }
    }

    #[test]
    fn to_mono_is_idempotent(chans in 1usize..4, len in 0usize..50, seed in any::<u64>()) {
        let data: Vec<Vec<f64>> = (0..chans).map(|c| common::noise(seed ^ c as u64, len, 1.0)).collect();
        let buf = AudioBuffer::new(data, 8000).unwrap();
        let once = to_mono(&buf);
        prop_assert_eq!(to_mono(&once), once);
    }
}
