//! RIFF/WAVE reading and writing, PCM signed 16-bit little-endian only.
//!
//! The writer emits the canonical 44-byte header so rewriting an unmodified
//! file reproduces it byte for byte. Samples are scaled by 1/32768 on read;
//! the writer rounds and saturates at the i16 limits.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::bmc::Waveform;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("not a RIFF/WAVE file")]
    NotRiff,
    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("data chunk shorter than declared")]
    TruncatedData,
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

/// Container parameters. Encoding is fixed at PCM16 LE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavSpec {
    pub sample_rate: u32,
    pub channels: u16,
}

impl WavSpec {
    pub fn for_waveform(w: &Waveform) -> Self {
        Self {
            sample_rate: w.sample_rate,
            channels: w.channels,
        }
    }
}

fn read_u16(buf: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([buf[at], buf[at + 1]])
}

fn read_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([buf[at], buf[at + 1], buf[at + 2], buf[at + 3]])
}

/// Reads a PCM16 WAV file. Stereo is preserved as two interleaved channels.
pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<(Waveform, WavSpec), WavError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotRiff);
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut at = 12usize;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = read_u32(&bytes, at + 4) as usize;
        let body_start = at + 8;
        match id {
            b"fmt " => {
                if size < 16 || body_start + 16 > bytes.len() {
                    return Err(WavError::TruncatedData);
                }
                fmt = Some((
                    read_u16(&bytes, body_start),
                    read_u16(&bytes, body_start + 2),
                    read_u32(&bytes, body_start + 4),
                    read_u16(&bytes, body_start + 14),
                ));
            }
            b"data" => {
                if body_start + size > bytes.len() {
                    return Err(WavError::TruncatedData);
                }
                data = Some(&bytes[body_start..body_start + size]);
            }
            _ => {}
        }
        // chunks are word-aligned
        at = body_start + size + (size & 1);
    }

    let (format, channels, sample_rate, bits) =
        fmt.ok_or(WavError::UnsupportedEncoding("missing fmt chunk".into()))?;
    if format != 1 {
        return Err(WavError::UnsupportedEncoding(format!(
            "format tag {format}, only PCM (1) supported"
        )));
    }
    if bits != 16 {
        return Err(WavError::UnsupportedEncoding(format!(
            "{bits}-bit samples, only 16-bit supported"
        )));
    }
    if !(1..=2).contains(&channels) {
        return Err(WavError::UnsupportedEncoding(format!("{channels} channels")));
    }
    let data = data.ok_or(WavError::TruncatedData)?;

    let samples: Vec<f32> = data
        .chunks_exact(2)
        .map(|c| f32::from(i16::from_le_bytes([c[0], c[1]])) / 32768.0)
        .collect();

    let spec = WavSpec {
        sample_rate,
        channels,
    };
    Ok((
        Waveform {
            samples,
            sample_rate,
            channels,
        },
        spec,
    ))
}

/// Writes a canonical 44-byte-header PCM16 WAV file. Samples are rounded to
/// the nearest i16 and saturate at ±full scale.
pub fn write_wav<P: AsRef<Path>>(w: &Waveform, spec: WavSpec, path: P) -> Result<(), WavError> {
    assert_eq!(spec.channels, w.channels, "spec must match waveform channels");
    assert_eq!(spec.sample_rate, w.sample_rate, "spec must match sample rate");

    let data_len = (w.samples.len() * 2) as u32;
    let block_align = spec.channels * 2;
    let byte_rate = spec.sample_rate * u32::from(block_align);

    let mut out = Vec::with_capacity(44 + w.samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&spec.channels.to_le_bytes());
    out.extend_from_slice(&spec.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &w.samples {
        let q = (f64::from(s) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }

    let mut file = File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tempdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn round_trip_within_one_lsb() {
        let samples: Vec<f32> = (0..1000).map(|i| ((i as f32) / 500.0 - 1.0) * 0.9).collect();
        let w = Waveform::mono(samples.clone(), 48_000);
        let dir = tempdir();
        let path = dir.path().join("rt.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let (back, spec) = read_wav(&path).unwrap();
        assert_eq!(spec.sample_rate, 48_000);
        assert_eq!(spec.channels, 1);
        for (a, b) in samples.iter().zip(&back.samples) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn clipping_saturates() {
        let w = Waveform::mono(vec![1.0, -1.0, 2.0, -2.0], 44_100);
        let dir = tempdir();
        let path = dir.path().join("clip.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let sample = |i: usize| i16::from_le_bytes([bytes[44 + 2 * i], bytes[45 + 2 * i]]);
        assert_eq!(sample(0), 32767);
        assert_eq!(sample(1), -32768);
        assert_eq!(sample(2), 32767);
        assert_eq!(sample(3), -32768);
    }

    #[test]
    fn empty_data_chunk_is_valid() {
        let w = Waveform::mono(vec![], 48_000);
        let dir = tempdir();
        let path = dir.path().join("empty.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let (back, spec) = read_wav(&path).unwrap();
        assert!(back.samples.is_empty());
        assert_eq!(spec.sample_rate, 48_000);
    }

    #[test]
    fn mangled_magic_is_not_riff() {
        let w = Waveform::mono(vec![0.1; 16], 48_000);
        let dir = tempdir();
        let path = dir.path().join("magic.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_wav(&path), Err(WavError::NotRiff)));
    }

    #[test]
    fn truncated_data_is_detected() {
        let w = Waveform::mono(vec![0.1; 100], 48_000);
        let dir = tempdir();
        let path = dir.path().join("trunc.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        assert!(matches!(read_wav(&path), Err(WavError::TruncatedData)));
    }

    #[test]
    fn float_wav_is_rejected() {
        let w = Waveform::mono(vec![0.1; 16], 48_000);
        let dir = tempdir();
        let path = dir.path().join("float.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[20] = 3; // IEEE float format tag
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_wav(&path), Err(WavError::UnsupportedEncoding(_))));
    }

    #[test]
    fn header_identical_on_rewrite() {
        let w = Waveform::mono(vec![0.25; 480], 48_000);
        let dir = tempdir();
        let p1 = dir.path().join("a.wav");
        write_wav(&w, WavSpec::for_waveform(&w), &p1).unwrap();
        let (back, spec) = read_wav(&p1).unwrap();
        let p2 = dir.path().join("b.wav");
        write_wav(&back, spec, &p2).unwrap();
        let h1 = &std::fs::read(&p1).unwrap()[..44];
        let h2 = &std::fs::read(&p2).unwrap()[..44];
        assert_eq!(h1, h2);
    }

    #[test]
    fn stereo_preserved() {
        let mono = Waveform::mono(vec![0.5, -0.5, 0.25, -0.25], 44_100);
        let stereo = mono.into_stereo_left();
        let dir = tempdir();
        let path = dir.path().join("st.wav");
        write_wav(&stereo, WavSpec::for_waveform(&stereo), &path).unwrap();
        let (back, spec) = read_wav(&path).unwrap();
        assert_eq!(spec.channels, 2);
        assert_eq!(back.channel(1), vec![0.0; 4]);
        assert!((back.channel(0)[0] - 0.5).abs() <= 1.0 / 32768.0);
    }

    proptest! {
        #[test]
        fn any_payload_round_trips(samples in proptest::collection::vec(-1.0f32..1.0, 0..500)) {
            let w = Waveform::mono(samples.clone(), 44_100);
            let dir = tempdir();
        let path = dir.path().join("prop.wav");
            write_wav(&w, WavSpec::for_waveform(&w), &path).unwrap();
            let (back, _) = read_wav(&path).unwrap();
            prop_assert_eq!(back.samples.len(), samples.len());
            for (a, b) in samples.iter().zip(&back.samples) {
                prop_assert!((a - b).abs() <= 1.0 / 32768.0);
            }
        }
    }
}
