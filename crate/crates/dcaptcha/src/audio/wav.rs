//! Minimal RIFF/WAVE reader and writer: PCM, 16-bit little-endian, mono.
//!
//! Samples quantize as i = clamp(round(x * 32768), -32768, 32767) and read
//! back as i / 32768, so a write/read round trip moves a sample by at most
//! 2^-15 (the worst case is x = 1.0 clamping to 32767).

use std::fs;
use std::path::Path;

use super::AudioClip;
use crate::error::{Error, Result};

fn quantize_sample(x: f64) -> i16 {
    (x * 32_768.0).round().clamp(-32_768.0, 32_767.0) as i16
}

fn dequantize_sample(i: i16) -> f64 {
    i as f64 / 32_768.0
}

/// Passes every sample through the 16-bit quantizer, as the on-disk format
/// would. Capture paths apply this so that re-verifying audio loaded from a
/// recording reproduces scores bit-exactly.
pub fn quantize_16bit(clip: &AudioClip) -> AudioClip {
    let samples = clip.samples().iter().map(|&s| dequantize_sample(quantize_sample(s))).collect();
    AudioClip::new(samples, clip.sample_rate()).expect("quantized samples are finite")
}

/// Serializes a clip as PCM16 mono WAV bytes.
pub fn to_wav_bytes(clip: &AudioClip) -> Vec<u8> {
    let n = clip.len() as u32;
    let data_size = n * 2;
    let sample_rate = clip.sample_rate();
    let mut out = Vec::with_capacity(44 + data_size as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_size).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_size.to_le_bytes());
    for &s in clip.samples() {
        out.extend_from_slice(&quantize_sample(s).to_le_bytes());
    }
    out
}

/// Parses PCM16 mono WAV bytes.
pub fn from_wav_bytes(bytes: &[u8]) -> Result<AudioClip> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedWav("missing RIFF/WAVE header".into()));
    }
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        if body_start + size > bytes.len() {
            return Err(Error::MalformedWav(format!(
                "chunk {:?} claims {size} bytes past end of file",
                String::from_utf8_lossy(id)
            )));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::MalformedWav("fmt chunk shorter than 16 bytes".into()));
                }
                fmt = Some((
                    u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16::from_le_bytes(body[14..16].try_into().unwrap()),
                ));
            }
            b"data" => data = Some(body),
            _ => {} // skip unknown chunks
        }
        pos = body_start + size + (size & 1); // chunks are word-aligned
    }
    let (format, channels, sample_rate, bits) =
        fmt.ok_or_else(|| Error::MalformedWav("no fmt chunk".into()))?;
    if format != 1 {
        return Err(Error::UnsupportedEncoding(format!("WAV format tag {format}, want PCM (1)")));
    }
    if bits != 16 {
        return Err(Error::UnsupportedEncoding(format!("{bits}-bit samples, want 16")));
    }
    if channels != 1 {
        return Err(Error::UnsupportedChannels(channels));
    }
    if sample_rate == 0 {
        return Err(Error::MalformedWav("zero sample rate".into()));
    }
    let data = data.ok_or_else(|| Error::MalformedWav("no data chunk".into()))?;
    if data.len() % 2 != 0 {
        return Err(Error::MalformedWav("data chunk has odd byte length".into()));
    }
    let samples = data
        .chunks_exact(2)
        .map(|b| dequantize_sample(i16::from_le_bytes([b[0], b[1]])))
        .collect();
    AudioClip::new(samples, sample_rate)
}

pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_wav_bytes(clip))?;
    Ok(())
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    from_wav_bytes(&fs::read(path)?)
}
