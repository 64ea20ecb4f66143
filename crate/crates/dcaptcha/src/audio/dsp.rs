//! STFT and cepstral feature extraction.
//!
//! Conventions, fixed for reproducibility:
//! * periodic Hann window over `window_len` samples;
//! * FFT size = next power of two >= window length, zero-padded;
//! * forward DFT scaled by 1/sqrt(fft_size) (unitary), so per-frame
//!   spectral energy never exceeds windowed sample energy;
//! * power spectrum -> triangular filterbank -> ln(max(E, LOG_FLOOR))
//!   -> orthonormal DCT-II, first `n_coeffs` kept.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{AudioClip, CoeffKind, DspConfig, FeatureMatrix};
use crate::error::{Error, Result};

/// Floor applied to filterbank energies before the log, so silence maps to
/// ln(LOG_FLOOR) instead of -inf.
pub const LOG_FLOOR: f64 = 1e-10;

/// Complex spectrogram: `frames[t][k]` is bin k of frame t, with
/// fft_size/2 + 1 bins per frame.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub frames: Vec<Vec<Complex<f64>>>,
    pub fft_size: usize,
    pub sample_rate: u32,
    pub hop_s: f64,
}

impl Spectrogram {
    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Center frequency of bin k in Hz.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.fft_size as f64
    }
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Periodic Hann taper of length n.
fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// y[n] = x[n] - a * x[n-1], with x[-1] = 0.
fn pre_emphasize(samples: &[f64], a: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for &s in samples {
        out.push(s - a * prev);
        prev = s;
    }
    out
}

/// Short-time Fourier transform. Frame count is
/// floor((len - window) / hop) + 1; a clip shorter than one window is an
/// error.
pub fn stft(clip: &AudioClip, cfg: &DspConfig) -> Result<Spectrogram> {
    cfg.validate(clip.sample_rate())?;
    let win_len = cfg.window_len(clip.sample_rate());
    let hop_len = cfg.hop_len(clip.sample_rate());
    if clip.len() < win_len {
        return Err(Error::InsufficientAudio(format!(
            "{} samples but the analysis window needs {win_len}",
            clip.len()
        )));
    }
    let samples = pre_emphasize(clip.samples(), cfg.pre_emphasis);
    let window = hann(win_len);
    let fft_size = next_pow2(win_len);
    let n_bins = fft_size / 2 + 1;
    let scale = 1.0 / (fft_size as f64).sqrt();

    let fft = FftPlanner::new().plan_fft_forward(fft_size);
    let n_frames = (samples.len() - win_len) / hop_len + 1;
    let mut frames = Vec::with_capacity(n_frames);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    for t in 0..n_frames {
        let start = t * hop_len;
        for (i, b) in buf.iter_mut().enumerate() {
            let v = if i < win_len { samples[start + i] * window[i] } else { 0.0 };
            *b = Complex::new(v, 0.0);
        }
        fft.process(&mut buf);
        frames.push(buf[..n_bins].iter().map(|c| c * scale).collect());
    }
    Ok(Spectrogram { frames, fft_size, sample_rate: clip.sample_rate(), hop_s: cfg.hop_s })
}

/// Frequency warp used to place filterbank edges.
#[derive(Clone, Copy)]
enum Warp {
    Mel,
    Linear,
}

impl Warp {
    fn fwd(self, hz: f64) -> f64 {
        match self {
            Warp::Mel => 2595.0 * (1.0 + hz / 700.0).log10(),
            Warp::Linear => hz,
        }
    }

    fn inv(self, w: f64) -> f64 {
        match self {
            Warp::Mel => 700.0 * (10f64.powf(w / 2595.0) - 1.0),
            Warp::Linear => w,
        }
    }
}

/// Triangular filterbank as a dense (n_filters x n_bins) weight matrix.
/// Edges are uniform in warped frequency between fmin and fmax; each
/// filter spans [edge[m], edge[m+2]] and peaks at edge[m+1].
fn filterbank(warp: Warp, cfg: &DspConfig, fft_size: usize, sample_rate: u32) -> Vec<Vec<f64>> {
    let n_bins = fft_size / 2 + 1;
    let lo = warp.fwd(cfg.fmin_hz);
    let hi = warp.fwd(cfg.fmax_hz);
    let edges: Vec<f64> = (0..cfg.n_filters + 2)
        .map(|i| warp.inv(lo + (hi - lo) * i as f64 / (cfg.n_filters + 1) as f64))
        .collect();
    let bin_hz: Vec<f64> =
        (0..n_bins).map(|k| k as f64 * sample_rate as f64 / fft_size as f64).collect();
    (0..cfg.n_filters)
        .map(|m| {
            let (l, c, r) = (edges[m], edges[m + 1], edges[m + 2]);
            bin_hz
                .iter()
                .map(|&f| {
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II of x, truncated to n_out coefficients.
fn dct2_ortho(x: &[f64], n_out: usize) -> Vec<f64> {
    let n = x.len();
    let norm0 = (1.0 / n as f64).sqrt();
    let norm = (2.0 / n as f64).sqrt();
    (0..n_out)
        .map(|k| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    v * (std::f64::consts::PI * k as f64 * (2 * i + 1) as f64 / (2 * n) as f64)
                        .cos()
                })
                .sum();
            s * if k == 0 { norm0 } else { norm }
        })
        .collect()
}

fn cepstra(clip: &AudioClip, cfg: &DspConfig, warp: Warp, kind: CoeffKind) -> Result<FeatureMatrix> {
    let spec = stft(clip, cfg)?;
    let bank = filterbank(warp, cfg, spec.fft_size, clip.sample_rate());
    let rows: Vec<Vec<f64>> = spec
        .frames
        .iter()
        .map(|frame| {
            let power: Vec<f64> = frame.iter().map(|c| c.norm_sqr()).collect();
            let log_e: Vec<f64> = bank
                .iter()
                .map(|filt| {
                    let e: f64 = filt.iter().zip(&power).map(|(w, p)| w * p).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect();
            dct2_ortho(&log_e, cfg.n_coeffs)
        })
        .collect();
    FeatureMatrix::from_rows(rows, cfg.hop_s, kind)
}

/// Mel-frequency cepstral coefficients.
pub fn mfcc(clip: &AudioClip, cfg: &DspConfig) -> Result<FeatureMatrix> {
    cepstra(clip, cfg, Warp::Mel, CoeffKind::Mfcc)
}

/// Linear-frequency cepstral coefficients.
pub fn lfcc(clip: &AudioClip, cfg: &DspConfig) -> Result<FeatureMatrix> {
    cepstra(clip, cfg, Warp::Linear, CoeffKind::Lfcc)
}

/// Log filterbank energies without the DCT (mel warp).
pub fn log_mel(clip: &AudioClip, cfg: &DspConfig) -> Result<FeatureMatrix> {
    let spec = stft(clip, cfg)?;
    let bank = filterbank(Warp::Mel, cfg, spec.fft_size, clip.sample_rate());
    let rows: Vec<Vec<f64>> = spec
        .frames
        .iter()
        .map(|frame| {
            let power: Vec<f64> = frame.iter().map(|c| c.norm_sqr()).collect();
            bank.iter()
                .map(|filt| {
                    let e: f64 = filt.iter().zip(&power).map(|(w, p)| w * p).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(rows, cfg.hop_s, CoeffKind::LogMel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sine(freq: f64, duration_s: f64, rate: u32) -> AudioClip {
        let n = (duration_s * rate as f64) as usize;
        let samples = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).sin() * 0.5)
            .collect();
        AudioClip::new(samples, rate).unwrap()
    }

    fn noise(duration_s: f64, rate: u32, seed: u64) -> AudioClip {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = (duration_s * rate as f64) as usize;
        let samples = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        AudioClip::new(samples, rate).unwrap()
    }

    #[test]
    fn stft_of_silence_is_zero() {
        let clip = AudioClip::silence(1.0, 16_000);
        let spec = stft(&clip, &DspConfig::default()).unwrap();
        assert!(!spec.frames.is_empty());
        for frame in &spec.frames {
            for c in frame {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn stft_shape_matches_contract() {
        let clip = AudioClip::silence(1.0, 16_000);
        let cfg = DspConfig::default();
        let spec = stft(&clip, &cfg).unwrap();
        // window 400 samples -> fft 512 -> 257 bins; (16000-400)/160+1 frames.
        assert_eq!(spec.fft_size, 512);
        assert_eq!(spec.frames[0].len(), 257);
        assert_eq!(spec.frames.len(), (16_000 - 400) / 160 + 1);
    }

    #[test]
    fn stft_peak_bin_tracks_sine_frequency() {
        let cfg = DspConfig::default();
        let clip = sine(1_000.0, 0.5, 16_000);
        let spec = stft(&clip, &cfg).unwrap();
        // Oracle: a windowed sinusoid concentrates energy at the DFT bin
        // nearest its frequency; bin spacing is rate/fft = 31.25 Hz.
        let expected = (1_000.0 / (16_000.0 / spec.fft_size as f64)).round() as usize;
        for frame in &spec.frames {
            let argmax = frame
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                .unwrap()
                .0;
            assert_eq!(argmax, expected);
        }
    }

    #[test]
    fn stft_rejects_short_clip() {
        let clip = AudioClip::silence(0.010, 16_000); // shorter than 25 ms window
        match stft(&clip, &DspConfig::default()) {
            Err(Error::InsufficientAudio(_)) => {}
            other => panic!("expected InsufficientAudio, got {other:?}"),
        }
    }

    #[test]
    fn stft_energy_bounded_by_window_times_frame_energy() {
        let cfg = DspConfig::default();
        let win_len = cfg.window_len(16_000);
        let window_energy: f64 = hann(win_len).iter().map(|w| w * w).sum();
        for seed in 0..5u64 {
            let clip = noise(0.3, 16_000, seed);
            let pre = pre_emphasize(clip.samples(), cfg.pre_emphasis);
            let spec = stft(&clip, &cfg).unwrap();
            let hop = cfg.hop_len(16_000);
            for (t, frame) in spec.frames.iter().enumerate() {
                let spectral: f64 = frame.iter().map(|c| c.norm_sqr()).sum();
                let sample_energy: f64 =
                    pre[t * hop..t * hop + win_len].iter().map(|s| s * s).sum();
                assert!(
                    spectral <= window_energy * sample_energy + 1e-12,
                    "frame {t}: {spectral} > {window_energy} * {sample_energy}"
                );
            }
        }
    }

    #[test]
    fn mfcc_of_silence_is_constant_floor_frames() {
        let cfg = DspConfig::default();
        let clip = AudioClip::silence(1.0, 16_000);
        let m = mfcc(&clip, &cfg).unwrap();
        // Every filter energy hits the floor, so each frame is the DCT of
        // the constant vector ln(LOG_FLOOR) * 1.
        let expected = dct2_ortho(&vec![LOG_FLOOR.ln(); cfg.n_filters], cfg.n_coeffs);
        for r in m.rows() {
            for (a, b) in r.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // The DCT of a constant vector is zero everywhere but coefficient 0.
        for &c in &expected[1..] {
            assert!(c.abs() < 1e-9);
        }
    }

    #[test]
    fn mfcc_gain_shifts_only_coefficient_zero() {
        let cfg = DspConfig::default();
        let clip = noise(0.4, 16_000, 7);
        let gain = 3.0;
        let scaled =
            AudioClip::new(clip.samples().iter().map(|s| s * gain).collect(), 16_000).unwrap();
        let a = mfcc(&clip, &cfg).unwrap();
        let b = mfcc(&scaled, &cfg).unwrap();
        // Power scales by gain^2, every log energy shifts by 2 ln(gain),
        // and an orthonormal DCT maps a constant shift entirely into c0.
        let expected_shift = 2.0 * gain.ln() * (cfg.n_filters as f64).sqrt();
        for (ra, rb) in a.rows().zip(b.rows()) {
            let d0 = rb[0] - ra[0];
            assert!(
                (d0 - expected_shift).abs() < 1e-9 * expected_shift.abs().max(1.0),
                "c0 shift {d0} vs {expected_shift}"
            );
            for i in 1..ra.len() {
                assert!(
                    (ra[i] - rb[i]).abs() < 1e-9 * ra[i].abs().max(1.0),
                    "coefficient {i} moved: {} vs {}",
                    ra[i],
                    rb[i]
                );
            }
        }
    }

    #[test]
    fn mfcc_separates_distinct_tones() {
        let cfg = DspConfig::default();
        let a = mfcc(&sine(1_000.0, 0.3, 16_000), &cfg).unwrap();
        let b = mfcc(&sine(2_000.0, 0.3, 16_000), &cfg).unwrap();
        let dist: f64 = a
            .rows()
            .zip(b.rows())
            .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)))
            .sum::<f64>()
            .sqrt();
        assert!(dist > 1.0, "distance {dist}");
    }

    #[test]
    fn mfcc_is_deterministic() {
        let cfg = DspConfig::default();
        let clip = noise(0.3, 16_000, 11);
        let a = mfcc(&clip, &cfg).unwrap();
        let b = mfcc(&clip, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lfcc_of_silence_is_constant_frames() {
        let m = lfcc(&AudioClip::silence(0.5, 16_000), &DspConfig::default()).unwrap();
        let first = m.row(0).to_vec();
        for r in m.rows() {
            assert_eq!(r, &first[..]);
        }
    }

    #[test]
    fn lfcc_differs_from_mfcc_on_voiced_audio() {
        let cfg = DspConfig::default();
        let clip = sine(800.0, 0.3, 16_000);
        let a = mfcc(&clip, &cfg).unwrap();
        let b = lfcc(&clip, &cfg).unwrap();
        let dist: f64 = a
            .rows()
            .zip(b.rows())
            .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)))
            .sum::<f64>();
        assert!(dist > 1e-3, "distance {dist}");
    }

    #[test]
    fn lfcc_finite_on_white_noise() {
        let m = lfcc(&noise(0.5, 16_000, 3), &DspConfig::default()).unwrap();
        for r in m.rows() {
            assert!(r.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn dct_matches_naive_definition() {
        let x = [1.0, -2.0, 0.5, 3.0];
        let got = dct2_ortho(&x, 4);
        // Independent evaluation of the orthonormal DCT-II formula.
        let n = 4.0;
        for (k, g) in got.iter().enumerate() {
            let mut s = 0.0;
            for (i, &v) in x.iter().enumerate() {
                s += v
                    * (std::f64::consts::PI / n * (i as f64 + 0.5) * k as f64).cos();
            }
            s *= if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            assert!((g - s).abs() < 1e-12);
        }
        // Orthonormality: energy preserved for a full-length transform.
        let full = dct2_ortho(&x, 4);
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ec: f64 = full.iter().map(|v| v * v).sum();
        assert!((ex - ec).abs() < 1e-9);
    }

    #[test]
    fn filterbank_covers_band_and_stays_in_range() {
        let cfg = DspConfig::default();
        for warp in [Warp::Mel, Warp::Linear] {
            let bank = filterbank(warp, &cfg, 512, 16_000);
            assert_eq!(bank.len(), cfg.n_filters);
            for filt in &bank {
                assert_eq!(filt.len(), 257);
                assert!(filt.iter().all(|&w| (0.0..=1.0).contains(&w)));
                assert!(filt.iter().any(|&w| w > 0.0), "empty filter");
            }
        }
    }
}
