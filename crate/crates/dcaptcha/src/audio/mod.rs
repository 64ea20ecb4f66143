//! Audio containers and the shared signal-processing front-end.

pub mod dsp;
pub mod filter;
pub mod pitch;
pub mod wav;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Canonical sample rate for all corpus audio. Ingestion resamples to this.
pub const CANONICAL_SAMPLE_RATE: u32 = 16_000;

/// A mono waveform. Samples are finite reals, nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    /// Wraps samples, rejecting non-finite values and a zero rate.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample_rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self { samples, sample_rate })
    }

    /// A zero clip of the given duration.
    pub fn silence(duration_s: f64, sample_rate: u32) -> Self {
        let n = (duration_s * sample_rate as f64).round().max(0.0) as usize;
        Self { samples: vec![0.0; n], sample_rate }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Root-mean-square amplitude; 0 for an empty clip.
    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let e: f64 = self.samples.iter().map(|s| s * s).sum();
        (e / self.samples.len() as f64).sqrt()
    }

    /// Largest absolute sample value.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, s| m.max(s.abs()))
    }

    /// Linear-interpolation resample. Output length is
    /// round(len * to_rate / from_rate); index i reads position
    /// i * from_rate / to_rate in the source, clamped at the last sample.
    pub fn resample(&self, to_rate: u32) -> Result<Self> {
        if to_rate == 0 {
            return Err(Error::InvalidArgument("target rate must be positive".into()));
        }
        if to_rate == self.sample_rate || self.samples.is_empty() {
            return Ok(Self { samples: self.samples.clone(), sample_rate: to_rate });
        }
        let ratio = self.sample_rate as f64 / to_rate as f64;
        let n_out = ((self.samples.len() as f64 / ratio).round() as usize).max(1);
        let last = self.samples.len() - 1;
        let samples = (0..n_out)
            .map(|i| {
                let t = i as f64 * ratio;
                let i0 = (t.floor() as usize).min(last);
                let i1 = (i0 + 1).min(last);
                let frac = t - i0 as f64;
                self.samples[i0] * (1.0 - frac) + self.samples[i1] * frac
            })
            .collect();
        Ok(Self { samples, sample_rate: to_rate })
    }

    /// RMS per non-overlapping frame of `frame_s` seconds. The trailing
    /// partial frame is dropped.
    pub fn frame_rms(&self, frame_s: f64) -> Vec<f64> {
        let n = ((frame_s * self.sample_rate as f64).round() as usize).max(1);
        self.samples
            .chunks_exact(n)
            .map(|c| (c.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt())
            .collect()
    }
}

/// Which cepstral front-end produced a feature matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffKind {
    Mfcc,
    Lfcc,
    LogMel,
}

/// Frame-by-coefficient feature matrix with uniform row dimensionality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    dim: usize,
    frame_hop_s: f64,
    coeff_kind: CoeffKind,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, frame_hop_s: f64, coeff_kind: CoeffKind) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite feature value {v}")));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { data, dim, frame_hop_s, coeff_kind })
    }

    pub fn n_frames(&self) -> usize {
        if self.dim == 0 { 0 } else { self.data.len() / self.dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame_hop_s(&self) -> f64 {
        self.frame_hop_s
    }

    pub fn coeff_kind(&self) -> CoeffKind {
        self.coeff_kind
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Per-coefficient mean over frames.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.n_frames().max(1) as f64;
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// Per-coefficient population standard deviation over frames.
    pub fn std(&self) -> Vec<f64> {
        let n = self.n_frames().max(1) as f64;
        let m = self.mean();
        let mut v = vec![0.0; self.dim];
        for r in self.rows() {
            for ((a, b), mu) in v.iter_mut().zip(r).zip(&m) {
                let d = b - mu;
                *a += d * d;
            }
        }
        v.iter_mut().for_each(|a| *a = (*a / n).sqrt());
        v
    }

    /// One JSON array per frame, newline-separated, for cross-implementation
    /// test vectors.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.rows() {
            out.push_str(&serde_json::to_string(&r.to_vec()).expect("vec of finite f64"));
            out.push('\n');
        }
        out
    }
}

/// Front-end parameters shared by the STFT and cepstral extractors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DspConfig {
    pub window_s: f64,
    pub hop_s: f64,
    pub n_filters: usize,
    pub n_coeffs: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub pre_emphasis: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            window_s: 0.025,
            hop_s: 0.010,
            n_filters: 40,
            n_coeffs: 20,
            fmin_hz: 0.0,
            fmax_hz: 8_000.0,
            pre_emphasis: 0.97,
        }
    }
}

impl DspConfig {
    /// Checks internal consistency and compatibility with a sample rate.
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        if !(self.hop_s > 0.0 && self.hop_s <= self.window_s) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < hop_s ({}) <= window_s ({})",
                self.hop_s, self.window_s
            )));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < self.fmax_hz && self.fmax_hz <= nyquist) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= fmin ({}) < fmax ({}) <= nyquist ({nyquist})",
                self.fmin_hz, self.fmax_hz
            )));
        }
        if self.n_filters == 0 || self.n_coeffs == 0 || self.n_coeffs > self.n_filters {
            return Err(Error::InvalidArgument(format!(
                "need 0 < n_coeffs ({}) <= n_filters ({})",
                self.n_coeffs, self.n_filters
            )));
        }
        if !(0.0..1.0).contains(&self.pre_emphasis) {
            return Err(Error::InvalidArgument(format!(
                "pre_emphasis {} outside [0,1)",
                self.pre_emphasis
            )));
        }
        Ok(())
    }

    pub fn window_len(&self, sample_rate: u32) -> usize {
        ((self.window_s * sample_rate as f64).round() as usize).max(1)
    }

    pub fn hop_len(&self, sample_rate: u32) -> usize {
        ((self.hop_s * sample_rate as f64).round() as usize).max(1)
    }
}
