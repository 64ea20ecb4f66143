//! Fundamental-frequency estimation by normalized autocorrelation.
//!
//! Per frame: mean removal, normalized autocorrelation over the lag range
//! for [fmin, fmax], then the smallest lag whose correlation is within 90%
//! of the global peak (suppresses octave-down errors on pulse-train-like
//! voices), refined by parabolic interpolation. A frame is voiced when its
//! RMS clears an absolute floor and the peak correlation clears the voicing
//! threshold.

use super::AudioClip;

#[derive(Debug, Clone)]
pub struct PitchConfig {
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub frame_s: f64,
    pub hop_s: f64,
    /// Minimum normalized autocorrelation for a voiced decision.
    pub voicing_threshold: f64,
    /// Minimum frame RMS for a voiced decision.
    pub energy_floor: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            fmin_hz: 60.0,
            fmax_hz: 500.0,
            frame_s: 0.040,
            hop_s: 0.010,
            voicing_threshold: 0.6,
            energy_floor: 1e-3,
        }
    }
}

/// Frame-wise pitch estimates; `None` marks unvoiced frames.
#[derive(Debug, Clone)]
pub struct PitchTrack {
    pub f0_hz: Vec<Option<f64>>,
    pub hop_s: f64,
}

impl PitchTrack {
    /// Median over voiced frames, `None` if nothing is voiced.
    pub fn median_f0(&self) -> Option<f64> {
        let mut voiced: Vec<f64> = self.f0_hz.iter().flatten().copied().collect();
        if voiced.is_empty() {
            return None;
        }
        voiced.sort_by(|a, b| a.total_cmp(b));
        let n = voiced.len();
        Some(if n % 2 == 1 { voiced[n / 2] } else { (voiced[n / 2 - 1] + voiced[n / 2]) / 2.0 })
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.f0_hz.is_empty() {
            return 0.0;
        }
        self.f0_hz.iter().filter(|f| f.is_some()).count() as f64 / self.f0_hz.len() as f64
    }
}

/// Tracks f0 over the clip. Clips shorter than one frame yield an empty
/// track rather than an error so callers can treat "no estimate" uniformly.
pub fn track_f0(clip: &AudioClip, cfg: &PitchConfig) -> PitchTrack {
    let rate = clip.sample_rate() as f64;
    let frame_len = (cfg.frame_s * rate).round() as usize;
    let hop_len = ((cfg.hop_s * rate).round() as usize).max(1);
    let lag_min = ((rate / cfg.fmax_hz).floor() as usize).max(2);
    let lag_max = ((rate / cfg.fmin_hz).ceil() as usize).min(frame_len.saturating_sub(2));
    let samples = clip.samples();
    if samples.len() < frame_len || lag_min >= lag_max {
        return PitchTrack { f0_hz: Vec::new(), hop_s: cfg.hop_s };
    }

    let n_frames = (samples.len() - frame_len) / hop_len + 1;
    let mut f0_hz = Vec::with_capacity(n_frames);
    for t in 0..n_frames {
        let frame = &samples[t * hop_len..t * hop_len + frame_len];
        f0_hz.push(frame_f0(frame, rate, lag_min, lag_max, cfg));
    }
    PitchTrack { f0_hz, hop_s: cfg.hop_s }
}

fn frame_f0(
    frame: &[f64],
    rate: f64,
    lag_min: usize,
    lag_max: usize,
    cfg: &PitchConfig,
) -> Option<f64> {
    let n = frame.len();
    let mean = frame.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = frame.iter().map(|s| s - mean).collect();
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms < cfg.energy_floor {
        return None;
    }

    let corr: Vec<f64> = (lag_min..=lag_max)
        .map(|lag| {
            let m = n - lag;
            let (mut num, mut e0, mut e1) = (0.0, 0.0, 0.0);
            for i in 0..m {
                num += x[i] * x[i + lag];
                e0 += x[i] * x[i];
                e1 += x[i + lag] * x[i + lag];
            }
            let denom = (e0 * e1).sqrt();
            if denom > 0.0 { num / denom } else { 0.0 }
        })
        .collect();

    let peak = corr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak < cfg.voicing_threshold {
        return None;
    }
    // Smallest lag close to the global peak, then a local-maximum walk so
    // parabolic refinement sits on an actual peak.
    let mut idx = corr.iter().position(|&c| c >= 0.9 * peak).expect("peak exists");
    while idx + 1 < corr.len() && corr[idx + 1] > corr[idx] {
        idx += 1;
    }
    let mut lag = (lag_min + idx) as f64;
    if idx > 0 && idx + 1 < corr.len() {
        let (l, c, r) = (corr[idx - 1], corr[idx], corr[idx + 1]);
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            let delta = 0.5 * (l - r) / denom;
            lag += delta.clamp(-0.5, 0.5);
        }
    }
    Some(rate / lag)
}

/// Convenience wrapper: median f0 with default tracking parameters.
pub fn median_f0(clip: &AudioClip) -> Option<f64> {
    track_f0(clip, &PitchConfig::default()).median_f0()
}
