//! Telephone-channel band-pass: 300 Hz - 3 kHz, zero phase.
//!
//! Realized as a 6th-order Butterworth high-pass at 300 Hz cascaded with a
//! 6th-order Butterworth low-pass at 3 kHz, each run forward and then
//! backward. The double pass squares the magnitude response (>= 40 dB of
//! stopband rejection one octave out) and cancels phase, so onset timing
//! anchors survive filtering.

use super::AudioClip;
use crate::error::{Error, Result};

pub const PHONE_LOW_HZ: f64 = 300.0;
pub const PHONE_HIGH_HZ: f64 = 3_000.0;

/// Q factors of the three second-order sections of a 6th-order Butterworth.
const BUTTERWORTH6_Q: [f64; 3] = [0.517_638_090_205, 0.707_106_781_187, 1.931_851_652_578];

/// One biquad section, direct form I, zero initial conditions.
#[derive(Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    fn lowpass(cutoff_hz: f64, q: f64, rate: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * cutoff_hz / rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 - cos) / 2.0 / a0,
            b1: (1.0 - cos) / a0,
            b2: (1.0 - cos) / 2.0 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn highpass(cutoff_hz: f64, q: f64, rate: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * cutoff_hz / rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 + cos) / 2.0 / a0,
            b1: -(1.0 + cos) / a0,
            b2: (1.0 + cos) / 2.0 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn run(&self, x: &[f64]) -> Vec<f64> {
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        x.iter()
            .map(|&x0| {
                let y0 = self.b0 * x0 + self.b1 * x1 + self.b2 * x2 - self.a1 * y1 - self.a2 * y2;
                x2 = x1;
                x1 = x0;
                y2 = y1;
                y1 = y0;
                y0
            })
            .collect()
    }
}

fn forward_backward(sections: &[Biquad], input: &[f64]) -> Vec<f64> {
    let mut y = input.to_vec();
    for s in sections {
        y = s.run(&y);
    }
    y.reverse();
    for s in sections {
        y = s.run(&y);
    }
    y.reverse();
    y
}

/// Band-limits a clip to the telephone band. Output length equals input
/// length; requires at least an 8 kHz rate so the upper edge sits below
/// Nyquist.
pub fn phone_filter(clip: &AudioClip) -> Result<AudioClip> {
    if clip.sample_rate() < 8_000 {
        return Err(Error::SampleRateTooLow(clip.sample_rate(), 8_000));
    }
    let rate = clip.sample_rate() as f64;
    let sections: Vec<Biquad> = BUTTERWORTH6_Q
        .iter()
        .map(|&q| Biquad::highpass(PHONE_LOW_HZ, q, rate))
        .chain(BUTTERWORTH6_Q.iter().map(|&q| Biquad::lowpass(PHONE_HIGH_HZ, q, rate)))
        .collect();
    let samples = forward_backward(&sections, clip.samples());
    AudioClip::new(samples, clip.sample_rate())
}
