//! Active challenge-response screening of live voice calls against
//! real-time voice-conversion deepfakes.
//!
//! A screening session interrupts the call with a short spoken or
//! performative challenge drawn from a task catalog, records the caller's
//! response, and runs four verdicts over it: response latency, acoustic
//! realism, speaker identity against the claimed enrollment, and evidence
//! that the challenged task was actually performed. A caller passes only
//! if every verdict clears its calibrated threshold. The design exploits
//! the fact that live voice converters must respond immediately and
//! in-stream, so they cannot pause to re-synthesize unusual vocal feats
//! (held notes, pitch slides, emotional reads) without either lagging,
//! breaking realism, or leaking the operator's own voice.
//!
//! The crate is organized as:
//!
//! * [`audio`]: clip container, WAV I/O, STFT/MFCC/LFCC features, pitch
//!   tracking, telephone band-pass.
//! * [`stats`]: diagonal-covariance GMMs, local outlier factor, and ROC
//!   metrics used for calibration and evaluation.
//! * [`catalog`]: the challenge task catalog with per-task difficulty
//!   ratings and policy-driven sampling.
//! * [`verify`]: the four response verifiers and threshold calibration.
//! * [`protocol`]: the session state machine, caller channel abstraction,
//!   and replayable transcripts.
//! * [`sim`]: synthetic voices, a surrogate real-time voice converter,
//!   caller agents, and corpus construction for end-to-end evaluation.
//! * [`harness`]: scripted experiments and mean-opinion-score analysis.

pub mod audio;
pub mod catalog;
pub mod challenge;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod sim;
pub mod stats;
pub mod verify;

pub use error::{Error, ErrorCategory, Result};
