//! Seeded challenge generation: task selection, parameter sampling, and
//! instruction rendering.
//!
//! A master seed expands through a ChaCha8 stream into the pair (z0, z1);
//! z0 picks the task uniformly from the policy's eligible set, z1 picks the
//! task's parameters uniformly from its parameter space. Generation is a
//! pure function of (master_seed, policy).

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, ChallengePolicy, TaskSpec};
use crate::error::{Error, Result};

/// Percussive or aspirated body sounds a task may ask for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstKind {
    Clap,
    Knock,
    Cough,
    ClearThroat,
    TongueClick,
    Raspberry,
    BlowNoise,
    BlowOnMic,
    HorseLips,
    TouchMic,
    Type,
    Laugh,
}

impl BurstKind {
    fn verb(self) -> &'static str {
        match self {
            BurstKind::Clap => "clap",
            BurstKind::Knock => "knock on a hard surface",
            BurstKind::Cough => "cough",
            BurstKind::ClearThroat => "clear your throat",
            BurstKind::TongueClick => "click your tongue",
            BurstKind::Raspberry => "blow a raspberry",
            BurstKind::BlowNoise => "blow a noise",
            BurstKind::BlowOnMic => "blow on the microphone",
            BurstKind::HorseLips => "flutter your lips",
            BurstKind::TouchMic => "tap the microphone",
            BurstKind::Type => "type on a keyboard",
            BurstKind::Laugh => "laugh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModDimension {
    Speed,
    Volume,
}

/// Side audio mixed over speech in the combined tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overlay {
    Bursts { burst: BurstKind, count: u32 },
    Tones { notes: Vec<String> },
    Playback { item: String },
}

/// Concrete parameters of an issued challenge, one schema per task family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChallengeParams {
    /// Pitched contour to hum, sing, whistle, or hold (single note).
    Melody { tune: String, notes: Vec<String> },
    /// Falling-pitch vocal gesture (yawn).
    Glide { semitones_down: u32 },
    /// A run of percussive/aspirated bursts.
    Bursts { burst: BurstKind, count: u32 },
    /// A sentence read with an emotion, style, or accent.
    Expressive { style: String, sentence: String },
    /// A sentence read while varying speed or volume along a pattern.
    Modulated { dimension: ModDimension, pattern: String, sentence: String },
    /// A sentence spoken while side audio plays.
    Combined { sentence: String, overlay: Overlay },
    /// Device-playback item (not performable by a voice alone).
    External { item: String },
}

/// An issued challenge, ready for rendering into a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Challenge {
    /// Catalog acronym of the challenged task.
    pub task: String,
    pub params: ChallengeParams,
    pub instructions: String,
    pub seed_pair: (u64, u64),
    pub response_window_s: f64,
    pub tone_at_s: f64,
}

impl Challenge {
    pub fn task_spec(&self) -> Result<&'static TaskSpec> {
        catalog::task(&self.task)
    }
}

pub const DEFAULT_RESPONSE_WINDOW_S: f64 = 5.0;

/// Named tune contours for the pitched tasks.
pub const TUNES: [(&str, &[&str]); 8] = [
    ("ascending-triad", &["A3", "C4", "E4", "A4"]),
    ("descending-steps", &["E5", "C5", "A4", "G4"]),
    ("doorbell", &["E4", "C4", "E4", "C4"]),
    ("fanfare", &["C4", "C4", "G4", "E4"]),
    ("lullaby", &["E4", "D4", "C4", "D4", "E4"]),
    ("question", &["C4", "E4", "G4", "B4"]),
    ("siren", &["A4", "E4", "A4", "E4"]),
    ("anthem", &["G4", "G4", "A4", "F4", "C5"]),
];

/// Notes offered for the hold-a-note task.
pub const HOLD_NOTES: [&str; 6] = ["G3", "A3", "C4", "E4", "G4", "A4"];

/// Sentence bank for the spoken tasks.
pub const SENTENCES: [&str; 10] = [
    "the train leaves in ten minutes",
    "blue paint dries slowly in the shade",
    "my cousin collects old radios",
    "the bakery opens before sunrise",
    "seven boats crossed the quiet harbor",
    "she wrote the address on the envelope",
    "the garden needs water every morning",
    "we watched the storm from the porch",
    "his jacket hung behind the door",
    "the library keeps maps of the region",
];

pub const EMOTIONS: [&str; 4] = ["happy", "sad", "angry", "fearful"];
pub const SPEAKING_STYLES: [&str; 4] =
    ["a sports announcer", "a whispering librarian", "a robot", "a storyteller"];
pub const ACCENTS: [&str; 4] = ["British", "Southern", "French", "pirate"];
pub const SPEED_PATTERNS: [&str; 4] =
    ["slow then fast", "fast then slow", "alternating", "gradually accelerating"];
pub const VOLUME_PATTERNS: [&str; 4] =
    ["quiet then loud", "loud then quiet", "alternating", "gradually louder"];
pub const JINGLES: [&str; 4] = ["jingle-1", "jingle-2", "jingle-3", "jingle-4"];
pub const SOUND_EFFECTS: [&str; 4] = ["doorbell", "car-horn", "dog-bark", "phone-ring"];

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn pick_tune(rng: &mut ChaCha8Rng) -> (String, Vec<String>) {
    let (name, notes) = TUNES[rng.gen_range(0..TUNES.len())];
    (name.to_string(), notes.iter().map(|s| s.to_string()).collect())
}

/// Uniformly samples the parameter space of one task.
fn sample_params(acronym: &str, rng: &mut ChaCha8Rng) -> Result<ChallengeParams> {
    let sentence = |rng: &mut ChaCha8Rng| pick(rng, &SENTENCES).to_string();
    Ok(match acronym {
        "HT" | "S" | "W" => {
            let (tune, notes) = pick_tune(rng);
            ChallengeParams::Melody { tune, notes }
        }
        "HN" => {
            let note = pick(rng, &HOLD_NOTES).to_string();
            ChallengeParams::Melody { tune: "held-note".into(), notes: vec![note] }
        }
        "Y" => ChallengeParams::Glide { semitones_down: rng.gen_range(5..=12) },
        "L" => ChallengeParams::Bursts { burst: BurstKind::Laugh, count: rng.gen_range(3..=6) },
        "CT" => {
            ChallengeParams::Bursts { burst: BurstKind::ClearThroat, count: rng.gen_range(1..=2) }
        }
        "Cl" => ChallengeParams::Bursts { burst: BurstKind::Clap, count: rng.gen_range(2..=5) },
        "K" => ChallengeParams::Bursts { burst: BurstKind::Knock, count: rng.gen_range(2..=5) },
        "Co" => ChallengeParams::Bursts { burst: BurstKind::Cough, count: rng.gen_range(2..=4) },
        "Clk" => {
            ChallengeParams::Bursts { burst: BurstKind::TongueClick, count: rng.gen_range(3..=6) }
        }
        "Ra" => {
            ChallengeParams::Bursts { burst: BurstKind::Raspberry, count: rng.gen_range(1..=3) }
        }
        "BN" => {
            ChallengeParams::Bursts { burst: BurstKind::BlowNoise, count: rng.gen_range(2..=4) }
        }
        "BM" => {
            ChallengeParams::Bursts { burst: BurstKind::BlowOnMic, count: rng.gen_range(2..=4) }
        }
        "HL" => {
            ChallengeParams::Bursts { burst: BurstKind::HorseLips, count: rng.gen_range(1..=3) }
        }
        "TM" => {
            ChallengeParams::Bursts { burst: BurstKind::TouchMic, count: rng.gen_range(3..=6) }
        }
        "T" => ChallengeParams::Bursts { burst: BurstKind::Type, count: rng.gen_range(8..=15) },
        "SE" => ChallengeParams::Expressive {
            style: pick(rng, &EMOTIONS).to_string(),
            sentence: sentence(rng),
        },
        "MS" => ChallengeParams::Expressive {
            style: pick(rng, &SPEAKING_STYLES).to_string(),
            sentence: sentence(rng),
        },
        "R" => ChallengeParams::Expressive {
            style: pick(rng, &ACCENTS).to_string(),
            sentence: sentence(rng),
        },
        "VS" => ChallengeParams::Modulated {
            dimension: ModDimension::Speed,
            pattern: pick(rng, &SPEED_PATTERNS).to_string(),
            sentence: sentence(rng),
        },
        "V" => ChallengeParams::Modulated {
            dimension: ModDimension::Volume,
            pattern: pick(rng, &VOLUME_PATTERNS).to_string(),
            sentence: sentence(rng),
        },
        "T&C" => ChallengeParams::Combined {
            sentence: sentence(rng),
            overlay: Overlay::Bursts { burst: BurstKind::Clap, count: rng.gen_range(2..=5) },
        },
        "T&K" => ChallengeParams::Combined {
            sentence: sentence(rng),
            overlay: Overlay::Bursts { burst: BurstKind::Knock, count: rng.gen_range(2..=5) },
        },
        "TT" => {
            let (_, notes) = pick_tune(rng);
            ChallengeParams::Combined {
                sentence: sentence(rng),
                overlay: Overlay::Tones { notes: notes[..3.min(notes.len())].to_vec() },
            }
        }
        "P" => ChallengeParams::Combined {
            sentence: sentence(rng),
            overlay: Overlay::Playback { item: pick(rng, &JINGLES).to_string() },
        },
        "PA" => ChallengeParams::External { item: pick(rng, &JINGLES).to_string() },
        "SFX" => ChallengeParams::External { item: pick(rng, &SOUND_EFFECTS).to_string() },
        other => return Err(Error::UnknownTask(other.to_string())),
    })
}

/// True when the parameter shape (and value ranges) match the task schema.
pub fn params_valid_for(acronym: &str, params: &ChallengeParams) -> bool {
    match (acronym, params) {
        ("HT" | "S" | "W", ChallengeParams::Melody { notes, .. }) => {
            notes.len() >= 3 && notes.iter().all(|n| note_to_hz(n).is_ok())
        }
        ("HN", ChallengeParams::Melody { notes, .. }) => {
            notes.len() == 1 && note_to_hz(&notes[0]).is_ok()
        }
        ("Y", ChallengeParams::Glide { semitones_down }) => (5..=12).contains(semitones_down),
        ("L", ChallengeParams::Bursts { burst: BurstKind::Laugh, count }) => {
            (3..=6).contains(count)
        }
        ("CT", ChallengeParams::Bursts { burst: BurstKind::ClearThroat, count }) => {
            (1..=2).contains(count)
        }
        ("Cl", ChallengeParams::Bursts { burst: BurstKind::Clap, count })
        | ("K", ChallengeParams::Bursts { burst: BurstKind::Knock, count }) => {
            (2..=5).contains(count)
        }
        ("Co", ChallengeParams::Bursts { burst: BurstKind::Cough, count }) => {
            (2..=4).contains(count)
        }
        ("Clk", ChallengeParams::Bursts { burst: BurstKind::TongueClick, count })
        | ("TM", ChallengeParams::Bursts { burst: BurstKind::TouchMic, count }) => {
            (3..=6).contains(count)
        }
        ("Ra", ChallengeParams::Bursts { burst: BurstKind::Raspberry, count })
        | ("HL", ChallengeParams::Bursts { burst: BurstKind::HorseLips, count }) => {
            (1..=3).contains(count)
        }
        ("BN", ChallengeParams::Bursts { burst: BurstKind::BlowNoise, count })
        | ("BM", ChallengeParams::Bursts { burst: BurstKind::BlowOnMic, count }) => {
            (2..=4).contains(count)
        }
        ("T", ChallengeParams::Bursts { burst: BurstKind::Type, count }) => {
            (8..=15).contains(count)
        }
        ("SE" | "MS" | "R", ChallengeParams::Expressive { style, sentence }) => {
            !style.is_empty() && SENTENCES.contains(&sentence.as_str())
        }
        ("VS", ChallengeParams::Modulated { dimension: ModDimension::Speed, .. }) => true,
        ("V", ChallengeParams::Modulated { dimension: ModDimension::Volume, .. }) => true,
        ("T&C", ChallengeParams::Combined { overlay: Overlay::Bursts { burst, .. }, .. }) => {
            *burst == BurstKind::Clap
        }
        ("T&K", ChallengeParams::Combined { overlay: Overlay::Bursts { burst, .. }, .. }) => {
            *burst == BurstKind::Knock
        }
        ("TT", ChallengeParams::Combined { overlay: Overlay::Tones { notes }, .. }) => {
            !notes.is_empty()
        }
        ("P", ChallengeParams::Combined { overlay: Overlay::Playback { .. }, .. }) => true,
        ("PA" | "SFX", ChallengeParams::External { .. }) => true,
        _ => false,
    }
}

fn render_instructions(spec: &TaskSpec, params: &ChallengeParams) -> String {
    match params {
        ChallengeParams::Melody { notes, .. } => {
            let tune = notes.join(" ");
            match spec.acronym.as_str() {
                "S" => format!("After the tone, sing this tune on 'la': {tune}."),
                "W" => format!("After the tone, whistle this tune: {tune}."),
                "HN" => format!(
                    "After the tone, hold the note {tune} steadily for a few seconds."
                ),
                _ => format!("After the tone, hum this tune: {tune}."),
            }
        }
        ChallengeParams::Glide { .. } => {
            "After the tone, yawn audibly, letting your pitch fall.".to_string()
        }
        ChallengeParams::Bursts { burst, count } => {
            format!("After the tone, {} {count} times.", burst.verb())
        }
        ChallengeParams::Expressive { style, sentence } => match spec.acronym.as_str() {
            "SE" => format!("After the tone, say \"{sentence}\" in a {style} voice."),
            "R" => format!("After the tone, say \"{sentence}\" in a {style} accent."),
            _ => format!("After the tone, say \"{sentence}\" like {style}."),
        },
        ChallengeParams::Modulated { dimension, pattern, sentence } => {
            let what = match dimension {
                ModDimension::Speed => "speed",
                ModDimension::Volume => "volume",
            };
            format!("After the tone, say \"{sentence}\", varying your {what}: {pattern}.")
        }
        ChallengeParams::Combined { sentence, overlay } => match overlay {
            Overlay::Bursts { burst, count } => format!(
                "After the tone, say \"{sentence}\" while you {} {count} times.",
                burst.verb()
            ),
            Overlay::Tones { notes } => format!(
                "After the tone, say \"{sentence}\" while tones {} play.",
                notes.join(" ")
            ),
            Overlay::Playback { item } => format!(
                "After the tone, say \"{sentence}\" while playing {item} from your device."
            ),
        },
        ChallengeParams::External { item } => {
            format!("After the tone, play {item} from your device into the microphone.")
        }
    }
}

/// Rough spoken duration of the instruction text; the start tone is placed
/// at its end.
fn instruction_duration_s(text: &str) -> f64 {
    let words = text.split_whitespace().count();
    0.5 + 0.33 * words as f64
}

/// Generates the challenge determined by (master_seed, policy).
pub fn generate_challenge(master_seed: u64, policy: &ChallengePolicy) -> Result<Challenge> {
    let eligible = catalog::eligible_tasks(policy);
    if eligible.is_empty() {
        return Err(Error::EmptyEligibleSet);
    }
    let mut seed_rng = ChaCha8Rng::seed_from_u64(master_seed);
    let z0 = seed_rng.next_u64();
    let z1 = seed_rng.next_u64();

    let spec = eligible[ChaCha8Rng::seed_from_u64(z0).gen_range(0..eligible.len())];
    let params = sample_params(&spec.acronym, &mut ChaCha8Rng::seed_from_u64(z1))?;
    let instructions = render_instructions(spec, &params);
    let tone_at_s = instruction_duration_s(&instructions);
    Ok(Challenge {
        task: spec.acronym.clone(),
        params,
        instructions,
        seed_pair: (z0, z1),
        response_window_s: DEFAULT_RESPONSE_WINDOW_S,
        tone_at_s,
    })
}

/// Converts a note name like "A4" or "C#3" to Hz (equal temperament,
/// A4 = 440).
pub fn note_to_hz(name: &str) -> Result<f64> {
    let bytes = name.as_bytes();
    if bytes.len() < 2 {
        return Err(Error::InvalidArgument(format!("bad note name {name:?}")));
    }
    let base = match bytes[0].to_ascii_uppercase() {
        b'C' => 0,
        b'D' => 2,
        b'E' => 4,
        b'F' => 5,
        b'G' => 7,
        b'A' => 9,
        b'B' => 11,
        _ => return Err(Error::InvalidArgument(format!("bad note letter in {name:?}"))),
    };
    let (sharp, oct_idx) = if bytes[1] == b'#' { (1, 2) } else { (0, 1) };
    let octave: i32 = name[oct_idx..]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad octave in {name:?}")))?;
    let midi = (octave + 1) * 12 + base + sharp;
    Ok(440.0 * 2f64.powf((midi as f64 - 69.0) / 12.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::ChallengePolicy;

    #[test]
    fn same_seed_same_challenge() {
        let policy = ChallengePolicy::permissive();
        let a = generate_challenge(1234, &policy).unwrap();
        let b = generate_challenge(1234, &policy).unwrap();
        assert_eq!(a, b);
        let c = generate_challenge(1235, &policy).unwrap();
        assert!(a != c || a.seed_pair != c.seed_pair);
    }

    #[test]
    fn singleton_policy_always_picks_that_task() {
        let policy = ChallengePolicy::restricted_to(["S"]);
        for seed in 0..50 {
            let ch = generate_challenge(seed, &policy).unwrap();
            assert_eq!(ch.task, "S");
        }
    }

    #[test]
    fn empty_policy_is_an_error() {
        let policy = ChallengePolicy::restricted_to(Vec::<String>::new());
        match generate_challenge(0, &policy) {
            Err(Error::EmptyEligibleSet) => {}
            other => panic!("expected EmptyEligibleSet, got {other:?}"),
        }
    }

    #[test]
    fn task_draw_is_uniform_over_eligible_set() {
        // Nine-task policy; 10k draws; each count within 5 sigma of the
        // binomial expectation n/9.
        let tasks = ["R", "Cl", "Co", "SE", "HT", "P", "S", "VS", "V"];
        let policy = ChallengePolicy::restricted_to(tasks);
        let n = 10_000;
        let mut counts = std::collections::BTreeMap::new();
        for seed in 0..n {
            let ch = generate_challenge(seed, &policy).unwrap();
            *counts.entry(ch.task).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 9);
        let p = 1.0 / 9.0;
        let expected = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for (task, count) in counts {
            assert!(
                (count as f64 - expected).abs() <= 5.0 * sigma,
                "{task}: {count} vs {expected} +- {}",
                5.0 * sigma
            );
        }
    }

    #[test]
    fn generated_params_validate_against_schema() {
        let policy = ChallengePolicy::permissive();
        for seed in 0..500 {
            let ch = generate_challenge(seed, &policy).unwrap();
            assert!(
                params_valid_for(&ch.task, &ch.params),
                "seed {seed}: {} got {:?}",
                ch.task,
                ch.params
            );
            assert!(ch.response_window_s > 0.0);
            assert!(ch.tone_at_s > 0.0);
            assert!(ch.instructions.contains("tone"));
        }
    }

    #[test]
    fn mismatched_schema_rejected() {
        let p = ChallengeParams::Bursts { burst: BurstKind::Clap, count: 3 };
        assert!(params_valid_for("Cl", &p));
        assert!(!params_valid_for("HT", &p));
        assert!(!params_valid_for("Co", &p)); // wrong burst kind
        let too_many = ChallengeParams::Bursts { burst: BurstKind::Clap, count: 9 };
        assert!(!params_valid_for("Cl", &too_many));
    }

    #[test]
    fn note_conversion_hits_standard_pitches() {
        assert!((note_to_hz("A4").unwrap() - 440.0).abs() < 1e-9);
        assert!((note_to_hz("C4").unwrap() - 261.6256).abs() < 1e-3);
        assert!((note_to_hz("E5").unwrap() - 659.2551).abs() < 1e-3);
        assert!((note_to_hz("C#4").unwrap() - 277.1826).abs() < 1e-3);
        assert!(note_to_hz("H2").is_err());
        assert!(note_to_hz("A").is_err());
    }

    #[test]
    fn challenge_serializes_with_documented_fields() {
        let ch = generate_challenge(7, &ChallengePolicy::permissive()).unwrap();
        let json = serde_json::to_string(&ch).unwrap();
        for key in ["task", "params", "instructions", "tone_at_s", "response_window_s"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: Challenge = serde_json::from_str(&json).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn all_28_tasks_have_sampleable_params() {
        for spec in crate::catalog::catalog() {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let params = sample_params(&spec.acronym, &mut rng).unwrap();
            assert!(
                params_valid_for(&spec.acronym, &params),
                "{}: {params:?}",
                spec.acronym
            );
        }
    }
}
