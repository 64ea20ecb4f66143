//! The challenge task catalog: 28 audio tasks with per-constraint
//! difficulty ratings, plus policy-driven filtering.
//!
//! The table ships as a versioned JSON resource compiled into the binary.
//! Raspberry is listed under the acronym "Ra" because "R" already names
//! Repeat Accent.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-level difficulty/usability rating. Ordered so that
/// `low < medium < high` supports "at least this hard" filtering.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Rating {
    Low,
    Medium,
    High,
}

/// Structural weakness of a task against an advanced attacker.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Weakness {
    /// No known evasion: the response must come through the voice channel.
    None,
    /// The task carries no voice, so the attacker can mute the converter
    /// and perform it honestly; only the identity check notices.
    Bypass,
    /// The task mixes speech with side audio; the attacker can convert the
    /// speech and overlay clean side audio.
    Mix,
}

/// How hard a task is for the adversary on each verified constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hardness {
    pub realism: Rating,
    pub identity: Rating,
    pub task: Rating,
    pub time: Rating,
}

/// One catalog row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub acronym: String,
    pub name: String,
    pub usability: Rating,
    pub hardness: Hardness,
    pub weakness: Weakness,
    pub effectiveness_naive: Rating,
    pub effectiveness_advanced: Rating,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatalogFile {
    version: u32,
    #[serde(default)]
    comment: String,
    tasks: Vec<TaskSpec>,
}

static CATALOG: LazyLock<Vec<TaskSpec>> = LazyLock::new(|| {
    let file: CatalogFile = serde_json::from_str(include_str!("resources/catalog.json"))
        .expect("embedded catalog parses");
    assert_eq!(file.version, 1, "unexpected catalog version");
    let mut seen = BTreeSet::new();
    for t in &file.tasks {
        assert!(seen.insert(t.acronym.clone()), "duplicate acronym {}", t.acronym);
    }
    file.tasks
});

/// All catalog rows in table order.
pub fn catalog() -> &'static [TaskSpec] {
    &CATALOG
}

/// Looks a task up by acronym.
pub fn task(acronym: &str) -> Result<&'static TaskSpec> {
    CATALOG
        .iter()
        .find(|t| t.acronym == acronym)
        .ok_or_else(|| Error::UnknownTask(acronym.to_string()))
}

/// Filter describing which tasks a deployment is willing to issue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengePolicy {
    pub min_usability: Rating,
    pub min_hardness: Hardness,
    pub min_effectiveness_naive: Rating,
    pub min_effectiveness_advanced: Rating,
    /// Weaknesses the deployment tolerates.
    pub allowed_weaknesses: BTreeSet<Weakness>,
    /// When the identity verifier is off, bypass tasks are excluded even if
    /// `allowed_weaknesses` tolerates them: nothing else would notice a
    /// caller muting the converter and performing the task honestly.
    pub identity_verifier_enabled: bool,
    /// Optional explicit restriction to a set of acronyms.
    pub tasks: Option<BTreeSet<String>>,
}

impl Default for ChallengePolicy {
    fn default() -> Self {
        Self {
            min_usability: Rating::Medium,
            min_hardness: Hardness {
                realism: Rating::Low,
                identity: Rating::Low,
                task: Rating::Low,
                time: Rating::Low,
            },
            min_effectiveness_naive: Rating::Low,
            min_effectiveness_advanced: Rating::Low,
            allowed_weaknesses: [Weakness::None, Weakness::Bypass, Weakness::Mix].into(),
            identity_verifier_enabled: true,
            tasks: None,
        }
    }
}

impl ChallengePolicy {
    /// The fully permissive policy: every catalog row is eligible.
    pub fn permissive() -> Self {
        Self { min_usability: Rating::Low, ..Self::default() }
    }

    /// Restricts to an explicit task set (other filters still apply).
    pub fn restricted_to<I, S>(acronyms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            tasks: Some(acronyms.into_iter().map(Into::into).collect()),
            min_usability: Rating::Low,
            ..Self::default()
        }
    }

    fn admits(&self, t: &TaskSpec) -> bool {
        if let Some(allow) = &self.tasks {
            if !allow.contains(&t.acronym) {
                return false;
            }
        }
        if !self.allowed_weaknesses.contains(&t.weakness) {
            return false;
        }
        if !self.identity_verifier_enabled && t.weakness == Weakness::Bypass {
            return false;
        }
        t.usability >= self.min_usability
            && t.hardness.realism >= self.min_hardness.realism
            && t.hardness.identity >= self.min_hardness.identity
            && t.hardness.task >= self.min_hardness.task
            && t.hardness.time >= self.min_hardness.time
            && t.effectiveness_naive >= self.min_effectiveness_naive
            && t.effectiveness_advanced >= self.min_effectiveness_advanced
    }
}

/// Catalog rows admitted by a policy, in table order.
pub fn eligible_tasks(policy: &ChallengePolicy) -> Vec<&'static TaskSpec> {
    CATALOG.iter().filter(|t| policy.admits(t)).collect()
}
