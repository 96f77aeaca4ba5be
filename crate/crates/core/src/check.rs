//! Outcome of a verification.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    VerifiedExhaustive,
    VerifiedSampled,
    Inconclusive,
    Failed,
}

impl Status {
    pub fn is_failed(self) -> bool {
        self == Status::Failed
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::VerifiedExhaustive
        } else {
            Status::Failed
        }
    }

    /// The weaker of two outcomes.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Failed, _) | (_, Failed) => Failed,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (VerifiedSampled, _) | (_, VerifiedSampled) => VerifiedSampled,
            _ => VerifiedExhaustive,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::VerifiedExhaustive => "verified-exhaustive",
            Status::VerifiedSampled => "verified-sampled",
            Status::Inconclusive => "inconclusive",
            Status::Failed => "failed",
        };
        f.write_str(s)
    }
}
