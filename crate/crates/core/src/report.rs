//! JSON reports: one record per checked claim, plus the configuration that
//! produced them.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::check::Status;
use crate::error::Result;

pub const SCHEMA: &str = "branchdiam-report/1";

/// Default seed for sampled checks.
pub const DEFAULT_SEED: u64 = 20240521;

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub group: Option<String>,
    pub level: Option<u32>,
    pub depth: Option<u32>,
    pub gens: Vec<String>,
    pub max_elements: usize,
    pub max_leaves: u64,
    pub max_iterations: u64,
    pub seed: u64,
    /// Subcommand-specific settings, in a fixed order.
    pub extra: Vec<(String, String)>,
}

impl RunConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: String,
    /// The statement being checked.
    pub anchor: String,
    pub status: Status,
    /// Measured values; for failures, the counterexample.
    pub witness: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl ClaimReport {
    pub fn new(claim: impl Into<String>, anchor: impl Into<String>, status: Status, witness: Value) -> Self {
        ClaimReport {
            claim: claim.into(),
            anchor: anchor.into(),
            status,
            witness,
            wall_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub claims: Vec<ClaimReport>,
    /// Free-form output of the subcommand.
    pub result: Value,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            config,
            claims: Vec::new(),
            result: Value::Null,
        }
    }

    pub fn failed(&self) -> bool {
        self.claims.iter().any(|c| c.status.is_failed())
    }

    pub fn status(&self) -> Status {
        self.claims.iter().fold(Status::VerifiedExhaustive, |s, c| s.and(c.status))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Collects claims, timing each one when asked to.
pub struct Recorder {
    pub claims: Vec<ClaimReport>,
    timed: bool,
}

impl Recorder {
    pub fn new(timed: bool) -> Self {
        Recorder {
            claims: Vec::new(),
            timed,
        }
    }

    /// Runs `f`; an error becomes a failed claim carrying the message.
    pub fn claim(&mut self, claim: &str, anchor: &str, f: impl FnOnce() -> Result<(Status, Value)>) {
        let t = Instant::now();
        let (status, witness) = match f() {
            Ok(r) => r,
            Err(e) => (Status::Failed, serde_json::json!({ "error": e.to_string() })),
        };
        let mut c = ClaimReport::new(claim, anchor, status, witness);
        if self.timed {
            c.wall_ms = Some(t.elapsed().as_millis() as u64);
        }
        self.claims.push(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> RunConfig {
        RunConfig {
            command: "constants".into(),
            group: None,
            level: None,
            depth: None,
            gens: vec![],
            max_elements: 1 << 24,
            max_leaves: 1 << 24,
            max_iterations: 10_000_000,
            seed: DEFAULT_SEED,
            extra: vec![("cp".into(), "3".into())],
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config();
        let mut b = config();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn errors_become_failures() {
        let mut r = Recorder::new(false);
        r.claim("x", "y", || Err(crate::Error::Precondition("nope".into())));
        r.claim("z", "w", || Ok((Status::VerifiedSampled, Value::Null)));
        assert_eq!(r.claims[0].status, Status::Failed);
        assert!(r.claims[0].witness["error"].as_str().unwrap().contains("nope"));
        let mut rep = Report::new(config());
        rep.claims = r.claims;
        assert!(rep.failed());
        assert!(!rep.to_json().contains("wall_ms"));
    }
}
