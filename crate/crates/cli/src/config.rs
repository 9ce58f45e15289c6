use std::path::{Path, PathBuf};

use nestedwalk::analytics::LemmaId;
use nestedwalk::local_time::LocalTimeKind;
use nestedwalk::twist::DEFAULT_STEP_CAP;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub pmf_max_n: u32,
    pub identity_max_n: u32,
    pub excursion_depth: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            pmf_max_n: 16,
            identity_max_n: 12,
            excursion_depth: 20,
        }
    }
}

/// Every key has a default, so an empty document is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Highest level built; `verify` checks level `m_max - reference_offset`
    /// against it and `converge` studies `m_min..m_max`.
    pub m_max: u32,
    pub m_min: u32,
    #[serde(rename = "K")]
    pub horizon: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Per-command default when absent.
    pub replications: Option<usize>,
    pub lemmas: Vec<LemmaId>,
    pub kinds: Vec<LocalTimeKind>,
    pub reference_offset: u32,
    /// Bounds are enforced only when `K 4^m` reaches this value.
    pub floor: f64,
    pub confidence: f64,
    pub step_cap: usize,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub oracle: OracleConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            m_max: 8,
            m_min: 4,
            horizon: 1.0,
            c: 2.0,
            replications: None,
            lemmas: LemmaId::ALL.to_vec(),
            kinds: LocalTimeKind::ALL.to_vec(),
            reference_offset: 3,
            floor: 1024.0,
            confidence: 0.95,
            step_cap: DEFAULT_STEP_CAP,
            out: PathBuf::from("out"),
            threads: None,
            oracle: OracleConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn replications_or(&self, default: usize) -> usize {
        self.replications.unwrap_or(default)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("K must be positive and finite, got {}", self.horizon));
        }
        if !(self.c > 1.0 && self.c.is_finite()) {
            return bad(format!("C must exceed 1, got {}", self.c));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad(format!("confidence must lie in (0, 1), got {}", self.confidence));
        }
        if self.m_max > 15 {
            return bad(format!("m_max {} exceeds the supported 15", self.m_max));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if self.replications == Some(0) {
            return bad("replications must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig {
            lemmas: vec![LemmaId::Lemma6Up],
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"lemma6up\"") && text.contains("\"K\""));
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_and_lemmas_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"mmax": 3}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"lemmas": ["lemma9"]}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.c = 1.0;
        assert!(c.validate().is_err());
        c = ExperimentConfig { horizon: -1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
