//! Experiment configuration, read from JSON and overridden by flags.

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::registry::RecognizerName;
use crate::classical::{FreivaldsParams, SamplingMode};
use crate::error::{Error, Result};
use crate::model::{SubsetOracle, TapeMode, Word};
use crate::oracles::LanguageId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

/// What the experiment measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    /// Runs a recognizer on inputs and compares with the oracle.
    Recognize {
        recognizer: RecognizerName,
        #[serde(default)]
        inputs: Vec<String>,
        /// Adds all members up to this bound.
        #[serde(default)]
        enumerate: Option<u64>,
        /// Adds up to this many single-edit non-members per member.
        #[serde(default)]
        mutants: Option<usize>,
    },
    /// Exact error of reading bit `k` from `64^k` coin tosses, plus a Monte
    /// Carlo check when `trials > 0`.
    Lemma1 { k: u32 },
    /// Exact decisive-round bias of the block-equality test, plus a Monte
    /// Carlo check of one decisive round per trial.
    Freivalds { len_a: u32, len_b: u32 },
    /// Exact outcome probabilities of the digit-reading rotation.
    Adh { j: u64 },
}

fn default_trials() -> u64 {
    10_000
}
fn default_repetitions() -> u32 {
    5
}
fn default_confidence() -> f64 {
    0.99
}
fn default_l() -> String {
    "1/64".into()
}
fn default_freivalds() -> FreivaldsParams {
    FreivaldsParams {
        mode: SamplingMode::Conditioned,
        ..Default::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    /// Checked against the recognizer's language when present.
    #[serde(default)]
    pub language: Option<LanguageId>,
    /// Oracle prefix as a bit string such as `"101"`.
    #[serde(default)]
    pub prefix: Option<String>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Majority repetitions `r` of the probabilistic recognizers.
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default = "default_freivalds")]
    pub freivalds: FreivaldsParams,
    /// Coefficient of the quantum step matrices, as a rational.
    #[serde(default = "default_l")]
    pub l: String,
    /// Also sample restart rounds of the quantum recognizers.
    #[serde(default)]
    pub sample_rounds: bool,
    #[serde(default)]
    pub tape: TapeMode,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    /// Runs with more steps count as inconclusive.
    #[serde(default)]
    pub max_steps: Option<u64>,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            language: None,
            prefix: None,
            trials: default_trials(),
            seed: 0,
            repetitions: default_repetitions(),
            freivalds: default_freivalds(),
            l: default_l(),
            sample_rounds: false,
            tape: TapeMode::default(),
            confidence: default_confidence(),
            max_steps: None,
            format: ReportFormat::default(),
            out: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn oracle(&self) -> Result<Option<SubsetOracle>> {
        self.prefix
            .as_deref()
            .map(|p| p.parse().map_err(|e: Error| Error::Config(e.to_string())))
            .transpose()
    }

    pub fn l_value(&self) -> Result<BigRational> {
        let (n, d) = self.l.split_once('/').unwrap_or((&self.l, "1"));
        let parse = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Config(format!("l = '{}' is not a rational", self.l)))
        };
        let d = parse(d)?;
        if d == BigInt::from(0) {
            return Err(Error::Config("l has a zero denominator".into()));
        }
        Ok(BigRational::new(parse(n)?, d))
    }

    /// Checks everything that does not need running.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad(format!("confidence {} outside (0, 1)", self.confidence));
        }
        if self.repetitions.is_multiple_of(2) {
            return bad(format!("repetitions must be odd, got {}", self.repetitions));
        }
        let oracle = self.oracle()?;
        match &self.experiment {
            Experiment::Recognize {
                recognizer,
                inputs,
                enumerate,
                ..
            } => {
                if self.trials == 0 && !recognizer.is_exact() {
                    return bad("trials must be at least 1".into());
                }
                if let Some(lang) = self.language {
                    if lang != recognizer.language() {
                        return bad(format!(
                            "{} recognizes {}, not {lang}",
                            recognizer.name(),
                            recognizer.language()
                        ));
                    }
                }
                if recognizer.language().needs_oracle() && oracle.is_none() {
                    return bad(format!("{} needs an oracle prefix", recognizer.name()));
                }
                if inputs.is_empty() && enumerate.is_none() {
                    return bad("no inputs and no enumeration bound".into());
                }
                for s in inputs {
                    parse_input(s, recognizer.language())?;
                }
                if recognizer.is_quantum() {
                    self.l_value()?;
                }
            }
            Experiment::Lemma1 { k } => {
                if oracle.is_none() {
                    return bad("lemma1 needs an oracle prefix".into());
                }
                if *k == 0 {
                    return bad("k must be positive".into());
                }
            }
            Experiment::Freivalds { len_a, len_b } => {
                if *len_a == 0 || *len_b == 0 || self.trials == 0 {
                    return bad("block lengths and trials must be positive".into());
                }
            }
            Experiment::Adh { j } => {
                if oracle.is_none() || *j == 0 {
                    return bad("adh needs an oracle prefix and j ≥ 1".into());
                }
            }
        }
        Ok(())
    }
}

/// Parses an input literal: an RLE string such as `"0^64 1"`, or `n=<N>`
/// for the unary word of length `N` over the language's alphabet.
pub fn parse_input(s: &str, lang: LanguageId) -> Result<Word> {
    if let Some(n) = s.trim().strip_prefix("n=") {
        let symbol = lang
            .unary_symbol()
            .ok_or_else(|| Error::Config(format!("'{s}': {lang} is not unary")))?;
        let n = n
            .trim()
            .parse::<num_bigint::BigUint>()
            .map_err(|_| Error::Config(format!("'{s}': bad length")))?;
        return Ok(Word::unary(symbol, n));
    }
    s.parse().map_err(|e: Error| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind": "recognize", "recognizer": "dima-dca2", "inputs": ["0 1 0^2"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.trials, 10_000);
        assert_eq!(cfg.confidence, 0.99);
        assert_eq!(cfg.freivalds.mode, SamplingMode::Conditioned);
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::new(Experiment::Recognize {
            recognizer: RecognizerName::DimaIPca2,
            inputs: vec!["0".into()],
            enumerate: None,
            mutants: None,
        });
        assert!(cfg.validate().is_err(), "missing prefix");
        cfg.prefix = Some("1".into());
        cfg.validate().unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.repetitions = 4;
        assert!(cfg.validate().is_err());
        cfg.repetitions = 5;
        cfg.language = Some(LanguageId::Dima);
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_json("{\"kind\": \"nope\"}").is_err());
    }

    #[test]
    fn unary_inputs() {
        let w = parse_input("n=64", LanguageId::Upower64).unwrap();
        assert_eq!(w, Word::unary(b'0', 64u32));
        assert!(parse_input("n=3", LanguageId::Dima).is_err());
        let l = ExperimentConfig::new(Experiment::Adh { j: 1 })
            .l_value()
            .unwrap();
        assert_eq!(l, BigRational::new(1.into(), 64.into()));
    }
}
