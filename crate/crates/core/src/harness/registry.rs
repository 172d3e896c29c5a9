//! Recognizers selectable by name.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::classical::am75::am75p_member;
use crate::classical::{
    am75_member, dca2_dima, f_of_n, pca2_dima_i, pca_sweeping_dima_i, ptm1_upower64_i, ptm_am75p_i,
    ptm_log_recognizer, upower64_member, FreivaldsParams, InnerRecognizer,
};
use crate::error::{Error, Result};
use crate::model::{Decision, RandomSource, RunStats, SubsetOracle, TapeMode, Word};
use crate::oracles::LanguageId;
use crate::quantum::{
    qcca_upower8_i, rtqcfa_overall, rtqcfa_power_eq_i, rtqcfa_round, RoundOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecognizerName {
    /// Deterministic `F(n)` search, accepting when `F(n)` is a power of 2.
    Am75Dtm,
    /// Deterministic `F(n)` search, accepting when `F(n)` is a power of 64.
    Am75pDtm,
    Am75pIPtm,
    /// Deterministic length count.
    Upower64Dtm,
    Upower64IPtm1,
    DimaDca2,
    DimaIPca2,
    DimaISweeping,
    LogDimaIPtm,
    PowerEqRtqcfa,
    PowerEqIRtqcfa,
    Upower8IQcca,
}

/// How a recognizer's acceptance probability is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecognizerKind {
    Deterministic,
    Probabilistic,
    /// Probabilities computed in closed form.
    Quantum,
}

/// Parameters shared by all runs of an experiment.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub oracle: Option<SubsetOracle>,
    pub repetitions: u32,
    pub freivalds: FreivaldsParams,
    pub tape: TapeMode,
    pub l: BigRational,
}

impl RunContext {
    fn oracle(&self) -> Result<&SubsetOracle> {
        self.oracle
            .as_ref()
            .ok_or_else(|| Error::Config("this recognizer needs an oracle prefix".into()))
    }
}

/// Exact outcome of a quantum recognizer on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumResult {
    pub accept: f64,
    /// Exact overall acceptance, when rational.
    pub exact: Option<String>,
    pub log2_expected_rounds: f64,
    pub round: Option<RoundOutcome>,
}

impl RecognizerName {
    pub const ALL: [RecognizerName; 12] = [
        RecognizerName::Am75Dtm,
        RecognizerName::Am75pDtm,
        RecognizerName::Am75pIPtm,
        RecognizerName::Upower64Dtm,
        RecognizerName::Upower64IPtm1,
        RecognizerName::DimaDca2,
        RecognizerName::DimaIPca2,
        RecognizerName::DimaISweeping,
        RecognizerName::LogDimaIPtm,
        RecognizerName::PowerEqRtqcfa,
        RecognizerName::PowerEqIRtqcfa,
        RecognizerName::Upower8IQcca,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    pub fn language(self) -> LanguageId {
        use RecognizerName::*;
        match self {
            Am75Dtm => LanguageId::Am75,
            Am75pDtm => LanguageId::Am75p,
            Am75pIPtm => LanguageId::Am75pI,
            Upower64Dtm => LanguageId::Upower64,
            Upower64IPtm1 => LanguageId::Upower64I,
            DimaDca2 => LanguageId::Dima,
            DimaIPca2 | DimaISweeping => LanguageId::DimaI,
            LogDimaIPtm => LanguageId::LogDimaI,
            PowerEqRtqcfa => LanguageId::PowerEq,
            PowerEqIRtqcfa => LanguageId::PowerEqI,
            Upower8IQcca => LanguageId::Upower8I,
        }
    }

    pub fn kind(self) -> RecognizerKind {
        use RecognizerName::*;
        match self {
            Am75Dtm | Am75pDtm | Upower64Dtm | DimaDca2 => RecognizerKind::Deterministic,
            PowerEqRtqcfa | PowerEqIRtqcfa | Upower8IQcca => RecognizerKind::Quantum,
            _ => RecognizerKind::Probabilistic,
        }
    }

    pub fn is_exact(self) -> bool {
        self.kind() != RecognizerKind::Probabilistic
    }

    pub fn is_quantum(self) -> bool {
        self.kind() == RecognizerKind::Quantum
    }

    /// One run of a classical recognizer.
    pub fn run(self, w: &Word, ctx: &RunContext, rng: &mut RandomSource) -> Result<RunStats> {
        use RecognizerName::*;
        let unary = |symbol: u8| w.unary_length(symbol).filter(|n| *n > BigUint::ZERO);
        let reject = || {
            let mut s = RunStats::new(Decision::Reject);
            s.steps = w.len() + 1u32;
            s
        };
        match self {
            Am75Dtm | Am75pDtm => {
                let Some(n) = unary(b'a') else {
                    return Ok(reject());
                };
                let f = f_of_n(&n)?;
                let member = if self == Am75Dtm {
                    am75_member(&n)?
                } else {
                    am75p_member(&n)?
                };
                let mut s = RunStats::new(Decision::from_bool(member));
                s.steps = f.steps;
                s.space_work = f.space;
                Ok(s)
            }
            Am75pIPtm => match unary(b'a') {
                Some(n) => ptm_am75p_i(&n, ctx.oracle()?, ctx.repetitions, rng),
                None => Ok(reject()),
            },
            Upower64Dtm => {
                let member = w.unary_length(b'0').is_some_and(|n| upower64_member(&n));
                let mut s = RunStats::new(Decision::from_bool(member));
                s.steps = w.len() + 1u32;
                s.space_work = w.len().bits().max(1);
                Ok(s)
            }
            Upower64IPtm1 => ptm1_upower64_i(w, ctx.tape, ctx.oracle()?, rng),
            DimaDca2 => dca2_dima(w, ctx.tape),
            DimaIPca2 => pca2_dima_i(w, ctx.tape, ctx.oracle()?, ctx.repetitions, rng),
            DimaISweeping => pca_sweeping_dima_i(w, ctx.tape, ctx.oracle()?, ctx.repetitions, rng),
            LogDimaIPtm => Ok(ptm_log_recognizer(
                w,
                InnerRecognizer::Pca2DimaI,
                ctx.oracle()?,
                ctx.repetitions,
                &ctx.freivalds,
                rng,
            )?
            .stats),
            PowerEqRtqcfa | PowerEqIRtqcfa | Upower8IQcca => Err(Error::Config(format!(
                "{} is evaluated exactly, not run",
                self.name()
            ))),
        }
    }

    /// Exact evaluation of a quantum recognizer.
    pub fn evaluate(self, w: &Word, ctx: &RunContext) -> Result<QuantumResult> {
        use RecognizerName::*;
        match self {
            PowerEqRtqcfa => {
                let (round, _) = rtqcfa_round(w, &ctx.l)?;
                let overall = rtqcfa_overall(&round)?;
                Ok(QuantumResult {
                    accept: overall.accept.to_f64().unwrap_or(0.0),
                    exact: Some(overall.accept.to_string()),
                    log2_expected_rounds: overall.log2_expected_rounds,
                    round: Some(round),
                })
            }
            PowerEqIRtqcfa => {
                let out = rtqcfa_power_eq_i(w, &ctx.l, ctx.oracle()?)?;
                Ok(QuantumResult {
                    accept: out.accept_probability,
                    exact: None,
                    log2_expected_rounds: out.overall.log2_expected_rounds,
                    round: Some(out.round),
                })
            }
            Upower8IQcca => {
                let accept = match w.unary_length(b'a') {
                    Some(n) => qcca_upower8_i(&n, ctx.oracle()?)?.accept_probability,
                    None => 0.0,
                };
                Ok(QuantumResult {
                    accept,
                    exact: None,
                    log2_expected_rounds: 0.0,
                    round: None,
                })
            }
            _ => Err(Error::Config(format!(
                "{} is not evaluated exactly",
                self.name()
            ))),
        }
    }
}

impl std::str::FromStr for RecognizerName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_owned()))
            .map_err(|_| Error::Config(format!("unknown recognizer '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_and_languages_are_covered() {
        let mut langs = std::collections::BTreeSet::new();
        for r in RecognizerName::ALL {
            assert_eq!(r.name().parse::<RecognizerName>().unwrap(), r);
            langs.insert(r.language());
        }
        assert_eq!(langs.len(), LanguageId::ALL.len());
        assert_eq!(RecognizerName::DimaIPca2.name(), "dima-i-pca2");
    }
}
