use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::tape::InputTape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Accept,
    Reject,
    Restart,
    /// A resource cap stopped the run before it decided.
    CapExceeded,
}

impl Decision {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }
}

/// Serialises big integers as decimal strings.
pub mod big_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Accounting for one run of a recognizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub decision: Decision,
    #[serde(with = "big_string")]
    pub steps: BigUint,
    /// Sweeps of the input head.
    pub passes: u64,
    /// Work-tape cells visited.
    pub space_work: u64,
    /// Maximum counter value.
    #[serde(with = "big_string")]
    pub space_counter: BigUint,
    /// Rounds, for restarting machines; 1 otherwise.
    pub rounds: u64,
    #[serde(with = "big_string")]
    pub left_moves: BigUint,
    /// Direction changes of the input head away from the end-markers.
    pub inner_reversals: u64,
}

impl RunStats {
    pub fn new(decision: Decision) -> Self {
        Self {
            decision,
            steps: BigUint::default(),
            passes: 0,
            space_work: 0,
            space_counter: BigUint::default(),
            rounds: 1,
            left_moves: BigUint::default(),
            inner_reversals: 0,
        }
    }

    /// Copies the head audit of `tape` into the stats.
    pub fn with_tape(mut self, tape: &InputTape) -> Self {
        self.passes = tape.passes();
        self.left_moves = tape.audit().left_moves.clone();
        self.inner_reversals = tape.audit().inner_reversals;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_big_values_exact() {
        let mut s = RunStats::new(Decision::Accept);
        s.steps = BigUint::from(1u32) << 140usize;
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.contains("\"1393796574908163946345982392040522594123776\""));
        let back: RunStats = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
