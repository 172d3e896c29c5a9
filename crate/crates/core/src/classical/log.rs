//! The padding transform `LOG(L)` and its recognizer.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::am75::ptm_am75p_i;
use super::dima::pca2_dima_i;
use super::freivalds::{freivalds_compare, Comparison, FreivaldsParams, SamplingMode};
use crate::error::{Error, Result};
use crate::model::{
    Decision, Direction, HeadDiscipline, InputTape, RandomSource, RunStats, SubsetOracle, TapeMode,
    Word,
};

/// Longest inner word the recognizer hands to the inner machine.
pub const MAX_INNER: usize = 1 << 20;

/// `0 (1 w_1) 0^{2^1} (1 w_2) 0^{2^2} ... (1 w_m) 0^{2^m}` for a binary `w`
/// of length `m ≥ 1`.
pub fn log_transform(w: &Word) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::Domain(
            "LOG is defined for words of length at least 1".into(),
        ));
    }
    let symbols = w.to_symbols(MAX_INNER)?;
    let mut out = Word::unary(b'0', 1u32);
    for (i, &s) in symbols.iter().enumerate() {
        if s != b'0' && s != b'1' {
            return Err(Error::Domain(format!(
                "LOG needs a binary word, found '{}'",
                s as char
            )));
        }
        out.push(b'1', 1u32);
        out.push(s, 1u32);
        out.push(b'0', BigUint::one() << (i + 1));
    }
    Ok(out)
}

/// Inner machine run on the decoded word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerRecognizer {
    /// Two-way probabilistic counter automaton for `DIMA(I)`.
    Pca2DimaI,
    /// Sweeping PTM for `AM75′(I)` on the unary word `0^n`.
    PtmAm75pI,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRun {
    pub stats: RunStats,
    /// Length of the decoded word, when the skeleton parsed.
    pub inner_len: Option<u64>,
    /// Block comparisons performed.
    pub comparisons: u64,
    /// `log₂` of the expected coin-flipping rounds of all comparisons.
    pub log2_expected_rounds: f64,
    pub inner: Option<RunStats>,
}

/// Splits `x` into `0 (1 σ_1 0^+) ... (1 σ_m 0^+)`, returning the `σ_i` and
/// the zero-block lengths `L_0 = 1, L_1, ..., L_m`. This is the one-pass
/// finite-state check.
fn skeleton(x: &Word) -> Option<(Vec<u8>, Vec<BigUint>)> {
    let runs = x.runs();
    let first = runs.first()?;
    if first.symbol != b'0' || !first.count.is_one() {
        return None;
    }
    let mut bits = Vec::new();
    let mut blocks = vec![BigUint::one()];
    let mut i = 1;
    while i < runs.len() {
        let ones = &runs[i];
        let zeros = runs.get(i + 1)?;
        if ones.symbol != b'1' || zeros.symbol != b'0' {
            return None;
        }
        // A run 1^2 is the pair "1 1"; a single 1 is "1 0" with its 0
        // merged into the following block.
        match ones.count.to_u8() {
            Some(2) => {
                bits.push(b'1');
                blocks.push(zeros.count.clone());
            }
            Some(1) if zeros.count > BigUint::one() => {
                bits.push(b'0');
                blocks.push(&zeros.count - 1u32);
            }
            _ => return None,
        }
        i += 2;
    }
    if bits.is_empty() {
        return None;
    }
    Some((bits, blocks))
}

/// Bounded-error recognizer for `LOG(L)`.
///
/// One deterministic sweep checks the skeleton. Then each zero block is
/// compared with twice the previous one by the coin-flipping equality test,
/// which needs no counter. If every comparison says equal, the decoded word
/// goes to the inner machine and its answer is returned. The input is held
/// run-length encoded; the decoded word is small.
pub fn ptm_log_recognizer(
    x: &Word,
    inner: InnerRecognizer,
    o: &SubsetOracle,
    r: u32,
    params: &FreivaldsParams,
    rng: &mut RandomSource,
) -> Result<LogRun> {
    let mut tape = InputTape::new(x, TapeMode::Rle, HeadDiscipline::TwoWay)?;
    let mut steps = tape.move_to_marker(Direction::Right)?;
    let reject = |stats_steps: BigUint, tape: &InputTape, comparisons, log2: f64, inner_len| {
        let mut stats = RunStats::new(Decision::Reject).with_tape(tape);
        stats.steps = stats_steps;
        LogRun {
            stats,
            inner_len,
            comparisons,
            log2_expected_rounds: log2,
            inner: None,
        }
    };
    let Some((bits, blocks)) = skeleton(x) else {
        return Ok(reject(steps, &tape, 0, f64::NEG_INFINITY, None));
    };
    let inner_len = Some(bits.len() as u64);

    let mut log2_total = f64::NEG_INFINITY;
    let mut comparisons = 0u64;
    for pair in blocks.windows(2) {
        let twice = &pair[0] << 1usize;
        let out = freivalds_compare(&twice, &pair[1], params, rng)?;
        comparisons += 1;
        // Each round reads the shorter block twice and the longer once,
        // bracketed by returns; only the simulated rounds are counted.
        let traversal = &twice + &pair[1] + 4u32;
        steps += traversal * out.rounds;
        let expected = out.log2_rounds_per_decisive + f64::from(params.decisive).log2();
        log2_total = log2_sum(log2_total, expected);
        match out.verdict {
            Comparison::Equal => {}
            Comparison::Unequal => {
                return Ok(reject(steps, &tape, comparisons, log2_total, inner_len));
            }
            Comparison::Inconclusive => {
                let mut run = reject(steps, &tape, comparisons, log2_total, inner_len);
                run.stats.decision = Decision::CapExceeded;
                return Ok(run);
            }
        }
    }
    tape.move_to_marker(Direction::Left)?;

    let w = Word::from_symbols(&bits);
    let inner_stats = match inner {
        InnerRecognizer::Pca2DimaI => pca2_dima_i(&w, TapeMode::Explicit, o, r, rng)?,
        InnerRecognizer::PtmAm75pI => {
            if bits.iter().any(|&b| b != b'0') {
                let mut s = RunStats::new(Decision::Reject);
                s.steps = BigUint::from(bits.len());
                s
            } else {
                ptm_am75p_i(&BigUint::from(bits.len()), o, r, rng)?
            }
        }
    };
    let mut stats = RunStats::new(inner_stats.decision).with_tape(&tape);
    stats.steps = steps + &tape.audit().left_moves + &inner_stats.steps;
    stats.space_work = inner_stats.space_work;
    stats.space_counter = inner_stats.space_counter.clone();
    stats.passes += inner_stats.passes;
    Ok(LogRun {
        stats,
        inner_len,
        comparisons,
        log2_expected_rounds: log2_total,
        inner: Some(inner_stats),
    })
}

/// `log₂(2^a + 2^b)`.
fn log2_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Default comparison parameters for astronomically long blocks.
pub fn conditioned_defaults() -> FreivaldsParams {
    FreivaldsParams {
        mode: SamplingMode::Conditioned,
        ..Default::default()
    }
}

/// `|log_transform(w)| = 2^{m+1} + 2m - 1`.
pub fn log_transform_len(m: u64) -> BigUint {
    (BigUint::one() << (m as usize + 1)) + 2 * m - 1u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::dima::dima_word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn transform_examples() {
        assert_eq!(log_transform(&w("1")).unwrap(), w("0 11 0^2"));
        assert_eq!(log_transform(&w("10")).unwrap(), w("0 11 0^2 10 0^4"));
        assert!(log_transform(&Word::empty()).is_err());
        assert!(log_transform(&w("2")).is_err());
    }

    #[test]
    fn transform_length() {
        for m in 1..=12u64 {
            let word = Word::from_symbols(&vec![b'1'; m as usize]);
            assert_eq!(log_transform(&word).unwrap().len(), log_transform_len(m));
            let word = Word::from_symbols(&vec![b'0'; m as usize]);
            assert_eq!(log_transform(&word).unwrap().len(), log_transform_len(m));
        }
    }

    #[test]
    fn skeleton_round_trips() {
        for s in ["1", "0", "10", "0110", "11101"] {
            let x = log_transform(&w(s)).unwrap();
            let (bits, blocks) = skeleton(&x).unwrap();
            assert_eq!(bits, s.as_bytes());
            for (i, b) in blocks.iter().enumerate() {
                assert_eq!(*b, BigUint::one() << i);
            }
        }
        assert!(skeleton(&w("0 11")).is_none());
        assert!(skeleton(&w("0^2 11 0^2")).is_none());
        assert!(skeleton(&w("0 111 0^2")).is_none());
        assert!(skeleton(&w("0")).is_none());
    }

    #[test]
    fn skeleton_violation_is_certain_rejection() {
        let o: SubsetOracle = "1".parse().unwrap();
        let run = ptm_log_recognizer(
            &w("0 11 0^2 1"),
            InnerRecognizer::Pca2DimaI,
            &o,
            5,
            &conditioned_defaults(),
            &mut RandomSource::new(0),
        )
        .unwrap();
        assert_eq!(run.stats.decision, Decision::Reject);
        assert_eq!(run.comparisons, 0);
    }

    #[test]
    fn dima_member_round_trip() {
        let x = log_transform(&dima_word(1)).unwrap();
        let o: SubsetOracle = "1".parse().unwrap();
        let run = ptm_log_recognizer(
            &x,
            InnerRecognizer::Pca2DimaI,
            &o,
            5,
            &conditioned_defaults(),
            &mut RandomSource::new(3),
        )
        .unwrap();
        assert_eq!(run.inner_len, Some(135));
        assert_eq!(run.comparisons, 135);
        assert_eq!(run.stats.decision, Decision::Accept);
        assert!(run.stats.space_counter <= BigUint::from(135u32));
        assert!(run.log2_expected_rounds > 134.0);
    }

    #[test]
    fn undoubled_block_is_rejected() {
        let mut x = log_transform(&w("1011")).unwrap();
        // Lengthen the last block by one symbol.
        x.push(b'0', 1u32);
        let o: SubsetOracle = "1".parse().unwrap();
        let run = ptm_log_recognizer(
            &x,
            InnerRecognizer::Pca2DimaI,
            &o,
            5,
            &FreivaldsParams::default(),
            &mut RandomSource::new(5),
        )
        .unwrap();
        assert_eq!(run.stats.decision, Decision::Reject);
        assert!(run.inner.is_none());
    }

    #[test]
    fn log_sum() {
        assert!((log2_sum(3.0, 3.0) - 4.0).abs() < 1e-12);
        assert_eq!(log2_sum(f64::NEG_INFINITY, 2.0), 2.0);
    }
}
