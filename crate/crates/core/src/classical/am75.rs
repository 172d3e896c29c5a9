//! Unary languages built on `F(n)`, the least non-divisor of `n`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coin::{campaign_length, check_odd, SAMPLE_MAX_TOSSES};
use crate::error::{Error, Result};
use crate::model::{
    BinaryExpansion, Decision, Direction, HeadDiscipline, InputTape, RandomSource, RunStats,
    SubsetOracle, TapeMode, Word, WorkTape,
};

const TRACK_K: u8 = 0;
const TRACK_RESIDUE: u8 = 1;
const TRACK_TOSSES: u8 = 2;
const TRACK_HEADS: u8 = 3;
const TRACK_VOTES: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FValue {
    #[serde(with = "crate::model::stats::big_string")]
    pub n: BigUint,
    pub f: u64,
    /// Work-tape cells used while searching.
    pub space: u64,
    /// Logical steps of the search: one sweep over `a^n` per candidate.
    #[serde(with = "crate::model::stats::big_string")]
    pub steps: BigUint,
}

/// Searches `k = 2, 3, ...` for the first non-divisor, keeping `k` and the
/// running residue as binary counters on two tracks of one work tape.
///
/// Each candidate costs one sweep over the input; per symbol the residue
/// counter is bumped modulo `k`, metered as `1 + 2·bitlen(k)` steps.
fn search_f(n: &BigUint, work: &mut WorkTape) -> Result<(u64, BigUint)> {
    if n.is_zero() {
        return Err(Error::Domain("F(n) needs n ≥ 1".into()));
    }
    let mut steps = BigUint::zero();
    work.increment(TRACK_K);
    let mut k = 1u64;
    loop {
        work.increment(TRACK_K);
        k += 1;
        let residue = n % k;
        work.store(TRACK_RESIDUE, &residue);
        let bits = 64 - u64::from(k.leading_zeros());
        steps += (n + 1u32) * (1 + 2 * bits);
        if !residue.is_zero() {
            return Ok((k, steps));
        }
    }
}

pub fn f_of_n(n: &BigUint) -> Result<FValue> {
    let mut work = WorkTape::new();
    let (f, steps) = search_f(n, &mut work)?;
    let steps = steps + work.moves();
    Ok(FValue {
        n: n.clone(),
        f,
        space: work.space(),
        steps,
    })
}

fn is_power_of(f: u64, log2_base: u32) -> bool {
    f > 1 && f.is_power_of_two() && f.trailing_zeros().is_multiple_of(log2_base)
}

/// `a^n ∈ AM75`: `F(n)` is a power of 2.
pub fn am75_member(n: &BigUint) -> Result<bool> {
    Ok(is_power_of(f_of_n(n)?.f, 1))
}

/// `a^n ∈ AM75′`: `F(n)` is a power of 64.
pub fn am75p_member(n: &BigUint) -> Result<bool> {
    Ok(is_power_of(f_of_n(n)?.f, 6))
}

/// Bounded-error sweeping PTM for `AM75′(I)` on `a^n`.
///
/// The deterministic phase alternates sweeps, one per candidate divisor. The
/// probabilistic phase spends one sweep per repetition, tossing the `p_I`
/// coin on the first `F(n) = 64^m` cells while counting tosses and heads on
/// their own tracks, then reads the heads bit of weight `2^{3m+2}`.
pub fn ptm_am75p_i(
    n: &BigUint,
    o: &SubsetOracle,
    r: u32,
    rng: &mut RandomSource,
) -> Result<RunStats> {
    check_odd(r)?;
    let word = Word::unary(b'a', n.clone());
    let mut tape = InputTape::new(&word, TapeMode::Rle, HeadDiscipline::Sweeping)?;
    let mut work = WorkTape::new();
    let mut dir = Direction::Right;
    let mut sweep = |tape: &mut InputTape| -> Result<()> {
        tape.move_to_marker(dir)?;
        dir = dir.reverse();
        Ok(())
    };

    let (f, mut steps) = search_f(n, &mut work)?;
    for _ in 2..=f {
        sweep(&mut tape)?;
    }
    let finish = |decision, steps: BigUint, tape: &InputTape, work: &WorkTape| {
        let mut stats = RunStats::new(decision).with_tape(tape);
        stats.steps = steps + work.moves() + &tape.audit().left_moves + &tape.audit().right_moves;
        stats.space_work = work.space();
        stats
    };

    let Some(m) = work.power_of_64(TRACK_K) else {
        return Ok(finish(Decision::Reject, steps, &tape, &work));
    };
    o.query(m)?;
    let m32 = u32::try_from(m).map_err(|_| Error::Domain("F(n) exponent too large".into()))?;
    let tosses = campaign_length(m32, SAMPLE_MAX_TOSSES)?;
    let p = BinaryExpansion::new(&o.coin_bias())?;
    let bits = 6 * m + 1;

    for _ in 0..r {
        sweep(&mut tape)?;
        let heads = rng.binomial(tosses, &p);
        // Each toss bumps the toss counter, maybe the heads counter, and
        // compares the toss counter with F(n).
        steps += BigUint::from(tosses) * (1 + 6 * bits);
        work.store(TRACK_TOSSES, &BigUint::from(tosses));
        work.store(TRACK_HEADS, &BigUint::from(heads));
        work.move_to(3 * m as i64 + 2);
        let bit = work.read_bit(TRACK_HEADS);
        work.move_to(0);
        if bit {
            work.increment(TRACK_VOTES);
        }
        work.clear(TRACK_TOSSES);
        work.clear(TRACK_HEADS);
    }
    let votes = work.load(TRACK_VOTES).to_u32().unwrap_or(u32::MAX);
    let decision = Decision::from_bool(2 * votes > r);
    Ok(finish(decision, steps, &tape, &work))
}

/// `lcm(1, ..., m)`. For a prime power `q`, `F(lcm(1..q-1)) = q`.
pub fn lcm_up_to(m: u64) -> BigUint {
    (1..=m).fold(BigUint::from(1u32), |acc, i| acc.lcm(&BigUint::from(i)))
}
