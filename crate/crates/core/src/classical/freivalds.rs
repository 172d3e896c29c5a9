//! Probabilistic equality test for two unary block lengths.
//!
//! A round flips a fair coin for every symbol of both blocks. The round is
//! decisive when exactly one block came up all heads; that block wins the
//! round. Given a decisive round, side A wins with probability
//! `(2^B - 1) / (2^A + 2^B - 2)`, which is 1/2 for equal lengths and at
//! least 3/4 when one block is twice as long as the other.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Flip every coin of every round, decisive or not.
    Literal,
    /// Sample decisive rounds directly; the skipped non-decisive rounds
    /// are accounted for in expectation.
    Conditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreivaldsParams {
    /// Decisive rounds collected before deciding.
    pub decisive: u32,
    /// Majority share above which the blocks are declared unequal.
    pub threshold: f64,
    /// Round cap in literal mode.
    pub max_rounds: u64,
    pub mode: SamplingMode,
}

impl Default for FreivaldsParams {
    fn default() -> Self {
        Self {
            decisive: 512,
            threshold: 0.6,
            max_rounds: 1 << 32,
            mode: SamplingMode::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Equal,
    Unequal,
    /// The round cap ran out first.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreivaldsOutcome {
    pub verdict: Comparison,
    pub wins_a: u32,
    pub wins_b: u32,
    /// Rounds actually simulated.
    pub rounds: u64,
    /// `log₂` of the expected rounds per decisive round.
    pub log2_rounds_per_decisive: f64,
}

fn validate(len_a: &BigUint, len_b: &BigUint, params: &FreivaldsParams) -> Result<()> {
    if len_a.is_zero() || len_b.is_zero() {
        return Err(Error::Domain("block lengths must be positive".into()));
    }
    if params.decisive == 0 || !(0.5..1.0).contains(&params.threshold) {
        return Err(Error::Config(
            "need at least one decisive round and a threshold in [0.5, 1)".into(),
        ));
    }
    Ok(())
}

fn unequal(wins_a: u32, wins_b: u32, params: &FreivaldsParams) -> bool {
    f64::from(wins_a.max(wins_b)) / f64::from(params.decisive) > params.threshold
}

fn big_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// `-log₂ Pr[decisive]` with `Pr[decisive] = 2^{-A} + 2^{-B} - 2^{1-A-B}`.
pub fn log2_rounds_per_decisive(len_a: &BigUint, len_b: &BigUint) -> f64 {
    let (lo, hi) = if len_a <= len_b {
        (len_a, len_b)
    } else {
        (len_b, len_a)
    };
    let lo = big_to_f64(lo);
    let hi = big_to_f64(hi);
    lo - (1.0 + (lo - hi).exp2() - (1.0 - hi).exp2()).log2()
}

pub fn freivalds_compare(
    len_a: &BigUint,
    len_b: &BigUint,
    params: &FreivaldsParams,
    rng: &mut RandomSource,
) -> Result<FreivaldsOutcome> {
    validate(len_a, len_b, params)?;
    let (mut wins_a, mut wins_b) = (0u32, 0u32);
    let mut rounds = 0u64;
    let target = params.decisive;
    match params.mode {
        SamplingMode::Literal => {
            while wins_a + wins_b < target {
                if rounds == params.max_rounds {
                    return Ok(FreivaldsOutcome {
                        verdict: Comparison::Inconclusive,
                        wins_a,
                        wins_b,
                        rounds,
                        log2_rounds_per_decisive: log2_rounds_per_decisive(len_a, len_b),
                    });
                }
                rounds += 1;
                let a = rng.all_heads(len_a);
                let b = rng.all_heads(len_b);
                match (a, b) {
                    (true, false) => wins_a += 1,
                    (false, true) => wins_b += 1,
                    _ => {}
                }
            }
        }
        SamplingMode::Conditioned => {
            let lo = len_a.min(len_b);
            let extra_a = len_a - lo;
            let extra_b = len_b - lo;
            while wins_a + wins_b < target {
                rounds += 1;
                if let Some(a_wins) = decisive_round(&extra_a, &extra_b, len_a, len_b, rng) {
                    if a_wins {
                        wins_a += 1;
                    } else {
                        wins_b += 1;
                    }
                }
            }
        }
    }
    let verdict = if unequal(wins_a, wins_b, params) {
        Comparison::Unequal
    } else {
        Comparison::Equal
    };
    Ok(FreivaldsOutcome {
        verdict,
        wins_a,
        wins_b,
        rounds,
        log2_rounds_per_decisive: log2_rounds_per_decisive(len_a, len_b),
    })
}

/// One proposal of the decisive-round sampler. A fair bit picks a side;
/// the proposal stands if that side's coins beyond the shorter length all
/// land heads and the other side is not all heads. Side A then stands with
/// probability proportional to `2^{-A}(1 - 2^{-B})`, matching a decisive
/// round. Each proposal stands with probability at least 1/4.
fn decisive_round(
    extra_a: &BigUint,
    extra_b: &BigUint,
    len_a: &BigUint,
    len_b: &BigUint,
    rng: &mut RandomSource,
) -> Option<bool> {
    let pick_a = rng.fair_bit();
    let (extra, other) = if pick_a {
        (extra_a, len_b)
    } else {
        (extra_b, len_a)
    };
    if rng.all_heads(extra) && !rng.all_heads(other) {
        Some(pick_a)
    } else {
        None
    }
}

/// Exact analysis at the given parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreivaldsExact {
    /// Probability that side A wins a decisive round.
    pub win_a: BigRational,
    /// Probability of the verdict "unequal".
    pub p_unequal: BigRational,
    pub log2_rounds_per_decisive: f64,
}

/// Exact decisive-round bias and verdict distribution. Lengths must fit in
/// `u32` so that `2^len` stays representable.
pub fn freivalds_exact(len_a: u32, len_b: u32, params: &FreivaldsParams) -> Result<FreivaldsExact> {
    validate(&BigUint::from(len_a), &BigUint::from(len_b), params)?;
    let pa = BigInt::one() << len_a as usize;
    let pb = BigInt::one() << len_b as usize;
    let win_a = BigRational::new(&pb - 1, &pa + &pb - 2);
    let lose = BigRational::one() - &win_a;
    let k = params.decisive;
    let mut p_unequal = BigRational::zero();
    let mut binom = BigInt::one();
    for w in 0..=k {
        if w > 0 {
            binom = binom * (k - w + 1) / w;
        }
        if unequal(w, k - w, params) {
            p_unequal += BigRational::from_integer(binom.clone())
                * num_traits::pow(win_a.clone(), w as usize)
                * num_traits::pow(lose.clone(), (k - w) as usize);
        }
    }
    Ok(FreivaldsExact {
        win_a,
        p_unequal,
        log2_rounds_per_decisive: log2_rounds_per_decisive(
            &BigUint::from(len_a),
            &BigUint::from(len_b),
        ),
    })
}
