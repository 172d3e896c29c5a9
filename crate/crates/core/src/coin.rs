//! Bit extraction from a biased coin.
//!
//! With `p = p_I`, the number of heads `X` in `64^k` tosses concentrates
//! around `64^k·p`, whose bit of weight `2^{3k+2}` is `x_k`. The spacer
//! digits `01` after each `x_i` keep `E[X]` a quarter-interval away from
//! where that bit flips, so Chebyshev bounds the extraction error by
//! `p(1 - p) ≤ 1/4`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BinaryExpansion, RandomSource, SubsetOracle};

/// Largest campaign the exact error computation accepts (`k ≤ 2`).
pub const EXACT_MAX_TOSSES: u64 = 4096;

/// Largest campaign the sampler accepts (`k ≤ 4`).
pub const SAMPLE_MAX_TOSSES: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinTally {
    pub k: u32,
    pub tosses: u64,
    pub heads: u64,
}

impl CoinTally {
    /// Bit of weight `2^{3k+2}` of the head count.
    pub fn extract_bit(&self) -> bool {
        extract_bit_of(self.heads, self.k)
    }
}

pub fn extract_bit(t: &CoinTally) -> bool {
    t.extract_bit()
}

pub(crate) fn extract_bit_of(heads: u64, k: u32) -> bool {
    (heads >> (3 * k + 2)) & 1 == 1
}

/// `64^k`, failing when it exceeds `cap`.
pub fn campaign_length(k: u32, cap: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("campaign index k starts at 1".into()));
    }
    match 64u64.checked_pow(k) {
        Some(n) if n <= cap => Ok(n),
        _ => Err(Error::CapExceeded(format!(
            "64^{k} tosses exceed the cap of {cap}"
        ))),
    }
}

/// Tosses the `p_I` coin `64^k` times.
pub fn toss_campaign(o: &SubsetOracle, k: u32, rng: &mut RandomSource) -> Result<CoinTally> {
    o.query(k as u64)?;
    let tosses = campaign_length(k, SAMPLE_MAX_TOSSES)?;
    let p = BinaryExpansion::new(&o.coin_bias())?;
    Ok(CoinTally {
        k,
        tosses,
        heads: rng.binomial(tosses, &p),
    })
}

/// Majority of `r` independent extractions.
pub fn amplified_extract(o: &SubsetOracle, k: u32, r: u32, rng: &mut RandomSource) -> Result<bool> {
    check_odd(r)?;
    o.query(k as u64)?;
    let tosses = campaign_length(k, SAMPLE_MAX_TOSSES)?;
    let p = BinaryExpansion::new(&o.coin_bias())?;
    let ones = (0..r)
        .filter(|_| extract_bit_of(rng.binomial(tosses, &p), k))
        .count() as u32;
    Ok(2 * ones > r)
}

pub(crate) fn check_odd(r: u32) -> Result<()> {
    if r.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "repetition count must be odd, got {r}"
        )));
    }
    Ok(())
}

/// Exact probability that one extraction of `x_k` from the `p_I` coin is wrong.
pub fn exact_error_probability(o: &SubsetOracle, k: u32) -> Result<BigRational> {
    let bit = o.query(k as u64)?;
    exact_error_for_bias(&o.coin_bias(), k, bit)
}

/// Exact probability that the extracted bit of `Binomial(64^k, p)` differs
/// from `expected`.
pub fn exact_error_for_bias(p: &BigRational, k: u32, expected: bool) -> Result<BigRational> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let n = campaign_length(k, EXACT_MAX_TOSSES)
        .map_err(|_| Error::ExactTooLarge(format!("64^{k} tosses exceed {EXACT_MAX_TOSSES}")))?;
    let a = p.numer().magnitude().clone();
    let d = p.denom().magnitude().clone();
    let b = &d - &a;
    let total = num_traits::pow(d, n as usize);

    if a.is_zero() || b.is_zero() {
        let x = if a.is_zero() { 0 } else { n };
        let wrong = extract_bit_of(x, k) != expected;
        return Ok(BigRational::from_integer(BigInt::from(u8::from(wrong))));
    }

    // term_x = C(n, x) a^x b^(n-x); the ratio to term_{x-1} is
    // (n - x + 1) a / (x b), and the division is exact.
    let mut term = num_traits::pow(b.clone(), n as usize);
    let mut wrong = BigUint::zero();
    for x in 0..=n {
        if x > 0 {
            term = term * (n - x + 1) * &a / (&b * x);
        }
        if extract_bit_of(x, k) != expected {
            wrong += &term;
        }
    }
    Ok(BigRational::new(wrong.into(), total.into()))
}

/// Error of a majority vote over `r` independent trials that each err with
/// probability `eps`.
pub fn majority_error(eps: &BigRational, r: u32) -> Result<BigRational> {
    check_odd(r)?;
    let q = BigRational::one() - eps;
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=r {
        if j > 0 {
            binom = binom * (r - j + 1) / j;
        }
        if 2 * j > r {
            sum += BigRational::from_integer(binom.clone())
                * num_traits::pow(eps.clone(), j as usize)
                * num_traits::pow(q.clone(), (r - j) as usize);
        }
    }
    Ok(sum)
}

/// `64^k·p`, the expected head count, rounded down.
pub fn expected_heads(p: &BigRational, k: u32) -> Result<u64> {
    let n = campaign_length(k, SAMPLE_MAX_TOSSES)?;
    (p * BigRational::from_integer(BigInt::from(n)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain("expected head count out of range".into()))
}
