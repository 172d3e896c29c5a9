use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Digits cached up front by [`BinaryExpansion`]. A Bernoulli draw reads past
/// them with probability `2^-CACHED_DIGITS`.
const CACHED_DIGITS: usize = 512;

/// SplitMix64 finaliser, used to derive independent per-trial seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of input `input` under the experiment seed `seed`.
pub fn trial_seed(seed: u64, input: u64, trial: u64) -> u64 {
    mix64(mix64(seed ^ mix64(input)) ^ trial)
}

/// Binary digits of an exact probability in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct BinaryExpansion {
    value: BigRational,
    digits: Vec<bool>,
    /// Remainder after the cached digits, scaled so the next digit is
    /// `2·rem >= den`.
    rem: BigInt,
    den: BigInt,
}

impl BinaryExpansion {
    pub fn new(p: &BigRational) -> Result<Self> {
        if p.is_negative() || *p > BigRational::one() {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let den = p.denom().clone();
        let mut rem = p.numer().clone();
        let mut digits = Vec::with_capacity(CACHED_DIGITS);
        for _ in 0..CACHED_DIGITS {
            digits.push(next_digit(&mut rem, &den));
        }
        Ok(Self {
            value: p.clone(),
            digits,
            rem,
            den,
        })
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// Digit `i` (0-based, weight `2^-(i+1)`).
    pub fn digit(&self, i: usize) -> bool {
        if let Some(&d) = self.digits.get(i) {
            return d;
        }
        let mut rem = self.rem.clone();
        let mut d = false;
        for _ in self.digits.len()..=i {
            d = next_digit(&mut rem, &self.den);
        }
        d
    }
}

fn next_digit(rem: &mut BigInt, den: &BigInt) -> bool {
    *rem <<= 1;
    if *rem >= *den {
        *rem -= den;
        true
    } else {
        false
    }
}

/// Seeded source of fair bits; all randomness in the crate flows through it.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
    buffer: u64,
    buffered: u32,
    consumed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            buffer: 0,
            buffered: 0,
            consumed: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fair bits drawn so far.
    pub fn position(&self) -> u64 {
        self.consumed
    }

    pub fn fair_bit(&mut self) -> bool {
        if self.buffered == 0 {
            self.buffer = self.rng.next_u64();
            self.buffered = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.buffered -= 1;
        self.consumed += 1;
        bit
    }

    /// Exact Bernoulli(p) draw: compares a lazily drawn uniform variate with
    /// the binary expansion of `p` bit by bit.
    pub fn bernoulli(&mut self, p: &BinaryExpansion) -> bool {
        let mut i = 0;
        loop {
            let u = self.fair_bit();
            let d = p.digit(i);
            if u != d {
                return d;
            }
            i += 1;
        }
    }

    /// Number of successes in `n` exact Bernoulli(p) draws.
    pub fn binomial(&mut self, n: u64, p: &BinaryExpansion) -> u64 {
        (0..n).filter(|_| self.bernoulli(p)).count() as u64
    }

    /// Whether `len` fair coin flips all come up heads. Flips stop at the
    /// first tail, so the cost is geometric regardless of `len`.
    pub fn all_heads(&mut self, len: &BigUint) -> bool {
        if let Ok(small) = u64::try_from(len) {
            for _ in 0..small {
                if !self.fair_bit() {
                    return false;
                }
            }
            return true;
        }
        let mut seen = BigUint::zero();
        while seen < *len {
            if !self.fair_bit() {
                return false;
            }
            seen += 1u32;
        }
        true
    }
}
