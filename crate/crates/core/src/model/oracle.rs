use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite prefix `x_1 .. x_N` of the characteristic sequence of a set
/// `I ⊆ ℤ⁺` (`x_i = 1` iff `i ∈ I`).
///
/// Queries past the prefix are errors. The derived coin bias completes the
/// sequence with `x_i = 0` and the derived rotation with `s_i = -1`, which
/// makes both quantities exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SubsetOracle {
    bits: Vec<bool>,
}

impl SubsetOracle {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Domain(
                "oracle prefix must contain at least one bit".into(),
            ));
        }
        Ok(Self { bits })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let bits = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Domain(format!(
                    "oracle bit must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    /// Prefix length `N`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `x_i` for `1 ≤ i ≤ N`.
    pub fn query(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::Domain("oracle indices start at 1".into()));
        }
        let idx = usize::try_from(i - 1).unwrap_or(usize::MAX);
        self.bits.get(idx).copied().ok_or(Error::OutOfPrefix {
            index: i,
            len: self.bits.len(),
        })
    }

    /// Exact coin bias `p_I = 0.x_1 01 x_2 01 ... x_N 01 (001)^ω` in binary.
    pub fn coin_bias(&self) -> BigRational {
        let eight = BigInt::from(8);
        let mut num = BigInt::zero();
        // Each block of three binary digits `x 0 1` is the octal digit 4x + 1.
        for &x in &self.bits {
            num = num * &eight + BigInt::from(if x { 5 } else { 1 });
        }
        let scale = num_traits::pow(eight, self.bits.len());
        // (001)^ω after the prefix contributes 1/7 of the last octal place.
        BigRational::new(num * 7 + 1, scale * 7)
    }

    /// Exact rotation fraction `φ_I = θ_I / 2π = Σ s_i / 8^{i+1} - 8^{-(N+1)} / 7`.
    pub fn rotation_fraction(&self) -> BigRational {
        let eight = BigInt::from(8);
        let mut num = BigInt::zero();
        for &x in &self.bits {
            num = num * &eight + BigInt::from(if x { 1 } else { -1 });
        }
        // num / 8^{N+1} is the prefix sum; the all -1 tail sums to -1/(7·8^{N+1}).
        let scale = num_traits::pow(eight, self.bits.len() + 1);
        BigRational::new(num * 7 - BigInt::one(), scale * 7)
    }
}

impl fmt::Display for SubsetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SubsetOracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '_' | ',' | ' '))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("oracle prefix contains '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl TryFrom<String> for SubsetOracle {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SubsetOracle> for String {
    fn from(o: SubsetOracle) -> String {
        o.to_string()
    }
}
