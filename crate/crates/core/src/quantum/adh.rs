//! Single-qubit rotation reading one digit of `θ_I`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Decision, SubsetOracle};

/// A rotation of the plane stored as `angle / 2π`, reduced to `(-1/2, 1/2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitAngle {
    fraction: BigRational,
}

impl QubitAngle {
    pub fn new(fraction: BigRational) -> Self {
        let mut f = &fraction - fraction.floor();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if f > half {
            f -= BigRational::one();
        }
        Self { fraction: f }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero())
    }

    pub fn fraction(&self) -> &BigRational {
        &self.fraction
    }

    /// Rotation by `self` followed by `other`.
    pub fn compose(&self, other: &QubitAngle) -> Self {
        Self::new(&self.fraction + &other.fraction)
    }

    /// The rotation applied `times` times.
    pub fn repeat(&self, times: &BigUint) -> Self {
        Self::new(&self.fraction * BigRational::from_integer(BigInt::from(times.clone())))
    }

    pub fn radians(&self) -> f64 {
        self.fraction.to_f64().unwrap_or(0.0) * std::f64::consts::TAU
    }

    /// `(cos, sin)` of the angle, the amplitudes of `|q1⟩` and `|q2⟩`
    /// after rotating `|q1⟩`.
    pub fn amplitudes(&self) -> (f64, f64) {
        let r = self.radians();
        (r.cos(), r.sin())
    }

    pub fn prob_q1(&self) -> f64 {
        self.amplitudes().0.powi(2)
    }

    pub fn prob_q2(&self) -> f64 {
        self.amplitudes().1.powi(2)
    }

    /// Distance from the angle to the nearest point where `|q2⟩` (if
    /// `toward_q2`) or `|q1⟩` is observed with certainty, as a fraction of
    /// a full turn.
    fn distance(&self, toward_q2: bool) -> BigRational {
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let a = self.fraction.abs();
        if toward_q2 {
            (&a - &quarter).abs()
        } else {
            let to_half = &half - &a;
            if a < to_half {
                a
            } else {
                to_half
            }
        }
    }

    /// Rational lower bound on the probability of observing `|q2⟩` (or
    /// `|q1⟩`), from `cos² x ≥ 1 - x²` and `π < 22/7`.
    pub fn certified_lower_bound(&self, toward_q2: bool) -> BigRational {
        let d = self.distance(toward_q2);
        let x = d * BigRational::new(BigInt::from(44), BigInt::from(7));
        let bound = BigRational::one() - &x * &x;
        if bound.is_negative() {
            BigRational::zero()
        } else {
            bound
        }
    }
}

/// Result of one run of the digit-reading procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdhOutcome {
    /// Rotations by `θ_I` performed before the final eighth turn.
    #[serde(with = "crate::model::stats::big_string")]
    pub rotations: BigUint,
    pub angle: QubitAngle,
    /// Probability of `|q1⟩`, read as "not in `I`".
    pub p_in: f64,
    /// Probability of `|q2⟩`, read as "in `I`".
    pub p_out: f64,
}

impl AdhOutcome {
    /// Probability of the outcome that matches `bit`.
    pub fn correct(&self, bit: bool) -> f64 {
        if bit {
            self.p_out
        } else {
            self.p_in
        }
    }

    /// Rational lower bound on [`correct`](Self::correct).
    pub fn certified_correct(&self, bit: bool) -> BigRational {
        self.angle.certified_lower_bound(bit)
    }

    /// The more likely outcome.
    pub fn likely(&self) -> Decision {
        Decision::from_bool(self.p_out > self.p_in)
    }
}

/// Rotates `|q1⟩` by `θ_I` `rotations` times and then by `π/4`.
pub fn adh_rotate(o: &SubsetOracle, rotations: &BigUint) -> AdhOutcome {
    let step = QubitAngle::new(o.rotation_fraction());
    let eighth = QubitAngle::new(BigRational::new(BigInt::one(), BigInt::from(8)));
    let angle = step.repeat(rotations).compose(&eighth);
    AdhOutcome {
        rotations: rotations.clone(),
        p_in: angle.prob_q1(),
        p_out: angle.prob_q2(),
        angle,
    }
}

/// Reads digit `j` of `θ_I` with `8^j` rotations. The digits after `j`
/// perturb the angle, so the prefix must extend one digit past `j`.
pub fn adh_accept_probability(o: &SubsetOracle, j: u64) -> Result<AdhOutcome> {
    if j == 0 {
        return Err(Error::Domain("digit indices start at 1".into()));
    }
    if j >= o.len() as u64 {
        return Err(Error::OutOfPrefix {
            index: j + 1,
            len: o.len(),
        });
    }
    let shift =
        usize::try_from(3 * j).map_err(|_| Error::Domain("digit index too large".into()))?;
    Ok(adh_rotate(o, &(BigUint::one() << shift)))
}

/// Applies the `θ_I` rotation matrix `times` times in floating point,
/// then the final eighth turn; returns the probability of `|q2⟩`.
pub fn iterated_rotation_q2(o: &SubsetOracle, times: u64) -> f64 {
    let theta = o.rotation_fraction().to_f64().unwrap_or(0.0) * std::f64::consts::TAU;
    let (s, c) = theta.sin_cos();
    let (mut x, mut y) = (1.0f64, 0.0f64);
    for _ in 0..times {
        (x, y) = (c * x - s * y, s * x + c * y);
    }
    let (s, c) = std::f64::consts::FRAC_PI_4.sin_cos();
    let y = s * x + c * y;
    y * y
}

/// Outcome of the unary composition for `a^{8^n}` with `n - 1 ∈ I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Upower8Outcome {
    /// `n` when the length is `8^n`.
    pub exponent: Option<u64>,
    /// The queried index `n - 1`, when positive.
    pub index: Option<u64>,
    pub accept_probability: f64,
    pub decision: Decision,
    pub adh: Option<AdhOutcome>,
    /// The digit-reading phase leaves the counter untouched.
    #[serde(with = "crate::model::stats::big_string")]
    pub counter_space: BigUint,
    /// The length check is a deterministic stand-in, so the middle-space
    /// bound of the counter phase is not measured.
    pub middle_space_reproduced: bool,
}

/// `log₈ n` when `n` is a power of 8.
pub fn log8_exact(n: &BigUint) -> Option<u64> {
    if n.is_zero() || n.count_ones() != 1 {
        return None;
    }
    let tz = n.trailing_zeros()?;
    (tz % 3 == 0).then_some(tz / 3)
}

/// Decides `a^{n_len}` for `UPOWER8(I)`: a deterministic power-of-8 check,
/// then the digit-reading procedure at index `n - 1`. `a^1` and `a^8` have
/// no positive index and are rejected.
pub fn qcca_upower8_i(n_len: &BigUint, o: &SubsetOracle) -> Result<Upower8Outcome> {
    let exponent = log8_exact(n_len);
    let reject = |exponent| Upower8Outcome {
        exponent,
        index: None,
        accept_probability: 0.0,
        decision: Decision::Reject,
        adh: None,
        counter_space: BigUint::zero(),
        middle_space_reproduced: false,
    };
    let Some(n) = exponent else {
        return Ok(reject(None));
    };
    if n < 2 {
        return Ok(reject(exponent));
    }
    let j = n - 1;
    let adh = adh_accept_probability(o, j)?;
    Ok(Upower8Outcome {
        exponent,
        index: Some(j),
        accept_probability: adh.p_out,
        decision: adh.likely(),
        adh: Some(adh),
        counter_space: BigUint::zero(),
        middle_space_reproduced: false,
    })
}
