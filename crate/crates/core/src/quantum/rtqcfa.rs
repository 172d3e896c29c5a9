//! Restarting realtime QCFA for `POWER-EQ`.
//!
//! Only the first three amplitudes of the 9-state machine matter between
//! measurements, so a round is traced as an integer 3-vector times `l^e`.
//! Whatever squared norm a step loses goes to the restart outcome.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::adh::adh_rotate;
use crate::error::{Error, Result};
use crate::model::{
    BinaryExpansion, Cell, Decision, Direction, HeadDiscipline, InputTape, RandomSource,
    SubsetOracle, TapeMode, Word,
};

/// Quantum operators a single round may apply before giving up exactly.
pub const MAX_ROUND_STEPS: u64 = 1 << 16;

/// Largest squared Frobenius norm among the step matrices; `l² · 67 ≤ 1`
/// makes every `l·A` a contraction.
const MAX_FROBENIUS_SQ: u32 = 67;

/// The default coefficient `l = 1/64`.
pub fn default_l() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(64))
}

/// Unnormalised significant amplitudes `l^e · v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumCore3 {
    pub v: [BigInt; 3],
    pub exponent: u64,
}

impl QuantumCore3 {
    fn start() -> Self {
        Self {
            v: [BigInt::one(), BigInt::zero(), BigInt::zero()],
            exponent: 0,
        }
    }

    /// `‖l^e v‖²`.
    pub fn norm_sq(&self, l: &BigRational) -> BigRational {
        let s: BigInt = self.v.iter().map(|x| x * x).sum();
        BigRational::from_integer(s) * l_pow(l, 2 * self.exponent)
    }

    /// `l·[[1,0,0],[8,1,0],[0,0,0]]`.
    fn init_step(&mut self) {
        self.v[1] = &self.v[0] * 8 + &self.v[1];
        self.v[2] = BigInt::zero();
        self.exponent += 1;
    }

    /// `(l·[[1,0,0],[0,1,0],[1,0,1]])^count`.
    fn count_a(&mut self, count: u64) {
        self.v[2] = &self.v[2] + &self.v[0] * count;
        self.exponent += count;
    }

    /// `l·[[1,0,0],[0,0,8],[0,-1,1]]`.
    fn read_b(&mut self) {
        let v1 = &self.v[2] * 8;
        let v2 = &self.v[2] - &self.v[1];
        self.v[1] = v1;
        self.v[2] = v2;
        self.exponent += 1;
    }

    /// `l·[[1,0,0],[0,0,0],[0,0,0]]`.
    fn end_marker(&mut self) {
        self.v[1] = BigInt::zero();
        self.v[2] = BigInt::zero();
        self.exponent += 1;
    }
}

fn l_pow(l: &BigRational, e: u64) -> BigRational {
    num_traits::pow(l.clone(), e as usize)
}

/// How the round ended before or after the quantum phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Screening {
    /// Not of the form `a b a^7 b (a^+ b)^+`, rejected deterministically.
    Malformed,
    /// Went through the quantum phase.
    Quantum,
}

/// One round's accept and reject probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub accept: BigRational,
    pub reject: BigRational,
    pub screening: Screening,
}

impl RoundOutcome {
    pub fn restart(&self) -> BigRational {
        BigRational::one() - &self.accept - &self.reject
    }

    pub fn log2_accept(&self) -> f64 {
        log2_rational(&self.accept)
    }

    pub fn log2_reject(&self) -> f64 {
        log2_rational(&self.reject)
    }
}

/// State at the start of a block of `a`s, after the `b` that precedes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockBoundary {
    /// Zero for the state after the initial `a b a^7 b`.
    pub block: usize,
    pub state: QuantumCore3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub boundaries: Vec<BlockBoundary>,
    /// Reject probability contributed at each block's closing `b`.
    pub rejections: Vec<BigRational>,
    /// Squared norm lost to restarts during each input run.
    pub leakage: Vec<BigRational>,
    /// `a`-block lengths after the prefix.
    pub blocks: Vec<BigUint>,
    /// Quantum operators applied.
    pub operators: u64,
}

/// `log₂` of a positive rational, `-∞` for zero.
pub fn log2_rational(x: &BigRational) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        let shift = bits.saturating_sub(60);
        let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.log2() + shift as f64
    }
    log2_int(x.numer()) - log2_int(x.denom())
}

fn check_l(l: &BigRational) -> Result<()> {
    let max = BigRational::from_integer(BigInt::from(MAX_FROBENIUS_SQ));
    if !l.is_positive() || l >= &BigRational::one() || l * l * max > BigRational::one() {
        return Err(Error::Domain(format!(
            "l = {l} does not make every step matrix a contraction"
        )));
    }
    Ok(())
}

fn expect_symbol(step: Option<(Cell, BigUint)>, symbol: u8, count: Option<u64>) -> Option<BigUint> {
    match step {
        Some((Cell::Symbol(s), c)) if s == symbol => match count {
            Some(n) if c != BigUint::from(n) => None,
            _ => Some(c),
        },
        _ => None,
    }
}

/// Simulates one round on `w` exactly.
///
/// The head moves right on every symbol. The classical part checks the
/// shape `a b a^7 b (a^+ b)^*` and rejects inputs of any other shape.
pub fn rtqcfa_round(w: &Word, l: &BigRational) -> Result<(RoundOutcome, RoundTrace)> {
    check_l(l)?;
    let mut tape = InputTape::new(w, TapeMode::Rle, HeadDiscipline::RestartingRealtime)?;
    let mut state = QuantumCore3::start();
    let mut trace = RoundTrace {
        boundaries: Vec::new(),
        rejections: Vec::new(),
        leakage: Vec::new(),
        blocks: Vec::new(),
        operators: 0,
    };
    let malformed = |trace: RoundTrace| {
        let outcome = RoundOutcome {
            accept: BigRational::zero(),
            reject: BigRational::one(),
            screening: Screening::Malformed,
        };
        Ok((outcome, trace))
    };

    let head = [
        expect_symbol(tape.cross_run(Direction::Right)?, b'a', Some(1)),
        expect_symbol(tape.cross_run(Direction::Right)?, b'b', Some(1)),
        expect_symbol(tape.cross_run(Direction::Right)?, b'a', Some(7)),
        expect_symbol(tape.cross_run(Direction::Right)?, b'b', Some(1)),
    ];
    if head.iter().any(Option::is_none) {
        return malformed(trace);
    }
    // The first `a` and the two `b`s of the prefix act as the identity.
    for _ in 0..7 {
        state.init_step();
    }
    trace.operators = 7;
    let mut norm = state.norm_sq(l);
    trace.leakage.push(BigRational::one() - &norm);
    trace.boundaries.push(BlockBoundary {
        block: 0,
        state: state.clone(),
    });

    let mut reject = BigRational::zero();
    loop {
        match tape.cross_run(Direction::Right)? {
            Some((Cell::RightMarker, _)) => break,
            Some((Cell::Symbol(b'a'), count)) => {
                let Some(c) = count
                    .to_u64()
                    .filter(|c| trace.operators + c < MAX_ROUND_STEPS)
                else {
                    return Err(Error::ExactTooLarge(format!(
                        "round longer than {MAX_ROUND_STEPS} quantum steps"
                    )));
                };
                state.count_a(c);
                trace.operators += c;
                trace.blocks.push(count);
            }
            _ => return malformed(trace),
        }
        let before_a = norm;
        match tape.cross_run(Direction::Right)? {
            Some((Cell::Symbol(b'b'), c)) if c.is_one() => {}
            _ => return malformed(trace),
        }
        state.read_b();
        trace.operators += 1;
        let rejected =
            BigRational::from_integer(&state.v[2] * &state.v[2]) * l_pow(l, 2 * state.exponent);
        let after_b = state.norm_sq(l);
        state.v[2] = BigInt::zero();
        norm = state.norm_sq(l);
        trace.leakage.push(before_a - after_b);
        trace.rejections.push(rejected.clone());
        reject += rejected;
        trace.boundaries.push(BlockBoundary {
            block: trace.blocks.len(),
            state: state.clone(),
        });
    }
    state.end_marker();
    trace.operators += 1;
    let accept = state.norm_sq(l);
    trace.leakage.push(norm - &accept);
    Ok((
        RoundOutcome {
            accept,
            reject,
            screening: Screening::Quantum,
        },
        trace,
    ))
}

/// Outcome of repeating rounds until one halts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overall {
    pub accept: BigRational,
    pub reject: BigRational,
    pub expected_rounds: BigRational,
    pub log2_expected_rounds: f64,
}

pub fn rtqcfa_overall(round: &RoundOutcome) -> Result<Overall> {
    let halt = &round.accept + &round.reject;
    if halt.is_zero() {
        return Err(Error::Domain("a round that never halts".into()));
    }
    Ok(Overall {
        accept: &round.accept / &halt,
        reject: &round.reject / &halt,
        expected_rounds: halt.recip(),
        log2_expected_rounds: -log2_rational(&halt),
    })
}

/// The composition with the digit reader for `POWER-EQ(I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEqIOutcome {
    pub round: RoundOutcome,
    pub overall: Overall,
    /// Probability that the digit reader says "in `I`" after `|w|_a`
    /// rotations.
    pub adh_accept: f64,
    /// Overall acceptance of the tensored machine.
    pub accept_probability: f64,
    /// `log₈ |w|_a`, the queried index, when `|w|_a` is a power of 8.
    pub index: Option<u64>,
}

/// The tensored machine halts when the `POWER-EQ` part halts and accepts
/// only when both parts accept, so its overall acceptance is the digit
/// reader's acceptance times that of the `POWER-EQ` part.
pub fn rtqcfa_power_eq_i(w: &Word, l: &BigRational, o: &SubsetOracle) -> Result<PowerEqIOutcome> {
    let (round, _) = rtqcfa_round(w, l)?;
    let overall = rtqcfa_overall(&round)?;
    let a_count = w.count_of(b'a');
    let index = super::adh::log8_exact(&a_count);
    let adh_accept = match (round.screening, index) {
        (Screening::Malformed, _) => 0.0,
        (_, Some(j)) if j >= 1 => {
            if j >= o.len() as u64 {
                return Err(Error::OutOfPrefix {
                    index: j + 1,
                    len: o.len(),
                });
            }
            adh_rotate(o, &a_count).p_out
        }
        _ => adh_rotate(o, &a_count).p_out,
    };
    let accept_probability = overall.accept.to_f64().unwrap_or(0.0) * adh_accept;
    Ok(PowerEqIOutcome {
        round,
        overall,
        adh_accept,
        accept_probability,
        index,
    })
}

/// `a b a^7 b a^{7·8} b ... a^{7·8^n} b`.
pub fn power_eq_word(n: u32) -> Word {
    let mut w = Word::from_symbols(b"ab");
    for i in 0..=n {
        w.push(b'a', BigUint::from(7u32) << (3 * i as usize));
        w.push(b'b', 1u32);
    }
    w
}

/// Direct check against the member with the same number of blocks.
pub fn power_eq_member(w: &Word) -> bool {
    let blocks = w.count_of(b'b');
    let Some(b) = blocks.to_u32() else {
        return false;
    };
    b >= 2 && power_eq_word(b - 2) == *w
}

/// `t_n`, the operators applied before the end-marker on member `n`.
pub fn closed_form_t(n: u32) -> u64 {
    (0..=n).map(|i| 7u64 << (3 * i)).sum::<u64>() + u64::from(n)
}

/// Exact acceptance of a member round, `l^{2t_n + 2}`.
pub fn closed_form_accept(n: u32, l: &BigRational) -> BigRational {
    l_pow(l, 2 * closed_form_t(n) + 2)
}

/// Draws the decision and number of rounds of repeated restarts.
///
/// The decision is exact. The round count inverts the geometric law in
/// floating point, so very small halting probabilities give approximate
/// counts.
pub fn sample_rounds(round: &RoundOutcome, rng: &mut RandomSource) -> Result<(Decision, BigUint)> {
    let overall = rtqcfa_overall(round)?;
    let decision = Decision::from_bool(rng.bernoulli(&BinaryExpansion::new(&overall.accept)?));
    // A uniform in (0, 1] from 53 fair bits.
    let mut bits = 0u64;
    for _ in 0..53 {
        bits = (bits << 1) | u64::from(rng.fair_bit());
    }
    let u = (bits as f64 + 1.0) / 9_007_199_254_740_992.0;
    let halt = &round.accept + &round.reject;
    let log2_halt = log2_rational(&halt);
    let rounds = if log2_halt > -40.0 {
        let q = halt.to_f64().unwrap_or(1.0);
        if q >= 1.0 {
            1.0
        } else {
            (u.ln() / (-q).ln_1p()).ceil().max(1.0)
        }
    } else {
        // ln(1 - q) ≈ -q; scale -ln u by 2^{-log2 q} in two parts.
        let e = -u.ln();
        let whole = (-log2_halt).floor();
        let frac = -log2_halt - whole;
        let mantissa = e * frac.exp2() * 2f64.powi(52);
        let big = BigUint::from(mantissa as u64) << (whole as usize);
        return Ok((decision, (big >> 52usize).max(BigUint::one())));
    };
    Ok((decision, BigUint::from(rounds as u64)))
}
