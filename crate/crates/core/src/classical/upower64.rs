use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{
    BinaryExpansion, Cell, Decision, Direction, HeadDiscipline, InputTape, RandomSource, RunStats,
    SubsetOracle, TapeMode, Word, WorkTape,
};

/// Longest input the one-way machine simulates symbol by symbol.
pub const MAX_INPUT: u64 = 1 << 24;

const TRACK_LENGTH: u8 = 0;
const TRACK_HEADS: u8 = 1;

/// `|w| = 64^k` for some `k ≥ 1`.
pub fn upower64_member(len: &BigUint) -> bool {
    let bits = len.bits();
    len.count_ones() == 1 && bits > 1 && (bits - 1).is_multiple_of(6)
}

/// One-way PTM for `UPOWER64(I)`.
///
/// Reads `0^n` left to right. For each symbol it bumps a length counter and
/// tosses the `p_I` coin, bumping a heads counter on heads. Both counters
/// share the cells of one work tape. At the right end-marker it checks that
/// the length is `64^m` and answers with the heads bit of weight `2^{3m+2}`.
pub fn ptm1_upower64_i(
    w: &Word,
    mode: TapeMode,
    o: &SubsetOracle,
    rng: &mut RandomSource,
) -> Result<RunStats> {
    if w.len() > BigUint::from(MAX_INPUT) {
        return Err(Error::CapExceeded(format!(
            "one-way simulation limited to {MAX_INPUT} symbols"
        )));
    }
    let mut tape = InputTape::new(w, mode, HeadDiscipline::OneWay)?;
    let mut work = WorkTape::new();
    let p = BinaryExpansion::new(&o.coin_bias())?;
    let mut stationary = 0u64;

    let decision = loop {
        tape.step(Direction::Right)?;
        match tape.current() {
            Cell::Symbol(b'0') => {
                work.increment(TRACK_LENGTH);
                if rng.bernoulli(&p) {
                    work.increment(TRACK_HEADS);
                }
            }
            Cell::Symbol(_) => break Decision::Reject,
            Cell::RightMarker => {
                let Some(m) = work.power_of_64(TRACK_LENGTH) else {
                    break Decision::Reject;
                };
                o.query(m)?;
                work.move_to(3 * m as i64 + 2);
                let bit = work.read_bit(TRACK_HEADS);
                work.move_to(0);
                stationary += 1;
                break Decision::from_bool(bit);
            }
            Cell::LeftMarker => unreachable!("one-way head never returns"),
        }
    };
    let mut stats = RunStats::new(decision).with_tape(&tape);
    stats.steps = &tape.audit().right_moves + work.moves() + stationary;
    stats.space_work = work.space();
    Ok(stats)
}

/// `log₂ n` floored at 1, the scale of the step and space budgets.
pub fn log2_floor1(n: &BigUint) -> f64 {
    if n <= &BigUint::one() || n.is_zero() {
        return 1.0;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(53);
    let top: u64 = (n >> shift).try_into().unwrap_or(u64::MAX);
    ((top as f64).log2() + shift as f64).max(1.0)
}
