//! Counter machines for `DIMA` and `DIMA(I)`.
//!
//! A member with parameter `k` is the word
//! `B_0 1 B_1 1 ... 1 B_{3k+1} 11 B_{3k+2} 11 B_{3k+3} 1 ... 1 B_{6k}` with
//! `B_j = 0^{2^j}`. The machines here move over whole runs at a time, so a
//! block of `2^j` zeros costs one big-integer update instead of `2^j`
//! iterations while the step count stays exact.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coin::check_odd;
use crate::error::{Error, Result};
use crate::model::{
    BinaryExpansion, Cell, CounterState, Decision, Direction, HeadDiscipline, InputTape,
    RandomSource, RunStats, SubsetOracle, TapeMode, Word,
};

use Direction::{Left, Right};

/// The canonical member with parameter `k`.
pub fn dima_word(k: u32) -> Word {
    let mut w = Word::unary(b'0', 1u32);
    for j in 1..=6 * k {
        let sep = if j == 3 * k + 2 || j == 3 * k + 3 {
            2u32
        } else {
            1
        };
        w.push(b'1', sep);
        w.push(b'0', BigUint::one() << j as usize);
    }
    w
}

/// Where the counter first read zero during the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkEnd {
    /// At the loop start, before a forward traversal: bit 0.
    LoopStart,
    /// Inside a forward traversal: bit 0.
    Forward,
    /// Exactly at the end of a forward traversal: bit 1.
    ForwardEnd,
    /// Inside a backward traversal: bit 1.
    Backward,
}

impl WalkEnd {
    pub fn bit(self) -> bool {
        matches!(self, WalkEnd::ForwardEnd | WalkEnd::Backward)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub end: WalkEnd,
    /// Completed forward-and-back loops before the end.
    pub loops: u64,
    #[serde(with = "crate::model::stats::big_string")]
    pub steps: BigUint,
}

struct Machine {
    tape: InputTape,
    counter: CounterState,
    stationary: BigUint,
}

impl Machine {
    fn new(w: &Word, mode: TapeMode, discipline: HeadDiscipline) -> Result<Self> {
        Ok(Self {
            tape: InputTape::new(w, mode, discipline)?,
            counter: CounterState::new(),
            stationary: BigUint::zero(),
        })
    }

    fn steps(&self) -> BigUint {
        let a = self.tape.audit();
        &a.left_moves + &a.right_moves + &self.stationary
    }

    fn stats(&self, decision: Decision) -> RunStats {
        let mut s = RunStats::new(decision).with_tape(&self.tape);
        s.steps = self.steps();
        s.space_counter = self.counter.max_value().clone();
        s
    }

    fn peek(&self, dir: Direction) -> Option<(Cell, BigUint)> {
        self.tape.run_ahead(dir)
    }

    fn cross(&mut self, dir: Direction) -> Result<Option<(Cell, BigUint)>> {
        self.tape.cross_run(dir)
    }

    fn mv(&mut self, dir: Direction, n: &BigUint) -> Result<()> {
        self.tape.move_by(dir, n)
    }

    fn stay(&mut self, n: impl Into<BigUint>) {
        self.stationary += n.into();
    }

    /// Zero test followed by a decrement; `false` when the counter was zero.
    fn try_decrement(&mut self) -> Result<bool> {
        self.stay(1u32);
        if self.counter.is_zero() {
            return Ok(false);
        }
        self.counter.decrement()?;
        Ok(true)
    }

    /// Clears the counter one decrement per step.
    fn clear_counter(&mut self) {
        let v = self.counter.reset();
        self.stay(v);
    }

    /// Checks that the counter holds exactly `target`.
    fn counter_equals(&mut self, target: u32) -> Result<bool> {
        for _ in 0..target {
            if !self.try_decrement()? {
                return Ok(false);
            }
        }
        self.stay(1u32);
        Ok(self.counter.is_zero())
    }
}

/// Which blocks the form scan counts down.
#[derive(Clone, Copy, PartialEq, Eq)]
enum CountRule {
    /// Blocks after the first `11`; a member leaves 3 on the counter.
    AfterFirst,
    /// Blocks after the second `11`; a member leaves 4.
    AfterSecond,
}

/// Left-to-right scan from the left end-marker. Checks the finite-state
/// shape (a single leading 0, separators `1` except two adjacent `11`, a
/// trailing zero block, `6k + 1` blocks with `k ≥ 1`) and the block-count
/// balance on the counter. Returns the block count.
fn scan_form(m: &mut Machine, rule: CountRule) -> Result<Option<u64>> {
    match m.cross(Right)? {
        Some((Cell::Symbol(b'0'), c)) if c.is_one() => {}
        _ => return Ok(None),
    }
    m.counter.increment();
    let mut blocks = 1u64;
    let mut elevens = 0u8;
    loop {
        match m.cross(Right)? {
            Some((Cell::RightMarker, _)) => break,
            Some((Cell::Symbol(b'1'), c)) => {
                match c.to_u8() {
                    Some(2) if elevens < 2 => elevens += 1,
                    Some(1) if elevens != 1 => {}
                    _ => return Ok(None),
                }
                match m.cross(Right)? {
                    Some((Cell::Symbol(b'0'), _)) => {}
                    _ => return Ok(None),
                }
                blocks += 1;
                let down = match rule {
                    CountRule::AfterFirst => elevens >= 1,
                    CountRule::AfterSecond => elevens == 2,
                };
                if elevens == 0 {
                    m.counter.increment();
                } else if down && !m.try_decrement()? {
                    return Ok(None);
                }
            }
            _ => return Ok(None),
        }
    }
    if elevens != 2 || blocks % 6 != 1 || blocks == 1 {
        return Ok(None);
    }
    let target = match rule {
        CountRule::AfterFirst => 3,
        CountRule::AfterSecond => 4,
    };
    if !m.counter_equals(target)? {
        return Ok(None);
    }
    Ok(Some(blocks))
}

/// From the cell before `B_j` (head moving right), checks
/// `|B_{j+1}| = 2·|B_j|` for every consecutive pair, returning to the start
/// of each longer block before the next comparison.
fn doubling_pass(m: &mut Machine) -> Result<bool> {
    loop {
        match m.cross(Right)? {
            Some((Cell::Symbol(b'0'), len)) => m.counter.add(&len),
            _ => return Ok(false),
        }
        match m.cross(Right)? {
            Some((Cell::RightMarker, _)) => {
                m.clear_counter();
                return Ok(true);
            }
            Some((Cell::Symbol(b'1'), _)) => {}
            _ => return Ok(false),
        }
        let Some((Cell::Symbol(b'0'), len)) = m.peek(Right) else {
            return Ok(false);
        };
        // Decrement on every second zero, testing for zero first.
        let wanted = &len >> 1usize;
        let drained = m.counter.drain(&wanted);
        if drained < wanted {
            m.stay(1u32);
            m.mv(Right, &((drained + 1u32) << 1usize))?;
            return Ok(false);
        }
        m.mv(Right, &len)?;
        m.tape.step(Right)?;
        m.stay(1u32);
        if !m.counter.is_zero() || len.bit(0) {
            return Ok(false);
        }
        m.mv(Left, &(len + 1u32))?;
    }
}

fn run_dca2(m: &mut Machine) -> Result<Option<u64>> {
    let Some(blocks) = scan_form(m, CountRule::AfterFirst)? else {
        return Ok(None);
    };
    m.tape.move_to_marker(Left)?;
    if !doubling_pass(m)? {
        return Ok(None);
    }
    Ok(Some(blocks))
}

/// Deterministic two-way one-counter automaton for `DIMA`.
pub fn dca2_dima(w: &Word, mode: TapeMode) -> Result<RunStats> {
    let mut m = Machine::new(w, mode, HeadDiscipline::TwoWay)?;
    let accepted = run_dca2(&mut m)?.is_some();
    Ok(m.stats(Decision::from_bool(accepted)))
}

fn parameter(blocks: u64, o: &SubsetOracle) -> Result<u32> {
    let k = (blocks - 1) / 6;
    o.query(k)?;
    u32::try_from(k).map_err(|_| Error::Domain(format!("DIMA parameter {k} too large")))
}

/// Tosses the coin once per zero of the block adjacent to the head in
/// `dir`, adding the heads to the counter while crossing it.
fn toss_block(
    m: &mut Machine,
    dir: Direction,
    p: &BinaryExpansion,
    rng: &mut RandomSource,
) -> Result<()> {
    let Some((Cell::Symbol(b'0'), len)) = m.peek(dir) else {
        return Err(Error::Domain("expected a zero block to toss on".into()));
    };
    let n = len
        .to_u64()
        .filter(|&n| n <= crate::coin::SAMPLE_MAX_TOSSES)
        .ok_or_else(|| Error::CapExceeded(format!("{len} coin tosses")))?;
    m.counter.add(&BigUint::from(rng.binomial(n, p)));
    m.mv(dir, &len)
}

/// Forward traversal of the middle block, head on `s0`: reject at once on
/// zero, reject on a zero counter while reading a 0, accept if the counter
/// reads zero on arrival at `s1`. `None` means the walk continues.
fn forward(m: &mut Machine, len: &BigUint) -> Result<Option<WalkEnd>> {
    m.stay(1u32);
    if m.counter.is_zero() {
        return Ok(Some(WalkEnd::LoopStart));
    }
    let drained = m.counter.drain(len);
    if drained < *len {
        m.mv(Right, &(drained + 1u32))?;
        return Ok(Some(WalkEnd::Forward));
    }
    m.mv(Right, &(len + 1u32))?;
    m.stay(1u32);
    if m.counter.is_zero() {
        return Ok(Some(WalkEnd::ForwardEnd));
    }
    Ok(None)
}

/// Backward traversal, head on `s1`: accept on a zero counter while reading
/// a 0; otherwise arrive back at `s0`.
fn backward(m: &mut Machine, len: &BigUint) -> Result<Option<WalkEnd>> {
    let drained = m.counter.drain(len);
    if drained < *len {
        m.mv(Left, &(drained + 1u32))?;
        return Ok(Some(WalkEnd::Backward));
    }
    m.mv(Left, &(len + 1u32))?;
    Ok(None)
}

/// The subtraction walk around the middle block, head on `s0`, the second
/// symbol of the first `11`.
fn walk(m: &mut Machine) -> Result<WalkTrace> {
    let start = m.steps();
    let Some((Cell::Symbol(b'0'), len)) = m.peek(Right) else {
        return Err(Error::Domain(
            "walk must start left of the middle block".into(),
        ));
    };
    let mut loops = 0u64;
    let end = loop {
        if let Some(end) = forward(m, &len)? {
            break end;
        }
        if let Some(end) = backward(m, &len)? {
            break end;
        }
        loops += 1;
    };
    Ok(WalkTrace {
        end,
        loops,
        steps: m.steps() - start,
    })
}

/// Moves left from the last block to `s0`.
fn seek_s0_from_right(m: &mut Machine) -> Result<()> {
    let mut elevens = 0;
    loop {
        match m.peek(Left) {
            Some((Cell::Symbol(b'1'), c)) if c.to_u8() == Some(2) => {
                elevens += 1;
                if elevens == 2 {
                    return m.tape.step(Left);
                }
                m.cross(Left)?;
            }
            Some((Cell::LeftMarker, _)) | None => {
                return Err(Error::Domain("no 11 separator on the tape".into()))
            }
            Some(_) => {
                m.cross(Left)?;
            }
        }
    }
}

/// Runs the walk on the canonical member with parameter `k` and a counter
/// preloaded with `heads`.
pub fn forced_walk(k: u32, heads: &BigUint) -> Result<WalkTrace> {
    let mut m = Machine::new(&dima_word(k), TapeMode::Rle, HeadDiscipline::TwoWay)?;
    m.tape.move_to_marker(Right)?;
    m.tape.step(Left)?;
    seek_s0_from_right(&mut m)?;
    m.counter.add(heads);
    walk(&mut m)
}

/// Bounded-error 2PCA for `DIMA(I)`.
///
/// After the 2DCA accepts, each of `r` repetitions tosses the `p_I` coin on
/// every zero of the last block (`64^k` tosses) counting heads, then walks
/// the middle block of length `2^{3k+2}` from `s0`, subtracting twice its
/// length per loop. The walk ends with the heads bit of weight `2^{3k+2}`.
pub fn pca2_dima_i(
    w: &Word,
    mode: TapeMode,
    o: &SubsetOracle,
    r: u32,
    rng: &mut RandomSource,
) -> Result<RunStats> {
    check_odd(r)?;
    let mut m = Machine::new(w, mode, HeadDiscipline::TwoWay)?;
    let Some(blocks) = run_dca2(&mut m)? else {
        return Ok(m.stats(Decision::Reject));
    };
    parameter(blocks, o)?;
    let p = BinaryExpansion::new(&o.coin_bias())?;
    let mut ones = 0;
    for _ in 0..r {
        m.tape.move_to_marker(Right)?;
        toss_block(&mut m, Left, &p, rng)?;
        seek_s0_from_right(&mut m)?;
        let trace = walk(&mut m)?;
        ones += u32::from(trace.end.bit());
        m.clear_counter();
    }
    Ok(m.stats(Decision::from_bool(2 * ones > r)))
}

/// Sweeping pass over all blocks comparing disjoint consecutive pairs.
/// Moving right the first block of each pair is the shorter, moving left
/// the longer. The final unpaired block is discarded at the end-marker.
fn pair_pass(m: &mut Machine, dir: Direction) -> Result<bool> {
    let mut first_of_pair = true;
    loop {
        match m.peek(dir) {
            Some((Cell::Symbol(b'1'), _)) => {
                m.cross(dir)?;
            }
            Some((Cell::Symbol(b'0'), len)) => {
                if first_of_pair {
                    m.counter.add(&len);
                    m.mv(dir, &len)?;
                } else if !second_block(m, dir, &len)? {
                    return Ok(false);
                }
                first_of_pair = !first_of_pair;
            }
            Some((Cell::LeftMarker | Cell::RightMarker, _)) => {
                m.cross(dir)?;
                m.clear_counter();
                return Ok(true);
            }
            _ => return Ok(false),
        }
    }
}

/// Second block of a pair. Moving right it must be twice the first
/// (decrement on every second zero); moving left it must be half the first
/// (two decrements per zero). Either way the counter must then be zero.
fn second_block(m: &mut Machine, dir: Direction, len: &BigUint) -> Result<bool> {
    match dir {
        Right => {
            let wanted = len >> 1usize;
            let drained = m.counter.drain(&wanted);
            if drained < wanted {
                m.stay(1u32);
                m.mv(dir, &((drained + 1u32) << 1usize))?;
                return Ok(false);
            }
            m.mv(dir, len)?;
            if len.bit(0) {
                return Ok(false);
            }
        }
        Left => {
            let wanted = len << 1usize;
            let drained = m.counter.drain(&wanted);
            if drained < wanted {
                m.stay(1u32);
                m.mv(dir, &((drained >> 1usize) + 1u32))?;
                return Ok(false);
            }
            m.mv(dir, len)?;
        }
    }
    m.stay(1u32);
    Ok(m.counter.is_zero())
}

/// Sweeps from the current end-marker to the other one.
fn finish_sweep(m: &mut Machine, dir: Direction) -> Result<()> {
    m.tape.move_to_marker(dir)?;
    Ok(())
}

/// Moves right from the left end-marker to `s0`.
fn seek_s0_from_left(m: &mut Machine) -> Result<()> {
    loop {
        match m.peek(Right) {
            Some((Cell::Symbol(b'1'), c)) if c.to_u8() == Some(2) => {
                return m.mv(Right, &c);
            }
            Some((Cell::RightMarker, _)) | None => {
                return Err(Error::Domain("no 11 separator on the tape".into()))
            }
            Some(_) => {
                m.cross(Right)?;
            }
        }
    }
}

/// Moves left from the right end-marker to `s1`, the first symbol of the
/// second `11`.
fn seek_s1_from_right(m: &mut Machine) -> Result<()> {
    loop {
        match m.peek(Left) {
            Some((Cell::Symbol(b'1'), c)) if c.to_u8() == Some(2) => {
                return m.mv(Left, &c);
            }
            Some((Cell::LeftMarker, _)) | None => {
                return Err(Error::Domain("no 11 separator on the tape".into()))
            }
            Some(_) => {
                m.cross(Left)?;
            }
        }
    }
}

/// Sweeping PCA for `DIMA(I)`.
///
/// Three deterministic sweeps (shape and block balance; pairs
/// `(B_{2i-1}, B_{2i})` right to left; pairs `(B_{2i-2}, B_{2i-1})` left to
/// right), then per repetition a right-to-left tossing sweep over the last
/// block and walk sweeps: each left-to-right sweep performs one forward
/// traversal of the middle block, each right-to-left sweep one backward
/// traversal.
pub fn pca_sweeping_dima_i(
    w: &Word,
    mode: TapeMode,
    o: &SubsetOracle,
    r: u32,
    rng: &mut RandomSource,
) -> Result<RunStats> {
    check_odd(r)?;
    let mut m = Machine::new(w, mode, HeadDiscipline::Sweeping)?;
    let Some(blocks) = scan_form(&mut m, CountRule::AfterSecond)? else {
        return Ok(m.stats(Decision::Reject));
    };
    m.clear_counter();
    if !pair_pass(&mut m, Left)? || !pair_pass(&mut m, Right)? {
        return Ok(m.stats(Decision::Reject));
    }
    parameter(blocks, o)?;
    let p = BinaryExpansion::new(&o.coin_bias())?;
    let mut ones = 0;
    for _ in 0..r {
        if m.tape.current() == Cell::LeftMarker {
            finish_sweep(&mut m, Right)?;
        }
        toss_block(&mut m, Left, &p, rng)?;
        finish_sweep(&mut m, Left)?;
        let end = loop {
            seek_s0_from_left(&mut m)?;
            let len = match m.peek(Right) {
                Some((Cell::Symbol(b'0'), len)) => len,
                _ => return Err(Error::Domain("middle block missing".into())),
            };
            if let Some(end) = forward(&mut m, &len)? {
                finish_sweep(&mut m, Right)?;
                break end;
            }
            finish_sweep(&mut m, Right)?;
            seek_s1_from_right(&mut m)?;
            if let Some(end) = backward(&mut m, &len)? {
                finish_sweep(&mut m, Left)?;
                break end;
            }
            finish_sweep(&mut m, Left)?;
        };
        ones += u32::from(end.bit());
        m.clear_counter();
    }
    Ok(m.stats(Decision::from_bool(2 * ones > r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn accepts(word: &Word) -> bool {
        let a = dca2_dima(word, TapeMode::Rle).unwrap();
        if word.len() <= BigUint::from(1u32 << 16) {
            let b = dca2_dima(word, TapeMode::Explicit).unwrap();
            assert_eq!(a, b, "{word}");
        }
        a.decision.is_accept()
    }

    #[test]
    fn k1_member_shape() {
        let m = dima_word(1);
        assert_eq!(m, w("0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^64"));
        assert_eq!(m.len(), BigUint::from(135u32));
    }

    #[test]
    fn dca2_accepts_members() {
        for k in 1..=3 {
            let word = dima_word(k);
            let s = dca2_dima(&word, TapeMode::Rle).unwrap();
            assert_eq!(s.decision, Decision::Accept, "k = {k}");
            assert!(s.space_counter <= word.len());
            assert!(s.steps <= word.len() * 8u32);
        }
    }

    #[test]
    fn dca2_rejects_broken_words() {
        assert!(!accepts(&w("")));
        assert!(!accepts(&w("0 1 0^3 1 0^4 1 0^8 1 0^16 11 0^32 11 0^64")));
        assert!(!accepts(&w("0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^63")));
        assert!(!accepts(&w("0 1 0^2 11 0^4 1 0^8 1 0^16 11 0^32 11 0^64")));
        assert!(!accepts(&w("0 1 0^2 1 0^4 1 0^8 11 0^16 11 0^32 1 0^64")));
        assert!(!accepts(&w("0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^64 1")));
        assert!(!accepts(&w(
            "0^2 1 0^4 1 0^8 1 0^16 1 0^32 11 0^64 11 0^128"
        )));
    }

    #[test]
    fn forced_walk_examples() {
        let t = forced_walk(1, &BigUint::zero()).unwrap();
        assert_eq!(t.end, WalkEnd::LoopStart);
        let t = forced_walk(1, &BigUint::from(32u32)).unwrap();
        assert_eq!(t.end, WalkEnd::ForwardEnd);
        let t = forced_walk(1, &BigUint::from(16u32)).unwrap();
        assert_eq!(t.end, WalkEnd::Forward);
    }

    #[test]
    fn walk_reads_the_bit_for_every_count() {
        for k in 1..=2u32 {
            for c in 0..=64u64.pow(k) {
                let t = forced_walk(k, &BigUint::from(c)).unwrap();
                let bit = (c >> (3 * k + 2)) & 1 == 1;
                assert_eq!(t.end.bit(), bit, "k={k} c={c}");
            }
        }
    }

    #[test]
    fn probabilistic_machines_agree_and_read_the_bit() {
        let word = dima_word(1);
        let o: SubsetOracle = "1".parse().unwrap();
        let mut acc = 0;
        for seed in 0..30 {
            let a = pca2_dima_i(&word, TapeMode::Rle, &o, 5, &mut RandomSource::new(seed)).unwrap();
            let b = pca_sweeping_dima_i(&word, TapeMode::Rle, &o, 5, &mut RandomSource::new(seed))
                .unwrap();
            assert_eq!(a.decision, b.decision);
            assert_eq!(b.inner_reversals, 0);
            acc += u32::from(a.decision.is_accept());
        }
        assert!(acc >= 27);
    }

    #[test]
    fn sweeping_rejects_broken_doubling_in_either_pass() {
        let o: SubsetOracle = "1".parse().unwrap();
        for bad in [
            "0 1 0^3 1 0^4 1 0^8 1 0^16 11 0^32 11 0^64",
            "0 1 0^2 1 0^5 1 0^8 1 0^16 11 0^32 11 0^64",
            "0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^65",
            "0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^31 11 0^64",
        ] {
            let s = pca_sweeping_dima_i(&w(bad), TapeMode::Rle, &o, 5, &mut RandomSource::new(1))
                .unwrap();
            assert_eq!(s.decision, Decision::Reject, "{bad}");
            let e = pca_sweeping_dima_i(
                &w(bad),
                TapeMode::Explicit,
                &o,
                5,
                &mut RandomSource::new(1),
            )
            .unwrap();
            assert_eq!(s, e);
        }
    }

    #[test]
    fn member_beyond_prefix_is_an_error() {
        let o: SubsetOracle = "1".parse().unwrap();
        assert!(matches!(
            pca2_dima_i(
                &dima_word(2),
                TapeMode::Rle,
                &o,
                1,
                &mut RandomSource::new(0)
            ),
            Err(Error::OutOfPrefix { index: 2, .. })
        ));
    }
}
