use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::word::{Run, Word};
use crate::error::{Fault, Result};

/// Longest word the explicit representation will materialise.
pub const EXPLICIT_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeadDiscipline {
    TwoWay,
    /// Direction may only change on an end-marker.
    Sweeping,
    OneWay,
    /// Moves right on every step.
    Realtime,
    /// Realtime with an extra restart event back to the initial configuration.
    RestartingRealtime,
}

impl HeadDiscipline {
    fn name(self) -> &'static str {
        match self {
            HeadDiscipline::TwoWay => "two-way",
            HeadDiscipline::Sweeping => "sweeping",
            HeadDiscipline::OneWay => "one-way",
            HeadDiscipline::Realtime => "realtime",
            HeadDiscipline::RestartingRealtime => "restarting-realtime",
        }
    }

    fn allows_left(self) -> bool {
        matches!(self, HeadDiscipline::TwoWay | HeadDiscipline::Sweeping)
    }
}

/// How the tape stores its word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TapeMode {
    Explicit,
    #[default]
    Rle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    LeftMarker,
    Symbol(u8),
    RightMarker,
}

impl Cell {
    pub fn is_marker(self) -> bool {
        !matches!(self, Cell::Symbol(_))
    }
}

/// Movement record used by discipline audits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadAudit {
    pub left_moves: BigUint,
    pub right_moves: BigUint,
    /// Direction changes that happened on an end-marker.
    pub marker_reversals: u64,
    /// Direction changes anywhere else.
    pub inner_reversals: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone)]
enum Repr {
    Explicit(Vec<u8>),
    Runs {
        runs: Vec<Run>,
        /// 1-based cell index of each run's first symbol.
        starts: Vec<BigUint>,
    },
}

/// Read-only input tape holding `¢ w $`. Cell 0 is the left end-marker and
/// cell `n + 1` the right end-marker.
#[derive(Debug, Clone)]
pub struct InputTape {
    repr: Repr,
    len: BigUint,
    head: BigUint,
    discipline: HeadDiscipline,
    last_dir: Option<Direction>,
    audit: HeadAudit,
}

impl InputTape {
    pub fn new(word: &Word, mode: TapeMode, discipline: HeadDiscipline) -> Result<Self> {
        let repr = match mode {
            TapeMode::Explicit => Repr::Explicit(word.to_symbols(EXPLICIT_LIMIT)?),
            TapeMode::Rle => {
                let mut starts = Vec::with_capacity(word.runs().len());
                let mut next = BigUint::one();
                for run in word.runs() {
                    starts.push(next.clone());
                    next += &run.count;
                }
                Repr::Runs {
                    runs: word.runs().to_vec(),
                    starts,
                }
            }
        };
        Ok(Self {
            repr,
            len: word.len(),
            head: BigUint::zero(),
            discipline,
            last_dir: None,
            audit: HeadAudit::default(),
        })
    }

    /// Input length `n`, markers excluded.
    pub fn len(&self) -> &BigUint {
        &self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len.is_zero()
    }

    pub fn head(&self) -> &BigUint {
        &self.head
    }

    pub fn discipline(&self) -> HeadDiscipline {
        self.discipline
    }

    pub fn audit(&self) -> &HeadAudit {
        &self.audit
    }

    pub fn right_marker(&self) -> BigUint {
        &self.len + 1u32
    }

    /// Number of sweeps so far: one per stretch of movement between
    /// reversals, zero while the head has never moved.
    pub fn passes(&self) -> u64 {
        if self.last_dir.is_none() && self.audit.restarts == 0 {
            0
        } else {
            1 + self.audit.marker_reversals + self.audit.inner_reversals
        }
    }

    pub fn cell(&self, pos: &BigUint) -> Option<Cell> {
        if pos.is_zero() {
            return Some(Cell::LeftMarker);
        }
        match pos.cmp(&self.right_marker()) {
            Ordering::Equal => Some(Cell::RightMarker),
            Ordering::Greater => None,
            Ordering::Less => Some(Cell::Symbol(self.symbol(pos))),
        }
    }

    pub fn current(&self) -> Cell {
        self.cell(&self.head)
            .expect("head is kept inside the markers")
    }

    fn symbol(&self, pos: &BigUint) -> u8 {
        match &self.repr {
            Repr::Explicit(symbols) => {
                symbols[pos.to_usize().expect("explicit tapes are small") - 1]
            }
            Repr::Runs { runs, .. } => runs[self.run_index(pos)].symbol,
        }
    }

    fn run_index(&self, pos: &BigUint) -> usize {
        match &self.repr {
            Repr::Runs { starts, .. } => starts.partition_point(|s| s <= pos) - 1,
            Repr::Explicit(_) => unreachable!("run index only exists for run storage"),
        }
    }

    /// The cell next to the head in `dir` and the length of the maximal
    /// stretch of identical cells starting there. End-markers form stretches
    /// of length one. `None` when the head already sits on the outermost
    /// cell in that direction.
    pub fn run_ahead(&self, dir: Direction) -> Option<(Cell, BigUint)> {
        let first = match dir {
            Direction::Left if self.head.is_zero() => return None,
            Direction::Left => &self.head - 1u32,
            Direction::Right if self.head >= self.right_marker() => return None,
            Direction::Right => &self.head + 1u32,
        };
        let cell = self.cell(&first)?;
        if cell.is_marker() {
            return Some((cell, BigUint::one()));
        }
        let count = match &self.repr {
            Repr::Explicit(symbols) => {
                let sym = self.symbol(&first);
                let mut i = first.to_usize().expect("explicit tapes are small");
                let mut count = 0usize;
                loop {
                    if i == 0 || i > symbols.len() || symbols[i - 1] != sym {
                        break;
                    }
                    count += 1;
                    i = match dir {
                        Direction::Left => i - 1,
                        Direction::Right => i + 1,
                    };
                }
                BigUint::from(count)
            }
            Repr::Runs { runs, starts } => {
                let idx = self.run_index(&first);
                match dir {
                    Direction::Right => &starts[idx] + &runs[idx].count - &first,
                    Direction::Left => &first - &starts[idx] + 1u32,
                }
            }
        };
        Some((cell, count))
    }

    /// Moves the head `count` cells in `dir`, enforcing bounds and the head
    /// discipline.
    pub fn move_by(&mut self, dir: Direction, count: &BigUint) -> Result<()> {
        if count.is_zero() {
            return Ok(());
        }
        if dir == Direction::Left && !self.discipline.allows_left() {
            return Err(Fault::Discipline {
                discipline: self.discipline.name(),
                direction: dir.name(),
            }
            .into());
        }
        if let Some(last) = self.last_dir {
            if last != dir {
                if self.current().is_marker() {
                    self.audit.marker_reversals += 1;
                } else if self.discipline == HeadDiscipline::Sweeping {
                    return Err(Fault::SweepReversal {
                        position: self.head.to_string(),
                    }
                    .into());
                } else {
                    self.audit.inner_reversals += 1;
                }
            }
        }
        match dir {
            Direction::Left => {
                if *count > self.head {
                    return Err(Fault::OutOfBounds {
                        position: format!("-{}", count - &self.head),
                    }
                    .into());
                }
                self.head -= count;
                self.audit.left_moves += count;
            }
            Direction::Right => {
                let target = &self.head + count;
                if target > self.right_marker() {
                    return Err(Fault::OutOfBounds {
                        position: target.to_string(),
                    }
                    .into());
                }
                self.head = target;
                self.audit.right_moves += count;
            }
        }
        self.last_dir = Some(dir);
        Ok(())
    }

    pub fn step(&mut self, dir: Direction) -> Result<()> {
        self.move_by(dir, &BigUint::one())
    }

    /// Moves across the stretch returned by [`run_ahead`](Self::run_ahead)
    /// and reports what was crossed.
    pub fn cross_run(&mut self, dir: Direction) -> Result<Option<(Cell, BigUint)>> {
        match self.run_ahead(dir) {
            Some((cell, count)) => {
                self.move_by(dir, &count)?;
                Ok(Some((cell, count)))
            }
            None => Ok(None),
        }
    }

    /// Moves onto the end-marker in `dir`; returns the number of moves.
    pub fn move_to_marker(&mut self, dir: Direction) -> Result<BigUint> {
        let distance = match dir {
            Direction::Left => self.head.clone(),
            Direction::Right => self.right_marker() - &self.head,
        };
        self.move_by(dir, &distance)?;
        Ok(distance)
    }

    /// Moves to an absolute cell; returns the number of moves.
    pub fn move_to(&mut self, pos: &BigUint) -> Result<BigUint> {
        match pos.cmp(&self.head) {
            Ordering::Equal => Ok(BigUint::zero()),
            Ordering::Less => {
                let d = &self.head - pos;
                self.move_by(Direction::Left, &d)?;
                Ok(d)
            }
            Ordering::Greater => {
                let d = pos - &self.head;
                self.move_by(Direction::Right, &d)?;
                Ok(d)
            }
        }
    }

    /// Returns the head to the left end-marker. Only restarting heads may.
    pub fn restart(&mut self) -> Result<()> {
        if self.discipline != HeadDiscipline::RestartingRealtime {
            return Err(Fault::Restart.into());
        }
        self.head = BigUint::zero();
        self.last_dir = None;
        self.audit.restarts += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn tape(s: &str, mode: TapeMode, d: HeadDiscipline) -> InputTape {
        InputTape::new(&s.parse().unwrap(), mode, d).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn one_way_left_move_is_a_fault() {
        let mut t = tape("0^4", TapeMode::Rle, HeadDiscipline::OneWay);
        t.step(Direction::Right).unwrap();
        assert!(matches!(
            t.step(Direction::Left),
            Err(Error::Fault(Fault::Discipline { .. }))
        ));
    }

    #[test]
    fn sweeping_reversal_mid_block_is_a_fault() {
        let mut t = tape("0^4 1 0^4", TapeMode::Rle, HeadDiscipline::Sweeping);
        t.move_by(Direction::Right, &big(3)).unwrap();
        assert!(matches!(
            t.step(Direction::Left),
            Err(Error::Fault(Fault::SweepReversal { .. }))
        ));
    }

    #[test]
    fn sweeping_reversal_on_marker_is_counted() {
        let mut t = tape("0^4", TapeMode::Rle, HeadDiscipline::Sweeping);
        t.move_to_marker(Direction::Right).unwrap();
        t.move_to_marker(Direction::Left).unwrap();
        assert_eq!(t.audit().marker_reversals, 1);
        assert_eq!(t.passes(), 2);
    }

    #[test]
    fn two_way_from_left_marker() {
        let mut t = tape("01", TapeMode::Explicit, HeadDiscipline::TwoWay);
        assert_eq!(t.current(), Cell::LeftMarker);
        t.step(Direction::Right).unwrap();
        assert_eq!(*t.head(), big(1));
        assert_eq!(t.current(), Cell::Symbol(b'0'));
    }

    #[test]
    fn bounds_are_faults() {
        let mut t = tape("01", TapeMode::Rle, HeadDiscipline::TwoWay);
        assert!(matches!(
            t.step(Direction::Left),
            Err(Error::Fault(Fault::OutOfBounds { .. }))
        ));
        t.move_to_marker(Direction::Right).unwrap();
        assert!(t.step(Direction::Right).is_err());
    }

    #[test]
    fn runs_agree_between_representations() {
        let word = "0 1 0^3 1^2 0";
        for dir in [Direction::Right, Direction::Left] {
            let mut a = tape(word, TapeMode::Explicit, HeadDiscipline::TwoWay);
            let mut b = tape(word, TapeMode::Rle, HeadDiscipline::TwoWay);
            if dir == Direction::Left {
                a.move_to_marker(Direction::Right).unwrap();
                b.move_to_marker(Direction::Right).unwrap();
            }
            loop {
                let ra = a.cross_run(dir).unwrap();
                let rb = b.cross_run(dir).unwrap();
                assert_eq!(ra, rb);
                assert_eq!(a.head(), b.head());
                if ra.is_none() {
                    break;
                }
            }
        }
    }

    #[test]
    fn restart_only_for_restarting_heads() {
        let mut t = tape("ab", TapeMode::Rle, HeadDiscipline::Realtime);
        assert!(t.restart().is_err());
        let mut t = tape("ab", TapeMode::Rle, HeadDiscipline::RestartingRealtime);
        t.move_to_marker(Direction::Right).unwrap();
        t.restart().unwrap();
        assert!(t.head().is_zero());
        assert_eq!(t.audit().restarts, 1);
    }
}
