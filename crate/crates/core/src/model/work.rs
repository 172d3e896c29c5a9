use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;

/// Marks a cell as written; track bits live in the low bits of a cell.
const WRITTEN: u8 = 0x80;

/// Maximum number of tracks per cell.
pub const TRACKS: u8 = 7;

/// Sparse work tape. Every cell carries up to seven binary tracks, so
/// several binary counters can share the same cells, least significant bit
/// at cell 0.
///
/// Space is the number of distinct cells the head has read or written.
#[derive(Debug, Clone, Default)]
pub struct WorkTape {
    cells: HashMap<i64, u8>,
    visited: HashSet<i64>,
    head: i64,
    moves: u64,
}

impl WorkTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    /// Distinct cells visited.
    pub fn space(&self) -> u64 {
        self.visited.len() as u64
    }

    /// Head moves so far.
    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn read(&mut self) -> u8 {
        self.visited.insert(self.head);
        self.cells.get(&self.head).copied().unwrap_or(0)
    }

    pub fn write(&mut self, symbol: u8) {
        self.visited.insert(self.head);
        self.cells.insert(self.head, symbol | WRITTEN);
    }

    pub fn is_blank(&mut self) -> bool {
        self.read() & WRITTEN == 0
    }

    pub fn move_to(&mut self, pos: i64) {
        self.moves += self.head.abs_diff(pos);
        self.head = pos;
    }

    pub fn read_bit(&mut self, track: u8) -> bool {
        debug_assert!(track < TRACKS);
        self.read() & (1 << track) != 0
    }

    pub fn write_bit(&mut self, track: u8, bit: bool) {
        let cell = self.read();
        let cell = if bit {
            cell | (1 << track)
        } else {
            cell & !(1 << track)
        };
        self.write(cell);
    }

    /// Adds one to the counter on `track`, rippling the carry right from
    /// cell 0, and returns the head to cell 0.
    pub fn increment(&mut self, track: u8) {
        self.move_to(0);
        while self.read_bit(track) {
            self.write_bit(track, false);
            self.move_to(self.head + 1);
        }
        self.write_bit(track, true);
        self.move_to(0);
    }

    /// Overwrites the counter on `track` with `value`.
    pub fn store(&mut self, track: u8, value: &BigUint) {
        let len = self.extent().max(value.bits() as i64);
        for i in 0..len {
            self.move_to(i);
            self.write_bit(track, value.bit(i as u64));
        }
        self.move_to(0);
    }

    /// Reads the counter on `track` by walking to the first blank cell.
    pub fn load(&mut self, track: u8) -> BigUint {
        let mut value = BigUint::zero();
        let mut i = 0;
        loop {
            self.move_to(i);
            if self.is_blank() {
                break;
            }
            if self.read_bit(track) {
                value.set_bit(i as u64, true);
            }
            i += 1;
        }
        self.move_to(0);
        value
    }

    pub fn clear(&mut self, track: u8) {
        self.store(track, &BigUint::zero());
    }

    /// Index one past the last written cell of the contiguous block at 0.
    fn extent(&self) -> i64 {
        let mut i = 0;
        while self.cells.contains_key(&i) {
            i += 1;
        }
        i
    }

    /// Whether the counter on `track` holds `64^m` for some `m ≥ 1`: one set
    /// bit, at a nonzero position divisible by six. Reads the track from cell
    /// 0 and returns `m` on success.
    pub fn power_of_64(&mut self, track: u8) -> Option<u64> {
        let mut one_at = None;
        let mut i = 0;
        loop {
            self.move_to(i);
            if self.is_blank() {
                break;
            }
            if self.read_bit(track) {
                if one_at.is_some() {
                    self.move_to(0);
                    return None;
                }
                one_at = Some(i as u64);
            }
            i += 1;
        }
        self.move_to(0);
        match one_at {
            Some(p) if p > 0 && p % 6 == 0 => Some(p / 6),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_blank_at_zero() {
        let mut t = WorkTape::new();
        assert_eq!(t.head(), 0);
        assert_eq!(t.space(), 0);
        assert!(t.is_blank());
        assert_eq!(t.space(), 1);
    }

    #[test]
    fn counter_increments_binary() {
        let mut t = WorkTape::new();
        for _ in 0..37 {
            t.increment(0);
        }
        assert_eq!(t.load(0), BigUint::from(37u32));
        // 37 < 64 needs six cells, plus the blank read that ends the load.
        assert_eq!(t.space(), 7);
    }

    #[test]
    fn tracks_are_independent() {
        let mut t = WorkTape::new();
        for _ in 0..5 {
            t.increment(0);
        }
        for _ in 0..3 {
            t.increment(1);
        }
        assert_eq!(t.load(0), BigUint::from(5u32));
        assert_eq!(t.load(1), BigUint::from(3u32));
        t.clear(0);
        assert_eq!(t.load(0), BigUint::zero());
        assert_eq!(t.load(1), BigUint::from(3u32));
    }

    #[test]
    fn power_of_64_check() {
        let mut t = WorkTape::new();
        for (v, expect) in [
            (64u32, Some(1)),
            (4096, Some(2)),
            (128, None),
            (1, None),
            (65, None),
        ] {
            t.store(0, &BigUint::from(v));
            assert_eq!(t.power_of_64(0), expect, "{v}");
        }
    }

    #[test]
    fn moves_are_counted() {
        let mut t = WorkTape::new();
        t.move_to(5);
        t.move_to(2);
        assert_eq!(t.moves(), 8);
    }
}
