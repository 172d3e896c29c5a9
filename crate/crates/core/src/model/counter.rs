use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Fault, Result};

/// A single nonnegative counter. Machines may only test it against zero;
/// the value itself is private.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CounterState {
    value: BigUint,
    max: BigUint,
}

impl CounterState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Largest value held so far.
    pub fn max_value(&self) -> &BigUint {
        &self.max
    }

    pub fn increment(&mut self) {
        self.add(&BigUint::one());
    }

    pub fn decrement(&mut self) -> Result<()> {
        self.sub(&BigUint::one())
    }

    /// `amount` increments in one go.
    pub fn add(&mut self, amount: &BigUint) {
        self.value += amount;
        if self.value > self.max {
            self.max = self.value.clone();
        }
    }

    /// `amount` decrements in one go; underflow is a fault.
    pub fn sub(&mut self, amount: &BigUint) -> Result<()> {
        if *amount > self.value {
            return Err(Fault::CounterUnderflow.into());
        }
        self.value -= amount;
        Ok(())
    }

    /// Decrements up to `limit` times, stopping as soon as the counter reads
    /// zero. Returns the number of decrements made.
    pub fn drain(&mut self, limit: &BigUint) -> BigUint {
        let n = limit.min(&self.value).clone();
        self.value -= &n;
        n
    }

    /// Decrements to zero, keeping the maximum.
    pub fn reset(&mut self) -> BigUint {
        std::mem::take(&mut self.value)
    }

    #[cfg(test)]
    pub(crate) fn peek(&self) -> &BigUint {
        &self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn max_tracks_running_peak() {
        let mut c = CounterState::new();
        c.add(&BigUint::from(5u32));
        c.sub(&BigUint::from(3u32)).unwrap();
        c.increment();
        assert_eq!(*c.max_value(), BigUint::from(5u32));
        assert_eq!(*c.peek(), BigUint::from(3u32));
    }

    #[test]
    fn underflow_is_a_fault() {
        let mut c = CounterState::new();
        assert!(matches!(
            c.decrement(),
            Err(Error::Fault(Fault::CounterUnderflow))
        ));
    }

    #[test]
    fn drain_stops_at_zero() {
        let mut c = CounterState::new();
        c.add(&BigUint::from(4u32));
        assert_eq!(c.drain(&BigUint::from(10u32)), BigUint::from(4u32));
        assert!(c.is_zero());
        c.add(&BigUint::from(4u32));
        assert_eq!(c.drain(&BigUint::from(3u32)), BigUint::from(3u32));
        assert!(!c.is_zero());
    }
}
