//! Shared machine model: oracles, words, tapes, counters, randomness and
//! run accounting.

pub mod counter;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod tape;
pub mod word;
pub mod work;

pub use counter::CounterState;
pub use oracle::SubsetOracle;
pub use rng::{BinaryExpansion, RandomSource};
pub use stats::{Decision, RunStats};
pub use tape::{Cell, Direction, HeadAudit, HeadDiscipline, InputTape, TapeMode};
pub use word::{Run, Word};
pub use work::WorkTape;
