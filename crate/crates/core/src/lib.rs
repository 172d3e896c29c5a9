pub mod classical;
pub mod coin;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod quantum;

pub use error::{Error, Fault, Result};
