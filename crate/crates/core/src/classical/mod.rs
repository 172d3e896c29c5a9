//! Classical recognizers: the `AM75` family, `UPOWER64(I)`, the `DIMA`
//! counter machines, the `LOG` transform and the block-equality test.

pub mod am75;
pub mod dima;
pub mod freivalds;
pub mod log;
pub mod upower64;

pub use am75::{am75_member, am75p_member, f_of_n, ptm_am75p_i, FValue};
pub use dima::{dca2_dima, dima_word, forced_walk, pca2_dima_i, pca_sweeping_dima_i, WalkEnd};
pub use freivalds::{
    freivalds_compare, freivalds_exact, Comparison, FreivaldsExact, FreivaldsOutcome,
    FreivaldsParams, SamplingMode,
};
pub use log::{log_transform, ptm_log_recognizer, InnerRecognizer, LogRun};
pub use upower64::{ptm1_upower64_i, upower64_member};
