//! Quantum recognizers: the digit-reading rotation, the restarting realtime
//! QCFA for `POWER-EQ` and the `UPOWER8(I)` composition.

pub mod adh;
pub mod rtqcfa;

pub use adh::{
    adh_accept_probability, adh_rotate, qcca_upower8_i, AdhOutcome, QubitAngle, Upower8Outcome,
};
pub use rtqcfa::{
    default_l, power_eq_member, power_eq_word, rtqcfa_overall, rtqcfa_power_eq_i, rtqcfa_round,
    Overall, PowerEqIOutcome, QuantumCore3, RoundOutcome, RoundTrace, Screening,
};
