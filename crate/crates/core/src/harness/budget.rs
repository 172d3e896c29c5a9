//! Frozen resource budgets, one per recognizer.
//!
//! The scale is `L(n) = max(log₂ n, 1)`. Constants were fitted once on the
//! small member and mutant inputs and are not adjusted afterwards.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::registry::RecognizerName;
use crate::classical::upower64::log2_floor1;
use crate::model::{RunStats, Word};

/// `dca2_dima`: steps per input symbol.
pub const DCA2_STEPS: f64 = 8.0;
/// `pca2_dima_i`: steps per input symbol and repetition, on top of the 2DCA.
pub const PCA2_STEPS_PER_REPETITION: f64 = 4.0;
/// `pca_sweeping_dima_i`: steps per `|w|^{3/2}` and repetition.
pub const SWEEP_STEPS: f64 = 2.0;
/// `ptm1_upower64_i`: steps per `n·L(n)`.
pub const UPOWER64_STEPS: f64 = 6.0;
/// `ptm1_upower64_i`: work cells per `L(n)`, plus a constant.
pub const UPOWER64_SPACE: (f64, f64) = (1.0, 3.0);
/// `ptm_am75p_i`: work cells per `L(L(n))`, plus a constant.
pub const AM75P_SPACE: (f64, f64) = (4.0, 8.0);

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub steps: Option<f64>,
    pub space_work: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space_counter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub budget: Budget,
    pub pass: bool,
}

fn f(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// The budget of one run of `rec` on `w` with `r` repetitions.
pub fn budget_for(rec: RecognizerName, w: &Word, r: u32) -> Budget {
    use RecognizerName::*;
    let len = w.len();
    let n = f(&len).max(1.0);
    let scale = log2_floor1(&len);
    let r = f64::from(r);
    match rec {
        DimaDca2 => Budget {
            steps: Some(DCA2_STEPS * n),
            space_counter: Some(f(&len)),
            ..Budget::default()
        },
        DimaIPca2 => Budget {
            steps: Some((DCA2_STEPS + PCA2_STEPS_PER_REPETITION * r) * n),
            space_counter: Some(f(&len)),
            ..Budget::default()
        },
        DimaISweeping => Budget {
            steps: Some(DCA2_STEPS * n + SWEEP_STEPS * r * n.powf(1.5)),
            space_counter: Some(f(&len)),
            ..Budget::default()
        },
        Upower64IPtm1 => Budget {
            steps: Some(UPOWER64_STEPS * n * scale),
            space_work: Some(UPOWER64_SPACE.0 * scale + UPOWER64_SPACE.1),
            ..Budget::default()
        },
        Am75pIPtm => {
            let log_log = if scale <= 2.0 { 1.0 } else { scale.log2() };
            Budget {
                space_work: Some(AM75P_SPACE.0 * log_log + AM75P_SPACE.1),
                ..Budget::default()
            }
        }
        LogDimaIPtm => Budget {
            space_counter: Some(scale),
            ..Budget::default()
        },
        _ => Budget::default(),
    }
}

pub fn check(budget: &Budget, runs: &[RunStats]) -> BudgetCheck {
    let pass = runs.iter().all(|s| {
        budget.steps.is_none_or(|b| f(&s.steps) <= b)
            && budget.space_work.is_none_or(|b| s.space_work as f64 <= b)
            && budget
                .space_counter
                .is_none_or(|b| f(&s.space_counter) <= b)
    });
    BudgetCheck {
        budget: budget.clone(),
        pass,
    }
}
