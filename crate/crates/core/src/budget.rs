//! Workload guards for exhaustive operations. Budgets are pure counts, so a
//! refusal is deterministic and independent of the machine.

use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Refuses `workload` units of work above `budget`.
pub fn ensure(what: impl Into<String>, workload: &BigUint, budget: u64) -> Result<u64> {
    match u64::try_from(workload) {
        Ok(w) if w <= budget => Ok(w),
        _ => Err(Error::BudgetExceeded {
            what: what.into(),
            workload: workload.to_string(),
            budget,
        }),
    }
}
