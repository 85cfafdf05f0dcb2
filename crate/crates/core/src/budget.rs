use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Byte budget for the dynamic programs. Exceeding it is a deterministic error,
/// decided from a size estimate before any large allocation happens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryBudget(pub u64);

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget(4 << 30);

    pub fn unlimited() -> Self {
        MemoryBudget(u64::MAX)
    }

    pub fn check(&self, required: u64) -> Result<()> {
        if required > self.0 {
            Err(Error::OutOfMemoryBudget { required, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) fn saturating_product(factors: &[u64]) -> u64 {
    factors.iter().fold(1u64, |acc, &f| acc.saturating_mul(f))
}
