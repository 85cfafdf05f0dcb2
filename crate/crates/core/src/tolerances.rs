//! Numeric thresholds, loaded from an embedded TOML file and overridable at run time.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../config/tolerances.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTolerances {
    pub root_abs: f64,
    pub residual: f64,
    pub classification_gap: f64,
    pub condition_max: f64,
    pub cross_check_rel: f64,
    pub puiseux_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeTolerances {
    pub excursion_first: f64,
    pub excursion_second: f64,
    pub meander_joint: f64,
    pub negative_drift: f64,
    pub positive_mean: f64,
    pub positive_variance: f64,
    pub drift_independence: f64,
    pub signed: f64,
    pub rayleigh: f64,
    pub soft_trend_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub kernel: KernelTolerances,
    pub converge: ConvergeTolerances,
}

impl Tolerances {
    /// The built-in thresholds.
    pub fn embedded() -> &'static Tolerances {
        static CELL: OnceLock<Tolerances> = OnceLock::new();
        CELL.get_or_init(|| toml::from_str(EMBEDDED).expect("embedded tolerances parse"))
    }

    /// Built-in thresholds with the keys present in `text` replaced.
    pub fn with_overrides(text: &str) -> Result<Tolerances> {
        let mut base = toml::Value::try_from(Self::embedded()).map_err(|e| Error::Config(e.to_string()))?;
        let over: toml::Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, over);
        base.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::embedded().clone()
    }
}

/// Recursive table merge; `over` wins on conflicts.
pub fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
