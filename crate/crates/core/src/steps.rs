//! Weighted step sets and their elementary characteristics.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_ratio, render};

/// A finite weighted step alphabet with at least one negative and one positive step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    weights: BTreeMap<i64, BigRational>,
}

/// Drift, variance and period of a step set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepCharacteristics {
    #[serde(serialize_with = "crate::exact::serde_ratio")]
    pub drift: BigRational,
    #[serde(serialize_with = "crate::exact::serde_ratio")]
    pub variance: BigRational,
    pub period: u64,
    pub aperiodic: bool,
    #[serde(serialize_with = "crate::exact::serde_ratio")]
    pub total_weight: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecFormat {
    Compact,
    Json,
}

impl StepSet {
    pub fn new<I>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut map = BTreeMap::new();
        for (step, w) in weights {
            if w.is_zero() {
                return Err(Error::ZeroWeight(step));
            }
            if w.is_negative() {
                return Err(Error::MalformedSpec(format!("negative weight for step {step}")));
            }
            if map.insert(step, w).is_some() {
                return Err(Error::MalformedSpec(format!("duplicate step {step}")));
            }
        }
        if map.is_empty() {
            return Err(Error::MalformedSpec("empty step set".into()));
        }
        if *map.keys().next().unwrap() >= 0 {
            return Err(Error::NoNegativeStep);
        }
        if *map.keys().next_back().unwrap() <= 0 {
            return Err(Error::NoPositiveStep);
        }
        Ok(StepSet { weights: map })
    }

    /// Unit weights on the given steps.
    pub fn unit(steps: &[i64]) -> Result<Self> {
        Self::new(steps.iter().map(|&s| (s, BigRational::one())))
    }

    pub fn bernoulli() -> Self {
        Self::unit(&[-1, 1]).expect("valid")
    }

    pub fn motzkin() -> Self {
        Self::unit(&[-1, 0, 1]).expect("valid")
    }

    pub fn weights(&self) -> &BTreeMap<i64, BigRational> {
        &self.weights
    }

    pub fn weight(&self, step: i64) -> BigRational {
        self.weights.get(&step).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest downward jump `c`.
    pub fn c(&self) -> u64 {
        (-*self.weights.keys().next().unwrap()) as u64
    }

    /// Largest upward jump `d`.
    pub fn d(&self) -> u64 {
        *self.weights.keys().next_back().unwrap() as u64
    }

    /// Integer weights `L * s_i` together with the common denominator `L`.
    pub fn integer_scaled(&self) -> (Vec<(i64, BigInt)>, BigInt) {
        let lcm = self
            .weights
            .values()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let steps = self
            .weights
            .iter()
            .map(|(&s, w)| (s, (w * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect();
        (steps, lcm)
    }

    /// Step probabilities `s_i / S(1)` as floats.
    pub fn probabilities(&self) -> Vec<(i64, f64)> {
        let total = self.total_weight();
        self.weights
            .iter()
            .map(|(&s, w)| (s, crate::exact::ratio_to_f64(&(w / &total))))
            .collect()
    }

    pub fn total_weight(&self) -> BigRational {
        self.weights.values().fold(BigRational::zero(), |a, w| a + w)
    }

    /// Canonical compact rendering, e.g. `-1:1,1:1`.
    pub fn to_compact(&self) -> String {
        self.weights
            .iter()
            .map(|(s, w)| format!("{s}:{}", render(w)))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, String> =
            self.weights.iter().map(|(s, w)| (s.to_string(), render(w))).collect();
        serde_json::to_string(&map).expect("string map serializes")
    }

    pub fn is_symmetric(&self) -> bool {
        self.weights.iter().all(|(s, w)| self.weights.get(&-s) == Some(w))
    }
}

impl fmt::Display for StepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// Parses `step:weight,step:weight` (compact) or a JSON object `{"-1": "1", "1": 2}`.
pub fn parse_step_set(spec: &str, format: SpecFormat) -> Result<StepSet> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::MalformedSpec("empty step set".into()));
    }
    let mut pairs = Vec::new();
    match format {
        SpecFormat::Compact => {
            for item in spec.split(',') {
                let item = item.trim();
                let (step, weight) = item
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedSpec(format!("expected step:weight, got {item:?}")))?;
                let step: i64 = step
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedSpec(format!("step is not an integer: {step:?}")))?;
                pairs.push((step, parse_ratio(weight)?));
            }
        }
        SpecFormat::Json => {
            let value: serde_json::Value = serde_json::from_str(spec)
                .map_err(|e| Error::MalformedSpec(format!("invalid JSON: {e}")))?;
            let obj = value
                .as_object()
                .ok_or_else(|| Error::MalformedSpec("JSON step set must be an object".into()))?;
            for (k, v) in obj {
                let step: i64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedSpec(format!("step is not an integer: {k:?}")))?;
                let weight = match v {
                    serde_json::Value::String(s) => parse_ratio(s)?,
                    serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => parse_ratio(&n.to_string())?,
                    other => {
                        return Err(Error::MalformedSpec(format!(
                            "weight must be an integer or a \"p/q\" string, got {other}"
                        )))
                    }
                };
                pairs.push((step, weight));
            }
        }
    }
    StepSet::new(pairs)
}

/// Exact drift, variance and period.
pub fn characteristics(s: &StepSet) -> StepCharacteristics {
    let total = s.total_weight();
    let one = BigRational::one();
    let d1 = eval_step_polynomial_exact(s, &one, 1).expect("u = 1 is positive");
    let d2 = eval_step_polynomial_exact(s, &one, 2).expect("u = 1 is positive");
    let drift = &d1 / &total;
    let variance = (&d2 + &d1) / &total - &drift * &drift;
    let first = *s.weights.keys().next().unwrap();
    let period = s
        .weights
        .keys()
        .fold(0u64, |g, &step| g.gcd(&((step - first) as u64)));
    StepCharacteristics {
        drift,
        variance,
        period,
        aperiodic: period == 1,
        total_weight: total,
    }
}

/// `S(u)`, `S'(u)` or `S''(u)` at a rational point.
pub fn eval_step_polynomial_exact(s: &StepSet, u: &BigRational, order: u8) -> Result<BigRational> {
    if !u.is_positive() {
        return Err(Error::NonpositiveArgument(render(u)));
    }
    if order > 2 {
        return Err(Error::MalformedSpec(format!("derivative order {order} not supported")));
    }
    let mut acc = BigRational::zero();
    for (&step, w) in &s.weights {
        let (factor, exp) = falling(step, order);
        if factor == 0 {
            continue;
        }
        acc += w * BigRational::from_integer(BigInt::from(factor)) * pow_ratio(u, exp);
    }
    Ok(acc)
}

/// `S(u)`, `S'(u)` or `S''(u)` at a real point.
pub fn eval_step_polynomial<F: crate::Real>(s: &StepSet, u: F, order: u8) -> Result<F> {
    if !(u > F::zero()) {
        return Err(Error::NonpositiveArgument(format!("{u}")));
    }
    if order > 2 {
        return Err(Error::MalformedSpec(format!("derivative order {order} not supported")));
    }
    Ok(eval_step_polynomial_unchecked(s, u, order))
}

pub(crate) fn eval_step_polynomial_unchecked<F: crate::Real>(s: &StepSet, u: F, order: u8) -> F {
    s.weights.iter().fold(F::zero(), |acc, (&step, w)| {
        let (factor, exp) = falling(step, order);
        acc + F::from_ratio(w) * F::c(factor as f64) * u.powi(exp as i32)
    })
}

// d^order/du^order u^step = factor * u^exp
fn falling(step: i64, order: u8) -> (i64, i64) {
    let mut factor = 1;
    for k in 0..order as i64 {
        factor *= step - k;
    }
    (factor, step - order as i64)
}

fn pow_ratio(u: &BigRational, exp: i64) -> BigRational {
    let p = num_traits::pow(u.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}
