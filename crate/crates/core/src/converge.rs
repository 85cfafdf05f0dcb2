//! Rescaled finite-length moments against their exact limits, with drift-regime
//! dispatch and per-order trend flags.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::MemoryBudget;
use crate::enumerate::{moment_dp, signed_moment_dp, PathClass};
use crate::error::{Error, Result};
use crate::exact::{binomial, ratio_to_f64};
use crate::kernel::{structural_constants, Regime};
use crate::limits::{LimitKind, LimitTables};
use crate::steps::{characteristics, StepSet};
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeInfo {
    pub regime: Regime,
    pub gamma: f64,
    pub sigma2: f64,
    /// what the meander area (and endpoint) converge to after rescaling
    pub meander_limit: String,
    pub excursion_limit: String,
    /// `beta / (sqrt(2) tau)`: area is divided by `m^(3/2)` and multiplied by this,
    /// the altitude by `m^(1/2)`. It is the reciprocal standard deviation of the
    /// steps tilted by `tau`, and reduces to `beta / sqrt(2)` at zero drift.
    pub area_scale: f64,
}

fn area_scale(beta: f64, tau: f64) -> f64 {
    beta / (2f64.sqrt() * tau)
}

pub fn regime_dispatch(s: &StepSet) -> Result<RegimeInfo> {
    let p = structural_constants::<f64>(s)?;
    let meander_limit = match p.regime {
        Regime::NegativeDrift => "Brownian excursion area; area scale beta/(sqrt(2) tau m^(3/2))".to_string(),
        Regime::ZeroDrift => {
            "joint (Brownian meander area, meander endpoint); scales beta/(sqrt(2) m^(3/2)) and beta/(sqrt(2) m^(1/2))".to_string()
        }
        Regime::PositiveDrift => format!(
            "concentration Z_m/(gamma m^2/2) -> 1 with gamma = {}; Gaussian fluctuations of variance sigma^2 m^3/3",
            ratio_to_f64(&p.gamma)
        ),
    };
    Ok(RegimeInfo {
        regime: p.regime,
        gamma: ratio_to_f64(&p.gamma),
        sigma2: ratio_to_f64(&p.sigma2),
        meander_limit,
        excursion_limit: "Brownian excursion area in every regime; area scale beta/(sqrt(2) tau m^(3/2))".to_string(),
        area_scale: area_scale(p.beta, p.tau),
    })
}

/// Moment order of a report row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Order {
    /// area order `n`, altitude order `t`
    Joint(usize, usize),
    /// positive area `k`, negative area `l`, endpoint `t`
    Signed(usize, usize, usize),
}

impl Order {
    fn csv_fields(&self) -> (String, String) {
        match *self {
            Order::Joint(n, t) => (n.to_string(), t.to_string()),
            Order::Signed(k, l, t) => (format!("{k}:{l}"), t.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub m: usize,
    pub order: Order,
    pub rescaled: f64,
    pub limit: f64,
    /// relative error, or the absolute error when the limit is 0
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trend {
    pub order: Order,
    /// errors strictly decrease along the m grid (rows that are already exact count as decreasing)
    pub decreasing: bool,
    /// no step up the grid raises the error by more than the configured factor
    pub soft: bool,
    pub final_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub step_set: String,
    pub class: PathClass,
    pub regime: Regime,
    pub target: String,
    pub rows: Vec<ReportRow>,
    pub trends: Vec<Trend>,
}

impl ConvergenceReport {
    pub fn trend(&self, order: Order) -> Option<&Trend> {
        self.trends.iter().find(|t| t.order == order)
    }

    pub fn row(&self, m: usize, order: Order) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.m == m && r.order == order)
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> std::io::Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            wtr.write_record(["step_set", "class", "regime", "m", "n", "t", "rescaled", "limit", "rel_error", "trend"])?;
        }
        for r in &self.rows {
            let (n, t) = r.order.csv_fields();
            let trend = self.trend(r.order).map_or(false, |t| t.decreasing);
            wtr.write_record([
                self.step_set.clone(),
                self.class.name().to_string(),
                format!("{:?}", self.regime),
                r.m.to_string(),
                n,
                t,
                format!("{:.12e}", r.rescaled),
                format!("{:.12e}", r.limit),
                format!("{:.6e}", r.rel_error),
                trend.to_string(),
            ])?;
        }
        wtr.flush()
    }
}

fn error_of(rescaled: f64, limit: f64) -> f64 {
    if limit == 0.0 {
        rescaled.abs()
    } else {
        (rescaled - limit).abs() / limit.abs()
    }
}

fn trends(rows: &[ReportRow], orders: &[Order], m_list: &[usize]) -> Vec<Trend> {
    let factor = Tolerances::embedded().converge.soft_trend_factor;
    orders
        .iter()
        .map(|&order| {
            let errs: Vec<f64> = m_list
                .iter()
                .filter_map(|&m| rows.iter().find(|r| r.m == m && r.order == order).map(|r| r.rel_error))
                .collect();
            let exact = 1e-14;
            Trend {
                order,
                decreasing: errs.windows(2).all(|w| w[1] < w[0] || (w[0] <= exact && w[1] <= exact)),
                soft: errs.windows(2).all(|w| w[1] <= factor * w[0] || w[1] <= exact),
                final_error: errs.last().copied().unwrap_or(f64::NAN),
            }
        })
        .collect()
}

fn check_m_list(m_list: &[usize]) -> Result<()> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("m list must be nonempty and strictly ascending".into()));
    }
    Ok(())
}

/// Rescaled raw moments of one path class against their limiting values.
///
/// Orders are `(n, t)` = (area, final altitude). Supported targets: excursions
/// (`t = 0`, Brownian excursion area); zero-drift meanders (joint meander law);
/// negative-drift meanders (`t = 0`, excursion area); positive-drift meanders, where
/// `(1, 0)` is the mean ratio `E[Z_m]/(gamma m^2/2)` (limit 1) and `(2, 0)` is the
/// centred variance ratio `E[(Z_m - gamma m^2/2)^2]/(sigma^2 m^3)` (limit 1/3); and
/// zero-drift walks with absolute area.
pub fn limit_report(
    s: &StepSet,
    class: PathClass,
    m_list: &[usize],
    orders: &[(usize, usize)],
    budget: MemoryBudget,
) -> Result<ConvergenceReport> {
    check_m_list(m_list)?;
    let p = structural_constants::<f64>(s)?;
    let ch = characteristics(s);
    let n_max = orders.iter().map(|o| o.0).max().unwrap_or(0);
    let t_max = orders.iter().map(|o| o.1).max().unwrap_or(0);
    let unsupported = |why: &str| Err(Error::OrderOutOfRange(why.to_string()));

    let (target, kind) = match (class, p.regime) {
        (PathClass::Excursion, _) => ("BEA", Some(LimitKind::Bea)),
        (PathClass::Meander, Regime::ZeroDrift) => ("MeanderJoint", Some(LimitKind::MeanderJoint)),
        (PathClass::Meander, Regime::NegativeDrift) => ("BEA", Some(LimitKind::Bea)),
        (PathClass::Meander, Regime::PositiveDrift) => ("Concentration", None),
        (PathClass::Walk, Regime::ZeroDrift) => ("WalkAbs", Some(LimitKind::WalkAbs)),
        _ => return unsupported("no limit law implemented for this class and drift"),
    };
    if matches!(kind, Some(LimitKind::Bea)) && t_max > 0 {
        return unsupported("the excursion-area limit only covers t = 0");
    }
    if kind.is_none() && orders.iter().any(|&o| o != (1, 0) && o != (2, 0)) {
        return unsupported("positive drift supports orders 1:0 and 2:0 only");
    }
    let limits = LimitTables::new(n_max, t_max)?;
    let limit_of = |n: usize, t: usize| -> Result<f64> {
        match kind {
            Some(LimitKind::Bea) => Ok(limits.moment(LimitKind::Bea, &[n])?.to_f64()),
            Some(k) => Ok(limits.moment(k, &[n, t])?.to_f64()),
            None => Ok(if n == 1 { 1.0 } else { 1.0 / 3.0 }),
        }
    };

    let m_max = *m_list.last().unwrap();
    let table = moment_dp(s, class, m_max, n_max.max(2), t_max, budget)?;
    let scale = area_scale(p.beta, p.tau);
    let gamma = ch.drift.clone();
    let sigma2 = ch.variance.clone();

    let jobs: Vec<(usize, usize, usize)> = m_list
        .iter()
        .flat_map(|&m| orders.iter().map(move |&(n, t)| (m, n, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(m, n, t)| {
            if table.total(m).is_zero() {
                return Err(Error::Precondition(format!("no {} of length {m}", class.name())));
            }
            let rescaled = match kind {
                Some(_) => {
                    let e = ratio_to_f64(&table.expectation(m, n, t).unwrap());
                    let mf = m as f64;
                    e * scale.powi((n + t) as i32) / mf.powf(1.5 * n as f64 + 0.5 * t as f64)
                }
                None => {
                    let mm = BigRational::from_integer(BigInt::from(m));
                    let centre = &gamma * &mm * &mm / BigRational::from_integer(BigInt::from(2));
                    let e1 = table.expectation(m, 1, 0).unwrap();
                    if n == 1 {
                        ratio_to_f64(&(e1 / centre))
                    } else {
                        let e2 = table.expectation(m, 2, 0).unwrap();
                        let var = e2 - BigRational::from_integer(BigInt::from(2)) * &centre * e1 + &centre * &centre;
                        ratio_to_f64(&(var / (&sigma2 * &mm * &mm * &mm)))
                    }
                }
            };
            let limit = limit_of(n, t)?;
            Ok(ReportRow { m, order: Order::Joint(n, t), rescaled, limit, rel_error: error_of(rescaled, limit) })
        })
        .collect::<Result<Vec<_>>>()?;
    let order_list: Vec<Order> = orders.iter().map(|&(n, t)| Order::Joint(n, t)).collect();
    Ok(ConvergenceReport {
        step_set: s.to_compact(),
        class,
        regime: p.regime,
        target: target.to_string(),
        trends: trends(&rows, &order_list, m_list),
        rows,
    })
}

/// Rescaled joint moments of positive area, negative area and endpoint of simple
/// `±1` walks. `Order::Joint(n, t)` rows use the absolute area `A+ + A-`.
pub fn signed_report(m_list: &[usize], orders: &[Order], budget: MemoryBudget) -> Result<ConvergenceReport> {
    check_m_list(m_list)?;
    let s = StepSet::bernoulli();
    let k_max = orders
        .iter()
        .map(|o| match *o {
            Order::Joint(n, _) => n,
            Order::Signed(k, l, _) => k + l,
        })
        .max()
        .unwrap_or(0);
    let t_max = orders
        .iter()
        .map(|o| match *o {
            Order::Joint(_, t) | Order::Signed(_, _, t) => t,
        })
        .max()
        .unwrap_or(0);
    let limits = LimitTables::new(k_max, t_max)?;
    let m_max = *m_list.last().unwrap();
    let table = signed_moment_dp(&s, m_max, k_max, t_max, budget)?;

    let jobs: Vec<(usize, Order)> = m_list.iter().flat_map(|&m| orders.iter().map(move |&o| (m, o))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(m, order)| {
            let (exact, total_order, t, limit) = match order {
                Order::Signed(k, l, t) => (
                    table.expectation(m, k, l, t).unwrap(),
                    k + l,
                    t,
                    limits.moment(LimitKind::WalkSigned, &[k, l, t])?,
                ),
                Order::Joint(n, t) => {
                    let mut acc = BigRational::zero();
                    for i in 0..=n {
                        let c = BigRational::from_integer(binomial(n as u64, i as u64));
                        acc += c * table.expectation(m, i, n - i, t).unwrap();
                    }
                    (acc, n, t, limits.moment(LimitKind::WalkAbs, &[n, t])?)
                }
            };
            let mf = m as f64;
            let rescaled = ratio_to_f64(&exact) / mf.powf(1.5 * total_order as f64 + 0.5 * t as f64);
            let limit = limit.to_f64();
            Ok(ReportRow { m, order, rescaled, limit, rel_error: error_of(rescaled, limit) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        step_set: s.to_compact(),
        class: PathClass::Walk,
        regime: Regime::ZeroDrift,
        target: "WalkSigned".to_string(),
        trends: trends(&rows, orders, m_list),
        rows,
    })
}

/// Stirling numbers for switching between raw and factorial moments.
#[derive(Clone, Debug, PartialEq)]
pub struct StirlingTable {
    /// `second[n][k]`: `x^n = sum_k second[n][k] (x)_k`
    pub second: Vec<Vec<BigInt>>,
    /// `first[n][k]` (signed): `(x)_n = sum_k first[n][k] x^k`
    pub first: Vec<Vec<BigInt>>,
}

pub fn factorial_raw_bridge(n_max: usize) -> StirlingTable {
    let mut second = vec![vec![BigInt::zero(); n_max + 1]; n_max + 1];
    let mut first = second.clone();
    second[0][0] = BigInt::one();
    first[0][0] = BigInt::one();
    for n in 1..=n_max {
        for k in 1..=n {
            second[n][k] = &second[n - 1][k - 1] + BigInt::from(k) * &second[n - 1][k];
            first[n][k] = &first[n - 1][k - 1] - BigInt::from(n - 1) * &first[n - 1][k];
        }
    }
    StirlingTable { second, first }
}

impl StirlingTable {
    /// Raw moments `E[X^n]` from factorial moments `E[(X)_k]`, `k = 0..`.
    pub fn to_raw(&self, factorial: &[BigRational]) -> Vec<BigRational> {
        self.apply(&self.second, factorial)
    }

    /// Factorial moments from raw moments.
    pub fn to_factorial(&self, raw: &[BigRational]) -> Vec<BigRational> {
        self.apply(&self.first, raw)
    }

    fn apply(&self, m: &[Vec<BigInt>], v: &[BigRational]) -> Vec<BigRational> {
        (0..v.len())
            .map(|n| {
                (0..=n).fold(BigRational::zero(), |acc, k| {
                    acc + BigRational::from_integer(m[n][k].clone()) * &v[k]
                })
            })
            .collect()
    }
}
