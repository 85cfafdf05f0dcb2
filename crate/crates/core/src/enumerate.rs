//! Exact enumeration of excursions, meanders, bridges and walks by length, area and
//! final altitude.
//!
//! Two kinds of engines live here. The distribution DPs keep the full (altitude, area)
//! table and serve as the reference; the moment DPs only carry, per altitude, the
//! vector of area power sums `sum wt * a^j`, which keeps the state space linear in the
//! length and makes lengths of several hundred steps cheap.
//!
//! The area of a path is the sum of its heights `w_0 + ... + w_m` (with `w_0 = 0`).
//! For bridges and walks the distribution and moment engines use the absolute area
//! `sum |w_i|`; the signed engines split it into positive and negative parts.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::{saturating_product, MemoryBudget};
use crate::error::{Error, Result};
use crate::exact::{binomial_rows, render};
use crate::scalar::Weight;
use crate::steps::StepSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathClass {
    Excursion,
    Meander,
    Bridge,
    Walk,
}

impl PathClass {
    pub const ALL: [PathClass; 4] = [
        PathClass::Excursion,
        PathClass::Meander,
        PathClass::Bridge,
        PathClass::Walk,
    ];

    /// Paths of this class never go below the axis.
    pub fn nonnegative(self) -> bool {
        matches!(self, PathClass::Excursion | PathClass::Meander)
    }

    /// Paths of this class end at altitude 0.
    pub fn ends_at_zero(self) -> bool {
        matches!(self, PathClass::Excursion | PathClass::Bridge)
    }

    pub fn name(self) -> &'static str {
        match self {
            PathClass::Excursion => "excursion",
            PathClass::Meander => "meander",
            PathClass::Bridge => "bridge",
            PathClass::Walk => "walk",
        }
    }

    pub fn admits(self, path: &[i64]) -> bool {
        if self.nonnegative() && path.iter().any(|&h| h < 0) {
            return false;
        }
        !(self.ends_at_zero() && path.last().copied().unwrap_or(0) != 0)
    }
}

impl FromStr for PathClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "excursion" => Ok(PathClass::Excursion),
            "meander" => Ok(PathClass::Meander),
            "bridge" => Ok(PathClass::Bridge),
            "walk" => Ok(PathClass::Walk),
            other => Err(Error::Config(format!("unknown path class {other:?}"))),
        }
    }
}

/// Area of a height sequence in the convention of the given class.
pub fn path_area(class: PathClass, heights: &[i64]) -> u64 {
    if class.nonnegative() {
        heights.iter().map(|&h| h as u64).sum()
    } else {
        heights.iter().map(|h| h.unsigned_abs()).sum()
    }
}

/// Exact joint table `(area, final altitude) -> weight` for one length and class.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaDistribution {
    pub m: usize,
    pub class: PathClass,
    pub table: BTreeMap<(u64, i64), BigRational>,
}

impl AreaDistribution {
    pub fn total(&self) -> BigRational {
        self.table.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// `sum wt * area^n * altitude^t`.
    pub fn raw_moment(&self, n: u32, t: u32) -> BigRational {
        self.weighted_sum(|a, h| num_traits::pow(BigInt::from(a), n as usize) * num_traits::pow(BigInt::from(h), t as usize))
    }

    /// `sum wt * (area)_n` with the falling factorial `(a)_n`.
    pub fn factorial_moment(&self, n: u32) -> BigRational {
        self.weighted_sum(|a, _| (0..n as u64).fold(BigInt::one(), |p, k| p * (BigInt::from(a) - k)))
    }

    /// `sum wt * f(area, altitude)`, accumulating numerators per denominator to avoid a gcd per term.
    fn weighted_sum(&self, f: impl Fn(u64, i64) -> BigInt) -> BigRational {
        let mut by_denom: BTreeMap<&BigInt, BigInt> = BTreeMap::new();
        for (&(a, h), w) in &self.table {
            *by_denom.entry(w.denom()).or_insert_with(BigInt::zero) += w.numer() * f(a, h);
        }
        by_denom
            .into_iter()
            .fold(BigRational::zero(), |acc, (d, num)| acc + BigRational::new(num, d.clone()))
    }

    pub fn max_area(&self) -> Option<u64> {
        self.table.keys().map(|&(a, _)| a).max()
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> std::io::Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            wtr.write_record(["class", "m", "area", "altitude", "weight"])?;
        }
        for (&(a, h), w) in &self.table {
            wtr.write_record([
                self.class.name().to_string(),
                self.m.to_string(),
                a.to_string(),
                h.to_string(),
                render(w),
            ])?;
        }
        wtr.flush()
    }
}

/// Bridges of one length keyed by (positive area, negative area).
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeDistribution {
    pub m: usize,
    pub table: BTreeMap<(u64, u64), BigRational>,
}

impl BridgeDistribution {
    pub fn total(&self) -> BigRational {
        self.table.values().fold(BigRational::zero(), |acc, w| acc + w)
    }
}

/// Per-length raw joint moment sums of area and final altitude.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T> {
    pub class: PathClass,
    pub n_max: usize,
    pub t_max: usize,
    pub rows: Vec<MomentRow<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow<T> {
    pub m: usize,
    pub total: T,
    /// row-major `(n, t)` with stride `t_max + 1`
    pub sums: Vec<T>,
}

impl<T: Weight> MomentTable<T> {
    pub fn total(&self, m: usize) -> &T {
        &self.rows[m].total
    }

    pub fn raw_sum(&self, m: usize, n: usize, t: usize) -> &T {
        assert!(n <= self.n_max && t <= self.t_max, "order ({n},{t}) outside table");
        &self.rows[m].sums[n * (self.t_max + 1) + t]
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn map<U: Weight>(&self, f: impl Fn(usize, &T) -> U) -> MomentTable<U> {
        MomentTable {
            class: self.class,
            n_max: self.n_max,
            t_max: self.t_max,
            rows: self
                .rows
                .iter()
                .map(|r| MomentRow {
                    m: r.m,
                    total: f(r.m, &r.total),
                    sums: r.sums.iter().map(|v| f(r.m, v)).collect(),
                })
                .collect(),
        }
    }
}

impl<T: Weight + std::ops::Div<Output = T>> MomentTable<T> {
    /// `E[area^n * altitude^t]` over the class at length `m`; `None` when no path exists.
    pub fn expectation(&self, m: usize, n: usize, t: usize) -> Option<T> {
        let total = self.total(m);
        if total.is_zero() {
            None
        } else {
            Some(self.raw_sum(m, n, t).clone() / total.clone())
        }
    }
}

impl MomentTable<BigRational> {
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> std::io::Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            wtr.write_record(["class", "m", "n", "t", "raw_sum", "total"])?;
        }
        for row in &self.rows {
            for n in 0..=self.n_max {
                for t in 0..=self.t_max {
                    wtr.write_record([
                        self.class.name().to_string(),
                        row.m.to_string(),
                        n.to_string(),
                        t.to_string(),
                        render(&row.sums[n * (self.t_max + 1) + t]),
                        render(&row.total),
                    ])?;
                }
            }
        }
        wtr.flush()
    }
}

/// Per-length raw joint moment sums of positive area, negative area and final
/// altitude over unconstrained walks.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMomentTable<T> {
    /// joint area order bound: entries exist for `k + l <= order_max`
    pub order_max: usize,
    pub t_max: usize,
    pub rows: Vec<MomentRow<T>>,
}

impl<T: Weight> SignedMomentTable<T> {
    fn index(&self, k: usize, l: usize, t: usize) -> usize {
        assert!(k + l <= self.order_max && t <= self.t_max, "order ({k},{l},{t}) outside table");
        (k * (self.order_max + 1) + l) * (self.t_max + 1) + t
    }

    pub fn raw_sum(&self, m: usize, k: usize, l: usize, t: usize) -> &T {
        &self.rows[m].sums[self.index(k, l, t)]
    }

    pub fn total(&self, m: usize) -> &T {
        &self.rows[m].total
    }
}

impl<T: Weight + std::ops::Div<Output = T>> SignedMomentTable<T> {
    pub fn expectation(&self, m: usize, k: usize, l: usize, t: usize) -> Option<T> {
        let total = self.total(m);
        if total.is_zero() {
            None
        } else {
            Some(self.raw_sum(m, k, l, t).clone() / total.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// shared helpers

struct Layout {
    min_h: i64,
    max_h: i64,
}

impl Layout {
    fn new(s_c: u64, s_d: u64, class: PathClass, m: usize) -> Self {
        let min_h = if class.nonnegative() { 0 } else { -((m as u64 * s_c) as i64) };
        Layout { min_h, max_h: (m as u64 * s_d) as i64 }
    }

    fn len(&self) -> usize {
        (self.max_h - self.min_h + 1) as usize
    }

    fn slot(&self, h: i64) -> usize {
        (h - self.min_h) as usize
    }

    fn height(&self, slot: usize) -> i64 {
        slot as i64 + self.min_h
    }
}

/// Whether a path at height `h` with `remaining` steps left can still end at 0.
fn can_return(h: i64, remaining: usize, c: u64, d: u64) -> bool {
    if h >= 0 {
        h as u64 <= remaining as u64 * c
    } else {
        h.unsigned_abs() <= remaining as u64 * d
    }
}

fn weight_bits(steps: &[(i64, BigInt)]) -> u64 {
    let total: BigInt = steps.iter().map(|(_, w)| w.clone()).sum();
    total.bits().max(1)
}

fn convert_steps<T: Weight>(steps: &[(i64, BigInt)]) -> Vec<(i64, T)> {
    steps.iter().map(|(s, w)| (*s, T::from_bigint(w))).collect()
}

fn unscale(v: &BigInt, scale_pow: &BigInt) -> BigRational {
    BigRational::new(v.clone(), scale_pow.clone())
}

// ---------------------------------------------------------------------------
// full distributions

/// Exact `(area, altitude)` distribution of length-`m` paths of the given class.
pub fn exact_distribution(s: &StepSet, class: PathClass, m: usize, budget: MemoryBudget) -> Result<AreaDistribution> {
    let (steps, scale) = s.integer_scaled();
    let max_area = m as u64 * m as u64 * s.c().max(s.d());
    let heights = Layout::new(s.c(), s.d(), class, m).len() as u64;
    let bits = m as u64 * weight_bits(&steps);
    budget.check(saturating_product(&[2, heights, max_area + 1, BigInt::approx_bytes(bits)]))?;

    let table = distribution_dp::<BigInt>(&convert_steps(&steps), s.c(), s.d(), class, m);
    let denom = num_traits::pow(scale, m);
    Ok(AreaDistribution {
        m,
        class,
        table: table.into_iter().map(|(k, v)| (k, unscale(&v, &denom))).collect(),
    })
}

/// Generic engine behind [`exact_distribution`]; weights are used as given.
pub fn distribution_dp<T: Weight>(steps: &[(i64, T)], c: u64, d: u64, class: PathClass, m: usize) -> BTreeMap<(u64, i64), T> {
    let layout = Layout::new(c, d, class, m);
    let mut layer: Vec<Vec<T>> = vec![Vec::new(); layout.len()];
    layer[layout.slot(0)] = vec![T::one()];
    for i in 0..m {
        let remaining = m - i - 1;
        let mut next: Vec<Vec<T>> = vec![Vec::new(); layout.len()];
        for (slot, areas) in layer.iter().enumerate() {
            if areas.is_empty() {
                continue;
            }
            let h = layout.height(slot);
            for (step, w) in steps {
                let h2 = h + step;
                if (class.nonnegative() && h2 < 0) || h2 < layout.min_h || h2 > layout.max_h {
                    continue;
                }
                if class.ends_at_zero() && !can_return(h2, remaining, c, d) {
                    continue;
                }
                let add = h2.unsigned_abs() as usize;
                let target = &mut next[layout.slot(h2)];
                if target.len() < areas.len() + add {
                    target.resize(areas.len() + add, T::zero());
                }
                for (a, v) in areas.iter().enumerate() {
                    if !v.is_zero() {
                        target[a + add].add_mul(w, v);
                    }
                }
            }
        }
        layer = next;
    }
    let mut out = BTreeMap::new();
    for (slot, areas) in layer.into_iter().enumerate() {
        let h = layout.height(slot);
        if class.ends_at_zero() && h != 0 {
            continue;
        }
        for (a, v) in areas.into_iter().enumerate() {
            if !v.is_zero() {
                out.insert((a as u64, h), v);
            }
        }
    }
    out
}

/// Exact distribution of bridges of length `m` by (positive area, negative area).
pub fn bridge_distribution(s: &StepSet, m: usize, budget: MemoryBudget) -> Result<BridgeDistribution> {
    let (steps, scale) = s.integer_scaled();
    let (c, d) = (s.c(), s.d());
    let area_side = m as u64 * m as u64 * c.max(d) + 1;
    let bits = m as u64 * weight_bits(&steps);
    let heights = Layout::new(c, d, PathClass::Bridge, m).len() as u64;
    // the (a+, a-) support is far sparser than the full square; a quarter is generous
    budget.check(saturating_product(&[heights, area_side, area_side / 4 + 1, BigInt::approx_bytes(bits) + 24]))?;

    let steps: Vec<(i64, BigInt)> = convert_steps(&steps);
    let mut layer: BTreeMap<(i64, u64, u64), BigInt> = BTreeMap::new();
    layer.insert((0, 0, 0), BigInt::one());
    for i in 0..m {
        let remaining = m - i - 1;
        let mut next: BTreeMap<(i64, u64, u64), BigInt> = BTreeMap::new();
        for (&(h, ap, an), v) in &layer {
            for (step, w) in &steps {
                let h2 = h + step;
                if !can_return(h2, remaining, c, d) {
                    continue;
                }
                let key = if h2 >= 0 { (h2, ap + h2 as u64, an) } else { (h2, ap, an + h2.unsigned_abs()) };
                next.entry(key).or_insert_with(BigInt::zero).add_mul(w, v);
            }
        }
        layer = next;
    }
    let denom = num_traits::pow(scale, m);
    let table = layer
        .into_iter()
        .filter(|((h, _, _), _)| *h == 0)
        .map(|((_, ap, an), v)| ((ap, an), unscale(&v, &denom)))
        .collect();
    Ok(BridgeDistribution { m, table })
}

/// Weighted number of meanders of each length `0..=m_max` ending at altitude
/// `0..=max_altitude` (coefficients of the series `G_k(z)`).
pub fn meander_altitude_counts(s: &StepSet, m_max: usize, max_altitude: usize) -> Vec<Vec<BigRational>> {
    let (steps, scale) = s.integer_scaled();
    let layout = Layout::new(s.c(), s.d(), PathClass::Meander, m_max);
    let mut layer = vec![BigInt::zero(); layout.len()];
    layer[0] = BigInt::one();
    let mut out = Vec::with_capacity(m_max + 1);
    let mut denom = BigInt::one();
    for i in 0..=m_max {
        out.push(
            (0..=max_altitude)
                .map(|k| {
                    let v = layer.get(k).cloned().unwrap_or_default();
                    BigRational::new(v, denom.clone())
                })
                .collect(),
        );
        if i == m_max {
            break;
        }
        let mut next = vec![BigInt::zero(); layout.len()];
        for (slot, v) in layer.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (step, w) in &steps {
                let h2 = slot as i64 + step;
                if h2 >= 0 && h2 <= layout.max_h {
                    next[h2 as usize].add_mul(w, v);
                }
            }
        }
        layer = next;
        denom *= &scale;
    }
    out
}

// ---------------------------------------------------------------------------
// moment accumulators

/// Exact moment table for lengths `0..=m_max` and orders `n <= n_max`, `t <= t_max`.
pub fn moment_dp(
    s: &StepSet,
    class: PathClass,
    m_max: usize,
    n_max: usize,
    t_max: usize,
    budget: MemoryBudget,
) -> Result<MomentTable<BigRational>> {
    let (steps, scale) = s.integer_scaled();
    let layout = Layout::new(s.c(), s.d(), class, m_max);
    let area_bits = 64 - (m_max as u64 * m_max as u64 * s.c().max(s.d()) + 1).leading_zeros() as u64;
    let bits = m_max as u64 * weight_bits(&steps) + n_max as u64 * area_bits;
    budget.check(saturating_product(&[
        2,
        layout.len() as u64,
        n_max as u64 + 1,
        BigInt::approx_bytes(bits),
    ]))?;
    let table = moment_dp_with::<BigInt>(&convert_steps(&steps), s.c(), s.d(), class, m_max, n_max, t_max);
    let mut denom = BigInt::one();
    let mut scales = Vec::with_capacity(m_max + 1);
    for _ in 0..=m_max {
        scales.push(denom.clone());
        denom *= &scale;
    }
    Ok(table.map(|m, v| unscale(v, &scales[m])))
}

/// Moment table in `f64`, with steps weighted by their probabilities `s_i / S(1)`.
/// Entries `(0,0)` are then the probability that a random walk lies in the class.
pub fn moment_dp_f64(s: &StepSet, class: PathClass, m_max: usize, n_max: usize, t_max: usize) -> MomentTable<f64> {
    moment_dp_with::<f64>(&s.probabilities(), s.c(), s.d(), class, m_max, n_max, t_max)
}

/// Generic moment engine: for each reachable `(i, h)` it carries `M_j = sum wt * a^j`,
/// updated on a step to `h'` by `M_j <- sum_r C(j,r) M_r h'^(j-r)`.
pub fn moment_dp_with<T: Weight>(
    steps: &[(i64, T)],
    c: u64,
    d: u64,
    class: PathClass,
    m_max: usize,
    n_max: usize,
    t_max: usize,
) -> MomentTable<T> {
    let layout = Layout::new(c, d, class, m_max);
    let width = n_max + 1;
    let binom = binomial_rows(n_max);
    let binom_t: Vec<Vec<T>> = binom.iter().map(|r| r.iter().map(|&b| T::from_u64(b)).collect()).collect();
    let mut layer: Vec<Option<Vec<T>>> = vec![None; layout.len()];
    let mut first = vec![T::zero(); width];
    first[0] = T::one();
    layer[layout.slot(0)] = Some(first);

    let mut rows = Vec::with_capacity(m_max + 1);
    let mut shifted = vec![T::zero(); width];
    for i in 0..=m_max {
        rows.push(extract_row(i, &layer, &layout, class, n_max, t_max));
        if i == m_max {
            break;
        }
        let remaining = m_max - i - 1;
        let mut next: Vec<Option<Vec<T>>> = vec![None; layout.len()];
        for (slot, moments) in layer.iter().enumerate() {
            let Some(moments) = moments else { continue };
            let h = layout.height(slot);
            for (step, w) in steps {
                let h2 = h + step;
                if (class.nonnegative() && h2 < 0) || h2 < layout.min_h || h2 > layout.max_h {
                    continue;
                }
                if class.ends_at_zero() && !can_return(h2, remaining, c, d) {
                    continue;
                }
                binomial_shift(moments, h2.unsigned_abs(), &binom_t, &mut shifted);
                let target = next[layout.slot(h2)].get_or_insert_with(|| vec![T::zero(); width]);
                for (t, v) in target.iter_mut().zip(&shifted) {
                    t.add_mul(w, v);
                }
            }
        }
        layer = next;
    }
    MomentTable { class, n_max, t_max, rows }
}

/// `out_j = sum_r C(j,r) src_r x^(j-r)` (power sums after adding `x` to every area).
fn binomial_shift<T: Weight>(src: &[T], x: u64, binom: &[Vec<T>], out: &mut [T]) {
    let width = src.len();
    let xt = T::from_u64(x);
    let mut powers = Vec::with_capacity(width);
    powers.push(T::one());
    for e in 1..width {
        let p = powers[e - 1].mul_ref(&xt);
        powers.push(p);
    }
    for j in 0..width {
        let mut acc = T::zero();
        for r in 0..=j {
            if src[r].is_zero() {
                continue;
            }
            let coeff = binom[j][r].mul_ref(&powers[j - r]);
            acc.add_mul(&coeff, &src[r]);
        }
        out[j] = acc;
    }
}

fn extract_row<T: Weight>(
    m: usize,
    layer: &[Option<Vec<T>>],
    layout: &Layout,
    class: PathClass,
    n_max: usize,
    t_max: usize,
) -> MomentRow<T> {
    let mut total = T::zero();
    let mut sums = vec![T::zero(); (n_max + 1) * (t_max + 1)];
    for (slot, moments) in layer.iter().enumerate() {
        let Some(moments) = moments else { continue };
        let h = layout.height(slot);
        if class.ends_at_zero() && h != 0 {
            continue;
        }
        total.add_assign_ref(&moments[0]);
        let ht = T::from_i64(h);
        let mut hp = T::one();
        for t in 0..=t_max {
            for n in 0..=n_max {
                sums[n * (t_max + 1) + t].add_mul(&hp, &moments[n]);
            }
            hp = hp.mul_ref(&ht);
        }
    }
    MomentRow { m, total, sums }
}

/// Exact joint moments of (positive area, negative area, final altitude) of walks.
pub fn signed_moment_dp(
    s: &StepSet,
    m_max: usize,
    order_max: usize,
    t_max: usize,
    budget: MemoryBudget,
) -> Result<SignedMomentTable<BigRational>> {
    let (steps, scale) = s.integer_scaled();
    let layout = Layout::new(s.c(), s.d(), PathClass::Walk, m_max);
    let area_bits = 64 - (m_max as u64 * m_max as u64 * s.c().max(s.d()) + 1).leading_zeros() as u64;
    let bits = m_max as u64 * weight_bits(&steps) + order_max as u64 * area_bits;
    let width = ((order_max + 1) * (order_max + 1)) as u64;
    budget.check(saturating_product(&[2, layout.len() as u64, width, BigInt::approx_bytes(bits)]))?;

    let table = signed_moment_dp_with::<BigInt>(&convert_steps(&steps), s.c(), s.d(), m_max, order_max, t_max);
    let mut denom = BigInt::one();
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in table.rows {
        rows.push(MomentRow {
            m: r.m,
            total: unscale(&r.total, &denom),
            sums: r.sums.iter().map(|v| unscale(v, &denom)).collect(),
        });
        denom *= &scale;
    }
    Ok(SignedMomentTable { order_max, t_max, rows })
}

pub fn signed_moment_dp_with<T: Weight>(
    steps: &[(i64, T)],
    c: u64,
    d: u64,
    m_max: usize,
    order_max: usize,
    t_max: usize,
) -> SignedMomentTable<T> {
    let layout = Layout::new(c, d, PathClass::Walk, m_max);
    let side = order_max + 1;
    let binom = binomial_rows(order_max);
    let binom_t: Vec<Vec<T>> = binom.iter().map(|r| r.iter().map(|&b| T::from_u64(b)).collect()).collect();
    let mut layer: Vec<Option<Vec<T>>> = vec![None; layout.len()];
    let mut first = vec![T::zero(); side * side];
    first[0] = T::one();
    layer[layout.slot(0)] = Some(first);

    let mut rows = Vec::with_capacity(m_max + 1);
    let mut shifted = vec![T::zero(); side * side];
    let mut column = vec![T::zero(); side];
    let mut column_out = vec![T::zero(); side];
    for i in 0..=m_max {
        rows.push(extract_signed_row(i, &layer, &layout, order_max, t_max));
        if i == m_max {
            break;
        }
        let mut next: Vec<Option<Vec<T>>> = vec![None; layout.len()];
        for (slot, moments) in layer.iter().enumerate() {
            let Some(moments) = moments else { continue };
            let h = layout.height(slot);
            for (step, w) in steps {
                let h2 = h + step;
                if h2 < layout.min_h || h2 > layout.max_h {
                    continue;
                }
                // only one of A+ / A- grows on each step
                shifted.clone_from(moments);
                if h2 != 0 {
                    let x = h2.unsigned_abs();
                    for fixed in 0..side {
                        for (var, slot_v) in column.iter_mut().enumerate() {
                            let idx = if h2 > 0 { var * side + fixed } else { fixed * side + var };
                            *slot_v = moments[idx].clone();
                        }
                        binomial_shift(&column, x, &binom_t, &mut column_out);
                        for (var, v) in column_out.iter().enumerate() {
                            let idx = if h2 > 0 { var * side + fixed } else { fixed * side + var };
                            shifted[idx] = v.clone();
                        }
                    }
                }
                let target = next[layout.slot(h2)].get_or_insert_with(|| vec![T::zero(); side * side]);
                for (k, l) in (0..side).flat_map(|k| (0..side - k).map(move |l| (k, l))) {
                    target[k * side + l].add_mul(w, &shifted[k * side + l]);
                }
            }
        }
        layer = next;
    }
    SignedMomentTable { order_max, t_max, rows }
}

fn extract_signed_row<T: Weight>(
    m: usize,
    layer: &[Option<Vec<T>>],
    layout: &Layout,
    order_max: usize,
    t_max: usize,
) -> MomentRow<T> {
    let side = order_max + 1;
    let mut total = T::zero();
    let mut sums = vec![T::zero(); side * side * (t_max + 1)];
    for (slot, moments) in layer.iter().enumerate() {
        let Some(moments) = moments else { continue };
        let ht = T::from_i64(layout.height(slot));
        total.add_assign_ref(&moments[0]);
        let mut hp = T::one();
        for t in 0..=t_max {
            for k in 0..side {
                for l in 0..side - k {
                    sums[(k * side + l) * (t_max + 1) + t].add_mul(&hp, &moments[k * side + l]);
                }
            }
            hp = hp.mul_ref(&ht);
        }
    }
    MomentRow { m, total, sums }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::steps::{parse_step_set, SpecFormat};

    fn dist(s: &StepSet, class: PathClass, m: usize) -> Vec<(u64, i64, BigRational)> {
        exact_distribution(s, class, m, MemoryBudget::DEFAULT)
            .unwrap()
            .table
            .into_iter()
            .map(|((a, h), w)| (a, h, w))
            .collect()
    }

    #[test]
    fn dyck_excursion_distributions() {
        let b = StepSet::bernoulli();
        assert_eq!(dist(&b, PathClass::Excursion, 4), vec![(2, 0, int(1)), (4, 0, int(1))]);
        let six = dist(&b, PathClass::Excursion, 6);
        let areas: Vec<_> = six.iter().map(|(a, _, w)| (*a, w.clone())).collect();
        assert_eq!(areas, vec![(3, int(1)), (5, int(2)), (7, int(1)), (9, int(1))]);
        for class in PathClass::ALL {
            assert_eq!(dist(&b, class, 0), vec![(0, 0, int(1))]);
        }
    }

    #[test]
    fn motzkin_count() {
        let d = exact_distribution(&StepSet::motzkin(), PathClass::Excursion, 3, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(d.total(), int(4));
    }

    #[test]
    fn moment_examples() {
        let b = StepSet::bernoulli();
        let t = moment_dp(&b, PathClass::Meander, 3, 1, 1, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(t.raw_sum(2, 1, 0), &int(4));
        assert_eq!(t.total(2), &int(2));
        assert_eq!(t.expectation(3, 0, 1).unwrap(), ratio(5, 3));
        let e = moment_dp(&b, PathClass::Excursion, 6, 1, 0, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(e.expectation(6, 1, 0).unwrap(), ratio(29, 5));
        assert_eq!(e.expectation(5, 1, 0), None);
    }

    #[test]
    fn signed_examples() {
        let b = StepSet::bernoulli();
        let t = signed_moment_dp(&b, 2, 2, 0, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(t.raw_sum(1, 1, 0, 0), &int(1));
        assert_eq!(t.raw_sum(1, 0, 1, 0), &int(1));
        assert_eq!(t.raw_sum(2, 1, 1, 0), &int(0));
        assert_eq!(t.raw_sum(2, 0, 0, 0), &int(4));
    }

    #[test]
    fn bridge_examples() {
        let b = StepSet::bernoulli();
        assert_eq!(bridge_distribution(&b, 2, MemoryBudget::DEFAULT).unwrap().total(), int(2));
        assert_eq!(bridge_distribution(&b, 4, MemoryBudget::DEFAULT).unwrap().total(), int(6));
        let zero = bridge_distribution(&b, 0, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(zero.table.into_iter().collect::<Vec<_>>(), vec![((0, 0), int(1))]);
    }

    #[test]
    fn rational_weights_are_unscaled() {
        let s = parse_step_set("-1:1/2,1:1/2", SpecFormat::Compact).unwrap();
        let d = exact_distribution(&s, PathClass::Excursion, 4, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(d.total(), ratio(2, 16));
        let t = moment_dp(&s, PathClass::Excursion, 4, 1, 0, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(t.total(4), &ratio(1, 8));
        assert_eq!(t.expectation(4, 1, 0).unwrap(), int(3));
    }

    #[test]
    fn float_engine_matches_exact_ratios() {
        let s = StepSet::motzkin();
        let exact = moment_dp(&s, PathClass::Meander, 30, 2, 2, MemoryBudget::DEFAULT).unwrap();
        let float = moment_dp_f64(&s, PathClass::Meander, 30, 2, 2);
        for (n, t) in [(1, 0), (2, 0), (0, 2), (1, 1)] {
            let e = crate::exact::ratio_to_f64(&exact.expectation(30, n, t).unwrap());
            let f = float.expectation(30, n, t).unwrap();
            assert!((e - f).abs() <= 1e-12 * e.abs(), "({n},{t}) {e} vs {f}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = exact_distribution(&StepSet::motzkin(), PathClass::Meander, 200, MemoryBudget(1 << 10));
        assert!(matches!(err, Err(Error::OutOfMemoryBudget { .. })));
        let err = moment_dp(&StepSet::motzkin(), PathClass::Meander, 200, 2, 2, MemoryBudget(100));
        assert!(err.unwrap_err().is_resource());
    }

    #[test]
    fn meander_counts_by_altitude() {
        let counts = meander_altitude_counts(&StepSet::bernoulli(), 4, 2);
        assert_eq!(counts[4], vec![int(2), int(0), int(3)]);
        assert_eq!(counts[3], vec![int(0), int(2), int(0)]);
    }
}
