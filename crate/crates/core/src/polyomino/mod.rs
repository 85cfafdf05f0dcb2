//! Column-convex polygons counted by half-perimeter, area and height of the last
//! column, built one column at a time.
//!
//! A new column of height `h'` next to a column of height `h` sits at offset `s` with
//! `-h' < s < h` (at least one shared row). It adds `h'` to the area and
//! `1 + max(0, s + h' - h) + max(0, -s)` to the half-perimeter. A first column of
//! height `h` has half-perimeter `h + 1`.

pub mod brute;
pub mod model;
pub mod series;

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{saturating_product, MemoryBudget};
use crate::error::Result;
use crate::exact::{binomial_rows, ratio_to_f64, render};
use crate::limits::{limiting_moment, LimitKind};
use crate::scalar::Weight;

pub use brute::{cc_brute_oracle, BruteCounts};
pub use model::{cc_structural_constants, BiPoly, CCKernelData, CCProfile, RationalFn};
pub use series::fe_series;

/// For a column of height `h` followed by one of height `h2`: `(half-perimeter increment, multiplicity)`.
fn offsets(h: usize, h2: usize) -> Vec<(usize, u64)> {
    let mut by_delta: BTreeMap<usize, u64> = BTreeMap::new();
    for s in (1 - h2 as i64)..(h as i64) {
        let top = (s + h2 as i64 - h as i64).max(0);
        let bottom = (-s).max(0);
        *by_delta.entry((1 + top + bottom) as usize).or_insert(0) += 1;
    }
    by_delta.into_iter().collect()
}

/// Exact counts keyed by `(half_perimeter, area, last_height)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CCCounts {
    pub hp_max: usize,
    pub table: BTreeMap<(u64, u64, u64), BigInt>,
}

impl CCCounts {
    /// Counts marginalised over the last column height.
    pub fn by_hp_area(&self) -> BTreeMap<(u64, u64), BigInt> {
        let mut out = BTreeMap::new();
        for (&(hp, a, _), v) in &self.table {
            *out.entry((hp, a)).or_insert_with(BigInt::zero) += v;
        }
        out
    }

    pub fn total(&self, hp: u64) -> BigInt {
        self.table.range((hp, 0, 0)..(hp + 1, 0, 0)).map(|(_, v)| v).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["hp", "area", "count"])?;
        for ((hp, a), v) in self.by_hp_area() {
            wtr.write_record([hp.to_string(), a.to_string(), v.to_string()])?;
        }
        wtr.flush()
    }
}

/// Column-by-column enumeration of all column-convex polygons with half-perimeter `<= hp_max`.
pub fn cc_enumerate(hp_max: usize, budget: MemoryBudget) -> Result<CCCounts> {
    let area_max = (hp_max / 2) * hp_max.div_ceil(2);
    let bits = 3 * hp_max as u64;
    budget.check(saturating_product(&[
        hp_max as u64 + 1,
        hp_max as u64 + 1,
        area_max as u64 + 1,
        BigInt::approx_bytes(bits),
    ]))?;
    // layer[hp][h] = counts by area
    let mut layer: Vec<Vec<Vec<BigInt>>> = vec![vec![Vec::new(); hp_max + 1]; hp_max + 1];
    for h in 1..hp_max {
        let mut v = vec![BigInt::zero(); h + 1];
        v[h] = BigInt::one();
        layer[h + 1][h] = v;
    }
    for hp in 2..=hp_max {
        for h in 1..hp {
            if layer[hp][h].is_empty() {
                continue;
            }
            let src = std::mem::take(&mut layer[hp][h]);
            for h2 in 1..(h + hp_max).saturating_sub(hp) {
                for (delta, mult) in offsets(h, h2) {
                    let target = hp + delta;
                    if target > hp_max {
                        continue;
                    }
                    let dst = &mut layer[target][h2];
                    if dst.len() < src.len() + h2 {
                        dst.resize(src.len() + h2, BigInt::zero());
                    }
                    let m = BigInt::from(mult);
                    for (a, v) in src.iter().enumerate() {
                        if !v.is_zero() {
                            dst[a + h2] += &m * v;
                        }
                    }
                }
            }
            layer[hp][h] = src;
        }
    }
    let mut table = BTreeMap::new();
    for (hp, row) in layer.into_iter().enumerate() {
        for (h, areas) in row.into_iter().enumerate() {
            for (a, v) in areas.into_iter().enumerate() {
                if !v.is_zero() {
                    table.insert((hp as u64, a as u64, h as u64), v);
                }
            }
        }
    }
    Ok(CCCounts { hp_max, table })
}

/// Raw area power sums per half-perimeter.
#[derive(Clone, Debug, PartialEq)]
pub struct CCMomentTable<T> {
    pub hp_max: usize,
    pub n_max: usize,
    /// `rows[hp][n] = sum over polygons of area^n`; `rows[hp][0]` is the count
    pub rows: Vec<Vec<T>>,
}

impl<T: Weight> CCMomentTable<T> {
    pub fn total(&self, hp: usize) -> &T {
        &self.rows[hp][0]
    }

    pub fn raw_sum(&self, hp: usize, n: usize) -> &T {
        &self.rows[hp][n]
    }
}

impl CCMomentTable<BigInt> {
    pub fn expectation(&self, hp: usize, n: usize) -> Option<BigRational> {
        let t = self.total(hp);
        if t.is_zero() {
            None
        } else {
            Some(BigRational::new(self.raw_sum(hp, n).clone(), t.clone()))
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["hp", "n", "raw_sum", "total"])?;
        for (hp, row) in self.rows.iter().enumerate() {
            if row[0].is_zero() {
                continue;
            }
            for (n, v) in row.iter().enumerate() {
                wtr.write_record([hp.to_string(), n.to_string(), v.to_string(), row[0].to_string()])?;
            }
        }
        wtr.flush()
    }
}

/// Exact area moments of the uniform fixed-half-perimeter ensemble.
pub fn cc_area_moments(hp_max: usize, n_max: usize, budget: MemoryBudget) -> Result<CCMomentTable<BigInt>> {
    let area_bits = 64 - ((hp_max * hp_max) as u64 + 1).leading_zeros() as u64;
    budget.check(saturating_product(&[
        hp_max as u64 + 1,
        hp_max as u64 + 1,
        n_max as u64 + 1,
        BigInt::approx_bytes(3 * hp_max as u64 + n_max as u64 * area_bits),
    ]))?;
    Ok(cc_moment_dp::<BigInt>(hp_max, n_max))
}

/// Generic moment engine: per `(hp, h)` the vector of area power sums.
pub fn cc_moment_dp<T: Weight>(hp_max: usize, n_max: usize) -> CCMomentTable<T> {
    let width = n_max + 1;
    let binom: Vec<Vec<T>> = binomial_rows(n_max)
        .iter()
        .map(|r| r.iter().map(|&b| T::from_u64(b)).collect())
        .collect();
    let mut layer: Vec<Vec<Option<Vec<T>>>> = vec![vec![None; hp_max + 1]; hp_max + 1];
    for h in 1..hp_max {
        let ht = T::from_u64(h as u64);
        let mut v = Vec::with_capacity(width);
        let mut p = T::one();
        for _ in 0..width {
            v.push(p.clone());
            p = p.mul_ref(&ht);
        }
        layer[h + 1][h] = Some(v);
    }
    let mut rows = vec![vec![T::zero(); width]; hp_max + 1];
    let mut shifted = vec![T::zero(); width];
    for hp in 2..=hp_max {
        for h in 1..hp {
            let Some(src) = layer[hp][h].take() else { continue };
            for (r, v) in rows[hp].iter_mut().zip(&src) {
                r.add_assign_ref(v);
            }
            for h2 in 1..(h + hp_max).saturating_sub(hp) {
                shift(&src, h2 as u64, &binom, &mut shifted);
                for (delta, mult) in offsets(h, h2) {
                    let target = hp + delta;
                    if target > hp_max {
                        continue;
                    }
                    let m = T::from_u64(mult);
                    let dst = layer[target][h2].get_or_insert_with(|| vec![T::zero(); width]);
                    for (d, v) in dst.iter_mut().zip(&shifted) {
                        d.add_mul(&m, v);
                    }
                }
            }
        }
    }
    CCMomentTable { hp_max, n_max, rows }
}

fn shift<T: Weight>(src: &[T], x: u64, binom: &[Vec<T>], out: &mut [T]) {
    let xt = T::from_u64(x);
    let mut powers = vec![T::one()];
    for e in 1..src.len() {
        let p = powers[e - 1].mul_ref(&xt);
        powers.push(p);
    }
    for j in 0..src.len() {
        let mut acc = T::zero();
        for r in 0..=j {
            let c = binom[j][r].mul_ref(&powers[j - r]);
            acc.add_mul(&c, &src[r]);
        }
        out[j] = acc;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CCConvergenceRow {
    pub hp: usize,
    /// `E[area]` exactly
    pub mean_area: String,
    /// `beta * E[area] / (sqrt(2) hp^(3/2))`
    pub rescaled: f64,
    pub limit: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CCConvergenceReport {
    pub profile: CCProfile,
    pub rows: Vec<CCConvergenceRow>,
    pub decreasing: bool,
}

/// Rescaled first area moment against the Brownian excursion area mean.
pub fn cc_convergence(hp_list: &[usize], budget: MemoryBudget) -> Result<CCConvergenceReport> {
    let profile = cc_structural_constants()?;
    let hp_max = hp_list.iter().copied().max().unwrap_or(2);
    let table = cc_area_moments(hp_max, 1, budget)?;
    let limit = limiting_moment(LimitKind::Bea, &[1])?.to_f64();
    let rows: Vec<CCConvergenceRow> = hp_list
        .par_iter()
        .map(|&hp| {
            let mean = table.expectation(hp, 1).unwrap_or_default();
            let rescaled = profile.beta * ratio_to_f64(&mean) / (2f64.sqrt() * (hp as f64).powf(1.5));
            CCConvergenceRow {
                hp,
                mean_area: render(&mean),
                rescaled,
                limit,
                rel_error: (rescaled - limit).abs() / limit,
            }
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
    Ok(CCConvergenceReport { profile, rows, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn small_half_perimeters() {
        let c = cc_enumerate(7, MemoryBudget::DEFAULT).unwrap();
        let totals: Vec<i64> = (2..=7).map(|hp| i64::try_from(c.total(hp)).unwrap()).collect();
        assert_eq!(totals, vec![1, 2, 7, 28, 122, 558]);
        let m = cc_area_moments(6, 2, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(m.expectation(2, 1).unwrap(), int(1));
        assert_eq!(m.expectation(3, 1).unwrap(), int(2));
    }

    #[test]
    fn moments_match_counts() {
        let c = cc_enumerate(14, MemoryBudget::DEFAULT).unwrap();
        let m = cc_area_moments(14, 2, MemoryBudget::DEFAULT).unwrap();
        for hp in 2..=14u64 {
            let mut s = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
            for ((h, a), v) in c.by_hp_area() {
                if h == hp {
                    s[0] += &v;
                    s[1] += &v * a;
                    s[2] += &v * a * a;
                }
            }
            for n in 0..3 {
                assert_eq!(m.raw_sum(hp as usize, n), &s[n]);
            }
        }
    }

    #[test]
    fn float_engine() {
        let e = cc_moment_dp::<BigInt>(20, 1);
        let f = cc_moment_dp::<f64>(20, 1);
        let exact = ratio_to_f64(&BigRational::new(e.rows[20][1].clone(), e.rows[20][0].clone()));
        assert!((exact - f.rows[20][1] / f.rows[20][0]).abs() < 1e-12 * exact);
    }
}
