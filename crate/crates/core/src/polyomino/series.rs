//! Column-convex polygon counts from the functional equation
//! `F(z,q,u) = W(z,uq) + z S(z,uq) F(z,q,uq) + r_0(z,uq) G_0(z,q) + r_1(z,uq) G_1(z,q)`,
//! solved order by order in `z`.
//!
//! The rational coefficients are expanded as power series in `u` around 0 and every
//! product is truncated at `u`-degree `D`. The `z^n` coefficient of `F` only involves
//! lower orders, and the true `F_n` has `u`-degree below `n`, so all coefficients of
//! degree `n..=D` must cancel; any leftover is reported as an inconsistency.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::model::CCKernelData;
use crate::error::{Error, Result};

/// `(u-degree, q-degree) -> coefficient`
type QuPoly = BTreeMap<(usize, usize), BigInt>;

fn add(p: &mut QuPoly, key: (usize, usize), v: BigInt) {
    if v.is_zero() {
        return;
    }
    let e = p.entry(key).or_insert_with(BigInt::zero);
    *e += v;
    if e.is_zero() {
        p.remove(&key);
    }
}

/// Coefficients `[z^hp q^area u^h] F` for `hp <= hp_max`, keyed `(hp, area, h)`.
pub fn fe_series(hp_max: usize) -> Result<BTreeMap<(u64, u64, u64), BigInt>> {
    let data = CCKernelData::new();
    let d = 2 * hp_max + 2;
    let s = data.s.series(hp_max, d);
    let r0 = data.r0.series(hp_max, d);
    let r1 = data.r1.series(hp_max, d);
    let w = data.w.series(hp_max, d);

    let mut f: Vec<QuPoly> = Vec::with_capacity(hp_max + 1);
    // G_0 and G_1 coefficients by q-degree
    let mut g0: Vec<BTreeMap<usize, BigInt>> = Vec::with_capacity(hp_max + 1);
    let mut g1: Vec<BTreeMap<usize, BigInt>> = Vec::with_capacity(hp_max + 1);

    for n in 0..=hp_max {
        let mut acc = QuPoly::new();
        for k in 0..=d {
            add(&mut acc, (k, k), w[n][k].clone());
        }
        if n >= 1 {
            for m in 0..n {
                let j = n - 1 - m;
                for (k, sv) in s[j].iter().enumerate() {
                    if sv.is_zero() {
                        continue;
                    }
                    for (&(h, a), fv) in &f[m] {
                        if k + h <= d {
                            add(&mut acc, (k + h, k + h + a), sv * fv);
                        }
                    }
                }
            }
        }
        for m in 0..n {
            let j = n - m;
            for (series, g) in [(&r0, &g0), (&r1, &g1)] {
                for (k, rv) in series[j].iter().enumerate() {
                    if rv.is_zero() {
                        continue;
                    }
                    for (&a, gv) in &g[m] {
                        add(&mut acc, (k, k + a), rv * gv);
                    }
                }
            }
        }

        let mut fn_poly = QuPoly::new();
        for ((h, a), v) in acc {
            if h < n {
                fn_poly.insert((h, a), v);
            } else {
                return Err(Error::InternalInconsistency(format!(
                    "functional equation leaves a term u^{h} q^{a} at order z^{n}"
                )));
            }
        }
        let mut g0n = BTreeMap::new();
        let mut g1n = BTreeMap::new();
        for (&(h, a), v) in &fn_poly {
            *g0n.entry(a).or_insert_with(BigInt::zero) += v;
            *g1n.entry(a).or_insert_with(BigInt::zero) += v * h;
        }
        g0.push(g0n);
        g1.push(g1n);
        f.push(fn_poly);
    }

    let mut out = BTreeMap::new();
    for (n, poly) in f.into_iter().enumerate() {
        for ((h, a), v) in poly {
            out.insert((n as u64, a as u64, h as u64), v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perimeter_totals() {
        let t = fe_series(7).unwrap();
        let mut by_hp = vec![BigInt::zero(); 8];
        for (&(hp, _, _), v) in &t {
            by_hp[hp as usize] += v;
        }
        let want: Vec<BigInt> = [0, 0, 1, 2, 7, 28, 122, 558].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(by_hp, want);
    }
}
