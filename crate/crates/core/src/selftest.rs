//! Quick invariant suite over every module, reported as a pass/fail matrix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::MemoryBudget;
use crate::converge::{factorial_raw_bridge, signed_report, Order};
use crate::enumerate::{bridge_distribution, exact_distribution, meander_altitude_counts, moment_dp, PathClass};
use crate::exact::{int, ratio};
use crate::kernel::{boundary_partial_sums, branches_at, open_grid, solve_meander_gf, structural_constants, truncation_bound};
use crate::limits::{cnt_table, dk_dpm_tables, kn_sequence, lpm_labs_tables, qn_sequence, qnt_table, LimitKind, LimitTables};
use crate::polyomino::{cc_brute_oracle, cc_enumerate, cc_structural_constants, fe_series};
use crate::radical::ExactRadical;
use crate::steps::{characteristics, StepSet};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub module: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, &'static str, fn() -> Result<String, String>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", e.code()))
}

fn test_sets() -> Vec<StepSet> {
    vec![StepSet::bernoulli(), StepSet::motzkin(), StepSet::unit(&[-2, -1, 1]).unwrap()]
}

fn brute(s: &StepSet, class: PathClass, m: usize) -> BTreeMap<(u64, i64), BigRational> {
    let steps: Vec<(i64, BigRational)> = s.weights().iter().map(|(&k, v)| (k, v.clone())).collect();
    let mut out = BTreeMap::new();
    let mut stack = vec![(0usize, 0i64, 0u64, BigRational::one())];
    while let Some((len, h, area, w)) = stack.pop() {
        if len == m {
            if !class.ends_at_zero() || h == 0 {
                *out.entry((area, h)).or_insert_with(BigRational::zero) += w;
            }
            continue;
        }
        for (step, sw) in &steps {
            let h2 = h + step;
            if class.nonnegative() && h2 < 0 {
                continue;
            }
            stack.push((len + 1, h2, area + h2.unsigned_abs(), &w * sw));
        }
    }
    out
}

fn steps_characteristics() -> Result<String, String> {
    let b = characteristics(&StepSet::bernoulli());
    ensure(b.drift.is_zero() && b.variance == int(1) && b.period == 2, || format!("{b:?}"))?;
    let m = characteristics(&StepSet::motzkin());
    ensure(m.aperiodic && m.variance == ratio(2, 3), || format!("{m:?}"))?;
    Ok("Bernoulli period 2, Motzkin variance 2/3".into())
}

fn enumerate_oracle() -> Result<String, String> {
    let mut n = 0;
    for s in test_sets() {
        for class in PathClass::ALL {
            for m in 0..=8 {
                let d = lift(exact_distribution(&s, class, m, MemoryBudget::DEFAULT))?;
                ensure(d.table == brute(&s, class, m), || format!("{} {} m={m}", s.to_compact(), class.name()))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} distributions equal brute force"))
}

fn enumerate_moments() -> Result<String, String> {
    for s in test_sets() {
        for class in PathClass::ALL {
            let t = lift(moment_dp(&s, class, 16, 2, 2, MemoryBudget::DEFAULT))?;
            for m in 0..=16 {
                let d = lift(exact_distribution(&s, class, m, MemoryBudget::DEFAULT))?;
                for (n, k) in [(0, 0), (1, 0), (2, 0), (0, 2), (1, 1), (2, 2)] {
                    ensure(*t.raw_sum(m, n, k) == d.raw_moment(n as u32, k as u32), || {
                        format!("{} {} m={m} ({n},{k})", s.to_compact(), class.name())
                    })?;
                }
            }
        }
    }
    Ok("moment DP equals distribution moments for m <= 16".into())
}

fn enumerate_reflection() -> Result<String, String> {
    for s in [StepSet::bernoulli(), StepSet::motzkin()] {
        for m in 1..=14 {
            let d = lift(exact_distribution(&s, PathClass::Walk, m, MemoryBudget::DEFAULT))?;
            for (&(a, h), w) in &d.table {
                ensure(d.table.get(&(a, -h)) == Some(w), || format!("{} m={m} area {a} altitude {h}", s.to_compact()))?;
            }
        }
    }
    Ok("symmetric walks are reflection invariant".into())
}

fn enumerate_bridge_identity() -> Result<String, String> {
    let s = StepSet::bernoulli();
    let g0: Vec<BigRational> = meander_altitude_counts(&s, 20, 0).into_iter().map(|r| r[0].clone()).collect();
    let mut h: Vec<BigRational> = Vec::new();
    for m in 0..=20 {
        let mut v = if m == 0 { BigRational::one() } else { g0[m].clone() };
        for j in 1..=m {
            v += &g0[j] * &h[m - j];
        }
        let b = lift(bridge_distribution(&s, m, MemoryBudget::DEFAULT))?.total();
        ensure(b == v, || format!("m={m}: {b} vs {v}"))?;
        h.push(v);
    }
    Ok("bridges = G0/(2-G0) for m <= 20".into())
}

fn limits_tables() -> Result<String, String> {
    let k = kn_sequence(3);
    let q = qn_sequence(2);
    let c = cnt_table(2, 1);
    let (d, dpm) = dk_dpm_tables(2);
    let (lpm, labs) = lift(lpm_labs_tables(1, 0))?;
    let got = [k.get(&[1]), k.get(&[3]), q.get(&[2]), c.get(&[2, 1]), d.get(&[2]), dpm.get(&[1, 1]), lpm.get(&[1, 0, 0]), labs.get(&[1, 0])];
    let want = [ratio(1, 8), ratio(15, 128), ratio(59, 32), int(60), ratio(7, 32), ratio(1, 32), ratio(1, 2), int(1)];
    ensure(got == want, || format!("{got:?}"))?;
    Ok("K_1, K_3, Q_2, C_21, D_2, D±_11, L±_100, L_10".into())
}

fn limits_identities() -> Result<String, String> {
    let n_max = 12;
    let k = kn_sequence(n_max);
    let q = qn_sequence(n_max);
    let c = cnt_table(n_max, 1);
    let qnt = qnt_table(n_max, 4);
    let mut eight = BigRational::one();
    for n in 1..=n_max as i64 {
        eight *= int(8);
        ensure(c.get(&[n - 1, 1]) == &eight * k.get(&[n]), || format!("C_({},1)", n - 1))?;
        ensure(qnt.get(&[n, 0]) == q.get(&[n]), || format!("Q_({n},0)"))?;
    }
    lift(lpm_labs_tables(6, 4))?;
    Ok("C_(n-1,1) = 8^n K_n, Q_(n,0) = Q_n, walk routes agree".into())
}

fn limits_radicals() -> Result<String, String> {
    let t = lift(LimitTables::new(2, 4))?;
    let bea = lift(t.moment(LimitKind::Bea, &[1]))?;
    ensure(bea == ExactRadical::new(ratio(1, 2), -1, 1), || bea.to_string())?;
    let abs = lift(t.moment(LimitKind::WalkAbs, &[1, 0]))?;
    ensure(abs == ExactRadical::new(ratio(2, 3), 1, -1), || abs.to_string())?;
    let ray = lift(t.moment(LimitKind::Rayleigh, &[2]))?;
    ensure(ray == ExactRadical::rational(int(2)), || ray.to_string())?;
    Ok(format!("E[BEA] = {bea}"))
}

fn kernel_constants() -> Result<String, String> {
    for (s, rho, beta) in [(StepSet::bernoulli(), 0.5, 2f64.sqrt()), (StepSet::motzkin(), 1.0 / 3.0, 3f64.sqrt())] {
        let p = lift(structural_constants::<f64>(&s))?;
        ensure((p.tau - 1.0).abs() < 1e-10 && (p.rho - rho).abs() < 1e-10 && (p.beta - beta).abs() < 1e-10, || {
            format!("{}: {p:?}", s.to_compact())
        })?;
    }
    Ok("(tau, rho, beta) for Bernoulli and Motzkin".into())
}

fn kernel_branches() -> Result<String, String> {
    let s = StepSet::bernoulli();
    let mut worst: f64 = 0.0;
    for z in open_grid(0.0, 0.5, 20) {
        let u1 = lift(branches_at(&s, z))?.u1();
        worst = worst.max((u1 - (1.0 - (1.0 - 4.0 * z * z).sqrt()) / (2.0 * z)).abs());
    }
    ensure(worst < 1e-10, || format!("deviation {worst:e}"))?;
    Ok(format!("Bernoulli u_1 within {worst:.1e}"))
}

fn kernel_solver() -> Result<String, String> {
    let s = StepSet::unit(&[-2, -1, 1]).unwrap();
    let z = 0.1;
    let sol = lift(solve_meander_gf(&s, z, &[]))?;
    let partial = boundary_partial_sums(&s, z, 60);
    for k in 0..2 {
        let diff = (sol.g_values[k] - partial[k]).abs();
        let bound = lift(truncation_bound(&s, z, 60, k))?;
        ensure(diff <= bound + 1e-14 && sol.cross_check_ok, || format!("G_{k}: {diff:e}"))?;
    }
    Ok("determinantal G_k equal DP partial sums at z = 0.1".into())
}

fn polyomino_counts() -> Result<String, String> {
    let cc = lift(cc_enumerate(9, MemoryBudget::DEFAULT))?.by_hp_area();
    let mut fe: BTreeMap<(u64, u64), BigInt> = BTreeMap::new();
    for ((hp, a, _), v) in lift(fe_series(9))? {
        *fe.entry((hp, a)).or_insert_with(BigInt::zero) += v;
    }
    ensure(fe == cc, || "functional equation and column enumeration differ".into())?;
    let b = cc_brute_oracle(8);
    for ((hp, a), v) in &cc {
        if *hp <= b.valid_hp_max() {
            ensure(*v == BigInt::from(b.count(*hp, *a)), || format!("hp={hp} area={a}"))?;
        }
    }
    Ok(format!("hp <= 9 against the functional equation, hp <= {} against brute force", b.valid_hp_max()))
}

fn polyomino_critical_point() -> Result<String, String> {
    let p = lift(cc_structural_constants())?;
    let r2 = 2f64.sqrt();
    ensure((p.rho - (3.0 - 2.0 * r2)).abs() < 1e-10 && (p.tau - (1.0 + r2)).abs() < 1e-10, || format!("{p:?}"))?;
    Ok("(rho, tau) = (3-2 sqrt2, 1+sqrt2)".into())
}

fn converge_stirling() -> Result<String, String> {
    let st = factorial_raw_bridge(3);
    ensure(st.second[3][1..] == [BigInt::from(1), BigInt::from(3), BigInt::from(1)], || format!("{:?}", st.second[3]))?;
    let r = lift(signed_report(&[12], &[Order::Signed(0, 0, 2)], MemoryBudget::DEFAULT))?;
    ensure(r.rows[0].rescaled == 1.0, || format!("{}", r.rows[0].rescaled))?;
    Ok("Stirling row (1,3,1), E[w_m^2]/m = 1".into())
}

const CHECKS: &[Check] = &[
    ("steps", "characteristics", steps_characteristics),
    ("enumerate", "brute-force oracle", enumerate_oracle),
    ("enumerate", "moment DP", enumerate_moments),
    ("enumerate", "reflection symmetry", enumerate_reflection),
    ("enumerate", "bridge identity", enumerate_bridge_identity),
    ("limits", "recursion tables", limits_tables),
    ("limits", "identities", limits_identities),
    ("limits", "exact radicals", limits_radicals),
    ("kernel", "structural constants", kernel_constants),
    ("kernel", "small branches", kernel_branches),
    ("kernel", "determinantal solver", kernel_solver),
    ("polyomino", "counts", polyomino_counts),
    ("polyomino", "critical point", polyomino_critical_point),
    ("converge", "moment bridges", converge_stirling),
];

/// Runs every check (in parallel, reported in a fixed order).
pub fn run_selftest() -> Vec<CheckRow> {
    CHECKS
        .par_iter()
        .map(|&(module, check, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckRow { module, check, passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for row in run_selftest() {
            assert!(row.passed, "{row:?}");
        }
    }
}
