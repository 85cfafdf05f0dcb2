use std::collections::BTreeMap;

use lattice_area::polyomino::{cc_area_moments, cc_brute_oracle, cc_convergence, cc_enumerate, cc_moment_dp, fe_series};
use lattice_area::MemoryBudget;
use num_bigint::BigInt;
use num_traits::Zero;

#[test]
fn column_dp_equals_functional_equation() {
    let cc = cc_enumerate(12, MemoryBudget::DEFAULT).unwrap().by_hp_area();
    let mut fe: BTreeMap<(u64, u64), BigInt> = BTreeMap::new();
    for ((hp, a, _), v) in fe_series(12).unwrap() {
        *fe.entry((hp, a)).or_insert_with(BigInt::zero) += v;
    }
    fe.retain(|_, v| !v.is_zero());
    assert_eq!(fe, cc);
}

#[test]
fn column_dp_equals_brute_force() {
    let brute = cc_brute_oracle(12);
    assert_eq!(brute.valid_hp_max(), 7);
    let cc = cc_enumerate(7, MemoryBudget::DEFAULT).unwrap().by_hp_area();
    let brute_map: BTreeMap<(u64, u64), BigInt> = brute
        .column_convex
        .iter()
        .filter(|(k, _)| k.0 <= 7)
        .map(|(&k, &v)| (k, BigInt::from(v)))
        .collect();
    assert_eq!(cc, brute_map);
}

#[test]
fn moment_engines_agree() {
    let exact = cc_area_moments(16, 2, MemoryBudget::DEFAULT).unwrap();
    let generic = cc_moment_dp::<BigInt>(16, 2);
    for hp in 0..=16 {
        for n in 0..=2 {
            assert_eq!(exact.raw_sum(hp, n), generic.raw_sum(hp, n));
        }
    }
}

#[test]
fn rescaled_mean_error_decreases() {
    let r = cc_convergence(&[20, 40, 60], MemoryBudget::DEFAULT).unwrap();
    assert!(r.decreasing, "{:?}", r.rows);
}
