//! Shared helpers: an independent path enumerator and step-set strategies.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lattice_area::{PathClass, StepSet};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Brute force over all step sequences of length `m`: (area, final altitude) -> weight.
pub fn brute_paths(s: &StepSet, class: PathClass, m: usize) -> BTreeMap<(u64, i64), BigRational> {
    let steps: Vec<(i64, BigRational)> = s.weights().iter().map(|(&k, v)| (k, v.clone())).collect();
    let mut out = BTreeMap::new();
    let total = steps.len().pow(m as u32);
    for code in 0..total {
        let mut c = code;
        let mut h = 0i64;
        let mut area = 0u64;
        let mut w = BigRational::one();
        let mut ok = true;
        for _ in 0..m {
            let (step, sw) = &steps[c % steps.len()];
            c /= steps.len();
            h += step;
            if class.nonnegative() && h < 0 {
                ok = false;
                break;
            }
            area += h.unsigned_abs();
            w *= sw;
        }
        if ok && (!class.ends_at_zero() || h == 0) {
            *out.entry((area, h)).or_insert_with(BigRational::zero) += w;
        }
    }
    out
}

/// Step sets with steps in -3..=3, at least one of each sign, small integer weights.
pub fn step_sets() -> impl Strategy<Value = StepSet> {
    (
        prop::collection::btree_map(1i64..=3, 1i64..=4, 1..=2),
        prop::collection::btree_map(1i64..=3, 1i64..=4, 1..=2),
        prop::option::of(1i64..=3),
    )
        .prop_map(|(neg, pos, zero)| {
            let w = |v: i64| BigRational::from_integer(v.into());
            let mut pairs: Vec<(i64, BigRational)> = neg.into_iter().map(|(k, v)| (-k, w(v))).collect();
            pairs.extend(pos.into_iter().map(|(k, v)| (k, w(v))));
            pairs.extend(zero.map(|v| (0, w(v))));
            StepSet::new(pairs).unwrap()
        })
}

pub fn classes() -> impl Strategy<Value = PathClass> {
    prop::sample::select(PathClass::ALL.to_vec())
}
