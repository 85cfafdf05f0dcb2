mod common;

use lattice_area::enumerate::{bridge_distribution, exact_distribution, moment_dp, moment_dp_f64, signed_moment_dp};
use lattice_area::exact::{binomial, ratio_to_f64};
use lattice_area::{MemoryBudget, PathClass, StepSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

const BUDGET: MemoryBudget = MemoryBudget::DEFAULT;

fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distribution_equals_brute_force(s in common::step_sets(), class in common::classes(), m in 0usize..=6) {
        let d = exact_distribution(&s, class, m, BUDGET).unwrap();
        prop_assert_eq!(d.table, common::brute_paths(&s, class, m));
    }

    #[test]
    fn moment_dp_equals_distribution_moments(s in common::step_sets(), class in common::classes()) {
        let t = moment_dp(&s, class, 12, 3, 2, BUDGET).unwrap();
        for m in 0..=12 {
            let d = exact_distribution(&s, class, m, BUDGET).unwrap();
            for n in 0..=3 {
                for k in 0..=2 {
                    prop_assert_eq!(t.raw_sum(m, n, k), &d.raw_moment(n as u32, k as u32));
                }
            }
        }
    }

    #[test]
    fn float_engine_tracks_exact(s in common::step_sets(), class in common::classes()) {
        let exact = moment_dp(&s, class, 20, 2, 1, BUDGET).unwrap();
        let float = moment_dp_f64(&s, class, 20, 2, 1);
        for m in 0..=20 {
            if exact.total(m).is_zero() {
                continue;
            }
            for (n, k) in [(1, 0), (2, 0), (0, 1)] {
                let e = ratio_to_f64(&exact.expectation(m, n, k).unwrap());
                let f = float.expectation(m, n, k).unwrap();
                prop_assert!((e - f).abs() <= 1e-9 * e.abs().max(1.0), "m={} ({},{}) {} vs {}", m, n, k, e, f);
            }
        }
    }
}

#[test]
fn symmetric_walks_swap_signed_areas() {
    for s in [StepSet::bernoulli(), StepSet::motzkin(), StepSet::unit(&[-2, -1, 1, 2]).unwrap()] {
        let t = signed_moment_dp(&s, 14, 3, 3, BUDGET).unwrap();
        for m in 0..=14 {
            for k in 0..=3 {
                for l in 0..=3 - k {
                    for tt in 0..=3 {
                        let sign = if tt % 2 == 0 { 1 } else { -1 };
                        let a = t.raw_sum(m, k, l, tt);
                        let b = t.raw_sum(m, l, k, tt) * BigRational::from_integer(sign.into());
                        assert_eq!(a, &b, "{} m={m} ({k},{l},{tt})", s.to_compact());
                    }
                }
            }
        }
        let w = moment_dp(&s, PathClass::Walk, 14, 2, 3, BUDGET).unwrap();
        for m in 0..=14 {
            for n in 0..=2 {
                assert!(w.raw_sum(m, n, 1).is_zero() && w.raw_sum(m, n, 3).is_zero());
            }
        }
    }
}

#[test]
fn bernoulli_count_identities() {
    let s = StepSet::bernoulli();
    for m in 0..=12usize {
        let catalan = binomial(2 * m as u64, m as u64) / BigInt::from(m + 1);
        let exc = exact_distribution(&s, PathClass::Excursion, 2 * m, BUDGET).unwrap();
        assert_eq!(exc.total(), int(catalan));
        let mea = exact_distribution(&s, PathClass::Meander, m, BUDGET).unwrap();
        assert_eq!(mea.total(), int(binomial(m as u64, (m / 2) as u64)));
        let bri = bridge_distribution(&s, 2 * m, BUDGET).unwrap();
        assert_eq!(bri.total(), int(binomial(2 * m as u64, m as u64)));
        // the same counts from the independent enumerator
        assert_eq!(common::brute_paths(&s, PathClass::Meander, m).values().sum::<BigRational>(), mea.total());
        if m <= 6 {
            assert_eq!(common::brute_paths(&s, PathClass::Bridge, 2 * m).values().sum::<BigRational>(), bri.total());
        }
    }
}

#[test]
fn bridge_split_matches_absolute_area() {
    let s = StepSet::motzkin();
    for m in 0..=9 {
        let b = bridge_distribution(&s, m, BUDGET).unwrap();
        let d = exact_distribution(&s, PathClass::Bridge, m, BUDGET).unwrap();
        let mut by_area = std::collections::BTreeMap::new();
        for (&(p, n), w) in &b.table {
            *by_area.entry((p + n, 0i64)).or_insert_with(BigRational::zero) += w;
        }
        assert_eq!(by_area, d.table);
    }
}

#[test]
fn excursion_max_area() {
    for s in [StepSet::bernoulli(), StepSet::motzkin(), StepSet::unit(&[-2, -1, 1]).unwrap()] {
        for m in 0..=12 {
            let d = exact_distribution(&s, PathClass::Excursion, m, BUDGET).unwrap();
            let brute = common::brute_paths(&s, PathClass::Excursion, m);
            assert_eq!(d.max_area(), brute.keys().map(|k| k.0).max());
        }
    }
    // Dyck paths of length m reach the tent area m^2/4
    for m in (2..=12).step_by(2) {
        let d = exact_distribution(&StepSet::bernoulli(), PathClass::Excursion, m, BUDGET).unwrap();
        assert_eq!(d.max_area(), Some((m * m / 4) as u64));
    }
}

#[test]
fn memory_budget_is_enforced() {
    let e = moment_dp(&StepSet::bernoulli(), PathClass::Walk, 500, 2, 2, MemoryBudget(1024)).unwrap_err();
    assert!(e.is_resource());
    assert_eq!(e.code(), "enumerate.OutOfMemoryBudget");
}
