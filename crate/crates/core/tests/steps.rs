mod common;

use lattice_area::kernel::structural_constants;
use lattice_area::steps::{characteristics, eval_step_polynomial, eval_step_polynomial_exact, parse_step_set};
use lattice_area::{SpecFormat, StepSet};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

proptest! {
    #[test]
    fn drift_sign_follows_derivative_at_one(s in common::step_sets()) {
        let ch = characteristics(&s);
        let one = BigRational::one();
        let s1 = eval_step_polynomial_exact(&s, &one, 0).unwrap();
        let d1 = eval_step_polynomial_exact(&s, &one, 1).unwrap();
        prop_assert!(s1.is_positive());
        prop_assert_eq!(ch.drift.signum(), d1.signum());
        prop_assert_eq!(ch.drift, d1 / s1);
    }

    #[test]
    fn period_divides_every_difference(s in common::step_sets()) {
        let ch = characteristics(&s);
        let steps: Vec<i64> = s.weights().keys().copied().collect();
        let diffs: Vec<i64> = steps.iter().flat_map(|a| steps.iter().map(move |b| a - b)).collect();
        prop_assert!(diffs.iter().all(|d| d % ch.period as i64 == 0));
        if ch.period == 1 {
            for g in 2..=8i64 {
                prop_assert!(diffs.iter().any(|d| d % g != 0), "all differences divisible by {}", g);
            }
        }
        prop_assert_eq!(ch.aperiodic, ch.period == 1);
    }

    #[test]
    fn derivative_vanishes_at_tau(s in common::step_sets()) {
        let p = structural_constants::<f64>(&s).unwrap();
        let d = eval_step_polynomial(&s, p.tau, 1).unwrap();
        let scale = eval_step_polynomial(&s, p.tau, 0).unwrap() / p.tau;
        prop_assert!(d.abs() <= 1e-10 * scale.max(1.0), "S'(tau) = {}", d);
    }

    #[test]
    fn compact_spec_round_trips(s in common::step_sets()) {
        prop_assert_eq!(parse_step_set(&s.to_compact(), SpecFormat::Compact).unwrap(), s.clone());
        prop_assert_eq!(parse_step_set(&s.to_json(), SpecFormat::Json).unwrap(), s);
    }
}

#[test]
fn named_sets() {
    let b = characteristics(&StepSet::bernoulli());
    assert!(b.drift.is_zero());
    assert_eq!(b.period, 2);
    let neg = parse_step_set("-1:2,0:1,1:1", SpecFormat::Compact).unwrap();
    assert_eq!(characteristics(&neg).drift, BigRational::new((-1).into(), 4.into()));
    assert!(parse_step_set("1:1,2:1", SpecFormat::Compact).is_err());
    assert!(parse_step_set("-1:0,1:1", SpecFormat::Compact).is_err());
}
