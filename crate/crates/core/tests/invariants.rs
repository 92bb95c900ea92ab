//! Property-based invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use pbundle::bundles::{atiyah_tensor, sym_decompose};
use pbundle::dynamics::{product_formula, Interval};
use pbundle::nonexist::{run_cascade, CoeffStatus, Rule};
use proptest::prelude::*;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #[test]
    fn sym_dimension(r in 1u32..7, d in 0u32..7) {
        let dec = sym_decompose(r, d).unwrap();
        prop_assert_eq!(dec.total(), binomial((r + d - 1) as u64, d as u64));
        prop_assert!(dec.parts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tensor_symmetric_and_dimension(r in 1u32..9, s in 1u32..9) {
        let a = atiyah_tensor(r, s).unwrap();
        prop_assert_eq!(&a, &atiyah_tensor(s, r).unwrap());
        prop_assert_eq!(a.total(), (r * s) as u64);
    }

    #[test]
    fn product_formula_is_a_max(n in 1i64..1000, den in 1i64..50, d in 1u32..100) {
        let g = Interval::exact(BigRational::new(BigInt::from(n), BigInt::from(den)));
        let out = product_formula(&g, d);
        let dq = BigRational::from_integer(d.into());
        prop_assert!(out.lo >= g.lo && out.lo >= dq);
        prop_assert!(out == g || out == Interval::exact(dq));
    }

    #[test]
    fn sqrt_encloses(n in 0i64..100_000, den in 1i64..1000) {
        let x = BigRational::new(BigInt::from(n), BigInt::from(den));
        let s = Interval::exact(x.clone()).sqrt(30);
        prop_assert!(&s.lo * &s.lo <= x && x <= &s.hi * &s.hi);
    }
}

#[test]
fn zero_statuses_only_grow() {
    for (r, d) in [(1, 4), (2, 3), (3, 4), (4, 5)] {
        let cert = run_cascade(r, d).unwrap();
        let mut zeroed = std::collections::HashSet::new();
        for s in &cert.steps {
            for t in &s.justification {
                if zeroed.contains(&t.v) {
                    assert_eq!(t.status, CoeffStatus::Zero);
                }
            }
            if matches!(s.rule, Rule::ZeroByOmegaRigidity | Rule::ZeroByElimination) {
                assert!(zeroed.insert(s.affected.clone()), "zeroed twice");
            }
        }
    }
}
